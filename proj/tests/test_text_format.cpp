#include "doctest.h"

#include <sstream>

#include "kcounter/text_format.hpp"

using namespace kcounter;

namespace {

const char* kCanonical =
    "kcounters 2\n"
    "alphabet a b\n"
    "states p q\n"
    "initial p\n"
    "accepting q\n"
    "trans p a 00 p +1 0\n"
    "trans p - 10 q -1 +1\n"
    "trans q b 01 p 0 -1\n";

std::string dump(const BuchiAutomaton& b) {
  std::ostringstream out;
  write_automaton(out, b);
  return out.str();
}

}  // namespace

TEST_CASE("automaton files round-trip byte for byte") {
  std::istringstream in(kCanonical);
  auto b = read_buchi(in);
  CHECK(b.machine.k() == 2);
  CHECK(b.machine.transitions().size() == 3);
  CHECK(b.machine.transition(1).is_lambda());
  CHECK(b.machine.transition(1).delta(0) == -1);
  CHECK(dump(b) == kCanonical);

  std::istringstream noisy(
      "# comment\nkcounters 2   # two\nalphabet a b\nstates p q\ninitial p\naccepting q\n\n"
      "trans p a 00 p 1 0\ntrans p - 10 q -1 1\ntrans q b 01 p 0 -1\n");
  CHECK(dump(read_buchi(noisy)) == kCanonical);
}

TEST_CASE("k = 0 and Muller files") {
  const char* text =
      "kcounters 0\nalphabet a\nstates s t\ninitial s\ntable s\ntable s t\ntrans s a t\ntrans t a s\n";
  std::istringstream in(text);
  auto any = read_automaton(in);
  REQUIRE(std::holds_alternative<MullerAutomaton>(any));
  const auto& m = std::get<MullerAutomaton>(any);
  CHECK(m.table.size() == 2);
  std::ostringstream out;
  write_automaton(out, m);
  CHECK(out.str() == text);
  std::istringstream again(text);
  CHECK_THROWS_AS(read_buchi(again), Error);
}

TEST_CASE("parse errors carry line numbers") {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_automaton(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  const std::string head = "kcounters 1\nalphabet a\nstates p\ninitial p\naccepting p\n";
  CHECK(line_of(head + "trans p a 1 p -1\ntrans p a 2 p 0\n") == 7);
  CHECK(line_of(head + "trans p c 0 p 0\n") == 6);
  CHECK(line_of(head + "trans p a 0 p -1\n") == 6);
  CHECK(line_of(head + "trans p a 0 p 2\n") == 6);
  CHECK(line_of(head + "trans p a 0 r 0\n") == 6);
  CHECK(line_of(head + "trans p a 0 p\n") == 6);
  CHECK(line_of("kcounters x\n") == 1);
  CHECK(line_of("kcounters 1\nbogus\n") == 2);
}

TEST_CASE("run files") {
  std::istringstream in(kCanonical);
  auto b = read_buchi(in);
  Run r;
  r.start = b.machine.initial_configuration();
  r.steps.push_back({0, 0, {0, {1, 0}}});
  r.steps.push_back({kLambda, 1, {1, {0, 1}}});
  r.steps.push_back({1, 2, {0, {0, 0}}});
  CHECK_FALSE(validate_run(b.machine, Word{"a", "b"}, r));
  std::ostringstream out;
  write_run(out, r, b.machine);
  CHECK(out.str() == "run\nstart p 0 0\nstep a 0 p 1 0\nstep - 1 q 0 1\nstep b 2 p 0 0\n");
  std::istringstream back(out.str());
  CHECK(read_run(back, b.machine) == r);
  std::istringstream bad("run\nstart p 0 0\nstep a 0 p 1\n");
  CHECK_THROWS_WITH_AS(read_run(bad, b.machine), "line 3: expected 2 counter values", ParseError);
}

TEST_CASE("word files") {
  std::istringstream in("coded h:2,3\nlasso a b|a\nprefix 12\n");
  auto w = read_word(in);
  REQUIRE(w.chain.size() == 1);
  CHECK(std::get<HCoding>(w.chain[0]).primes == std::vector<std::uint64_t>{2, 3});
  CHECK(w.lasso.spoke == Word{"a", "b"});
  CHECK(w.lasso.cycle == Word{"a"});
  CHECK(w.prefix == 12u);
  CHECK(materialize(w, 12) == h_prefix(w.lasso, {2, 3}, 12));
  std::ostringstream out;
  write_word(out, w);
  CHECK(out.str() == "coded h:2,3\nlasso a b | a\nprefix 12\n");

  std::istringstream plain("lasso | x y\n");
  auto p = read_word(plain);
  CHECK(materialize(p, 5) == Word{"x", "y", "x", "y", "x"});
  std::istringstream nested("coded phi:2\ncoded theta:3\nlasso | a\n");
  CHECK(read_word(nested).chain.size() == 2);
  std::istringstream empty_cycle("lasso a |\n");
  CHECK_THROWS_AS(read_word(empty_cycle), ParseError);
  std::istringstream two_bars("lasso a | b | c\n");
  CHECK_THROWS_AS(read_word(two_bars), ParseError);
}
