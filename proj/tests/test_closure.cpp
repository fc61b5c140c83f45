#include "doctest.h"

#include <random>

#include "kcounter/closure.hpp"

using namespace kcounter;

namespace {

// counts a's up, b's down (when positive); accepting after a b
BuchiAutomaton counting() {
  MachineBuilder b(1, {"a", "b"});
  StateId p = b.state("p"), q = b.state("q");
  for (StateId s : {p, q}) {
    b.add(s, 0, 0, p, 1, 0);
    b.add(s, 0, 1, p, 1, 0);
    b.add(s, 1, 1, q, 0, 1);
  }
  return BuchiAutomaton(std::move(b).finish(p), {q});
}

BuchiAutomaton all_accepting(std::size_t k, std::vector<std::string> sigma) {
  MachineBuilder b(k, sigma);
  StateId s = b.state("s");
  for (std::size_t l = 0; l < sigma.size(); ++l) b.add(s, static_cast<LetterId>(l), 0, s, 0, 0);
  return BuchiAutomaton(std::move(b).finish(s), {s});
}

Run random_run(const CounterMachine& m, std::mt19937_64& rng, std::size_t len) {
  Run r{m.initial_configuration(), {}};
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<Successor> all;
    for (LetterId l = kLambda; l < static_cast<LetterId>(m.alphabet().size()); ++l)
      for (auto& s : step(m, r.back(), l)) all.push_back(s);
    if (all.empty()) break;
    auto& pick = all[rng() % all.size()];
    r.steps.push_back({m.transition(pick.transition).input, pick.transition, pick.config});
  }
  return r;
}

}  // namespace

TEST_CASE("union lifts preserve validity and visit counts") {
  auto c = counting();
  BuchiAutomaton empty(c.machine, {});
  auto u = buchi_union(c, empty);
  CHECK(u.machine.state_count() == 1 + 2 * c.machine.state_count());
  UnionEmbedding left(c, empty, Side::Left);
  UnionEmbedding right(c, empty, Side::Right);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    auto r = random_run(c.machine, rng, 1 + rng() % 15);
    auto w = consumed_letters(r);
    auto lifted = left.lift(r);
    CHECK_FALSE(validate_run(u.machine, std::span<const LetterId>(w), lifted));
    CHECK(buchi_visit_count(lifted, u) == buchi_visit_count(r, c));
    CHECK(left.project(lifted) == r);
    auto rl = right.lift(r);
    CHECK_FALSE(validate_run(u.machine, std::span<const LetterId>(w), rl));
    CHECK(buchi_visit_count(rl, u) == 0);
    CHECK(right.project(rl) == r);
  }
  CHECK_THROWS_AS(buchi_union(c, all_accepting(0, {"a", "b"})), Error);
  CHECK_THROWS_AS(buchi_union(c, all_accepting(1, {"a"})), Error);
}

TEST_CASE("intersection with a neutral and an empty deterministic automaton") {
  auto c = counting();
  auto d = all_accepting(0, {"a", "b"});
  auto p = intersect_det_buchi(c, d);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto r = random_run(c.machine, rng, 30);
    auto w = consumed_letters(r);
    auto lifted = lift_det_product(p, r);
    CHECK_FALSE(validate_run(p.automaton.machine, std::span<const LetterId>(w), lifted));
    CHECK(project_det_product(p, lifted) == r);
    // every second visit of b's set is caught once d has closed the flag
    CHECK(2 * buchi_visit_count(lifted, p.automaton) + 1 >= buchi_visit_count(r, c));
  }
  BuchiAutomaton nothing(d.machine, {});
  auto q = intersect_det_buchi(c, nothing);
  for (StateId s : q.automaton.accepting) CHECK(q.origin[s].flag == false);
  // accepting states exist but the flag never resets, so no run visits one after the first
  auto r = random_run(c.machine, rng, 40);
  CHECK(buchi_visit_count(lift_det_product(q, r), q.automaton) <= 1);

  MachineBuilder nd(0, {"a", "b"});
  StateId s = nd.state("s");
  nd.add(s, 0, 0, s, 0, 0);
  CHECK_THROWS_AS(intersect_det_buchi(c, BuchiAutomaton(std::move(nd).finish(s), {s})), Error);
}

TEST_CASE("muller to buchi") {
  SUBCASE("single entry on a one-state machine") {
    MachineBuilder b(0, {"a"});
    StateId q = b.state("q");
    b.add(q, 0, 0, q, 0, 0);
    MullerAutomaton m(std::move(b).finish(q), {{q}});
    auto conv = muller_to_buchi(m);
    CHECK(is_real_time(conv.automaton.machine));
    Run r{m.machine.initial_configuration(), {}};
    for (int i = 0; i < 10; ++i) r.steps.push_back({0, 0, {q, {}}});
    auto lifted = lift_muller_run(conv, m, r, 1, 0);
    CHECK_FALSE(validate_run(conv.automaton.machine, consumed_letters(r), lifted));
    CHECK(buchi_visit_count(lifted, conv.automaton) == 10);
  }
  SUBCASE("empty table") {
    MachineBuilder b(0, {"a"});
    StateId q = b.state("q");
    b.add(q, 0, 0, q, 0, 0);
    MullerAutomaton m(std::move(b).finish(q), {});
    CHECK(muller_to_buchi(m).automaton.accepting.empty());
  }
  SUBCASE("two entries, run alternating q0 q1") {
    MachineBuilder b(0, {"a"});
    StateId q0 = b.state("q0"), q1 = b.state("q1");
    b.add(q0, 0, 0, q1, 0, 0);
    b.add(q1, 0, 0, q0, 0, 0);
    MullerAutomaton m(std::move(b).finish(q0), {{q0}, {q0, q1}});
    auto conv = muller_to_buchi(m);
    Run r{m.machine.initial_configuration(), {}};
    for (int i = 0; i < 8; ++i) r.steps.push_back({0, static_cast<std::size_t>(i % 2), {i % 2 == 0 ? q1 : q0, {}}});
    auto lifted = lift_muller_run(conv, m, r, 1, 1);
    CHECK_FALSE(validate_run(conv.automaton.machine, consumed_letters(r), lifted));
    // memory {q1}, then {q0,q1} completes: one reset per two steps
    CHECK(buchi_visit_count(lifted, conv.automaton) == 4);
    CHECK_THROWS_AS(lift_muller_run(conv, m, r, 1, 0), Error);
  }
}

TEST_CASE("synchronous product") {
  auto c = counting();
  auto p = synchronous_product(c.machine, c.machine);
  CHECK(p.machine.k() == 2);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    auto r = random_run(c.machine, rng, 20);
    auto lifted = lift_sync_product(p, r, r);
    CHECK_FALSE(validate_run(p.machine, consumed_letters(r), lifted));
  }
}
