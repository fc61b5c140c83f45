#include "doctest.h"

#include <random>

#include "kcounter/machine.hpp"

using namespace kcounter;

namespace {

// (q0, a, [positive], q1, [+1])
CounterMachine one_transition() {
  MachineBuilder b(1, {"a", "b"});
  StateId q0 = b.state("q0");
  StateId q1 = b.state("q1");
  b.add(q0, 0, 0b1, q1, 0b1, 0);
  return std::move(b).finish(q0);
}

// one state, reads a and b with any counter status, also has a lambda increment
CounterMachine loop_machine() {
  MachineBuilder b(1, {"a", "b"});
  StateId q = b.state("q");
  for (LetterId l : {0, 1}) {
    b.add(q, l, 0, q, 0, 0);
    b.add(q, l, 1, q, 0, 0);
  }
  b.add(q, kLambda, 0, q, 1, 0);
  b.add(q, kLambda, 1, q, 1, 0);
  return std::move(b).finish(q);
}

RunStep make_step(const CounterMachine& m, const Configuration& from, std::size_t idx) {
  const auto& t = m.transition(idx);
  return {t.input, idx, {t.destination, apply_delta(t, from.counters)}};
}

}  // namespace

TEST_CASE("step enumerates matching transitions") {
  auto m = one_transition();
  auto succ = step(m, {0, {3}}, 0);
  REQUIRE(succ.size() == 1);
  CHECK(succ[0].transition == 0);
  CHECK(succ[0].config == Configuration{1, {4}});
  CHECK(step(m, {0, {0}}, 0).empty());
  CHECK(step(m, {0, {3}}, kLambda).empty());
  CHECK_THROWS_AS(step(m, {0, {1, 2}}, 0), Error);
}

TEST_CASE("constructor rejects malformed machines") {
  CHECK_THROWS_AS(CounterMachine(1, {"a"}, {"q"}, 1, {}), Error);
  CHECK_THROWS_AS(CounterMachine(1, {"-"}, {"q"}, 0, {}), Error);
  CHECK_THROWS_AS(CounterMachine(1, {"a", "a"}, {"q"}, 0, {}), Error);
  CHECK_THROWS_AS(CounterMachine(1, {"a"}, {"q", "q"}, 0, {}), Error);
  // decrement on a zero-guarded counter
  CHECK_THROWS_AS(CounterMachine(1, {"a"}, {"q"}, 0, {{0, 0, 0, 0, 0, 1}}), Error);
  CHECK_THROWS_AS(CounterMachine(1, {"a"}, {"q"}, 0, {{0, 0, 0b10, 0, 0, 0}}), Error);
  CHECK_THROWS_AS(CounterMachine(33, {"a"}, {"q"}, 0, {}), Error);
}

TEST_CASE("validate_run") {
  auto m = one_transition();
  Run empty{m.initial_configuration(), {}};
  CHECK_FALSE(validate_run(m, Word{}, empty));

  SUBCASE("negative counter at step 2") {
    auto lm = loop_machine();
    Run r{lm.initial_configuration(), {}};
    r.steps.push_back({0, 0, {0, {0}}});
    r.steps.push_back({0, 0, {0, {-1}}});
    auto v = validate_run(lm, Word{"a", "a"}, r);
    REQUIRE(v);
    CHECK(*v == RunViolation{2, ViolationReason::NegativeCounter});
  }

  SUBCASE("aab with an inserted lambda step") {
    auto lm = loop_machine();
    Run r{lm.initial_configuration(), {}};
    auto push = [&](std::size_t idx) { r.steps.push_back(make_step(lm, r.back(), idx)); };
    push(0);  // a, counter 0
    push(4);  // lambda +1
    push(1);  // a, counter positive
    push(3);  // b, counter positive
    CHECK_FALSE(validate_run(lm, Word{"a", "a", "b"}, r));
    auto v = validate_run(lm, Word{"a", "b", "b"}, r);
    REQUIRE(v);
    CHECK(*v == RunViolation{3, ViolationReason::Projection});
    auto short_word = validate_run(lm, Word{"a", "a", "b", "a"}, r);
    REQUIRE(short_word);
    CHECK(short_word->reason == ViolationReason::Projection);
  }

  SUBCASE("specific reasons") {
    Run r{m.initial_configuration(), {{0, 7, {1, {1}}}}};
    CHECK(validate_run(m, Word{"a"}, r)->reason == ViolationReason::Index);
    r.steps[0] = {0, 0, {1, {1}}};
    CHECK(validate_run(m, Word{"a"}, r)->reason == ViolationReason::Guard);
    Run r2{{0, {2}}, {{0, 0, {1, {3}}}}};
    CHECK(validate_run(m, Word{"a"}, r2)->reason == ViolationReason::Start);
    r.steps[0] = {1, 0, {1, {1}}};
    CHECK(validate_run(m, Word{"a"}, r)->reason == ViolationReason::Input);
  }
}

TEST_CASE("is_real_time and lambda_burst_bound") {
  CHECK(is_real_time(CounterMachine(0, {"a"}, {"q"}, 0, {})));
  CHECK(is_real_time(one_transition()));
  CHECK_FALSE(is_real_time(loop_machine()));
  CHECK(lambda_burst_bound(one_transition()) == std::optional<std::size_t>(0));
  CHECK_FALSE(lambda_burst_bound(loop_machine()));

  MachineBuilder b(0, {"a"});
  StateId s0 = b.state("s0"), s1 = b.state("s1"), s2 = b.state("s2"), s3 = b.state("s3");
  b.add(s0, kLambda, 0, s1, 0, 0);
  b.add(s1, kLambda, 0, s2, 0, 0);
  b.add(s0, kLambda, 0, s2, 0, 0);
  b.add(s2, kLambda, 0, s3, 0, 0);
  b.add(s3, 0, 0, s0, 0, 0);
  CHECK(lambda_burst_bound(std::move(b).finish(s0)) == std::optional<std::size_t>(3));
}

TEST_CASE("buchi_visit_count") {
  MachineBuilder b(0, {"a"});
  StateId q0 = b.state("q0"), q1 = b.state("q1");
  b.add(q0, 0, 0, q1, 0, 0);
  b.add(q1, 0, 0, q0, 0, 0);
  BuchiAutomaton ba(std::move(b).finish(q0), {q0});
  Run r{ba.machine.initial_configuration(), {}};
  CHECK(buchi_visit_count(r, ba) == 1);
  for (int i = 0; i < 6; ++i) r.steps.push_back(make_step(ba.machine, r.back(), static_cast<std::size_t>(i % 2)));
  CHECK(buchi_visit_count(r, ba) == 4);
  BuchiAutomaton none(ba.machine, {});
  r.steps.resize(5);
  CHECK(buchi_visit_count(r, none) == 0);
}

TEST_CASE("random runs validate iff built from step") {
  auto lm = loop_machine();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Run r{lm.initial_configuration(), {}};
    std::vector<LetterId> word;
    for (int i = 0; i < 20; ++i) {
      LetterId in = static_cast<LetterId>(rng() % 3) - 1;
      auto succ = step(lm, r.back(), in);
      REQUIRE(succ.size() == 1);
      for (Counter c : succ[0].config.counters) CHECK(c >= 0);
      r.steps.push_back({in, succ[0].transition, succ[0].config});
      if (in != kLambda) word.push_back(in);
    }
    CHECK_FALSE(validate_run(lm, std::span<const LetterId>(word), r));
    std::size_t pos = rng() % r.steps.size();
    r.steps[pos].result.counters[0] += 1;
    auto v = validate_run(lm, std::span<const LetterId>(word), r);
    REQUIRE(v);
    CHECK(v->step == pos + 1);
  }
}

TEST_CASE("pad_counters and extend_alphabet") {
  auto m = one_transition();
  auto p = pad_counters(m, 3);
  CHECK(p.k() == 3);
  CHECK(step(p, {0, {2, 0, 0}}, 0).size() == 1);
  CHECK(step(p, {0, {2, 1, 0}}, 0).empty());
  auto e = extend_alphabet(m, {"z", "b", "a"});
  CHECK(e.transition(0).input == 2);
  CHECK_THROWS_AS(extend_alphabet(m, {"a"}), Error);
}
