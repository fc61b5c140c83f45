#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "kcounter/constructions.hpp"
#include "kcounter/engine.hpp"

using namespace kcounter;

namespace {

const std::vector<std::uint64_t> kSmallPrimes{2, 3};

bool reaches_any(const PrefixReach& r, const std::vector<StateId>& states) {
  for (const auto& f : r.frontiers)
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::find(states.begin(), states.end(), f.state(i)) != states.end()) return true;
  return false;
}

Word concat(std::initializer_list<Word> parts) {
  Word out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Word zeros(std::size_t n) { return Word(n, "0"); }

}  // namespace

TEST_CASE("theta acceptor") {
  auto acc = build_theta_acceptor({"a", "b"}, 2);
  CHECK(is_real_time(acc.machine));
  CHECK(acc.machine.k() == 2);
  LassoWord x({"a"}, {"b", "a"});
  auto c = theta_certificate(acc, x, 2, 4);
  CHECK_FALSE(check_certificate(acc.machine, c));
  CHECK(buchi_visit_count(c.run, acc) >= 4);
  auto reach = exact_prefix_reach(acc, c.word);
  CHECK_FALSE(reach.last.empty());
  CHECK(*reach.max_visits.back() >= 4);

  Word mutated{"a", "E", "E", "b", "E", "E", "E", "a", "E", "E"};
  CHECK(exact_prefix_reach(acc, mutated).consumed <= 7);

  CHECK_THROWS_AS(build_theta_acceptor({"a"}, 0), Error);
  CHECK_THROWS_AS(build_theta_acceptor({"a", "E"}, 2), Error);
}

TEST_CASE("realtime8 pad constant") {
  CHECK(realtime8_constant(1) == 729);
  CHECK(realtime8_constant(2) == 1728);
  auto two = fixtures::two_counter_pq();
  CHECK_THROWS_AS(build_realtime8(pad_counters(two, 3)), Error);
}

TEST_CASE("script automaton at Q = 6") {
  auto a = fixtures::a_omega();
  auto s = build_script_L(a, kSmallPrimes);
  CHECK(s.Q == 6);
  CHECK(s.automaton().machine.k() == 1);
  auto burst = lambda_burst_bound(s.automaton().machine);
  REQUIRE(burst);
  CHECK(*burst <= 5);

  SUBCASE("u_1 is fixed by the finite control") {
    Word bad = concat({{"A"}, zeros(4), {"a"}});
    Word good = concat({{"A"}, zeros(6), {"a"}});
    CHECK(exact_prefix_reach(s.automaton(), bad).last.empty());
    CHECK_FALSE(exact_prefix_reach(s.automaton(), good).last.empty());
  }

  SUBCASE("one block: v_1 = 1, w_1 = 2") {
    std::mt19937_64 rng(1);
    Run r = fixtures::random_run(a.machine, 1, rng);
    auto c = lift_run_script_L(s, r);
    CHECK_FALSE(check_certificate(s.automaton().machine, c));
    auto blocks = script_L_blocks(s, c);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0] == BlockRecord{5, 1, "a", 2, 34});
    // Counter over the u, v, w segment of block 1: 0, up to 1, back to 0.
    std::vector<Counter> profile;
    for (std::size_t i = 0; i < c.run.steps.size(); ++i) {
      auto kind = s.raw_step[s.guarded.b_transition[c.run.steps[i].transition]];
      if (kind == ScriptStep::Z) break;
      Counter v = c.run.steps[i].result.counters[0];
      if (profile.empty() || profile.back() != v) profile.push_back(v);
    }
    CHECK(profile == std::vector<Counter>{0, 1, 0});
  }

  SUBCASE("a^omega: w doubles v") {
    std::mt19937_64 rng(2);
    auto c = lift_run_script_L(s, fixtures::random_run(a.machine, 3, rng));
    CHECK_FALSE(check_certificate(s.automaton().machine, c));
    auto blocks = script_L_blocks(s, c);
    REQUIRE(blocks.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(blocks[i].v == (1u << i));
      CHECK(blocks[i].w == (2u << i));
    }
    CHECK(visits_per_block(s.automaton(), c)[1] >= 1);
  }

  SUBCASE("empty run") {
    auto c = lift_run_script_L(s, Run{a.machine.initial_configuration(), {}});
    CHECK(c.word == h_prefix(LassoWord({}, {"a"}), kSmallPrimes, 7));
    CHECK(project_run_script_L(s, c).steps.empty());
  }

  CHECK_THROWS_AS(build_script_L(a, {2}), Error);
  CHECK_THROWS_AS(build_script_L(a, {2, 4}), Error);
  CHECK_THROWS_AS(build_script_L(a, {2, 3}, 10), Error);
  MachineBuilder lb(2, {"A"});
  StateId q = lb.state("q");
  lb.add(q, 0, 0, q, 0, 0);
  CHECK_THROWS_AS(build_script_L(BuchiAutomaton(std::move(lb).finish(q), {q}), kSmallPrimes), Error);
}

TEST_CASE("script lift round-trips random runs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = fixtures::random_machine(rng);
    auto s = build_script_L(a, kSmallPrimes);
    Run r = fixtures::random_run(a.machine, rng() % 4, rng);
    auto c = lift_run_script_L(s, r);
    REQUIRE_FALSE(check_certificate(s.automaton().machine, c));
    CHECK(project_run_script_L(s, c) == r);
    CHECK(buchi_visit_count(r, a) - (a.is_accepting(r.start.state) ? 1 : 0) <=
          buchi_visit_count(c.run, s.automaton()));
  }
}

TEST_CASE("h complement") {
  auto hc = build_h_complement({"a"}, kSmallPrimes);
  CHECK(is_real_time(hc.automaton.machine));
  CHECK(hc.automaton.machine.k() == 1);
  ReachOptions keep;
  keep.keep_frontiers = true;

  auto genuine = h_prefix(LassoWord({}, {"a"}), kSmallPrimes, 200);
  auto r = exact_prefix_reach(hc.automaton, genuine, keep);
  CHECK_FALSE(r.last.empty());
  CHECK_FALSE(reaches_any(r, hc.sinks[0]));
  CHECK_FALSE(reaches_any(r, hc.sinks[2]));
  CHECK_FALSE(reaches_any(r, hc.sinks[3]));

  Word d3 = concat({{"A"}, zeros(6), {"a", "B"}, zeros(3), {"A"}, zeros(4), {"a"}});
  CHECK(reaches_any(exact_prefix_reach(hc.automaton, d3, keep), hc.sinks[2]));

  LassoWord wrong({}, concat({{"A"}, zeros(6), {"a", "B"}, zeros(6)}));
  auto w = d34_witness_scan(wrong, hc.coding);
  REQUIRE(w);
  CHECK(w->cls == ShapeClass::D4);
  auto unrolled = concat({wrong.cycle, wrong.cycle, wrong.cycle});
  CHECK(reaches_any(exact_prefix_reach(hc.automaton, unrolled, keep), hc.sinks[3]));

  // Finitely many blocks: only the regular part can see it.
  CHECK(nba_lasso_member(hc.regular, LassoWord(concat({{"A"}, zeros(6), {"a", "B"}}), {"0"})));
  CHECK_FALSE(nba_lasso_member(hc.regular, LassoWord(concat({{"A"}, zeros(6), {"a", "B"}, zeros(36)}),
                                                     concat({{"A"}, zeros(3), {"a", "B"}, zeros(2)}))));
  CHECK(nba_lasso_member(hc.regular, LassoWord({"B"}, {"0"})));

  CHECK_THROWS_AS(build_h_complement({"a", "A"}, kSmallPrimes), Error);
}

TEST_CASE("phi wrapper") {
  SUBCASE("real-time input keeps visit counts") {
    auto b = fixtures::rise_and_fall();
    auto w = build_phi_wrapper(b, 2);
    CHECK(is_real_time(w.automaton.machine));
    std::mt19937_64 rng(3);
    Run r = fixtures::random_run(b.machine, 6, rng);
    RunCertificate inner{"inner", r, {}, {}};
    for (auto l : consumed_letters(r)) inner.word.push_back(b.machine.letter_name(l));
    for (std::size_t i = 0; i < r.steps.size(); ++i) inner.block.push_back(i + 1);
    auto c = lift_run_phi(w, inner);
    CHECK_FALSE(check_certificate(w.automaton.machine, c));
    CHECK(c.word == phi_prefix(inner.word, 2, c.word.size()));
    CHECK(buchi_visit_count(c.run, w.automaton) == buchi_visit_count(r, b));
  }

  SUBCASE("a three-step lambda burst lands on the first pads") {
    MachineBuilder mb(1, {"a"});
    StateId s0 = mb.state("s0"), s1 = mb.state("s1"), s2 = mb.state("s2"), s3 = mb.state("s3");
    mb.add(s0, kLambda, 0, s1, 1, 0);
    mb.add(s1, kLambda, 1, s2, 1, 0);
    mb.add(s2, kLambda, 1, s3, 0, 1);
    mb.add(s3, 0, 1, s0, 0, 1);
    BuchiAutomaton b(std::move(mb).finish(s0), {s3});
    CHECK(*lambda_burst_bound(b.machine) == 3);
    auto w = build_phi_wrapper(b, 5);
    auto until_second_letter = [](const Configuration&, std::size_t pos,
                                  std::span<const std::uint32_t> e) -> std::optional<std::uint32_t> {
      if (pos == 2) return std::nullopt;
      return e[0];
    };
    RunCertificate inner{"inner", drive_run(b.machine, Word{"a", "a"}, until_second_letter), {"a", "a"}, {}};
    inner.block.assign(inner.run.steps.size(), 1);
    auto c = lift_run_phi(w, inner);
    CHECK_FALSE(check_certificate(w.automaton.machine, c));
    CHECK(c.word.size() == 12);
    CHECK(w.source_transition[c.run.steps[2].transition] == 2);
    CHECK(w.source_transition[c.run.steps[3].transition] == -1);
    CHECK(buchi_visit_count(c.run, w.automaton) == buchi_visit_count(inner.run, b));
    CHECK_THROWS_AS(build_phi_wrapper(b, 2), Error);
  }

  SUBCASE("script output at L = 5") {
    auto s = build_script_L(fixtures::two_counter_pq(), kSmallPrimes);
    auto w = build_phi_wrapper(s.automaton(), 5);
    CHECK(is_real_time(w.automaton.machine));
    CHECK_THROWS_AS(build_phi_wrapper(s.automaton(), 5, "0"), Error);
  }
}

TEST_CASE("pipeline") {
  PipelineOptions small;
  small.theta_stage = false;
  small.primes = kSmallPrimes;
  auto a = fixtures::two_counter_pq();
  auto p = compose_pipeline(a, small);
  CHECK(p.automaton.machine.k() == 1);
  CHECK(is_real_time(p.automaton.machine));
  REQUIRE(p.chain.size() == 2);
  CHECK(std::holds_alternative<PhiCoding>(p.chain[0]));

  std::mt19937_64 rng(11);
  Run r = fixtures::random_accepting_run(a, 2, rng);
  auto c = lift_pipeline(p, r);
  CHECK_FALSE(check_certificate(p.automaton.machine, c));
  LassoWord x;
  for (auto l : consumed_letters(r)) x.spoke.push_back(a.machine.letter_name(l));
  x.cycle = {"a"};
  CHECK(c.word == coded_prefix(p.chain, x, c.word.size()));
  CHECK(buchi_visit_count(c.run, p.automaton) >= 1);

  SUBCASE("eight primes are refused by the size estimate") {
    try {
      compose_pipeline(fixtures::a_omega());
      FAIL("expected a stage error");
    } catch (const StageError& e) {
      CHECK(e.stage() == "script-l");
    }
  }
  SUBCASE("stage errors carry their stage") {
    PipelineOptions bad = small;
    bad.pad_phi = "a";
    CHECK_THROWS_AS(compose_pipeline(a, bad), StageError);
  }
}

TEST_CASE("wadge sum") {
  MachineBuilder lb(0, {"a"});
  StateId l0 = lb.state("l0");
  lb.add(l0, 0, 0, l0, 0, 0);
  BuchiAutomaton bL(std::move(lb).finish(l0), {l0});

  MachineBuilder pb(1, {"a", "p", "m"});
  StateId p0 = pb.state("p0"), p1 = pb.state("p1");
  pb.add(p0, 0, 0, p1, 1, 0);
  pb.add(p1, 0, 1, p0, 0, 1);
  BuchiAutomaton bLp(std::move(pb).finish(p0), {p1});
  MachineBuilder mb(0, {"a", "p", "m"});
  StateId m0 = mb.state("m0");
  mb.add(m0, 1, 0, m0, 0, 0);
  BuchiAutomaton bComp(std::move(mb).finish(m0), {m0});

  auto w = wadge_sum(bL, bLp, bComp, {"p"}, {"m"});
  CHECK(w.automaton.machine.k() == 1);
  CHECK(w.automaton.machine.alphabet() == std::vector<std::string>{"a", "p", "m"});

  Run stay = drive_run(bL.machine, Word{"a", "a", "a"});
  auto lifted = lift_wadge_stay(w, stay);
  CHECK_FALSE(validate_run(w.automaton.machine, Word{"a", "a", "a"}, lifted));
  CHECK(buchi_visit_count(lifted, w.automaton) == buchi_visit_count(stay, bL));

  Run branch = drive_run(bLp.machine, Word{"a", "a", "a", "a"});
  auto sw = lift_wadge_switch(w, true, {"a"}, "p", branch);
  CHECK_FALSE(validate_run(w.automaton.machine, Word{"a", "p", "a", "a", "a", "a"}, sw));
  // The fresh initial state of the sum is accepting because l0 is.
  CHECK(buchi_visit_count(sw, w.automaton) == buchi_visit_count(branch, bLp) + 1);

  Run comp = drive_run(bComp.machine, Word{"p", "p"});
  auto swm = lift_wadge_switch(w, false, {}, "m", comp);
  CHECK_FALSE(validate_run(w.automaton.machine, Word{"m", "p", "p"}, swm));

  CHECK_THROWS_AS(wadge_sum(bL, bLp, bComp, {"p", "m"}, {}), Error);
  CHECK_THROWS_AS(wadge_sum(bL, bLp, bComp, {"p"}, {"p", "m"}), Error);
  CHECK_THROWS_AS(wadge_sum(bL, bLp, bComp, {"p"}, {"a"}), Error);
}
