// Small hand-written automata and random runs shared by the unit and acceptance tests.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "kcounter/machine.hpp"

namespace fixtures {

using namespace kcounter;

inline std::uint32_t dec_if(std::uint32_t guard, std::uint32_t bits) { return guard & bits; }

/// One state over {a}, counter 0 grows by one per letter, every state accepting.
inline BuchiAutomaton a_omega() {
  MachineBuilder b(2, {"a"});
  StateId q = b.state("q0");
  b.add(q, 0, 0b00, q, 0b01, 0);
  b.add(q, 0, 0b01, q, 0b01, 0);
  return BuchiAutomaton(std::move(b).finish(q), {q});
}

/// Two states over {a,b} using both counters; total on every guard.
inline BuchiAutomaton two_counter_pq() {
  MachineBuilder b(2, {"a", "b"});
  StateId p = b.state("p"), q = b.state("q");
  for (std::uint32_t g = 0; g < 4; ++g) {
    b.add(p, 0, g, p, 0b01, 0);
    b.add(p, 1, g, q, 0b10, dec_if(g, 0b01));
    b.add(q, 0, g, p, 0, dec_if(g, 0b10));
    b.add(q, 1, g, q, 0b01, dec_if(g, 0b10));
  }
  return BuchiAutomaton(std::move(b).finish(p), {q});
}

/// Alternates between r and s; counters rise together and counter 0 falls back on the way home.
inline BuchiAutomaton rise_and_fall() {
  MachineBuilder b(2, {"a"});
  StateId r = b.state("r"), s = b.state("s");
  for (std::uint32_t g = 0; g < 4; ++g) {
    b.add(r, 0, g, s, 0b11, 0);
    b.add(s, 0, g, r, 0, dec_if(g, 0b01));
  }
  return BuchiAutomaton(std::move(b).finish(r), {s});
}

/// Random total real-time machine with `states` states over {a,b}.
inline BuchiAutomaton random_machine(std::mt19937_64& rng, std::size_t states = 2) {
  MachineBuilder b(2, {"a", "b"});
  for (std::size_t i = 0; i < states; ++i) b.state("s" + std::to_string(i));
  for (StateId s = 0; s < states; ++s)
    for (LetterId l = 0; l < 2; ++l)
      for (std::uint32_t g = 0; g < 4; ++g) {
        std::uint32_t inc = 0, dec = 0;
        for (std::uint32_t i = 0; i < 2; ++i) {
          auto r = rng() % 3;
          if (r == 1) inc |= 1U << i;
          if (r == 2 && (g >> i & 1)) dec |= 1U << i;
        }
        b.add(s, l, g, static_cast<StateId>(rng() % states), inc, dec);
      }
  std::vector<StateId> acc;
  for (StateId s = 0; s < states; ++s)
    if (rng() % 2 == 0) acc.push_back(s);
  if (acc.empty()) acc.push_back(0);
  return BuchiAutomaton(std::move(b).finish(0), acc);
}

/// Random run of `n` letter steps; stops early if the machine gets stuck.
inline Run random_run(const CounterMachine& m, std::size_t n, std::mt19937_64& rng) {
  Run run{m.initial_configuration(), {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<LetterId, Successor>> options;
    for (LetterId l = 0; l < static_cast<LetterId>(m.alphabet().size()); ++l)
      for (auto& s : step(m, run.back(), l)) options.push_back({l, s});
    if (options.empty()) break;
    const auto& [l, s] = options[rng() % options.size()];
    run.steps.push_back({l, s.transition, s.config});
  }
  return run;
}

/// Random run of exactly `n` steps that visits an accepting state at least once.
inline Run random_accepting_run(const BuchiAutomaton& b, std::size_t n, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Run r = random_run(b.machine, n, rng);
    if (r.steps.size() == n && buchi_visit_count(r, b) > 0) return r;
  }
  throw Error("no accepting run found");
}

}  // namespace fixtures
