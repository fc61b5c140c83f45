// Reachability over prefixes, lasso membership for finite-state automata and the
// segment scan for the h-complement witnesses.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kcounter/machine.hpp"
#include "kcounter/omega_words.hpp"

namespace kcounter {

/// Set of configurations, each tagged with the largest number of accepting visits
/// along a run reaching it. Rows are kept flat: state followed by k counters.
class Frontier {
 public:
  explicit Frontier(std::size_t k = 0) : k_(k) {}

  std::size_t k() const { return k_; }
  std::size_t size() const { return visits_.size(); }
  bool empty() const { return visits_.empty(); }
  StateId state(std::size_t i) const { return static_cast<StateId>(cells_[i * (k_ + 1)]); }
  std::span<const Counter> counters(std::size_t i) const { return {cells_.data() + i * (k_ + 1) + 1, k_}; }
  std::uint32_t visits(std::size_t i) const { return visits_[i]; }
  Configuration configuration(std::size_t i) const;

  void add(StateId state, std::span<const Counter> counters, std::uint32_t visits);
  /// Sorts rows and merges duplicates, keeping the larger visit count.
  void normalize();
  /// Requires normalize().
  bool contains(const Configuration& c) const;
  std::optional<std::uint32_t> max_visits() const;
  void clear();

 private:
  std::size_t k_;
  std::vector<Counter> cells_;
  std::vector<std::uint32_t> visits_;
};

Frontier initial_frontier(const BuchiAutomaton& b);
/// One letter step from every configuration; result normalized.
Frontier advance(const BuchiAutomaton& b, const Frontier& from, LetterId letter);
/// All configurations reachable with at most `budget` lambda steps; result normalized.
/// Sets `capped` when the closure would exceed `cap` rows.
Frontier lambda_closure(const BuchiAutomaton& b, const Frontier& from, std::size_t budget, std::size_t cap,
                        bool& capped);

struct ReachOptions {
  std::size_t cap = 10'000'000;
  bool keep_frontiers = false;
};

struct PrefixReach {
  std::vector<std::size_t> sizes;                 // per position 0..n
  std::vector<std::optional<std::uint32_t>> max_visits;
  std::vector<Frontier> frontiers;                // filled when requested
  Frontier last;                                  // frontier after the last position reached
  bool inconclusive = false;
  /// Largest i such that the frontier after i letters is nonempty.
  std::size_t consumed = 0;
};

/// Exact position-by-position closure for real-time machines.
PrefixReach exact_prefix_reach(const BuchiAutomaton& b, std::span<const LetterId> prefix, const ReachOptions& opt = {});
PrefixReach exact_prefix_reach(const BuchiAutomaton& b, const Word& prefix, const ReachOptions& opt = {});

struct ExploreEvidence {
  std::optional<std::uint32_t> max_visits;  // over the closure after the last letter
  bool exhausted = true;                    // false when the cap cut the search
  std::vector<std::size_t> sizes;
  std::vector<std::optional<std::uint32_t>> visits_per_position;
  Frontier last;
};

/// Runs with at most `lambda_budget` lambda steps before each letter and after the last.
ExploreEvidence bounded_explore(const BuchiAutomaton& b, std::span<const LetterId> prefix, std::size_t lambda_budget,
                                std::size_t cap = 10'000'000);
ExploreEvidence bounded_explore(const BuchiAutomaton& b, const Word& prefix, std::size_t lambda_budget,
                                std::size_t cap = 10'000'000);

/// Exact Büchi membership of spoke.cycle^omega for automata without counters.
bool nba_lasso_member(const BuchiAutomaton& b, const LassoWord& w);

struct D34Witness {
  ShapeClass cls;
  std::size_t position;  // 0-based index of the confirming letter
  std::uint64_t n;
  std::uint64_t m;
  friend bool operator==(const D34Witness&, const D34Witness&) = default;
};

/// First witness B 0^n A 0^m x (n != m) or A 0^n x B 0^m A (m != Q n) confirmed
/// within spoke + two cycle unrollings.
std::optional<D34Witness> d34_witness_scan(const LassoWord& w, const HCoding& coding);
/// Every witness confirmed in `y`, ordered by position then class.
std::vector<D34Witness> d34_witnesses(std::span<const std::string> y, const HCoding& coding);

}  // namespace kcounter
