// Closure combinators: union, intersection with deterministic Büchi automata,
// Muller to Büchi conversion and synchronous products, each with a run lift.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kcounter/machine.hpp"

namespace kcounter {

/// Union with a fresh initial state. Both operands need the same k and alphabet.
/// The fresh state is accepting iff either initial state is.
BuchiAutomaton buchi_union(const BuchiAutomaton& left, const BuchiAutomaton& right);

enum class Side { Left, Right };

/// Maps runs of one operand into runs of buchi_union(left, right).
class UnionEmbedding {
 public:
  UnionEmbedding(const BuchiAutomaton& left, const BuchiAutomaton& right, Side side);

  StateId state(StateId s) const { return s + state_offset_; }
  Run lift(const Run& run) const;
  /// Inverse of lift; throws if the run leaves this side.
  Run project(const Run& run) const;

 private:
  StateId state_offset_ = 0;
  std::size_t transition_offset_ = 0;
  std::size_t transition_count_ = 0;
  StateId initial_ = 0;
  std::vector<std::size_t> initial_copy_;  // original index -> index of its copy, if it leaves initial
};

/// Product with a complete deterministic 0-counter automaton. Product states are
/// (b state, d state, flag); accepting states are (q, p, 0) with q accepting in b.
struct DetProduct {
  struct Origin {
    StateId b;
    StateId d;
    bool flag;
  };
  BuchiAutomaton automaton;
  std::vector<Origin> origin;                  // per product state
  std::vector<std::uint32_t> b_transition;     // per product transition
};

DetProduct intersect_det_buchi(const BuchiAutomaton& b, const BuchiAutomaton& d);

/// Lifts a run of `product.automaton`'s left factor; d's moves are forced.
/// Throws if d has no move (cannot happen for a complete d).
Run lift_det_product(const DetProduct& product, const Run& b_run);
Run project_det_product(const DetProduct& product, const Run& run);

/// Guess-an-entry plus visited-subset construction.
struct MullerConversion {
  struct Origin {
    StateId state;
    std::int32_t entry;   // -1 before the guess
    std::uint64_t seen;   // subset of the entry, bit i = i-th member
  };
  BuchiAutomaton automaton;
  std::vector<Origin> origin;
  std::vector<std::uint32_t> source_transition;
};

MullerConversion muller_to_buchi(const MullerAutomaton& m);

/// Lifts a run of m, switching to `entry` on step `switch_step` (1-based). Every
/// state from that step on must belong to the entry.
Run lift_muller_run(const MullerConversion& conv, const MullerAutomaton& m, const Run& run,
                    std::size_t switch_step, std::size_t entry);

/// Lock-step product of two real-time machines over the same alphabet. Counters of
/// `first` come first. Only reachable pairs are built.
struct SyncProduct {
  CounterMachine machine;
  std::vector<std::pair<StateId, StateId>> origin;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> source_transitions;
};

/// Throws when more than `state_limit` product states are reachable.
SyncProduct synchronous_product(const CounterMachine& first, const CounterMachine& second,
                                std::size_t state_limit = SIZE_MAX);

/// Combines two runs on the same word into a run of the product.
Run lift_sync_product(const SyncProduct& product, const Run& first, const Run& second);

}  // namespace kcounter
