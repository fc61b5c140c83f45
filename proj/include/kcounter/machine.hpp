// k-counter machines, Büchi and Muller counter automata, configurations and runs.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kcounter {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using StateId = std::uint32_t;
using LetterId = std::int32_t;
using Counter = std::int64_t;  // signed so that malformed runs can record negative values

/// Input of a transition: a letter index into the machine alphabet, or lambda.
inline constexpr LetterId kLambda = -1;
/// Letter that is not part of a machine's alphabet; never matches.
inline constexpr LetterId kForeign = -2;
/// Reserved token spelling lambda in files.
inline constexpr std::string_view kLambdaToken = "-";
/// Counter arity is bounded by the width of the packed guard/delta masks.
inline constexpr std::size_t kMaxCounters = 32;

using Word = std::vector<std::string>;

enum class Guard : std::uint8_t { Zero, Positive };

/// One element of the transition relation. Guards and deltas are packed as
/// bit masks over counter coordinates.
struct Transition {
  StateId source = 0;
  LetterId input = kLambda;
  std::uint32_t positive = 0;   // bit i set: counter i must be > 0, else = 0
  StateId destination = 0;
  std::uint32_t increment = 0;  // bit i set: counter i += 1
  std::uint32_t decrement = 0;  // bit i set: counter i -= 1

  Guard guard(std::size_t i) const { return (positive >> i) & 1U ? Guard::Positive : Guard::Zero; }
  int delta(std::size_t i) const {
    if ((increment >> i) & 1U) return 1;
    if ((decrement >> i) & 1U) return -1;
    return 0;
  }
  bool is_lambda() const { return input == kLambda; }

  friend bool operator==(const Transition&, const Transition&) = default;
};

Transition make_transition(StateId source, LetterId input, std::span<const Guard> guard,
                           StateId destination, std::span<const int> delta);

struct Configuration {
  StateId state = 0;
  std::vector<Counter> counters;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct RunStep {
  LetterId consumed = kLambda;
  std::size_t transition = 0;
  Configuration result;

  friend bool operator==(const RunStep&, const RunStep&) = default;
};

struct Run {
  Configuration start;
  std::vector<RunStep> steps;

  const Configuration& back() const { return steps.empty() ? start : steps.back().result; }
  friend bool operator==(const Run&, const Run&) = default;
};

/// Immutable k-counter machine. Invariants are checked on construction.
class CounterMachine {
 public:
  CounterMachine() = default;
  CounterMachine(std::size_t k, std::vector<std::string> alphabet, std::vector<std::string> states,
                 StateId initial, std::vector<Transition> transitions);

  std::size_t k() const { return k_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<std::string>& states() const { return states_; }
  std::size_t state_count() const { return states_.size(); }
  StateId initial() const { return initial_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const Transition& transition(std::size_t i) const { return transitions_.at(i); }

  /// Letter index of `token`, or kForeign. "-" maps to kLambda.
  LetterId letter_id(std::string_view token) const;
  const std::string& letter_name(LetterId id) const;
  std::optional<StateId> state_id(std::string_view name) const;
  std::vector<LetterId> encode(std::span<const std::string> word) const;

  /// Transition indices leaving `state` with the given input (letter or lambda).
  std::span<const std::uint32_t> outgoing(StateId state, LetterId input) const;
  /// All transition indices leaving `state`.
  std::span<const std::uint32_t> outgoing(StateId state) const;

  Configuration initial_configuration() const { return {initial_, std::vector<Counter>(k_, 0)}; }

 private:
  void build_index();

  std::size_t k_ = 0;
  std::vector<std::string> alphabet_;
  std::vector<std::string> states_;
  StateId initial_ = 0;
  std::vector<Transition> transitions_;
  std::unordered_map<std::string, LetterId> letter_index_;
  std::unordered_map<std::string, StateId> state_index_;
  // transitions sorted by (source, input + 1); offsets_ has (|alphabet| + 1) slots per state
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> offsets_;
};

struct BuchiAutomaton {
  CounterMachine machine;
  std::vector<StateId> accepting;  // sorted, unique

  BuchiAutomaton() = default;
  BuchiAutomaton(CounterMachine m, std::vector<StateId> accepting_states);
  bool is_accepting(StateId s) const;
  const std::vector<bool>& accepting_mask() const { return mask_; }

 private:
  std::vector<bool> mask_;
};

struct MullerAutomaton {
  CounterMachine machine;
  std::vector<std::vector<StateId>> table;  // each entry sorted, unique

  MullerAutomaton() = default;
  MullerAutomaton(CounterMachine m, std::vector<std::vector<StateId>> entries);
};

/// Incremental construction of a machine with named states.
class MachineBuilder {
 public:
  MachineBuilder(std::size_t k, std::vector<std::string> alphabet);

  StateId state(const std::string& name);  // interned
  LetterId letter(std::string_view token) const;
  void add(StateId source, LetterId input, std::uint32_t positive, StateId destination,
           std::uint32_t increment, std::uint32_t decrement);
  void add(const Transition& t) { transitions_.push_back(t); }
  std::size_t transition_count() const { return transitions_.size(); }
  std::size_t state_count() const { return names_.size(); }
  std::size_t k() const { return k_; }
  void reserve(std::size_t states, std::size_t transitions);

  CounterMachine finish(StateId initial) &&;

 private:
  std::size_t k_;
  std::vector<std::string> alphabet_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, StateId> index_;
  std::vector<Transition> transitions_;
};

// ---- semantics ---------------------------------------------------------------

bool guard_matches(const Transition& t, std::span<const Counter> counters);
/// Applies the delta; the guard must already match.
std::vector<Counter> apply_delta(const Transition& t, std::span<const Counter> counters);

struct Successor {
  std::size_t transition;
  Configuration config;
  friend bool operator==(const Successor&, const Successor&) = default;
};

/// Successors of `config` under `input` (a letter or kLambda). Throws on arity mismatch.
std::vector<Successor> step(const CounterMachine& machine, const Configuration& config,
                            LetterId input);

enum class ViolationReason { Index, Source, Input, Guard, Delta, Destination, NegativeCounter, Arity, Projection, Start };

std::string_view to_string(ViolationReason r);

struct RunViolation {
  std::size_t step;  // 1-based; 0 refers to the start configuration or the projection as a whole
  ViolationReason reason;
  friend bool operator==(const RunViolation&, const RunViolation&) = default;
};

/// nullopt when `run` is a complete run of `machine` on `word` starting in the
/// initial configuration.
std::optional<RunViolation> validate_run(const CounterMachine& machine,
                                         std::span<const LetterId> word, const Run& run);
std::optional<RunViolation> validate_run(const CounterMachine& machine, const Word& word,
                                         const Run& run);

bool is_real_time(const CounterMachine& machine);

/// Longest lambda-only path in the transition graph (guards ignored); nullopt when a
/// lambda cycle exists.
std::optional<std::size_t> lambda_burst_bound(const CounterMachine& machine);

std::size_t buchi_visit_count(const Run& run, const BuchiAutomaton& automaton);
std::size_t buchi_visit_count(const Run& run, std::span<const StateId> accepting);

/// Appends always-zero counters (guard zero, delta 0) up to `new_k`.
CounterMachine pad_counters(const CounterMachine& machine, std::size_t new_k);
BuchiAutomaton pad_counters(const BuchiAutomaton& automaton, std::size_t new_k);

/// Same machine over a larger alphabet; letter indices are remapped.
CounterMachine extend_alphabet(const CounterMachine& machine, const std::vector<std::string>& alphabet);
BuchiAutomaton extend_alphabet(const BuchiAutomaton& automaton, const std::vector<std::string>& alphabet);

/// Letters consumed by a run, in order.
std::vector<LetterId> consumed_letters(const Run& run);

}  // namespace kcounter
