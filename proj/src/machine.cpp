#include "kcounter/machine.hpp"

#include <algorithm>
#include <numeric>

namespace kcounter {

namespace {

std::uint32_t low_mask(std::size_t k) {
  return k >= 32 ? 0xFFFFFFFFU : ((1U << k) - 1U);
}

bool valid_token(std::string_view s) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '#'; });
}

}  // namespace

Transition make_transition(StateId source, LetterId input, std::span<const Guard> guard,
                           StateId destination, std::span<const int> delta) {
  if (guard.size() != delta.size()) throw Error("guard and delta lengths differ");
  if (guard.size() > kMaxCounters) throw Error("too many counters");
  Transition t;
  t.source = source;
  t.input = input;
  t.destination = destination;
  for (std::size_t i = 0; i < guard.size(); ++i) {
    if (guard[i] == Guard::Positive) t.positive |= 1U << i;
    switch (delta[i]) {
      case 1: t.increment |= 1U << i; break;
      case -1: t.decrement |= 1U << i; break;
      case 0: break;
      default: throw Error("delta entries must be in {-1, 0, +1}");
    }
  }
  return t;
}

CounterMachine::CounterMachine(std::size_t k, std::vector<std::string> alphabet,
                               std::vector<std::string> states, StateId initial,
                               std::vector<Transition> transitions)
    : k_(k),
      alphabet_(std::move(alphabet)),
      states_(std::move(states)),
      initial_(initial),
      transitions_(std::move(transitions)) {
  if (k_ > kMaxCounters) throw Error("counter arity " + std::to_string(k_) + " exceeds " + std::to_string(kMaxCounters));
  if (states_.empty()) throw Error("machine needs at least one state");
  if (initial_ >= states_.size()) throw Error("initial state out of range");
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    const auto& a = alphabet_[i];
    if (a == kLambdaToken) throw Error("lambda token '-' cannot be a letter");
    if (!valid_token(a)) throw Error("invalid letter token '" + a + "'");
    if (!letter_index_.emplace(a, static_cast<LetterId>(i)).second) throw Error("duplicate letter '" + a + "'");
  }
  state_index_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (!valid_token(states_[i])) throw Error("invalid state name '" + states_[i] + "'");
    if (!state_index_.emplace(states_[i], static_cast<StateId>(i)).second)
      throw Error("duplicate state '" + states_[i] + "'");
  }
  const std::uint32_t mask = low_mask(k_);
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const auto& t = transitions_[i];
    const std::string where = "transition " + std::to_string(i) + ": ";
    if (t.source >= states_.size() || t.destination >= states_.size()) throw Error(where + "state out of range");
    if (t.input < kLambda || t.input >= static_cast<LetterId>(alphabet_.size())) throw Error(where + "input out of range");
    if ((t.positive | t.increment | t.decrement) & ~mask) throw Error(where + "guard/delta wider than k");
    if (t.increment & t.decrement) throw Error(where + "counter both incremented and decremented");
    if (t.decrement & ~t.positive) throw Error(where + "decrement on a counter tested for zero");
  }
  build_index();
}

void CounterMachine::build_index() {
  const std::size_t slots = alphabet_.size() + 1;
  offsets_.assign(states_.size() * slots + 1, 0);
  for (const auto& t : transitions_) ++offsets_[t.source * slots + static_cast<std::size_t>(t.input + 1) + 1];
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  order_.resize(transitions_.size());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const auto& t = transitions_[i];
    order_[fill[t.source * slots + static_cast<std::size_t>(t.input + 1)]++] = static_cast<std::uint32_t>(i);
  }
}

LetterId CounterMachine::letter_id(std::string_view token) const {
  if (token == kLambdaToken) return kLambda;
  auto it = letter_index_.find(std::string(token));
  return it == letter_index_.end() ? kForeign : it->second;
}

const std::string& CounterMachine::letter_name(LetterId id) const {
  static const std::string lambda(kLambdaToken);
  static const std::string foreign("?");
  if (id == kLambda) return lambda;
  if (id < 0 || id >= static_cast<LetterId>(alphabet_.size())) return foreign;
  return alphabet_[static_cast<std::size_t>(id)];
}

std::optional<StateId> CounterMachine::state_id(std::string_view name) const {
  auto it = state_index_.find(std::string(name));
  if (it == state_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<LetterId> CounterMachine::encode(std::span<const std::string> word) const {
  std::vector<LetterId> out;
  out.reserve(word.size());
  for (const auto& w : word) {
    LetterId id = letter_id(w);
    out.push_back(id == kLambda ? kForeign : id);
  }
  return out;
}

std::span<const std::uint32_t> CounterMachine::outgoing(StateId state, LetterId input) const {
  if (state >= states_.size() || input < kLambda || input >= static_cast<LetterId>(alphabet_.size())) return {};
  const std::size_t slot = state * (alphabet_.size() + 1) + static_cast<std::size_t>(input + 1);
  return {order_.data() + offsets_[slot], order_.data() + offsets_[slot + 1]};
}

std::span<const std::uint32_t> CounterMachine::outgoing(StateId state) const {
  if (state >= states_.size()) return {};
  const std::size_t slots = alphabet_.size() + 1;
  return {order_.data() + offsets_[state * slots], order_.data() + offsets_[(state + 1) * slots]};
}

BuchiAutomaton::BuchiAutomaton(CounterMachine m, std::vector<StateId> accepting_states)
    : machine(std::move(m)), accepting(std::move(accepting_states)) {
  std::sort(accepting.begin(), accepting.end());
  accepting.erase(std::unique(accepting.begin(), accepting.end()), accepting.end());
  mask_.assign(machine.state_count(), false);
  for (StateId s : accepting) {
    if (s >= machine.state_count()) throw Error("accepting state out of range");
    mask_[s] = true;
  }
}

bool BuchiAutomaton::is_accepting(StateId s) const { return s < mask_.size() && mask_[s]; }

MullerAutomaton::MullerAutomaton(CounterMachine m, std::vector<std::vector<StateId>> entries)
    : machine(std::move(m)), table(std::move(entries)) {
  for (auto& e : table) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    for (StateId s : e)
      if (s >= machine.state_count()) throw Error("table state out of range");
  }
}

MachineBuilder::MachineBuilder(std::size_t k, std::vector<std::string> alphabet)
    : k_(k), alphabet_(std::move(alphabet)) {}

StateId MachineBuilder::state(const std::string& name) {
  auto [it, fresh] = index_.emplace(name, static_cast<StateId>(names_.size()));
  if (fresh) names_.push_back(name);
  return it->second;
}

LetterId MachineBuilder::letter(std::string_view token) const {
  if (token == kLambdaToken) return kLambda;
  auto it = std::find(alphabet_.begin(), alphabet_.end(), token);
  if (it == alphabet_.end()) throw Error("letter '" + std::string(token) + "' not in alphabet");
  return static_cast<LetterId>(it - alphabet_.begin());
}

void MachineBuilder::add(StateId source, LetterId input, std::uint32_t positive, StateId destination,
                         std::uint32_t increment, std::uint32_t decrement) {
  transitions_.push_back({source, input, positive, destination, increment, decrement});
}

void MachineBuilder::reserve(std::size_t states, std::size_t transitions) {
  names_.reserve(states);
  index_.reserve(states);
  transitions_.reserve(transitions);
}

CounterMachine MachineBuilder::finish(StateId initial) && {
  return CounterMachine(k_, std::move(alphabet_), std::move(names_), initial, std::move(transitions_));
}

bool guard_matches(const Transition& t, std::span<const Counter> counters) {
  for (std::size_t i = 0; i < counters.size(); ++i) {
    const bool pos = counters[i] > 0;
    if (pos != (((t.positive >> i) & 1U) != 0)) return false;
  }
  return true;
}

std::vector<Counter> apply_delta(const Transition& t, std::span<const Counter> counters) {
  std::vector<Counter> out(counters.begin(), counters.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += t.delta(i);
  return out;
}

std::vector<Successor> step(const CounterMachine& machine, const Configuration& config, LetterId input) {
  if (config.counters.size() != machine.k())
    throw Error("configuration has " + std::to_string(config.counters.size()) + " counters, machine has " +
                std::to_string(machine.k()));
  std::vector<Successor> out;
  for (std::uint32_t idx : machine.outgoing(config.state, input)) {
    const auto& t = machine.transition(idx);
    if (!guard_matches(t, config.counters)) continue;
    out.push_back({idx, {t.destination, apply_delta(t, config.counters)}});
  }
  return out;
}

std::string_view to_string(ViolationReason r) {
  switch (r) {
    case ViolationReason::Index: return "index";
    case ViolationReason::Source: return "source";
    case ViolationReason::Input: return "input";
    case ViolationReason::Guard: return "guard";
    case ViolationReason::Delta: return "delta";
    case ViolationReason::Destination: return "destination";
    case ViolationReason::NegativeCounter: return "negative-counter";
    case ViolationReason::Arity: return "arity";
    case ViolationReason::Projection: return "projection";
    case ViolationReason::Start: return "start";
  }
  return "unknown";
}

std::optional<RunViolation> validate_run(const CounterMachine& machine, std::span<const LetterId> word,
                                         const Run& run) {
  if (run.start.counters.size() != machine.k()) return RunViolation{0, ViolationReason::Arity};
  if (run.start != machine.initial_configuration()) return RunViolation{0, ViolationReason::Start};
  const Configuration* prev = &run.start;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    const std::size_t n = i + 1;
    const auto& s = run.steps[i];
    if (s.transition >= machine.transitions().size()) return RunViolation{n, ViolationReason::Index};
    const auto& t = machine.transition(s.transition);
    if (s.result.counters.size() != machine.k()) return RunViolation{n, ViolationReason::Arity};
    if (std::any_of(s.result.counters.begin(), s.result.counters.end(), [](Counter c) { return c < 0; }))
      return RunViolation{n, ViolationReason::NegativeCounter};
    if (t.source != prev->state) return RunViolation{n, ViolationReason::Source};
    if (s.consumed != t.input) return RunViolation{n, ViolationReason::Input};
    if (!guard_matches(t, prev->counters)) return RunViolation{n, ViolationReason::Guard};
    if (s.result.state != t.destination) return RunViolation{n, ViolationReason::Destination};
    for (std::size_t c = 0; c < machine.k(); ++c)
      if (s.result.counters[c] != prev->counters[c] + t.delta(c)) return RunViolation{n, ViolationReason::Delta};
    if (s.consumed != kLambda) {
      if (pos >= word.size() || word[pos] != s.consumed) return RunViolation{n, ViolationReason::Projection};
      ++pos;
    }
    prev = &s.result;
  }
  if (pos != word.size()) return RunViolation{0, ViolationReason::Projection};
  return std::nullopt;
}

std::optional<RunViolation> validate_run(const CounterMachine& machine, const Word& word, const Run& run) {
  auto ids = machine.encode(word);
  return validate_run(machine, std::span<const LetterId>(ids), run);
}

bool is_real_time(const CounterMachine& machine) {
  return std::none_of(machine.transitions().begin(), machine.transitions().end(),
                      [](const Transition& t) { return t.is_lambda(); });
}

std::optional<std::size_t> lambda_burst_bound(const CounterMachine& machine) {
  const std::size_t n = machine.state_count();
  // longest[s]: longest lambda path starting at s; colour 0 new, 1 on stack, 2 done
  std::vector<std::size_t> longest(n, 0);
  std::vector<std::uint8_t> colour(n, 0);
  std::size_t best = 0;
  struct Frame {
    StateId state;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (StateId root = 0; root < n; ++root) {
    if (colour[root] != 0) continue;
    stack.push_back({root, 0});
    colour[root] = 1;
    while (!stack.empty()) {
      auto& f = stack.back();
      auto out = machine.outgoing(f.state, kLambda);
      if (f.next < out.size()) {
        StateId d = machine.transition(out[f.next++]).destination;
        if (colour[d] == 1) return std::nullopt;
        if (colour[d] == 0) {
          colour[d] = 1;
          stack.push_back({d, 0});
        }
        continue;
      }
      std::size_t len = 0;
      for (auto idx : out) len = std::max(len, 1 + longest[machine.transition(idx).destination]);
      longest[f.state] = len;
      colour[f.state] = 2;
      best = std::max(best, len);
      stack.pop_back();
    }
  }
  return best;
}

std::size_t buchi_visit_count(const Run& run, std::span<const StateId> accepting) {
  auto in = [&](StateId s) { return std::find(accepting.begin(), accepting.end(), s) != accepting.end(); };
  std::size_t count = in(run.start.state) ? 1 : 0;
  for (const auto& s : run.steps) count += in(s.result.state) ? 1 : 0;
  return count;
}

std::size_t buchi_visit_count(const Run& run, const BuchiAutomaton& automaton) {
  std::size_t count = automaton.is_accepting(run.start.state) ? 1 : 0;
  for (const auto& s : run.steps) count += automaton.is_accepting(s.result.state) ? 1 : 0;
  return count;
}

CounterMachine pad_counters(const CounterMachine& machine, std::size_t new_k) {
  if (new_k < machine.k()) throw Error("pad_counters cannot shrink arity");
  return CounterMachine(new_k, machine.alphabet(), machine.states(), machine.initial(), machine.transitions());
}

BuchiAutomaton pad_counters(const BuchiAutomaton& automaton, std::size_t new_k) {
  return BuchiAutomaton(pad_counters(automaton.machine, new_k), automaton.accepting);
}

CounterMachine extend_alphabet(const CounterMachine& machine, const std::vector<std::string>& alphabet) {
  std::vector<LetterId> remap(machine.alphabet().size());
  for (std::size_t i = 0; i < machine.alphabet().size(); ++i) {
    auto it = std::find(alphabet.begin(), alphabet.end(), machine.alphabet()[i]);
    if (it == alphabet.end()) throw Error("extend_alphabet: letter '" + machine.alphabet()[i] + "' missing");
    remap[i] = static_cast<LetterId>(it - alphabet.begin());
  }
  auto ts = machine.transitions();
  for (auto& t : ts)
    if (t.input != kLambda) t.input = remap[static_cast<std::size_t>(t.input)];
  return CounterMachine(machine.k(), alphabet, machine.states(), machine.initial(), std::move(ts));
}

BuchiAutomaton extend_alphabet(const BuchiAutomaton& automaton, const std::vector<std::string>& alphabet) {
  return BuchiAutomaton(extend_alphabet(automaton.machine, alphabet), automaton.accepting);
}

std::vector<LetterId> consumed_letters(const Run& run) {
  std::vector<LetterId> out;
  for (const auto& s : run.steps)
    if (s.consumed != kLambda) out.push_back(s.consumed);
  return out;
}

}  // namespace kcounter
