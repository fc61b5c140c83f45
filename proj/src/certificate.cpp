#include <algorithm>

#include "kcounter/constructions.hpp"

namespace kcounter {

StageError::StageError(std::string stage, const std::string& what)
    : Error("stage " + stage + ": " + what), stage_(std::move(stage)) {}

std::optional<RunViolation> check_certificate(const CounterMachine& m, const RunCertificate& c) {
  if (c.block.size() != c.run.steps.size()) throw Error("certificate: block annotation length differs from the run");
  return validate_run(m, c.word, c.run);
}

std::vector<std::size_t> visits_per_block(const BuchiAutomaton& b, const RunCertificate& c) {
  std::size_t last = c.block.empty() ? 0 : *std::max_element(c.block.begin(), c.block.end());
  std::vector<std::size_t> out(last + 1, 0);
  if (b.is_accepting(c.run.start.state)) ++out[0];
  for (std::size_t i = 0; i < c.run.steps.size(); ++i)
    if (b.is_accepting(c.run.steps[i].result.state)) ++out[c.block.at(i)];
  return out;
}

Run drive_run(const CounterMachine& m, std::span<const std::string> word, const Chooser& choose, std::size_t max_steps) {
  const auto letters = m.encode(word);
  Run run{m.initial_configuration(), {}};
  Configuration cur = run.start;
  std::size_t pos = 0;
  std::vector<std::uint32_t> enabled;
  while (run.steps.size() < max_steps) {
    enabled.clear();
    for (auto idx : m.outgoing(cur.state, kLambda))
      if (guard_matches(m.transition(idx), cur.counters)) enabled.push_back(idx);
    if (pos < letters.size())
      for (auto idx : m.outgoing(cur.state, letters[pos]))
        if (guard_matches(m.transition(idx), cur.counters)) enabled.push_back(idx);
    if (enabled.empty()) {
      if (pos < letters.size())
        throw Error("drive_run: stuck at letter " + std::to_string(pos) + " in state " + m.states()[cur.state]);
      return run;
    }
    std::optional<std::uint32_t> pick;
    if (choose) {
      pick = choose(cur, pos, enabled);
      if (!pick) return run;
    } else if (enabled.size() == 1) {
      pick = enabled[0];
    } else {
      throw Error("drive_run: " + std::to_string(enabled.size()) + " transitions enabled at letter " + std::to_string(pos) +
                  " in state " + m.states()[cur.state]);
    }
    const auto& t = m.transition(*pick);
    if (t.source != cur.state || !guard_matches(t, cur.counters) ||
        (!t.is_lambda() && (pos >= letters.size() || t.input != letters[pos])))
      throw Error("drive_run: chooser picked a disabled transition");
    cur = {t.destination, apply_delta(t, cur.counters)};
    if (!t.is_lambda()) ++pos;
    run.steps.push_back({t.input, *pick, cur});
  }
  throw Error("drive_run: step limit reached");
}

}  // namespace kcounter
