#include <algorithm>
#include <deque>
#include <unordered_map>

#include "kcounter/constructions.hpp"

namespace kcounter {

// States (q, c, fresh): c pads read since the last letter, fresh iff a wrapped
// transition fired since the last visit to an accepting copy. Pads either idle
// or carry one lambda transition of b; the letter itself needs c = L.
PhiWrapper build_phi_wrapper(const BuchiAutomaton& b, std::uint64_t L, const std::string& pad) {
  const auto& m = b.machine;
  if (L == 0) throw Error("phi wrapper: L must be at least 1");
  if (std::find(m.alphabet().begin(), m.alphabet().end(), pad) != m.alphabet().end())
    throw Error("phi wrapper: pad letter '" + pad + "' is already in the alphabet");
  auto burst = lambda_burst_bound(m);
  if (!burst) throw Error("phi wrapper: unbounded lambda bursts");
  if (*burst > L) throw Error("phi wrapper: lambda burst " + std::to_string(*burst) + " exceeds L = " + std::to_string(L));
  if (m.k() > 16) throw Error("phi wrapper: too many counters for idle guards");

  auto alphabet = m.alphabet();
  alphabet.push_back(pad);
  MachineBuilder out(m.k(), alphabet);
  const auto F = static_cast<LetterId>(m.alphabet().size());
  PhiWrapper w;
  w.L = L;
  w.pad = pad;

  struct Key {
    StateId q;
    std::uint64_t c;
    bool fresh;
  };
  std::vector<Key> keys;
  std::unordered_map<std::uint64_t, StateId> index;
  std::deque<StateId> todo;
  auto intern = [&](StateId q, std::uint64_t c, bool fresh) {
    const std::uint64_t key = (static_cast<std::uint64_t>(q) * (L + 1) + c) * 2 + fresh;
    auto [it, added] = index.emplace(key, static_cast<StateId>(keys.size()));
    if (added) {
      StateId id = out.state(m.states()[q] + "~" + std::to_string(c) + (fresh ? "~f" : "~s"));
      if (id != it->second) throw Error("phi wrapper: state names of the input collide");
      keys.push_back({q, c, fresh});
      todo.push_back(id);
    }
    return it->second;
  };

  std::vector<std::vector<std::uint32_t>> lambda_out(m.states().size()), letter_out(m.states().size());
  for (std::uint32_t i = 0; i < m.transitions().size(); ++i) {
    const auto& t = m.transition(i);
    (t.is_lambda() ? lambda_out : letter_out)[t.source].push_back(i);
  }

  const StateId init = intern(m.initial(), 0, false);
  const std::uint32_t guards = 1U << m.k();
  while (!todo.empty()) {
    const StateId s = todo.front();
    todo.pop_front();
    const auto [q, c, fresh] = keys[s];
    if (c < L) {
      const StateId idle = intern(q, c + 1, false);
      for (std::uint32_t g = 0; g < guards; ++g) {
        out.add(s, F, g, idle, 0, 0);
        w.source_transition.push_back(-1);
      }
      for (auto i : lambda_out[q]) {
        const auto& t = m.transition(i);
        const StateId to = intern(t.destination, c + 1, true);
        Transition copy = t;
        copy.source = s;
        copy.destination = to;
        copy.input = F;
        out.add(copy);
        w.source_transition.push_back(i);
      }
    } else {
      for (auto i : letter_out[q]) {
        const auto& t = m.transition(i);
        const StateId to = intern(t.destination, 0, true);
        Transition copy = t;
        copy.source = s;
        copy.destination = to;
        out.add(copy);
        w.source_transition.push_back(i);
      }
    }
  }
  std::vector<StateId> accepting;
  for (StateId s = 0; s < keys.size(); ++s)
    if (keys[s].fresh && b.is_accepting(keys[s].q)) accepting.push_back(s);
  w.automaton = BuchiAutomaton(std::move(out).finish(init), std::move(accepting));
  return w;
}

RunCertificate lift_run_phi(const PhiWrapper& w, const RunCertificate& inner) {
  if (inner.block.size() != inner.run.steps.size()) throw Error("phi lift: block annotation length differs from the run");
  // Wanted wrapped transition per wrapper step (-1: idle pad) and its block.
  std::vector<std::int64_t> want;
  std::vector<std::size_t> block;
  Word word;
  std::size_t i = 0, letter = 0;
  const auto& steps = inner.run.steps;
  while (i < steps.size()) {
    std::size_t j = i;
    while (j < steps.size() && steps[j].consumed == kLambda) ++j;
    if (j - i > w.L) throw Error("phi lift: lambda burst of " + std::to_string(j - i) + " exceeds L");
    for (std::size_t t = i; t < j; ++t) {
      want.push_back(steps[t].transition);
      block.push_back(inner.block[t]);
      word.push_back(w.pad);
    }
    if (j == steps.size()) break;
    for (std::size_t t = j - i; t < w.L; ++t) {
      want.push_back(-1);
      block.push_back(inner.block[j]);
      word.push_back(w.pad);
    }
    want.push_back(steps[j].transition);
    block.push_back(inner.block[j]);
    word.push_back(inner.word.at(letter++));
    i = j + 1;
  }

  RunCertificate c;
  c.stage = "phi";
  c.word = word;
  std::size_t at = 0;
  c.run = drive_run(w.automaton.machine, word,
                    [&](const Configuration&, std::size_t, std::span<const std::uint32_t> enabled)
                        -> std::optional<std::uint32_t> {
                      if (at == want.size()) return std::nullopt;
                      for (auto idx : enabled)
                        if (w.source_transition[idx] == want[at]) {
                          ++at;
                          return idx;
                        }
                      throw Error("phi lift: wrapped transition " + std::to_string(want[at]) + " is not enabled");
                    });
  if (at != want.size()) throw Error("phi lift: run ended early");
  c.block = std::move(block);
  return c;
}

}  // namespace kcounter
