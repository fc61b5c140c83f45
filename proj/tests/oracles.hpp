// Independent deciders used to cross-check the engine.
#pragma once

#include <vector>

#include "kcounter/machine.hpp"
#include "kcounter/omega_words.hpp"

namespace oracles {

using namespace kcounter;

/// Explicit product graph of a counter-free automaton with the positions of a lasso:
/// member iff some reachable accepting node lies on a cycle that reads a letter.
class ProductGraph {
 public:
  explicit ProductGraph(const BuchiAutomaton& b) : b_(b), out_(b.machine.states().size()) {
    for (const auto& t : b.machine.transitions()) out_[t.source].push_back(&t);
  }

  bool member(const LassoWord& w) const {
    const auto& m = b_.machine;
    const std::size_t n = m.states().size(), P = w.spoke.size() + w.cycle.size();
    std::vector<LetterId> letter(P);
    for (std::size_t i = 0; i < P; ++i) letter[i] = m.letter_id(w.at(i));
    auto id = [&](StateId s, std::size_t pos) { return s * P + pos; };
    auto succ = [&](std::size_t v, auto&& f) {
      const StateId s = static_cast<StateId>(v / P);
      const std::size_t pos = v % P;
      for (const Transition* t : out_[s]) {
        if (t->is_lambda()) f(id(t->destination, pos), false);
        else if (t->input == letter[pos]) f(id(t->destination, pos + 1 < P ? pos + 1 : w.spoke.size()), true);
      }
    };
    std::vector<char> reach(n * P, 0);
    std::vector<std::size_t> todo{id(m.initial(), 0)};
    reach[todo[0]] = 1;
    while (!todo.empty()) {
      auto v = todo.back();
      todo.pop_back();
      succ(v, [&](std::size_t u, bool) {
        if (!reach[u]) reach[u] = 1, todo.push_back(u);
      });
    }
    // For each reachable accepting node: search (node, read-a-letter) pairs back to it.
    std::vector<char> seen(2 * n * P);
    for (std::size_t a = 0; a < n * P; ++a) {
      if (!reach[a] || !b_.is_accepting(static_cast<StateId>(a / P))) continue;
      std::fill(seen.begin(), seen.end(), 0);
      std::vector<std::pair<std::size_t, bool>> st;
      succ(a, [&](std::size_t u, bool c) { st.push_back({u, c}); });
      while (!st.empty()) {
        auto [v, c] = st.back();
        st.pop_back();
        if (seen[2 * v + c]) continue;
        seen[2 * v + c] = 1;
        if (v == a && c) return true;
        succ(v, [&, c = c](std::size_t u, bool d) { st.push_back({u, c || d}); });
      }
    }
    return false;
  }

 private:
  const BuchiAutomaton& b_;
  std::vector<std::vector<const Transition*>> out_;
};

inline bool brute_force_member(const BuchiAutomaton& b, const LassoWord& w) { return ProductGraph(b).member(w); }

}  // namespace oracles
