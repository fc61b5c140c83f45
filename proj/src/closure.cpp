#include "kcounter/closure.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <unordered_map>

namespace kcounter {

namespace {

void require_compatible(const CounterMachine& a, const CounterMachine& b, const char* what) {
  if (a.alphabet() != b.alphabet()) throw Error(std::string(what) + ": alphabet mismatch");
  if (a.k() != b.k()) throw Error(std::string(what) + ": counter arity mismatch");
}

// Finds the transition leaving `state` whose provenance entry equals `want`.
std::optional<std::uint32_t> find_by_origin(const CounterMachine& m, StateId state, LetterId input,
                                            const std::vector<std::uint32_t>& provenance,
                                            std::uint32_t want) {
  for (auto idx : m.outgoing(state, input))
    if (provenance[idx] == want) return idx;
  return std::nullopt;
}

}  // namespace

BuchiAutomaton buchi_union(const BuchiAutomaton& left, const BuchiAutomaton& right) {
  const auto& m1 = left.machine;
  const auto& m2 = right.machine;
  require_compatible(m1, m2, "union");
  const StateId n1 = static_cast<StateId>(m1.state_count());
  std::vector<std::string> names;
  names.reserve(1 + m1.state_count() + m2.state_count());
  names.emplace_back("u0");
  for (const auto& s : m1.states()) names.push_back("l." + s);
  for (const auto& s : m2.states()) names.push_back("r." + s);

  std::vector<Transition> ts;
  auto emit = [&](const CounterMachine& m, StateId offset) {
    for (const auto& t : m.transitions()) {
      if (t.source != m.initial()) continue;
      Transition c = t;
      c.source = 0;
      c.destination += offset;
      ts.push_back(c);
    }
    for (auto t : m.transitions()) {
      t.source += offset;
      t.destination += offset;
      ts.push_back(t);
    }
  };
  emit(m1, 1);
  emit(m2, 1 + n1);

  std::vector<StateId> acc;
  if (left.is_accepting(m1.initial()) || right.is_accepting(m2.initial())) acc.push_back(0);
  for (StateId s : left.accepting) acc.push_back(s + 1);
  for (StateId s : right.accepting) acc.push_back(s + 1 + n1);
  return BuchiAutomaton(CounterMachine(m1.k(), m1.alphabet(), std::move(names), 0, std::move(ts)), std::move(acc));
}

UnionEmbedding::UnionEmbedding(const BuchiAutomaton& left, const BuchiAutomaton& right, Side side) {
  const auto& m1 = left.machine;
  const auto& m2 = right.machine;
  auto leaving = [](const CounterMachine& m) {
    return static_cast<std::size_t>(std::count_if(m.transitions().begin(), m.transitions().end(),
                                                  [&](const Transition& t) { return t.source == m.initial(); }));
  };
  const CounterMachine& own = side == Side::Left ? m1 : m2;
  std::size_t copy_base = 0;
  if (side == Side::Left) {
    state_offset_ = 1;
    copy_base = 0;
  } else {
    state_offset_ = 1 + static_cast<StateId>(m1.state_count());
    copy_base = leaving(m1) + m1.transitions().size();
  }
  transition_offset_ = copy_base + leaving(own);
  transition_count_ = own.transitions().size();
  initial_ = own.initial();
  initial_copy_.assign(own.transitions().size(), SIZE_MAX);
  std::size_t next = copy_base;
  for (std::size_t i = 0; i < own.transitions().size(); ++i)
    if (own.transition(i).source == own.initial()) initial_copy_[i] = next++;
}

Run UnionEmbedding::lift(const Run& run) const {
  Run out;
  out.start = {0, run.start.counters};
  out.steps.reserve(run.steps.size());
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    const auto& s = run.steps[i];
    if (s.transition >= transition_count_) throw Error("union lift: transition index out of range");
    std::size_t idx = s.transition + transition_offset_;
    if (i == 0) {
      if (initial_copy_[s.transition] == SIZE_MAX) throw Error("union lift: first step does not leave the initial state");
      idx = initial_copy_[s.transition];
    }
    out.steps.push_back({s.consumed, idx, {state(s.result.state), s.result.counters}});
  }
  return out;
}

Run UnionEmbedding::project(const Run& run) const {
  Run out;
  out.start = {initial_, run.start.counters};
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    const auto& s = run.steps[i];
    std::size_t idx = SIZE_MAX;
    if (i == 0) {
      auto it = std::find(initial_copy_.begin(), initial_copy_.end(), s.transition);
      if (it != initial_copy_.end()) idx = static_cast<std::size_t>(it - initial_copy_.begin());
    } else if (s.transition >= transition_offset_ && s.transition < transition_offset_ + transition_count_) {
      idx = s.transition - transition_offset_;
    }
    if (idx == SIZE_MAX || s.result.state < state_offset_) throw Error("union project: run leaves this side");
    out.steps.push_back({s.consumed, idx, {s.result.state - state_offset_, s.result.counters}});
  }
  return out;
}

DetProduct intersect_det_buchi(const BuchiAutomaton& b, const BuchiAutomaton& d) {
  const auto& mb = b.machine;
  const auto& md = d.machine;
  if (md.k() != 0) throw Error("intersect_det_buchi: right operand must have no counters");
  if (mb.alphabet() != md.alphabet()) throw Error("intersect_det_buchi: alphabet mismatch");
  const auto letters = static_cast<LetterId>(md.alphabet().size());
  std::vector<StateId> delta(md.state_count() * static_cast<std::size_t>(letters));
  for (StateId q = 0; q < md.state_count(); ++q) {
    if (!md.outgoing(q, kLambda).empty()) throw Error("intersect_det_buchi: right operand has lambda transitions");
    for (LetterId a = 0; a < letters; ++a) {
      auto out = md.outgoing(q, a);
      if (out.size() > 1) throw Error("intersect_det_buchi: right operand is nondeterministic at " + md.states()[q]);
      if (out.empty()) throw Error("intersect_det_buchi: right operand is incomplete at " + md.states()[q]);
      delta[q * static_cast<std::size_t>(letters) + static_cast<std::size_t>(a)] = md.transition(out[0]).destination;
    }
  }

  DetProduct p;
  std::vector<std::string> names;
  std::vector<Transition> ts;
  std::vector<StateId> acc;
  std::unordered_map<std::uint64_t, StateId> index;
  std::deque<StateId> work;
  auto intern = [&](StateId qb, StateId qd, bool f) {
    std::uint64_t key = (static_cast<std::uint64_t>(qb) << 33) | (static_cast<std::uint64_t>(qd) << 1) | (f ? 1U : 0U);
    auto [it, fresh] = index.emplace(key, static_cast<StateId>(names.size()));
    if (fresh) {
      names.push_back(mb.states()[qb] + "|" + md.states()[qd] + "|" + (f ? "1" : "0"));
      p.origin.push_back({qb, qd, f});
      if (!f && b.is_accepting(qb)) acc.push_back(it->second);
      work.push_back(it->second);
    }
    return it->second;
  };
  intern(mb.initial(), md.initial(), false);
  while (!work.empty()) {
    StateId s = work.front();
    work.pop_front();
    const auto o = p.origin[s];
    bool f = o.flag;
    if (!f && b.is_accepting(o.b)) f = true;
    else if (f && d.is_accepting(o.d)) f = false;
    for (auto idx : mb.outgoing(o.b)) {
      Transition t = mb.transition(idx);
      StateId qd = t.is_lambda() ? o.d : delta[o.d * static_cast<std::size_t>(letters) + static_cast<std::size_t>(t.input)];
      StateId dst = intern(t.destination, qd, f);
      t.source = s;
      t.destination = dst;
      ts.push_back(t);
      p.b_transition.push_back(idx);
    }
  }
  p.automaton = BuchiAutomaton(CounterMachine(mb.k(), mb.alphabet(), std::move(names), 0, std::move(ts)), std::move(acc));
  return p;
}

Run lift_det_product(const DetProduct& product, const Run& b_run) {
  const auto& m = product.automaton.machine;
  Run out{{m.initial(), b_run.start.counters}, {}};
  out.steps.reserve(b_run.steps.size());
  StateId cur = m.initial();
  for (const auto& s : b_run.steps) {
    auto idx = find_by_origin(m, cur, s.consumed, product.b_transition, static_cast<std::uint32_t>(s.transition));
    if (!idx) throw Error("product lift: transition " + std::to_string(s.transition) + " unavailable at step " +
                          std::to_string(out.steps.size() + 1));
    cur = m.transition(*idx).destination;
    out.steps.push_back({s.consumed, *idx, {cur, s.result.counters}});
  }
  return out;
}

Run project_det_product(const DetProduct& product, const Run& run) {
  Run out{{product.origin.at(run.start.state).b, run.start.counters}, {}};
  for (const auto& s : run.steps)
    out.steps.push_back({s.consumed, product.b_transition.at(s.transition), {product.origin.at(s.result.state).b, s.result.counters}});
  return out;
}

MullerConversion muller_to_buchi(const MullerAutomaton& m) {
  const auto& mm = m.machine;
  for (const auto& e : m.table)
    if (e.size() > 63) throw Error("muller_to_buchi: table entry too large");
  MullerConversion c;
  std::vector<std::string> names;
  std::vector<Transition> ts;
  std::vector<StateId> acc;
  std::unordered_map<std::string, StateId> index;
  std::deque<StateId> work;
  auto member = [&](std::size_t entry, StateId q) -> int {
    const auto& e = m.table[entry];
    auto it = std::lower_bound(e.begin(), e.end(), q);
    return it != e.end() && *it == q ? static_cast<int>(it - e.begin()) : -1;
  };
  auto intern = [&](StateId q, std::int32_t entry, std::uint64_t seen) {
    std::string key = mm.states()[q];
    if (entry >= 0) key += "~" + std::to_string(entry) + "~" + std::to_string(seen);
    auto [it, fresh] = index.emplace(key, static_cast<StateId>(names.size()));
    if (fresh) {
      names.push_back(key);
      c.origin.push_back({q, entry, seen});
      if (entry >= 0 && seen == 0) acc.push_back(it->second);
      work.push_back(it->second);
    }
    return it->second;
  };
  // entering q' within entry i from memory `seen`
  auto advance = [&](std::size_t i, std::uint64_t seen, StateId q2) -> std::optional<std::uint64_t> {
    int pos = member(i, q2);
    if (pos < 0) return std::nullopt;
    std::uint64_t next = seen | (std::uint64_t{1} << pos);
    std::uint64_t full = m.table[i].size() == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << m.table[i].size()) - 1);
    return next == full ? 0 : next;
  };
  intern(mm.initial(), -1, 0);
  while (!work.empty()) {
    StateId s = work.front();
    work.pop_front();
    const auto o = c.origin[s];
    for (auto idx : mm.outgoing(o.state)) {
      Transition t = mm.transition(idx);
      const StateId q2 = t.destination;
      auto push = [&](StateId dst) {
        Transition u = t;
        u.source = s;
        u.destination = dst;
        ts.push_back(u);
        c.source_transition.push_back(idx);
      };
      if (o.entry < 0) {
        push(intern(q2, -1, 0));
        for (std::size_t i = 0; i < m.table.size(); ++i) {
          if (m.table[i].empty()) continue;
          if (auto nx = advance(i, 0, q2)) push(intern(q2, static_cast<std::int32_t>(i), *nx));
        }
      } else if (auto nx = advance(static_cast<std::size_t>(o.entry), o.seen, q2)) {
        push(intern(q2, o.entry, *nx));
      }
    }
  }
  c.automaton = BuchiAutomaton(CounterMachine(mm.k(), mm.alphabet(), std::move(names), 0, std::move(ts)), std::move(acc));
  return c;
}

Run lift_muller_run(const MullerConversion& conv, const MullerAutomaton& m, const Run& run,
                    std::size_t switch_step, std::size_t entry) {
  if (entry >= m.table.size()) throw Error("muller lift: entry out of range");
  if (auto v = validate_run(m.machine, consumed_letters(run), run)) throw Error("muller lift: source run invalid");
  const auto& out_m = conv.automaton.machine;
  Run out{{out_m.initial(), run.start.counters}, {}};
  StateId cur = out_m.initial();
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    const auto& s = run.steps[i];
    const bool in_phase = i + 1 >= switch_step;
    std::optional<std::uint32_t> pick;
    for (auto idx : out_m.outgoing(cur, s.consumed)) {
      if (conv.source_transition[idx] != s.transition) continue;
      const auto& o = conv.origin[out_m.transition(idx).destination];
      if (in_phase ? o.entry == static_cast<std::int32_t>(entry) : o.entry < 0) {
        pick = idx;
        break;
      }
    }
    if (!pick) throw Error("muller lift: step " + std::to_string(i + 1) + " leaves the chosen entry");
    cur = out_m.transition(*pick).destination;
    out.steps.push_back({s.consumed, *pick, {cur, s.result.counters}});
  }
  return out;
}

SyncProduct synchronous_product(const CounterMachine& first, const CounterMachine& second, std::size_t state_limit) {
  if (first.alphabet() != second.alphabet()) throw Error("synchronous_product: alphabet mismatch");
  if (!is_real_time(first) || !is_real_time(second)) throw Error("synchronous_product: operands must be real-time");
  const std::size_t k = first.k() + second.k();
  if (k > kMaxCounters) throw Error("synchronous_product: too many counters");
  const auto shift = static_cast<unsigned>(first.k());
  SyncProduct p;
  std::vector<std::string> names;
  std::vector<Transition> ts;
  std::unordered_map<std::uint64_t, StateId> index;
  std::vector<StateId> work;
  auto intern = [&](StateId a, StateId b) {
    auto [it, fresh] = index.emplace((static_cast<std::uint64_t>(a) << 32) | b, static_cast<StateId>(names.size()));
    if (fresh) {
      if (names.size() >= state_limit)
        throw Error("synchronous_product: more than " + std::to_string(state_limit) + " reachable states");
      names.push_back(first.states()[a] + "&" + second.states()[b]);
      p.origin.emplace_back(a, b);
      work.push_back(it->second);
    }
    return it->second;
  };
  intern(first.initial(), second.initial());
  const auto letters = static_cast<LetterId>(first.alphabet().size());
  while (!work.empty()) {
    StateId s = work.back();
    work.pop_back();
    auto [a, b] = p.origin[s];
    for (LetterId l = 0; l < letters; ++l) {
      auto oa = first.outgoing(a, l);
      if (oa.empty()) continue;
      auto ob = second.outgoing(b, l);
      for (auto ia : oa) {
        const auto& ta = first.transition(ia);
        for (auto ib : ob) {
          const auto& tb = second.transition(ib);
          StateId dst = intern(ta.destination, tb.destination);
          ts.push_back({s, l, ta.positive | (tb.positive << shift), dst, ta.increment | (tb.increment << shift),
                        ta.decrement | (tb.decrement << shift)});
          p.source_transitions.emplace_back(ia, ib);
        }
      }
    }
  }
  p.machine = CounterMachine(k, first.alphabet(), std::move(names), 0, std::move(ts));
  return p;
}

Run lift_sync_product(const SyncProduct& product, const Run& first, const Run& second) {
  if (first.steps.size() != second.steps.size()) throw Error("product lift: runs differ in length");
  const auto& m = product.machine;
  auto join = [](const std::vector<Counter>& x, const std::vector<Counter>& y) {
    std::vector<Counter> c(x);
    c.insert(c.end(), y.begin(), y.end());
    return c;
  };
  Run out{{m.initial(), join(first.start.counters, second.start.counters)}, {}};
  out.steps.reserve(first.steps.size());
  StateId cur = m.initial();
  for (std::size_t i = 0; i < first.steps.size(); ++i) {
    const auto& sa = first.steps[i];
    const auto& sb = second.steps[i];
    if (sa.consumed != sb.consumed || sa.consumed == kLambda) throw Error("product lift: letters differ at step " + std::to_string(i + 1));
    std::optional<std::uint32_t> pick;
    for (auto idx : m.outgoing(cur, sa.consumed)) {
      auto [ia, ib] = product.source_transitions[idx];
      if (ia == sa.transition && ib == sb.transition) {
        pick = idx;
        break;
      }
    }
    if (!pick) throw Error("product lift: no joint transition at step " + std::to_string(i + 1));
    cur = m.transition(*pick).destination;
    out.steps.push_back({sa.consumed, *pick, {cur, join(sa.result.counters, sb.result.counters)}});
  }
  return out;
}

}  // namespace kcounter
