#include "kcounter/engine.hpp"

#include <algorithm>
#include <numeric>

namespace kcounter {

namespace {

std::uint32_t positive_mask(std::span<const Counter> counters) {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < counters.size(); ++i)
    if (counters[i] > 0) m |= 1U << i;
  return m;
}

void step_into(const BuchiAutomaton& b, const Frontier& from, LetterId input, Frontier& out) {
  const auto& m = b.machine;
  const std::size_t k = m.k();
  std::vector<Counter> next(k);
  for (std::size_t i = 0; i < from.size(); ++i) {
    const StateId s = from.state(i);
    auto cs = from.counters(i);
    const std::uint32_t pos = positive_mask(cs);
    for (auto idx : m.outgoing(s, input)) {
      const auto& t = m.transition(idx);
      if (t.positive != pos) continue;
      for (std::size_t c = 0; c < k; ++c) next[c] = cs[c] + t.delta(c);
      out.add(t.destination, next, from.visits(i) + (b.is_accepting(t.destination) ? 1U : 0U));
    }
  }
}

}  // namespace

Configuration Frontier::configuration(std::size_t i) const {
  auto cs = counters(i);
  return {state(i), std::vector<Counter>(cs.begin(), cs.end())};
}

void Frontier::add(StateId state, std::span<const Counter> counters, std::uint32_t visits) {
  if (counters.size() != k_) throw Error("frontier row has wrong arity");
  cells_.push_back(state);
  cells_.insert(cells_.end(), counters.begin(), counters.end());
  visits_.push_back(visits);
}

void Frontier::normalize() {
  const std::size_t n = size(), w = k_ + 1;
  if (n < 2) return;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0U);
  auto row = [&](std::uint32_t i) { return cells_.begin() + static_cast<std::ptrdiff_t>(i * w); };
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::lexicographical_compare(row(a), row(a) + static_cast<std::ptrdiff_t>(w), row(b), row(b) + static_cast<std::ptrdiff_t>(w));
  });
  std::vector<Counter> cells;
  std::vector<std::uint32_t> visits;
  cells.reserve(cells_.size());
  visits.reserve(n);
  for (auto i : order) {
    if (!visits.empty() && std::equal(row(i), row(i) + static_cast<std::ptrdiff_t>(w), cells.end() - static_cast<std::ptrdiff_t>(w))) {
      visits.back() = std::max(visits.back(), visits_[i]);
      continue;
    }
    cells.insert(cells.end(), row(i), row(i) + static_cast<std::ptrdiff_t>(w));
    visits.push_back(visits_[i]);
  }
  cells_ = std::move(cells);
  visits_ = std::move(visits);
}

bool Frontier::contains(const Configuration& c) const {
  if (c.counters.size() != k_) return false;
  std::vector<Counter> key{static_cast<Counter>(c.state)};
  key.insert(key.end(), c.counters.begin(), c.counters.end());
  std::size_t lo = 0, hi = size();
  const std::size_t w = k_ + 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    auto r = cells_.begin() + static_cast<std::ptrdiff_t>(mid * w);
    if (std::lexicographical_compare(r, r + static_cast<std::ptrdiff_t>(w), key.begin(), key.end())) lo = mid + 1;
    else hi = mid;
  }
  return lo < size() && std::equal(key.begin(), key.end(), cells_.begin() + static_cast<std::ptrdiff_t>(lo * w));
}

std::optional<std::uint32_t> Frontier::max_visits() const {
  if (visits_.empty()) return std::nullopt;
  return *std::max_element(visits_.begin(), visits_.end());
}

void Frontier::clear() {
  cells_.clear();
  visits_.clear();
}

Frontier initial_frontier(const BuchiAutomaton& b) {
  Frontier f(b.machine.k());
  auto c = b.machine.initial_configuration();
  f.add(c.state, c.counters, b.is_accepting(c.state) ? 1U : 0U);
  return f;
}

Frontier advance(const BuchiAutomaton& b, const Frontier& from, LetterId letter) {
  Frontier out(from.k());
  if (letter != kForeign) step_into(b, from, letter, out);
  out.normalize();
  return out;
}

Frontier lambda_closure(const BuchiAutomaton& b, const Frontier& from, std::size_t budget, std::size_t cap,
                        bool& capped) {
  Frontier all = from;
  Frontier layer = from;
  for (std::size_t i = 0; i < budget && !layer.empty(); ++i) {
    Frontier next(from.k());
    step_into(b, layer, kLambda, next);
    next.normalize();
    for (std::size_t r = 0; r < next.size(); ++r) all.add(next.state(r), next.counters(r), next.visits(r));
    if (all.size() > cap) {
      capped = true;
      break;
    }
    layer = std::move(next);
  }
  all.normalize();
  return all;
}

PrefixReach exact_prefix_reach(const BuchiAutomaton& b, std::span<const LetterId> prefix, const ReachOptions& opt) {
  if (!is_real_time(b.machine)) throw Error("exact_prefix_reach needs a real-time machine; use bounded_explore");
  PrefixReach r;
  Frontier cur = initial_frontier(b);
  auto record = [&](const Frontier& f) {
    r.sizes.push_back(f.size());
    r.max_visits.push_back(f.max_visits());
    if (opt.keep_frontiers) r.frontiers.push_back(f);
  };
  record(cur);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (cur.empty()) {
      r.sizes.push_back(0);
      r.max_visits.push_back(std::nullopt);
      if (opt.keep_frontiers) r.frontiers.emplace_back(b.machine.k());
      continue;
    }
    Frontier next = advance(b, cur, prefix[i]);
    if (next.size() > opt.cap) {
      r.inconclusive = true;
      r.last = std::move(cur);
      return r;
    }
    if (!next.empty()) r.consumed = i + 1;
    record(next);
    cur = std::move(next);
  }
  r.last = std::move(cur);
  return r;
}

PrefixReach exact_prefix_reach(const BuchiAutomaton& b, const Word& prefix, const ReachOptions& opt) {
  auto ids = b.machine.encode(prefix);
  return exact_prefix_reach(b, std::span<const LetterId>(ids), opt);
}

ExploreEvidence bounded_explore(const BuchiAutomaton& b, std::span<const LetterId> prefix, std::size_t lambda_budget,
                                std::size_t cap) {
  ExploreEvidence e;
  bool capped = false;
  Frontier cur = lambda_closure(b, initial_frontier(b), lambda_budget, cap, capped);
  e.sizes.push_back(cur.size());
  e.visits_per_position.push_back(cur.max_visits());
  for (LetterId l : prefix) {
    Frontier next = lambda_closure(b, advance(b, cur, l), lambda_budget, cap, capped);
    e.sizes.push_back(next.size());
    e.visits_per_position.push_back(next.max_visits());
    cur = std::move(next);
    if (capped) break;
  }
  e.exhausted = !capped;
  e.max_visits = cur.max_visits();
  e.last = std::move(cur);
  return e;
}

ExploreEvidence bounded_explore(const BuchiAutomaton& b, const Word& prefix, std::size_t lambda_budget, std::size_t cap) {
  auto ids = b.machine.encode(prefix);
  return bounded_explore(b, std::span<const LetterId>(ids), lambda_budget, cap);
}

bool nba_lasso_member(const BuchiAutomaton& b, const LassoWord& w) {
  const auto& m = b.machine;
  if (m.k() != 0) throw Error("nba_lasso_member needs an automaton without counters");
  const std::size_t P = w.spoke.size() + w.cycle.size();
  const std::size_t n = m.state_count() * P;
  std::vector<LetterId> letter(P);
  for (std::size_t p = 0; p < P; ++p) letter[p] = m.letter_id(w.at(p));
  auto next_pos = [&](std::size_t p) { return p + 1 < P ? p + 1 : w.spoke.size(); };
  struct Edge {
    std::uint32_t to;
    bool consumes;
  };
  auto edges = [&](std::uint32_t node, std::vector<Edge>& out) {
    out.clear();
    const StateId q = static_cast<StateId>(node / P);
    const std::size_t p = node % P;
    for (auto idx : m.outgoing(q, kLambda))
      out.push_back({static_cast<std::uint32_t>(m.transition(idx).destination * P + p), false});
    if (letter[p] >= 0)
      for (auto idx : m.outgoing(q, letter[p]))
        out.push_back({static_cast<std::uint32_t>(m.transition(idx).destination * P + next_pos(p)), true});
  };

  // iterative Tarjan from the start node
  constexpr std::uint32_t kUnseen = UINT32_MAX;
  std::vector<std::uint32_t> index(n, kUnseen), low(n, 0), comp(n, kUnseen);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  struct Frame {
    std::uint32_t node;
    std::vector<Edge> out;
    std::size_t next;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0, comps = 0;
  const auto start = static_cast<std::uint32_t>(m.initial() * P);
  auto open = [&](std::uint32_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    Frame f{v, {}, 0};
    edges(v, f.out);
    call.push_back(std::move(f));
  };
  open(start);
  while (!call.empty()) {
    auto& f = call.back();
    if (f.next < f.out.size()) {
      auto to = f.out[f.next++].to;
      if (index[to] == kUnseen) {
        open(to);
      } else if (on_stack[to]) {
        low[f.node] = std::min(low[f.node], index[to]);
      }
      continue;
    }
    const std::uint32_t v = f.node;
    call.pop_back();
    if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
    if (low[v] == index[v]) {
      std::uint32_t x;
      do {
        x = stack.back();
        stack.pop_back();
        on_stack[x] = 0;
        comp[x] = comps;
      } while (x != v);
      ++comps;
    }
  }
  // an SCC qualifies when it holds an accepting node and an inner edge that consumes a letter
  std::vector<char> has_accepting(comps, 0), has_letter(comps, 0);
  std::vector<Edge> out;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (comp[v] == kUnseen) continue;
    if (b.is_accepting(static_cast<StateId>(v / P))) has_accepting[comp[v]] = 1;
    edges(v, out);
    for (auto e : out)
      if (e.consumes && comp[e.to] == comp[v]) has_letter[comp[v]] = 1;
  }
  for (std::uint32_t c = 0; c < comps; ++c)
    if (has_accepting[c] && has_letter[c]) return true;
  return false;
}

std::vector<D34Witness> d34_witnesses(std::span<const std::string> y, const HCoding& coding) {
  const std::uint64_t Q = coding.product();
  auto is_letter = [&](const std::string& s) { return s != coding.open && s != coding.close && s != coding.zero; };
  auto zeros_from = [&](std::size_t i) {
    std::size_t j = i;
    while (j < y.size() && y[j] == coding.zero) ++j;
    return j - i;
  };
  std::vector<D34Witness> out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == coding.close) {
      // B 0^n A 0^m x
      std::size_t n = zeros_from(i + 1);
      std::size_t a = i + 1 + n;
      if (n == 0 || a >= y.size() || y[a] != coding.open) continue;
      std::size_t m = zeros_from(a + 1);
      std::size_t x = a + 1 + m;
      if (m == 0 || x >= y.size() || !is_letter(y[x])) continue;
      if (n != m) out.push_back({ShapeClass::D3, x, n, m});
    } else if (y[i] == coding.open) {
      // A 0^n x B 0^m A
      std::size_t n = zeros_from(i + 1);
      std::size_t x = i + 1 + n;
      if (n == 0 || x + 1 >= y.size() || !is_letter(y[x]) || y[x + 1] != coding.close) continue;
      std::size_t m = zeros_from(x + 2);
      std::size_t a = x + 2 + m;
      if (m == 0 || a >= y.size() || y[a] != coding.open) continue;
      if (m != saturating_mul(Q, n)) out.push_back({ShapeClass::D4, a, n, m});
    }
  }
  std::sort(out.begin(), out.end(), [](const D34Witness& a, const D34Witness& b) {
    return a.position != b.position ? a.position < b.position : a.cls < b.cls;
  });
  return out;
}

std::optional<D34Witness> d34_witness_scan(const LassoWord& w, const HCoding& coding) {
  auto y = lasso_prefix(w, w.spoke.size() + 2 * w.cycle.size());
  auto all = d34_witnesses(y, coding);
  if (all.empty()) return std::nullopt;
  return all.front();
}

}  // namespace kcounter
