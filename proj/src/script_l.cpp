#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "kcounter/constructions.hpp"

namespace kcounter {

namespace {

char delta_char(int d) { return d > 0 ? '+' : d < 0 ? '-' : '0'; }

struct RawBuilder {
  MachineBuilder b;
  std::vector<std::int32_t> source;
  std::vector<ScriptStep> kind;

  RawBuilder(std::vector<std::string> alphabet) : b(1, std::move(alphabet)) {}

  void add(StateId from, LetterId in, bool positive, StateId to, int delta, ScriptStep k, std::int32_t src = -1) {
    b.add(from, in, positive ? 1U : 0U, to, delta > 0 ? 1U : 0U, delta < 0 ? 1U : 0U);
    source.push_back(src);
    kind.push_back(k);
  }
};

}  // namespace

BuchiAutomaton build_shape_guard(const std::vector<std::string>& sigma, const HCoding& coding) {
  validate_coding(coding, sigma);
  MachineBuilder b(0, coded_alphabet(coding, sigma));
  const LetterId A = b.letter(coding.open), B = b.letter(coding.close), Z = b.letter(coding.zero);
  StateId init = b.state("init"), just_a = b.state("justA"), zeros = b.state("zerosA"), after_x = b.state("afterX"),
          after_b = b.state("afterB"), sink = b.state("sink");
  const auto n = static_cast<LetterId>(sigma.size() + 3);
  auto next = [&](StateId s, LetterId l) -> StateId {
    bool is_sigma = l < static_cast<LetterId>(sigma.size());
    if (s == init) return l == A ? just_a : sink;
    if (s == just_a || s == zeros) return l == Z ? zeros : is_sigma ? after_x : sink;
    if (s == after_x) return l == B ? after_b : sink;
    if (s == after_b) return l == Z ? after_b : l == A ? just_a : sink;
    return sink;
  };
  for (StateId s : {init, just_a, zeros, after_x, after_b, sink})
    for (LetterId l = 0; l < n; ++l) b.add(s, l, 0, next(s, l), 0, 0);
  return BuchiAutomaton(std::move(b).finish(init), {just_a});
}

// Block i reads A u v x B w z. The counter holds |u| at A, counts v up, carries
// v into w at rate N/D (products of the incremented and decremented primes), and
// counts z up so that the next u equals z. Counter values of the input live in
// |v| mod Q: counter t is positive iff p_t divides |v|.
ScriptL build_script_L(const BuchiAutomaton& a, const std::vector<std::uint64_t>& primes, std::uint64_t state_limit) {
  const auto& m = a.machine;
  if (!is_real_time(m)) throw Error("script: the input automaton has lambda transitions");
  if (m.k() != primes.size())
    throw Error("script: " + std::to_string(m.k()) + " counters but " + std::to_string(primes.size()) + " primes");
  if (primes.empty()) throw Error("script: at least one prime is required");
  HCoding coding;
  coding.primes = primes;
  validate_coding(coding, m.alphabet());
  for (const auto& s : m.states())
    if (s.find('~') != std::string::npos) throw Error("script: state name '" + s + "' contains '~'");
  const std::uint64_t Q = coding.product();
  const std::uint64_t estimate = saturating_mul(m.states().size() + 1, Q);
  if (estimate > state_limit)
    throw Error("script: estimated " + std::to_string(estimate) + " states exceeds the limit of " +
                std::to_string(state_limit));

  const auto sigma = m.alphabet();
  RawBuilder rb(coded_alphabet(coding, sigma));
  auto& b = rb.b;
  const LetterId A = b.letter(coding.open), B = b.letter(coding.close), Z = b.letter(coding.zero);
  const auto k = m.k();
  auto name = [&](const char* tag, StateId q) { return std::string(tag) + "~" + m.states()[q]; };

  StateId init = b.state("init");
  std::vector<StateId> U(m.states().size()), Zs(m.states().size());
  for (StateId q = 0; q < m.states().size(); ++q) U[q] = b.state(name("U", q));
  {
    StateId prev = init;
    ScriptStep kind = ScriptStep::Open;
    LetterId in = A;
    for (std::uint64_t j = 0; j + 1 < Q; ++j) {
      StateId s = b.state("u1~" + std::to_string(j));
      rb.add(prev, in, false, s, 0, kind);
      prev = s;
      kind = ScriptStep::U;
      in = Z;
    }
    rb.add(prev, in, false, U[m.initial()], 0, kind);
  }

  std::vector<StateId> accepting;
  std::unordered_set<StateId> closed;
  std::unordered_map<std::string, StateId> group_start;  // "q~delta" -> W state at the group start
  auto v_state = [&](StateId q, std::uint64_t r) { return b.state(name("V", q) + "~" + std::to_string(r)); };

  // The W loop for (q, delta): group of G steps, N of them read a zero, D of them decrement.
  auto w_loop = [&](StateId q, const Transition& t) -> StateId {
    std::string delta;
    std::uint64_t N = 1, D = 1;
    for (std::size_t i = 0; i < k; ++i) {
      delta += delta_char(t.delta(i));
      if (t.delta(i) > 0) N *= primes[i];
      if (t.delta(i) < 0) D *= primes[i];
    }
    const std::string key = m.states()[q] + "~" + delta;
    if (auto it = group_start.find(key); it != group_start.end()) return it->second;
    const std::uint64_t G = std::max(N, D);
    std::vector<StateId> w(G);
    for (std::uint64_t j = 0; j < G; ++j) w[j] = b.state("W~" + key + "~" + std::to_string(j));
    for (std::uint64_t j = 0; j < G; ++j) {
      StateId to = w[(j + 1) % G];
      LetterId in = j < N ? Z : kLambda;
      ScriptStep kind = j < N ? ScriptStep::W : ScriptStep::Lambda;
      if (j < D)
        rb.add(w[j], in, true, to, -1, kind);
      else {
        rb.add(w[j], in, false, to, 0, kind);
        rb.add(w[j], in, true, to, 0, kind);
      }
    }
    rb.add(w[0], Z, false, Zs[q], +1, ScriptStep::Z);
    rb.add(w[0], A, false, U[q], 0, ScriptStep::Open);
    group_start.emplace(key, w[0]);
    return w[0];
  };

  for (StateId q = 0; q < m.states().size(); ++q) Zs[q] = b.state(name("Z", q));
  for (StateId q = 0; q < m.states().size(); ++q) {
    rb.add(U[q], Z, true, U[q], -1, ScriptStep::U);
    rb.add(U[q], Z, false, v_state(q, 1 % Q), +1, ScriptStep::V);
    rb.add(Zs[q], Z, true, Zs[q], +1, ScriptStep::Z);
    rb.add(Zs[q], A, true, U[q], 0, ScriptStep::Open);
    for (std::uint64_t r = 0; r < Q; ++r) {
      StateId v = v_state(q, r);
      rb.add(v, Z, true, v_state(q, (r + 1) % Q), +1, ScriptStep::V);
      std::uint32_t bits = 0;
      for (std::size_t i = 0; i < k; ++i)
        if (r % primes[i] == 0) bits |= 1U << i;
      for (std::size_t idx = 0; idx < m.transitions().size(); ++idx) {
        const auto& t = m.transition(idx);
        if (t.source != q || t.positive != bits) continue;
        std::string delta;
        for (std::size_t i = 0; i < k; ++i) delta += delta_char(t.delta(i));
        StateId x = b.state("X~" + m.states()[t.destination] + "~" + delta);
        if (a.is_accepting(t.destination)) accepting.push_back(x);
        rb.add(v, t.input, true, x, 0, ScriptStep::Letter, static_cast<std::int32_t>(idx));
        if (closed.insert(x).second) rb.add(x, B, true, w_loop(t.destination, t), 0, ScriptStep::Close);
      }
    }
  }
  std::sort(accepting.begin(), accepting.end());
  accepting.erase(std::unique(accepting.begin(), accepting.end()), accepting.end());

  ScriptL out;
  out.coding = coding;
  out.Q = Q;
  out.source = a;
  out.raw = BuchiAutomaton(std::move(b).finish(init), std::move(accepting));
  out.raw_source = std::move(rb.source);
  out.raw_step = std::move(rb.kind);
  out.guard = build_shape_guard(sigma, coding);
  out.guarded = intersect_det_buchi(out.raw, out.guard);
  return out;
}

RunCertificate lift_run_script_L(const ScriptL& s, const Run& a_run, std::size_t max_len) {
  const auto& am = s.source.machine;
  if (auto v = validate_run(am, consumed_letters(a_run), a_run))
    throw Error("script lift: input run is invalid at step " + std::to_string(v->step));
  Word x;
  for (const auto& st : a_run.steps) x.push_back(am.letter_name(st.consumed));
  const std::size_t n = a_run.steps.size();
  const std::uint64_t len = std::min<std::uint64_t>(h_position(s.Q, n), max_len);
  if (len > 200'000'000) throw Error("script lift: prefix of " + std::to_string(len) + " letters is too long");

  RunCertificate c;
  c.stage = "script";
  c.word = encode_prefix(s.coding, x, len);
  std::size_t letters = 0;
  Run raw = drive_run(s.raw.machine, c.word,
                      [&](const Configuration&, std::size_t, std::span<const std::uint32_t> enabled)
                          -> std::optional<std::uint32_t> {
                        std::optional<std::uint32_t> pick;
                        for (auto idx : enabled) {
                          if (s.raw_step[idx] != ScriptStep::Letter) continue;
                          if (letters < n && s.raw_source[idx] == static_cast<std::int32_t>(a_run.steps[letters].transition))
                            pick = idx;
                        }
                        if (pick) {
                          ++letters;
                          return pick;
                        }
                        if (enabled.size() != 1) throw Error("script lift: no unique continuation");
                        return enabled[0];
                      });
  if (letters != n) throw Error("script lift: simulated " + std::to_string(letters) + " of " + std::to_string(n) + " steps");
  c.run = lift_det_product(s.guarded, raw);
  std::size_t block = 0;
  for (const auto& st : raw.steps) {
    if (s.raw_step[st.transition] == ScriptStep::Open) ++block;
    c.block.push_back(block);
  }
  return c;
}

Run project_run_script_L(const ScriptL& s, const RunCertificate& c) {
  Run raw = project_det_product(s.guarded, c.run);
  const auto& am = s.source.machine;
  Run out{am.initial_configuration(), {}};
  Configuration cur = out.start;
  for (const auto& st : raw.steps) {
    if (s.raw_step[st.transition] != ScriptStep::Letter) continue;
    const auto idx = static_cast<std::uint32_t>(s.raw_source[st.transition]);
    const auto& t = am.transition(idx);
    if (t.source != cur.state || !guard_matches(t, cur.counters))
      throw Error("script projection: simulated transition " + std::to_string(idx) + " is not enabled");
    cur = {t.destination, apply_delta(t, cur.counters)};
    out.steps.push_back({t.input, idx, cur});
  }
  return out;
}

std::vector<BlockRecord> script_L_blocks(const ScriptL& s, const RunCertificate& c) {
  std::vector<BlockRecord> out;
  std::optional<BlockRecord> open;
  const auto& gm = s.guarded.automaton.machine;
  for (const auto& st : c.run.steps) {
    const auto raw_idx = s.guarded.b_transition.at(st.transition);
    switch (s.raw_step[raw_idx]) {
      case ScriptStep::Open:
        if (open) out.push_back(*open);
        open = BlockRecord{};
        break;
      case ScriptStep::U: ++open->u; break;
      case ScriptStep::V: ++open->v; break;
      case ScriptStep::Letter: open->x = gm.letter_name(st.consumed); break;
      case ScriptStep::Close:
      case ScriptStep::Lambda: break;
      case ScriptStep::W: ++open->w; break;
      case ScriptStep::Z: ++open->z; break;
    }
  }
  return out;
}

}  // namespace kcounter
