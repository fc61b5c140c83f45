#include <algorithm>
#include <set>

#include "kcounter/constructions.hpp"

namespace kcounter {

namespace {

template <class F>
auto in_stage(const char* stage, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

PipelineOutput compose_pipeline(const BuchiAutomaton& a, const PipelineOptions& opt) {
  const auto primes = opt.primes.empty() ? first_primes(8) : opt.primes;
  std::optional<Realtime8> r8;
  if (opt.theta_stage) {
    if (a.machine.k() != 2) throw StageError("realtime8", "the input must have 2 counters");
    Realtime8Options ro;
    ro.state_limit = static_cast<std::size_t>(std::min<std::uint64_t>(opt.state_limit, SIZE_MAX));
    r8 = in_stage("realtime8", [&] { return build_realtime8(a, opt.pad_theta, ro); });
  }
  const BuchiAutomaton& input = r8 ? r8->automaton : a;
  ScriptL script = in_stage("script-l", [&] { return build_script_L(input, primes, opt.state_limit); });
  HComplement complement = in_stage("h-complement", [&] { return build_h_complement(input.machine.alphabet(), primes); });
  BuchiAutomaton joined = in_stage("union", [&] { return buchi_union(script.automaton(), complement.automaton); });
  PhiWrapper phi = in_stage("phi", [&] { return build_phi_wrapper(joined, script.Q - 1, opt.pad_phi); });

  if (!is_real_time(phi.automaton.machine) || phi.automaton.machine.k() != 1)
    throw StageError("phi", "output is not a real-time one-counter automaton");

  PipelineOutput out{phi.automaton, {}, std::move(r8), std::move(script), std::move(complement), std::move(joined),
                     std::move(phi)};
  out.chain.push_back(PhiCoding{out.phi.L, out.phi.pad});
  out.chain.push_back(out.script.coding);
  if (out.realtime8) out.chain.push_back(ThetaCoding{out.realtime8->S, out.realtime8->pad});
  return out;
}

RunCertificate lift_pipeline(const PipelineOutput& p, const Run& a_run) {
  if (p.realtime8) throw StageError("lift", "pipelines with the theta stage are not lifted end to end");
  RunCertificate script = lift_run_script_L(p.script, a_run);
  UnionEmbedding left(p.script.automaton(), p.complement.automaton, Side::Left);
  RunCertificate joined{"union", left.lift(script.run), script.word, script.block};
  return lift_run_phi(p.phi, joined);
}

WadgeSum wadge_sum(const BuchiAutomaton& bL, const BuchiAutomaton& bLp, const BuchiAutomaton& bLpComp,
                   const std::vector<std::string>& plus, const std::vector<std::string>& minus) {
  const auto& X = bL.machine.alphabet();
  const auto& Y = bLp.machine.alphabet();
  if (bLpComp.machine.alphabet() != Y) throw Error("wadge sum: the two branches need the same alphabet");
  std::set<std::string> xs(X.begin(), X.end()), ys(Y.begin(), Y.end()), ps(plus.begin(), plus.end()),
      ms(minus.begin(), minus.end());
  for (const auto& x : xs)
    if (!ys.contains(x)) throw Error("wadge sum: letter '" + x + "' of the stay part is missing from the branches");
  if (ps.empty() || ms.empty()) throw Error("wadge sum: plus and minus letters must be nonempty");
  std::set<std::string> rest;
  for (const auto& y : ys)
    if (!xs.contains(y)) rest.insert(y);
  std::set<std::string> both(ps);
  for (const auto& l : ms)
    if (!both.insert(l).second) throw Error("wadge sum: letter '" + l + "' is both plus and minus");
  if (both != rest) throw Error("wadge sum: plus and minus must partition the letters outside the stay alphabet");

  const std::size_t k = std::max({bL.machine.k(), bLp.machine.k(), bLpComp.machine.k()});
  WadgeSum w;
  w.stay = extend_alphabet(pad_counters(bL, k), Y);
  auto P = pad_counters(bLp, k);
  auto M = pad_counters(bLpComp, k);

  MachineBuilder b(k, Y);
  StateId sw = b.state("sw");
  w.plus_states = 1;
  for (const auto& s : P.machine.states()) b.state("p." + s);
  w.minus_states = static_cast<StateId>(1 + P.machine.states().size());
  for (const auto& s : M.machine.states()) b.state("m." + s);
  for (const auto& x : X) b.add(sw, b.letter(x), 0, sw, 0, 0);
  for (const auto& l : plus) b.add(sw, b.letter(l), 0, w.plus_states + P.machine.initial(), 0, 0);
  for (const auto& l : minus) b.add(sw, b.letter(l), 0, w.minus_states + M.machine.initial(), 0, 0);
  auto copy = [&](const BuchiAutomaton& part, StateId offset) {
    for (auto t : part.machine.transitions()) {
      t.source += offset;
      t.destination += offset;
      b.add(t);
    }
  };
  w.plus_transitions = b.transition_count();
  copy(P, w.plus_states);
  w.minus_transitions = b.transition_count();
  copy(M, w.minus_states);
  std::vector<StateId> accepting;
  for (auto s : P.accepting) accepting.push_back(w.plus_states + s);
  for (auto s : M.accepting) accepting.push_back(w.minus_states + s);
  w.switching = BuchiAutomaton(std::move(b).finish(sw), std::move(accepting));
  w.automaton = buchi_union(w.stay, w.switching);
  return w;
}

Run lift_wadge_stay(const WadgeSum& w, const Run& run) {
  Run padded = run;
  const auto k = w.stay.machine.k();
  padded.start.counters.resize(k, 0);
  for (auto& s : padded.steps) {
    s.result.counters.resize(k, 0);
    s.consumed = w.stay.machine.transition(s.transition).input;
  }
  return UnionEmbedding(w.stay, w.switching, Side::Left).lift(padded);
}

Run lift_wadge_switch(const WadgeSum& w, bool plus, const Word& prefix, const std::string& letter, const Run& run) {
  const auto& sm = w.switching.machine;
  const auto k = sm.k();
  Run out{sm.initial_configuration(), {}};
  Configuration cur = out.start;
  auto take = [&](const std::string& l, bool last) {
    const LetterId id = sm.letter_id(l);
    for (auto idx : sm.outgoing(cur.state, id)) {
      StateId to = sm.transition(idx).destination;
      if (!last && to != cur.state) continue;
      if (last && to == cur.state) continue;
      if (last && (to >= w.minus_states) == plus) continue;
      cur = {to, cur.counters};
      out.steps.push_back({id, idx, cur});
      return;
    }
    throw Error("wadge lift: letter '" + l + "' cannot be read here");
  };
  for (const auto& l : prefix) take(l, false);
  take(letter, true);
  const std::size_t t_off = plus ? w.plus_transitions : w.minus_transitions;
  const StateId s_off = plus ? w.plus_states : w.minus_states;
  for (const auto& st : run.steps) {
    auto counters = st.result.counters;
    counters.resize(k, 0);
    const auto idx = static_cast<std::uint32_t>(t_off + st.transition);
    // Branch letter ids are Y's ids already.
    out.steps.push_back({st.consumed, idx, {st.result.state + s_off, counters}});
  }
  return UnionEmbedding(w.stay, w.switching, Side::Right).lift(out);
}

}  // namespace kcounter
