#include <algorithm>
#include <unordered_map>

#include "kcounter/constructions.hpp"

namespace kcounter {

namespace {

void require_fresh(const std::vector<std::string>& sigma, const std::string& letter, const char* who) {
  if (std::find(sigma.begin(), sigma.end(), letter) != sigma.end())
    throw Error(std::string(who) + ": letter '" + letter + "' is already in the alphabet");
}

std::vector<std::string> with_letter(std::vector<std::string> sigma, const std::string& letter) {
  sigma.push_back(letter);
  return sigma;
}

}  // namespace

// Counter 0 counts the first pad block; afterwards the counters alternate as the
// source of a block (decremented once per S pads) and its target (incremented per pad).
BuchiAutomaton build_theta_acceptor(const std::vector<std::string>& sigma, std::uint64_t S, const std::string& pad) {
  if (S == 0) throw Error("theta acceptor: S must be at least 1");
  if (sigma.empty()) throw Error("theta acceptor: empty alphabet");
  require_fresh(sigma, pad, "theta acceptor");
  const auto n = static_cast<LetterId>(sigma.size());
  MachineBuilder b(2, with_letter(sigma, pad));
  const LetterId E = n;
  b.reserve(3 * S + 4, 3 * S + 2 * static_cast<std::size_t>(n) + 4);
  StateId start = b.state("start");
  std::vector<StateId> p(S + 1);
  for (std::uint64_t c = 0; c <= S; ++c) p[c] = b.state("p." + std::to_string(c));
  StateId l[2] = {b.state("l.0"), b.state("l.1")};
  std::vector<StateId> t[2];
  for (int d = 0; d < 2; ++d)
    for (std::uint64_t m = 0; m < S; ++m) t[d].push_back(b.state("t" + std::to_string(d) + "." + std::to_string(m)));

  for (LetterId s = 0; s < n; ++s) b.add(start, s, 0b00, p[0], 0, 0);
  for (std::uint64_t c = 0; c < S; ++c) b.add(p[c], E, c > 0 ? 0b01 : 0b00, p[c + 1], 0b01, 0);
  for (LetterId s = 0; s < n; ++s) b.add(p[S], s, 0b01, l[0], 0, 0);
  for (int d = 0; d < 2; ++d) {
    const std::uint32_t from = 1U << d, to = 1U << (1 - d);
    const StateId after_first = S == 1 ? t[d][0] : t[d][1];
    const std::uint32_t first_dec = S == 1 ? from : 0;
    b.add(l[d], E, from, after_first, to, first_dec);
    b.add(t[d][0], E, from | to, after_first, to, first_dec);
    for (LetterId s = 0; s < n; ++s) b.add(t[d][0], s, to, l[1 - d], 0, 0);
    for (std::uint64_t m = 1; m < S; ++m) {
      bool last = m + 1 == S;
      b.add(t[d][m], E, from | to, last ? t[d][0] : t[d][m + 1], to, last ? from : 0);
    }
  }
  return BuchiAutomaton(std::move(b).finish(start), {p[0], l[0], l[1]});
}

RunCertificate theta_certificate(const BuchiAutomaton& acceptor, const LassoWord& x, std::uint64_t S, std::size_t blocks) {
  const auto& m = acceptor.machine;
  const std::string& pad = m.alphabet().back();
  RunCertificate c;
  c.stage = "theta";
  c.word = encode_prefix(ThetaCoding{S, pad}, lasso_prefix(x, blocks), theta_position(S, blocks));
  c.run = drive_run(m, c.word);
  std::size_t block = 0;
  for (const auto& s : c.run.steps) {
    if (m.letter_name(s.consumed) != pad) ++block;
    c.block.push_back(block);
  }
  return c;
}

std::uint64_t realtime8_constant(std::size_t sigma_size) {
  std::uint64_t k = sigma_size + 2;
  return saturating_pow(3 * k, 3);
}

namespace {

// Finite control of the six-counter simulator. Local counters: 0,1 first stack,
// 2,3 second stack, 4,5 the simulated counters.
enum Phase : std::uint8_t { Boot, Idle, Pop1, Push2, PushR, Pop2, Push1, AStep, FPop };

struct Sim {
  Phase phase = Boot;
  std::uint8_t h1 = 0, h2 = 0;  // holders of the two stacks
  std::uint8_t m = 0;           // pop residue, or push sub-step
  std::uint8_t y = 0;           // pop target positive
  std::uint8_t xs = 0;          // push source status: 0 zero, 1 positive, 2 unknown
  std::uint8_t ys = 0;          // push target positive
  std::uint8_t o = 0;           // holder of the stack not being worked on is positive
  std::uint8_t tail = 0, rem = 0;
  std::uint8_t d = 0;           // digit being moved
  std::uint8_t r = 0;           // digit of the letter being queued
  std::uint8_t e2 = 0;          // second stack nonempty
  std::uint8_t f = 0, acc = 0;
  std::uint8_t want = 0;
  std::uint32_t q = 0;

  std::uint64_t key() const {
    std::uint64_t k = phase;
    auto put = [&](std::uint64_t v, int bits) { k = (k << bits) | v; };
    put(h1, 1), put(h2, 1), put(m, 6), put(y, 1), put(xs, 2), put(ys, 1), put(o, 1), put(tail, 1), put(rem, 6);
    put(d, 6), put(r, 6), put(e2, 1), put(f, 1), put(acc, 1), put(want, 6);
    return (k << 16) ^ q;
  }

  // Zeroes the fields a phase does not use, so equal behaviour means equal key.
  Sim canonical() const {
    Sim c;
    c.phase = phase, c.q = q, c.f = f, c.h1 = h1, c.h2 = h2;
    switch (phase) {
      case Boot:
      case Idle:
      case AStep: c.acc = acc; break;
      case Pop1: c.m = m, c.y = y, c.r = r, c.e2 = e2; break;
      case Pop2: c.m = m, c.y = y; break;
      case FPop: c.m = m, c.y = y, c.want = want, c.acc = acc; break;
      default:
        c.m = m, c.xs = xs, c.ys = ys, c.o = o, c.tail = tail, c.rem = rem, c.d = d, c.r = r;
    }
    return c;
  }

  std::string name() const {
    static const char* tag[] = {"boot", "idle", "pop1", "push2", "pushr", "pop2", "push1", "astep", "fpop"};
    std::string s = tag[phase];
    auto add = [&](char c, unsigned v) {
      s += '.';
      s += c;
      s += std::to_string(v);
    };
    add('q', q), add('f', f), add('h', h1 * 2U + h2);
    if (acc) s += ".acc";
    switch (phase) {
      case Boot:
      case Idle:
      case AStep: break;
      case Pop1: add('m', m), add('y', y), add('r', r), add('e', e2); break;
      case Pop2: add('m', m), add('y', y); break;
      case FPop: add('m', m), add('y', y), add('w', want); break;
      default:
        add('s', m), add('x', xs), add('y', ys), add('o', o), add('t', tail), add('n', rem), add('d', d), add('r', r);
    }
    return s;
  }
};

struct Move {
  std::uint32_t known = 0, positive = 0, inc = 0, dec = 0;
  Sim next;
  std::int32_t source = -1;

  void need(std::uint32_t bit, bool pos) {
    known |= bit;
    if (pos) positive |= bit;
  }
};

constexpr std::uint32_t bit(unsigned i) { return 1U << i; }

class SimulatorBuilder {
 public:
  SimulatorBuilder(const BuchiAutomaton& a, std::size_t base) : a_(a), base_(static_cast<std::uint8_t>(base)) {}

  // All moves from `s` on the pad letter (letter < 0) or on Sigma letter `letter`.
  std::vector<Move> moves(const Sim& s, LetterId letter) const {
    std::vector<Move> out;
    const bool pad = letter < 0;
    const auto s1 = [](unsigned h) { return bit(h); };
    const auto s2 = [](unsigned h) { return bit(2 + h); };
    switch (s.phase) {
      case Boot: {
        if (pad) break;
        Move mv;
        mv.known = 0b111111;
        mv.inc = s1(0);
        mv.next = Sim{};
        mv.next.phase = Pop1;
        mv.next.r = digit(letter);
        mv.next.q = s.q;
        out.push_back(mv);
        break;
      }
      case Idle: {
        Move mv;
        mv.need(s1(s.h1), true), mv.need(s1(1 - s.h1), false), mv.need(s2(0), false), mv.need(s2(1), false);
        mv.next = s;
        mv.next.acc = 0;
        if (!pad) {
          mv.next.phase = Pop1;
          mv.next.m = mv.next.y = mv.next.e2 = 0;
          mv.next.r = digit(letter);
        }
        out.push_back(mv);
        break;
      }
      case Pop1:
      case Pop2:
      case FPop: {
        if (!pad) break;
        const bool first = s.phase != Pop2;
        const std::uint32_t X = first ? s1(s.h1) : s2(s.h2), Y = first ? s1(1 - s.h1) : s2(1 - s.h2);
        Move base;
        base.need(Y, s.y);
        if (s.phase == Pop1) base.need(s2(s.h2), s.e2), base.need(s2(1 - s.h2), false);
        if (s.phase == FPop) base.need(s2(0), false), base.need(s2(1), false);
        if (s.phase == Pop2) base.need(s1(s.h1), true), base.need(s1(1 - s.h1), false);
        Move dec = base;
        dec.need(X, true);
        dec.dec = X;
        dec.next = s;
        dec.next.acc = 0;
        if (s.m + 1 == base_) {
          dec.inc = Y;
          dec.next.m = 0;
          dec.next.y = 1;
        } else {
          dec.next.m = s.m + 1;
        }
        out.push_back(dec);
        Move done = base;
        done.need(X, false);
        done.next = s;
        done.next.acc = 0;
        done.next.m = 0;
        done.next.y = 0;
        if (s.phase == Pop1) {
          done.next.h1 = 1 - s.h1;
          if (s.m == 1 && s.y == 0) {
            done.inc = Y;  // the bottom marker goes back
            done.next.phase = PushR;
            done.next.xs = 1, done.next.ys = 0, done.next.o = s.e2;
            out.push_back(done);
          } else if (s.m >= 2 && s.y == 1) {
            done.next.phase = Push2;
            done.next.d = s.m;
            done.next.xs = s.e2, done.next.ys = 0, done.next.o = 1;
            out.push_back(done);
          }
        } else if (s.phase == Pop2) {
          if (s.m == 0 && s.y == 0) {
            done.next.phase = AStep;
            done.next.h2 = 0;
            out.push_back(done);
          } else if (s.m >= 2) {
            done.next.h2 = 1 - s.h2;
            done.next.phase = Push1;
            done.next.d = s.m;
            done.next.xs = 1, done.next.ys = 0, done.next.o = s.y;
            out.push_back(done);
          }
        } else if (s.m == s.want && s.y == 1) {
          done.next.h1 = 1 - s.h1;
          done.next.phase = Idle;
          done.next.want = 0;
          out.push_back(done);
        }
        break;
      }
      case Push2:
      case PushR:
      case Push1: {
        if (!pad) break;
        const bool onto_second = s.phase == Push2;
        const std::uint32_t X = onto_second ? s2(s.h2) : s1(s.h1), Y = onto_second ? s2(1 - s.h2) : s1(1 - s.h1);
        const std::uint32_t OH = onto_second ? s1(s.h1) : s2(s.h2), OO = onto_second ? s1(1 - s.h1) : s2(1 - s.h2);
        const std::uint8_t value = s.phase == PushR ? s.r : s.d;
        Move base;
        base.need(OH, s.o), base.need(OO, false);
        base.next = s;
        auto finish = [&](Move mv) {
          Sim n = s;
          n.tail = n.rem = n.m = n.xs = n.ys = 0;
          if (onto_second) n.h2 = 1 - s.h2;
          else n.h1 = 1 - s.h1;
          if (s.phase == Push2) {
            n.phase = Pop1;
            n.e2 = 1, n.y = 0, n.d = 0;
          } else if (s.phase == PushR) {
            n.phase = s.o ? Pop2 : AStep;
            n.y = 0, n.o = 0, n.r = 0, n.e2 = 0;
            if (!s.o) n.h2 = 0;
          } else {
            n.phase = Pop2;
            n.y = 0, n.o = 0, n.d = 0;
          }
          mv.next = n;
          out.push_back(mv);
        };
        if (s.tail) {
          Move mv = base;
          mv.need(X, false), mv.need(Y, true);
          mv.inc = Y;
          if (s.rem == 1) {
            finish(mv);
          } else {
            mv.next.rem = s.rem - 1;
            out.push_back(mv);
          }
        } else if (s.m == 0) {
          Move mv = base;
          mv.need(Y, s.ys);
          if (s.xs == 1) {
            mv.need(X, true);
            mv.dec = X, mv.inc = Y;
            mv.next.m = 1, mv.next.xs = 2, mv.next.ys = 1;
            out.push_back(mv);
          } else {
            mv.need(X, false);
            mv.inc = Y;
            if (value == 1) {
              finish(mv);
            } else {
              mv.next.tail = 1, mv.next.rem = value - 1, mv.next.ys = 1;
              out.push_back(mv);
            }
          }
        } else {
          for (std::uint8_t status : {std::uint8_t{0}, std::uint8_t{1}}) {
            if (s.xs != 2 && s.xs != status) continue;
            Move mv = base;
            mv.need(Y, true), mv.need(X, status);
            mv.inc = Y;
            mv.next.xs = status;
            mv.next.m = s.m + 1 == base_ ? 0 : s.m + 1;
            out.push_back(mv);
          }
        }
        break;
      }
      case AStep: {
        if (!pad) break;
        const auto& am = a_.machine;
        for (auto idx : am.outgoing(s.q)) {
          const auto& t = am.transition(idx);
          Move mv;
          mv.need(s1(s.h1), true), mv.need(s1(1 - s.h1), false), mv.need(s2(0), false), mv.need(s2(1), false);
          mv.known |= bit(4) | bit(5);
          mv.positive |= t.positive << 4;
          mv.inc = t.increment << 4;
          mv.dec = t.decrement << 4;
          mv.source = static_cast<std::int32_t>(idx);
          Sim n = s;
          n.q = t.destination;
          if (n.f && !t.is_lambda()) n.f = 0;
          n.acc = 0;
          if (!n.f && a_.is_accepting(n.q)) n.acc = 1, n.f = 1;
          if (t.is_lambda()) {
            n.phase = Idle;
          } else {
            n.phase = FPop;
            n.m = n.y = 0;
            n.want = digit(t.input);
          }
          mv.next = n;
          out.push_back(mv);
        }
        break;
      }
    }
    return out;
  }

  BuchiAutomaton build(std::vector<std::int32_t>& source, std::vector<std::uint8_t>& idle) {
    const auto& am = a_.machine;
    const auto n = static_cast<LetterId>(am.alphabet().size());
    MachineBuilder b(6, with_letter(am.alphabet(), pad_));
    std::unordered_map<std::uint64_t, StateId> index;
    std::vector<Sim> states;
    std::vector<StateId> acc;
    auto intern = [&](const Sim& raw) {
      const Sim s = raw.canonical();
      auto [it, fresh] = index.emplace(s.key(), static_cast<StateId>(states.size()));
      if (fresh) {
        states.push_back(s);
        if (b.state(s.name()) != it->second) throw Error("simulator state names collide: " + s.name());
        idle.push_back(s.phase == Idle || s.phase == Boot);
        if (s.acc) acc.push_back(it->second);
      }
      return it->second;
    };
    Sim boot;
    boot.q = am.initial();
    intern(boot);
    for (std::size_t i = 0; i < states.size(); ++i) {
      for (LetterId l = -1; l < n; ++l) {
        for (const Move& mv : moves(states[i], l)) {
          StateId dst = intern(mv.next);
          // counters the move does not test are matched by both guard values
          const std::uint32_t free = ~mv.known & 0b111111;
          for (std::uint32_t g = free;; g = (g - 1) & free) {
            b.add(static_cast<StateId>(i), l < 0 ? n : l, mv.positive | g, dst, mv.inc, mv.dec);
            source.push_back(mv.source);
            if (g == 0) break;
          }
        }
      }
    }
    return BuchiAutomaton(std::move(b).finish(0), acc);
  }

  std::string pad_ = "E";

 private:
  std::uint8_t digit(LetterId l) const { return static_cast<std::uint8_t>(l + 2); }

  const BuchiAutomaton& a_;
  std::uint8_t base_;
};

}  // namespace

Realtime8 build_realtime8(const BuchiAutomaton& a, const std::string& pad, const Realtime8Options& opt) {
  try {
    if (a.machine.k() != 2) throw Error("input must have 2 counters, has " + std::to_string(a.machine.k()));
    const auto& sigma = a.machine.alphabet();
    if (sigma.empty()) throw Error("empty alphabet");
    require_fresh(sigma, pad, "realtime8");
    if (sigma.size() + 2 > 63) throw Error("alphabet too large for the queue digits");
    Realtime8 r;
    r.S = realtime8_constant(sigma.size());
    r.queue_base = sigma.size() + 2;
    r.pad = pad;
    r.source = a;
    auto theta = build_theta_acceptor(sigma, r.S, pad);
    SimulatorBuilder sb(a, r.queue_base);
    sb.pad_ = pad;
    std::vector<std::int32_t> sim_source;
    std::vector<std::uint8_t> sim_idle;
    auto sim = sb.build(sim_source, sim_idle);
    auto p = synchronous_product(theta.machine, sim.machine, opt.state_limit);
    std::vector<StateId> acc;
    r.idle.resize(p.origin.size());
    for (StateId s = 0; s < p.origin.size(); ++s) {
      if (sim.is_accepting(p.origin[s].second)) acc.push_back(s);
      r.idle[s] = sim_idle[p.origin[s].second];
    }
    r.source_transition.resize(p.source_transitions.size());
    for (std::size_t i = 0; i < p.source_transitions.size(); ++i) r.source_transition[i] = sim_source[p.source_transitions[i].second];
    r.automaton = BuchiAutomaton(std::move(p.machine), std::move(acc));
    return r;
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("realtime8", e.what());
  }
}

RunCertificate lift_run_theta(const Realtime8& r8, const Run& a_run, std::span<const std::string> x, std::size_t max_len) {
  const auto& am = r8.source.machine;
  const auto consumed = consumed_letters(a_run);
  if (auto v = validate_run(am, consumed, a_run))
    throw Error("lift_run_theta: source run invalid at step " + std::to_string(v->step) + " (" + std::string(to_string(v->reason)) + ")");
  const std::size_t n = a_run.steps.size();
  if (x.size() < n) throw Error("lift_run_theta: need " + std::to_string(n) + " source letters, have " + std::to_string(x.size()));
  for (std::size_t i = 0; i < consumed.size(); ++i)
    if (am.letter_name(consumed[i]) != x[i]) throw Error("lift_run_theta: run reads letter " + std::to_string(i) + " differently from x");

  // the last block only needs room for its simulation work
  const std::uint64_t k = r8.queue_base;
  std::uint64_t len = 0;
  if (n > 0) {
    std::uint64_t work = saturating_mul(4, saturating_pow(2 * k, n + 2));
    std::uint64_t last = std::min(saturating_pow(r8.S, n), work);
    len = theta_position(r8.S, n - 1) + 1 + last;
  }
  if (len > max_len) throw Error("lift_run_theta: needs prefix length up to " + std::to_string(len));
  Word word = encode_prefix(ThetaCoding{r8.S, r8.pad}, x.first(n), len);

  const auto& m = r8.automaton.machine;
  std::size_t simulated = 0;
  Chooser choose = [&](const Configuration& at, std::size_t, std::span<const std::uint32_t> enabled) -> std::optional<std::uint32_t> {
    if (simulated == n && r8.idle[at.state]) return std::nullopt;
    std::optional<std::uint32_t> pick;
    for (auto idx : enabled) {
      auto src = r8.source_transition[idx];
      if (src < 0) {
        if (pick) throw Error("lift_run_theta: simulation is not deterministic here");
        pick = idx;
      } else if (simulated < n && static_cast<std::size_t>(src) == a_run.steps[simulated].transition) {
        pick = idx;
      }
    }
    if (pick && r8.source_transition[*pick] >= 0) ++simulated;
    if (!pick) throw Error("lift_run_theta: source transition " + std::to_string(a_run.steps[std::min(simulated, n - 1)].transition) +
                           " not enabled in block " + std::to_string(simulated + 1));
    return pick;
  };
  RunCertificate c;
  c.stage = "theta";
  c.run = drive_run(m, word, choose);
  if (simulated < n) throw Error("lift_run_theta: block budget too small to simulate step " + std::to_string(simulated + 1));
  std::size_t pos = 0, block = 0;
  for (const auto& s : c.run.steps) {
    if (m.letter_name(s.consumed) != r8.pad) ++block;
    c.block.push_back(block);
    ++pos;
  }
  word.resize(pos);
  c.word = std::move(word);
  return c;
}

}  // namespace kcounter
