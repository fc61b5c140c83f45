#include "kcounter/constructions.hpp"

namespace kcounter {

namespace {

struct Letters {
  LetterId A, B, Z;
  LetterId sigma_count;
  LetterId total;
  bool is_sigma(LetterId l) const { return l < sigma_count; }
};

Letters letters_of(const MachineBuilder& b, const HCoding& c, std::size_t sigma_count) {
  return {b.letter(c.open), b.letter(c.close), b.letter(c.zero), static_cast<LetterId>(sigma_count),
          static_cast<LetterId>(sigma_count + 3)};
}

// Counter-free part given by a partial transition function; `none` marks a dying run.
constexpr StateId kNone = static_cast<StateId>(-1);

BuchiAutomaton regular_part(const std::vector<std::string>& sigma, const HCoding& c, const std::vector<std::string>& names,
                            const std::vector<std::string>& accepting_names,
                            const std::function<std::vector<StateId>(const Letters&, StateId, LetterId)>& next) {
  MachineBuilder b(0, coded_alphabet(c, sigma));
  for (const auto& n : names) b.state(n);
  const auto L = letters_of(b, c, sigma.size());
  for (StateId s = 0; s < names.size(); ++s)
    for (LetterId l = 0; l < L.total; ++l)
      for (StateId to : next(L, s, l))
        if (to != kNone) b.add(s, l, 0, to, 0, 0);
  std::vector<StateId> acc;
  for (const auto& n : accepting_names) acc.push_back(b.state(n));
  return BuchiAutomaton(std::move(b).finish(0), std::move(acc));
}

// Words whose first block is not A 0^Q x B.
BuchiAutomaton build_d1(const std::vector<std::string>& sigma, const HCoding& c) {
  const std::uint64_t Q = c.product();
  std::vector<std::string> names{"start", "sigma", "pass", "sink"};
  for (std::uint64_t i = 0; i <= Q; ++i) names.push_back("z" + std::to_string(i));
  const StateId start = 0, x = 1, pass = 2, sink = 3;
  auto z = [](std::uint64_t i) { return static_cast<StateId>(4 + i); };
  return regular_part(sigma, c, names, {"sink"}, [&](const Letters& L, StateId s, LetterId l) -> std::vector<StateId> {
    if (s == sink) return {sink};
    if (s == pass) return {};
    if (s == start) return {l == L.A ? z(0) : sink};
    if (s == x) return {l == L.B ? pass : sink};
    const std::uint64_t i = s - 4;
    if (i < Q) return {l == L.Z ? z(i + 1) : sink};
    return {L.is_sigma(l) ? x : sink};
  });
}

// Words outside (A 0+ x B 0+)^omega: a pattern violation or finitely many blocks.
BuchiAutomaton build_d2(const std::vector<std::string>& sigma, const HCoding& c) {
  enum : StateId { e0, a1, a2, x, b1, b2, sink, stall_a, stall_b };
  std::vector<std::string> names{"e0", "a1", "a2", "x", "b1", "b2", "sink", "stallA", "stallB"};
  return regular_part(sigma, c, names, {"sink", "stallA", "stallB"},
                      [&](const Letters& L, StateId s, LetterId l) -> std::vector<StateId> {
                        switch (s) {
                          case e0: return {l == L.A ? a1 : sink};
                          case a1: return {l == L.Z ? a2 : sink};
                          case a2:
                            if (l == L.Z) return {a2, stall_a};
                            return {L.is_sigma(l) ? x : sink};
                          case x: return {l == L.B ? b1 : sink};
                          case b1: return {l == L.Z ? b2 : sink};
                          case b2:
                            if (l == L.Z) return {b2, stall_b};
                            return {l == L.A ? a1 : sink};
                          case sink: return {sink};
                          default: return {l == L.Z ? s : kNone};
                        }
                      });
}

// Some factor B 0^n A 0^m x with n != m.
BuchiAutomaton build_d3(const std::vector<std::string>& sigma, const HCoding& c) {
  MachineBuilder b(1, coded_alphabet(c, sigma));
  const auto L = letters_of(b, c, sigma.size());
  StateId w = b.state("w"), b0 = b.state("b0"), bn = b.state("bn"), a0 = b.state("a0"), am = b.state("am"),
          over = b.state("over"), sink = b.state("sink");
  for (LetterId l = 0; l < L.total; ++l) {
    b.add(w, l, 0, w, 0, 0);
    b.add(sink, l, 0, sink, 0, 0);
    b.add(sink, l, 1, sink, 0, 0);
  }
  b.add(w, L.B, 0, b0, 0, 0);
  b.add(b0, L.Z, 0, bn, 1, 0);
  b.add(bn, L.Z, 1, bn, 1, 0);
  b.add(bn, L.A, 1, a0, 0, 0);
  b.add(a0, L.Z, 1, am, 0, 1);
  b.add(am, L.Z, 1, am, 0, 1);
  b.add(am, L.Z, 0, over, 0, 0);
  b.add(over, L.Z, 0, over, 0, 0);
  for (LetterId l = 0; l < L.sigma_count; ++l) {
    b.add(am, l, 1, sink, 0, 0);
    b.add(over, l, 0, sink, 0, 0);
  }
  return BuchiAutomaton(std::move(b).finish(w), {sink});
}

// Some factor A 0^n x B 0^m A with m != Q n. The counter drops once per group of Q zeros.
BuchiAutomaton build_d4(const std::vector<std::string>& sigma, const HCoding& c) {
  const std::uint64_t Q = c.product();
  MachineBuilder b(1, coded_alphabet(c, sigma));
  const auto L = letters_of(b, c, sigma.size());
  StateId w = b.state("w"), a0 = b.state("a0"), an = b.state("an"), x = b.state("x"), b0 = b.state("b0"),
          over = b.state("over"), sink = b.state("sink");
  std::vector<StateId> bm(Q);
  for (std::uint64_t r = 0; r < Q; ++r) bm[r] = b.state("bm" + std::to_string(r));
  for (LetterId l = 0; l < L.total; ++l) {
    b.add(w, l, 0, w, 0, 0);
    b.add(sink, l, 0, sink, 0, 0);
    b.add(sink, l, 1, sink, 0, 0);
  }
  b.add(w, L.A, 0, a0, 0, 0);
  b.add(a0, L.Z, 0, an, 1, 0);
  b.add(an, L.Z, 1, an, 1, 0);
  for (LetterId l = 0; l < L.sigma_count; ++l) b.add(an, l, 1, x, 0, 0);
  b.add(x, L.B, 1, b0, 0, 0);
  b.add(b0, L.Z, 1, bm[1 % Q], 0, 1);
  for (std::uint64_t r = 0; r < Q; ++r) {
    if (r == 0) {
      b.add(bm[r], L.Z, 1, bm[1 % Q], 0, 1);
      b.add(bm[r], L.Z, 0, over, 0, 0);
      b.add(bm[r], L.A, 1, sink, 0, 0);
    } else {
      b.add(bm[r], L.Z, 0, bm[(r + 1) % Q], 0, 0);
      b.add(bm[r], L.Z, 1, bm[(r + 1) % Q], 0, 0);
      b.add(bm[r], L.A, 0, sink, 0, 0);
      b.add(bm[r], L.A, 1, sink, 0, 0);
    }
  }
  b.add(over, L.Z, 0, over, 0, 0);
  b.add(over, L.A, 0, sink, 0, 0);
  return BuchiAutomaton(std::move(b).finish(w), {sink});
}

}  // namespace

HComplement build_h_complement(const std::vector<std::string>& sigma, const std::vector<std::uint64_t>& primes) {
  HComplement out;
  out.coding.primes = primes;
  validate_coding(out.coding, sigma);
  if (primes.empty()) throw Error("h complement: at least one prime is required");
  const auto& c = out.coding;
  auto d1 = build_d1(sigma, c);
  auto d2 = build_d2(sigma, c);
  out.regular = buchi_union(d1, d2);
  out.parts = {pad_counters(d1, 1), pad_counters(d2, 1), build_d3(sigma, c), build_d4(sigma, c)};

  const auto& p = out.parts;
  auto u12 = buchi_union(p[0], p[1]);
  auto u123 = buchi_union(u12, p[2]);
  out.automaton = buchi_union(u123, p[3]);

  UnionEmbedding l12(p[0], p[1], Side::Left), r12(p[0], p[1], Side::Right);
  UnionEmbedding l3(u12, p[2], Side::Left), r3(u12, p[2], Side::Right);
  UnionEmbedding l4(u123, p[3], Side::Left), r4(u123, p[3], Side::Right);
  auto local_sinks = [](const BuchiAutomaton& part) { return part.accepting; };
  for (auto s : local_sinks(p[0])) out.sinks[0].push_back(l4.state(l3.state(l12.state(s))));
  for (auto s : local_sinks(p[1])) out.sinks[1].push_back(l4.state(l3.state(r12.state(s))));
  for (auto s : local_sinks(p[2])) out.sinks[2].push_back(l4.state(r3.state(s)));
  for (auto s : local_sinks(p[3])) out.sinks[3].push_back(r4.state(s));
  return out;
}

}  // namespace kcounter
