#include "kcounter/omega_words.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace kcounter {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

void append_run(Word& out, const std::string& letter, std::uint64_t count, std::size_t n) {
  while (count-- > 0 && out.size() < n) out.push_back(letter);
}

}  // namespace

LassoWord::LassoWord(Word s, Word c, std::vector<std::string> sigma)
    : spoke(std::move(s)), cycle(std::move(c)), alphabet(std::move(sigma)) {
  if (cycle.empty()) throw Error("lasso cycle must be nonempty");
  if (alphabet.empty()) {
    for (const auto* part : {&spoke, &cycle})
      for (const auto& l : *part)
        if (!contains(alphabet, l)) alphabet.push_back(l);
  } else {
    for (const auto* part : {&spoke, &cycle})
      for (const auto& l : *part)
        if (!contains(alphabet, l)) throw Error("lasso letter '" + l + "' not in alphabet");
  }
}

const std::string& LassoWord::at(std::size_t i) const {
  if (i < spoke.size()) return spoke[i];
  return cycle[(i - spoke.size()) % cycle.size()];
}

Word lasso_prefix(const LassoWord& w, std::size_t n) {
  Word out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(w.at(i));
  return out;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) {
    r = saturating_mul(r, base);
    if (r == kSaturated) break;
  }
  return r;
}

std::uint64_t HCoding::product() const {
  std::uint64_t q = 1;
  for (auto p : primes) q = saturating_mul(q, p);
  return q;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::uint64_t> first_primes(std::size_t count) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 2; out.size() < count; ++n)
    if (is_prime(n)) out.push_back(n);
  return out;
}

std::uint64_t prime_valuation(std::uint64_t N, std::uint64_t p) {
  if (N == 0) throw Error("prime_valuation: N must be positive");
  if (p < 2) throw Error("prime_valuation: p must be at least 2");
  std::uint64_t e = 0;
  while (N % p == 0) {
    N /= p;
    ++e;
  }
  return e;
}

std::vector<std::string> coding_letters(const CodingSpec& c) {
  return std::visit(overloaded{[](const ThetaCoding& t) { return std::vector<std::string>{t.pad}; },
                               [](const HCoding& h) { return std::vector<std::string>{h.open, h.close, h.zero}; },
                               [](const PhiCoding& f) { return std::vector<std::string>{f.pad}; }},
                    c);
}

void validate_coding(const CodingSpec& c, const std::vector<std::string>& base) {
  std::visit(overloaded{[](const ThetaCoding& t) {
                          if (t.S == 0) throw Error("theta coding needs S >= 1");
                        },
                        [](const HCoding& h) {
                          if (h.primes.empty()) throw Error("h coding needs at least one prime");
                          std::set<std::uint64_t> seen;
                          for (auto p : h.primes) {
                            if (!is_prime(p)) throw Error("h coding: " + std::to_string(p) + " is not prime");
                            if (!seen.insert(p).second) throw Error("h coding: repeated prime " + std::to_string(p));
                          }
                        },
                        [](const PhiCoding& f) {
                          if (f.L == 0) throw Error("phi coding needs L >= 1");
                        }},
             c);
  auto fresh = coding_letters(c);
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    if (contains(base, fresh[i])) throw Error("coding letter '" + fresh[i] + "' already in the alphabet");
    for (std::size_t j = 0; j < i; ++j)
      if (fresh[i] == fresh[j]) throw Error("coding letter '" + fresh[i] + "' used twice");
  }
}

std::vector<std::string> coded_alphabet(const CodingSpec& c, const std::vector<std::string>& base) {
  auto out = base;
  for (auto& l : coding_letters(c)) out.push_back(l);
  return out;
}

std::uint64_t theta_position(std::uint64_t S, std::size_t i) {
  std::uint64_t pos = 0;
  std::uint64_t block = 1;
  for (std::size_t j = 0; j < i; ++j) {
    block = saturating_mul(block, S);
    pos = pos > kSaturated - block - 1 ? kSaturated : pos + block + 1;
  }
  return pos;
}

std::uint64_t h_position(std::uint64_t Q, std::size_t i) {
  std::uint64_t pos = 0;
  for (std::size_t j = 0; j < i; ++j) {
    std::uint64_t a = saturating_pow(Q, j + 1), b = saturating_pow(Q, j + 2);
    std::uint64_t len = a == kSaturated || b == kSaturated ? kSaturated : a + b + 3;
    pos = pos > kSaturated - len ? kSaturated : pos + len;
  }
  std::uint64_t a = saturating_pow(Q, i + 1);
  return pos > kSaturated - a - 1 ? kSaturated : pos + 1 + a;
}

namespace {

std::uint64_t phi_position(std::uint64_t L, std::size_t i) {
  return saturating_mul(static_cast<std::uint64_t>(i) + 1, L + 1) - 1;
}

}  // namespace

std::size_t source_letters_needed(const CodingSpec& c, std::size_t n) {
  auto count = [n](auto position) {
    std::size_t i = 0;
    while (position(i) < n) ++i;
    return i;
  };
  return std::visit(overloaded{[&](const ThetaCoding& t) { return count([&](std::size_t i) { return theta_position(t.S, i); }); },
                               [&](const HCoding& h) {
                                 const auto Q = h.product();
                                 return count([&](std::size_t i) { return h_position(Q, i); });
                               },
                               [&](const PhiCoding& f) { return count([&](std::size_t i) { return phi_position(f.L, i); }); }},
                    c);
}

Word encode_prefix(const CodingSpec& c, std::span<const std::string> source, std::size_t n) {
  Word out;
  std::visit(overloaded{[&](const ThetaCoding& t) {
                          std::uint64_t block = 1;
                          for (std::size_t i = 0; out.size() < n && i < source.size(); ++i) {
                            out.push_back(source[i]);
                            block = saturating_mul(block, t.S);
                            append_run(out, t.pad, block, n);
                          }
                        },
                        [&](const HCoding& h) {
                          const auto Q = h.product();
                          std::uint64_t run = Q;
                          for (std::size_t i = 0; out.size() < n; ++i) {
                            out.push_back(h.open);
                            append_run(out, h.zero, run, n);
                            if (out.size() >= n || i >= source.size()) break;
                            out.push_back(source[i]);
                            if (out.size() < n) out.push_back(h.close);
                            run = saturating_mul(run, Q);
                            append_run(out, h.zero, run, n);
                          }
                        },
                        [&](const PhiCoding& f) {
                          for (std::size_t i = 0; out.size() < n; ++i) {
                            append_run(out, f.pad, f.L, n);
                            if (out.size() >= n || i >= source.size()) break;
                            out.push_back(source[i]);
                          }
                        }},
             c);
  if (out.size() > n) out.resize(n);
  return out;
}

Word theta_prefix(const LassoWord& x, std::uint64_t S, std::size_t n, const std::string& pad) {
  CodingSpec c = ThetaCoding{S, pad};
  validate_coding(c, x.alphabet);
  return encode_prefix(c, lasso_prefix(x, source_letters_needed(c, n)), n);
}

Word h_prefix(const LassoWord& x, const std::vector<std::uint64_t>& primes, std::size_t n) {
  CodingSpec c = HCoding{primes};
  validate_coding(c, x.alphabet);
  return encode_prefix(c, lasso_prefix(x, source_letters_needed(c, n)), n);
}

Word phi_prefix(const LassoWord& y, std::uint64_t L, std::size_t n, const std::string& pad) {
  CodingSpec c = PhiCoding{L, pad};
  validate_coding(c, y.alphabet);
  return encode_prefix(c, lasso_prefix(y, source_letters_needed(c, n)), n);
}

Word phi_prefix(std::span<const std::string> y, std::uint64_t L, std::size_t n, const std::string& pad) {
  return encode_prefix(PhiCoding{L, pad}, y, n);
}

Word coded_prefix(const std::vector<CodingSpec>& chain, const LassoWord& x, std::size_t n) {
  auto alphabet = x.alphabet;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    validate_coding(*it, alphabet);
    alphabet = coded_alphabet(*it, alphabet);
  }
  std::vector<std::size_t> need(chain.size() + 1);
  need[0] = n;
  for (std::size_t i = 0; i < chain.size(); ++i) need[i + 1] = source_letters_needed(chain[i], need[i]);
  Word cur = lasso_prefix(x, need.back());
  for (std::size_t i = chain.size(); i-- > 0;) cur = encode_prefix(chain[i], cur, need[i]);
  return cur;
}

Word theta_extract(std::span<const std::string> y, std::uint64_t S) {
  if (S == 0) throw Error("theta_extract needs S >= 1");
  Word out;
  for (std::size_t i = 0;; ++i) {
    auto pos = theta_position(S, i);
    if (pos >= y.size()) break;
    out.push_back(y[pos]);
  }
  return out;
}

std::string_view to_string(ShapeClass c) {
  switch (c) {
    case ShapeClass::D1: return "D1";
    case ShapeClass::D2: return "D2";
    case ShapeClass::D3: return "D3";
    case ShapeClass::D4: return "D4";
  }
  return "?";
}

std::vector<ShapeViolation> h_shape_violations(std::span<const std::string> y, const std::vector<std::string>& sigma,
                                               const HCoding& coding) {
  const std::uint64_t Q = coding.product();
  enum Kind { Open, Close, Zero, Letter, Other };
  auto kind = [&](const std::string& s) {
    if (s == coding.open) return Open;
    if (s == coding.close) return Close;
    if (s == coding.zero) return Zero;
    return contains(sigma, s) ? Letter : Other;
  };
  std::vector<ShapeViolation> out;
  bool d1_done = false, d2_done = false;
  // cycle pattern: 0 expect A, 1 after A, 2 zeros after A, 3 expect B, 4 after B, 5 zeros after B
  int phase = 0;
  // B 0^n A 0^m x: 0 idle, 1 after B, 2 zeros, 3 after A, 4 zeros
  int s3 = 0;
  std::uint64_t n3 = 0, m3 = 0;
  // A 0^n x B 0^m A: 0 idle, 1 after A, 2 zeros, 3 after x, 4 after B, 5 zeros
  int s4 = 0;
  std::uint64_t n4 = 0, m4 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Kind k = kind(y[i]);
    if (!d1_done && Q != kSaturated && i < Q + 3) {
      Kind want = i == 0 ? Open : i <= Q ? Zero : i == Q + 1 ? Letter : Close;
      if (k != want) {
        out.push_back({ShapeClass::D1, i});
        d1_done = true;
      }
    }
    if (!d2_done) {
      bool ok = false;
      switch (phase) {
        case 0: ok = k == Open; phase = 1; break;
        case 1: ok = k == Zero; phase = 2; break;
        case 2: ok = k == Zero || k == Letter; phase = k == Zero ? 2 : 3; break;
        case 3: ok = k == Close; phase = 4; break;
        case 4: ok = k == Zero; phase = 5; break;
        case 5: ok = k == Zero || k == Open; phase = k == Zero ? 5 : 1; break;
      }
      if (!ok) {
        out.push_back({ShapeClass::D2, i});
        d2_done = true;
      }
    }
    switch (k) {
      case Close:
        s3 = 1;
        n3 = 0;
        s4 = s4 == 3 ? 4 : 0;
        m4 = 0;
        break;
      case Zero:
        if (s3 == 1 || s3 == 2) {
          ++n3;
          s3 = 2;
        } else if (s3 == 3 || s3 == 4) {
          ++m3;
          s3 = 4;
        } else {
          s3 = 0;
        }
        if (s4 == 1 || s4 == 2) {
          ++n4;
          s4 = 2;
        } else if (s4 == 4 || s4 == 5) {
          ++m4;
          s4 = 5;
        } else {
          s4 = 0;
        }
        break;
      case Open:
        if (s3 == 2) {
          s3 = 3;
          m3 = 0;
        } else {
          s3 = 0;
        }
        if (s4 == 5 && m4 != saturating_mul(Q, n4)) out.push_back({ShapeClass::D4, i});
        s4 = 1;
        n4 = 0;
        break;
      case Letter:
        if (s3 == 4 && n3 != m3) out.push_back({ShapeClass::D3, i});
        s3 = 0;
        s4 = s4 == 2 ? 3 : 0;
        break;
      case Other:
        s3 = 0;
        s4 = 0;
        break;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ShapeViolation& a, const ShapeViolation& b) {
    return a.position != b.position ? a.position < b.position : a.cls < b.cls;
  });
  return out;
}

std::optional<ShapeViolation> h_shape_check(std::span<const std::string> y, const std::vector<std::string>& sigma,
                                            const HCoding& coding) {
  auto all = h_shape_violations(y, sigma, coding);
  if (all.empty()) return std::nullopt;
  return all.front();
}

BlockDecomposition h_block_decompose(std::span<const std::string> y, const HCoding& coding,
                                     const std::vector<std::vector<int>>& exponents) {
  const std::uint64_t Q = coding.product();
  BlockDecomposition out;
  std::size_t pos = 0;
  std::uint64_t carry = Q - 1;  // |u| of the next block
  auto run_of = [&](std::size_t from) {
    std::size_t j = from;
    while (j < y.size() && y[j] == coding.zero) ++j;
    return j - from;
  };
  for (std::size_t block = 0; block < exponents.size(); ++block) {
    // A 0^a x B 0^b A
    if (pos >= y.size() || y[pos] != coding.open) break;
    std::size_t a = run_of(pos + 1);
    std::size_t xpos = pos + 1 + a;
    if (xpos + 1 >= y.size() || y[xpos + 1] != coding.close) break;
    std::size_t b = run_of(xpos + 2);
    std::size_t next = xpos + 2 + b;
    if (next >= y.size() || y[next] != coding.open) break;
    const auto& j = exponents[block];
    const std::string name = "block " + std::to_string(block + 1);
    if (j.size() != coding.primes.size()) throw Error(name + ": exponent vector has wrong length");
    if (carry >= a) throw Error(name + ": v would be empty");
    BlockRecord r;
    r.u = carry;
    r.v = a - carry;
    r.x = y[xpos];
    std::uint64_t num = r.v, den = 1;
    for (std::size_t t = 0; t < j.size(); ++t) {
      if (j[t] == 1) num = saturating_mul(num, coding.primes[t]);
      else if (j[t] == -1) den = saturating_mul(den, coding.primes[t]);
      else if (j[t] != 0) throw Error(name + ": exponents must be in {-1, 0, 1}");
    }
    if (num % den != 0) throw Error(name + ": |w| is not integral for |v| = " + std::to_string(r.v));
    r.w = num / den;
    if (r.w > b) throw Error(name + ": |w| = " + std::to_string(r.w) + " exceeds the 0-block of length " + std::to_string(b));
    r.z = b - r.w;
    carry = r.z;
    out.blocks.push_back(std::move(r));
    pos = next;
  }
  out.trailing = y.size() - pos;
  return out;
}

}  // namespace kcounter
