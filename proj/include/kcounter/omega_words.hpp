// Ultimately periodic words and the padding codings built on top of them.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kcounter/machine.hpp"

namespace kcounter {

/// spoke . cycle^omega
struct LassoWord {
  Word spoke;
  Word cycle;
  std::vector<std::string> alphabet;

  LassoWord() = default;
  /// Alphabet defaults to the letters that occur, in order of first occurrence.
  LassoWord(Word spoke, Word cycle, std::vector<std::string> alphabet = {});

  const std::string& at(std::size_t i) const;
};

Word lasso_prefix(const LassoWord& w, std::size_t n);

/// Saturating arithmetic for block lengths; coded words grow geometrically.
std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b);
std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp);

struct ThetaCoding {
  std::uint64_t S = 1;
  std::string pad = "E";
};

struct HCoding {
  std::vector<std::uint64_t> primes;
  std::string open = "A";
  std::string close = "B";
  std::string zero = "0";

  std::uint64_t product() const;  // saturating
};

struct PhiCoding {
  std::uint64_t L = 1;
  std::string pad = "F";
};

using CodingSpec = std::variant<ThetaCoding, HCoding, PhiCoding>;

/// Throws on S = 0, L = 0, repeated or non-prime entries, or fresh letters that
/// collide with `base` or with each other.
void validate_coding(const CodingSpec& c, const std::vector<std::string>& base);
/// Letters a coding adds to the alphabet.
std::vector<std::string> coding_letters(const CodingSpec& c);
/// Alphabet of the coded words for a source alphabet.
std::vector<std::string> coded_alphabet(const CodingSpec& c, const std::vector<std::string>& base);

/// Codes a finite source prefix; stops after `n` letters or when the next source
/// letter would be needed.
Word encode_prefix(const CodingSpec& c, std::span<const std::string> source, std::size_t n);
/// Number of source letters that encode_prefix reads to emit `n` letters.
std::size_t source_letters_needed(const CodingSpec& c, std::size_t n);

Word theta_prefix(const LassoWord& x, std::uint64_t S, std::size_t n, const std::string& pad = "E");
Word h_prefix(const LassoWord& x, const std::vector<std::uint64_t>& primes, std::size_t n);
Word phi_prefix(const LassoWord& y, std::uint64_t L, std::size_t n, const std::string& pad = "F");
Word phi_prefix(std::span<const std::string> y, std::uint64_t L, std::size_t n, const std::string& pad = "F");

/// First n letters of chain[0](chain[1](...chain.back()(x))), outermost first.
Word coded_prefix(const std::vector<CodingSpec>& chain, const LassoWord& x, std::size_t n);

/// Letters at the positions theta_S places source letters (0-based 0, S+1, S+S^2+2, ...).
Word theta_extract(std::span<const std::string> y, std::uint64_t S);
/// Position (0-based) of source letter i in a theta_S image.
std::uint64_t theta_position(std::uint64_t S, std::size_t i);
/// Position (0-based) of source letter i in an h image with prime product Q.
std::uint64_t h_position(std::uint64_t Q, std::size_t i);

std::uint64_t prime_valuation(std::uint64_t N, std::uint64_t p);
bool is_prime(std::uint64_t n);
std::vector<std::uint64_t> first_primes(std::size_t count);

enum class ShapeClass { D1, D2, D3, D4 };
std::string_view to_string(ShapeClass c);

struct ShapeViolation {
  ShapeClass cls;
  std::size_t position;  // 0-based index of the letter that confirms the violation
  friend bool operator==(const ShapeViolation&, const ShapeViolation&) = default;
};

/// Every violation of the h-image shape found in a prefix, ordered by position.
/// D1 and D2 are reported once (the first bad letter); D3 is confirmed at the
/// source letter of each B 0^n A 0^m x with n != m, D4 at the closing A of each
/// A 0^n x B 0^m A with m != Q n.
std::vector<ShapeViolation> h_shape_violations(std::span<const std::string> y, const std::vector<std::string>& sigma,
                                               const HCoding& coding);
/// Earliest entry of h_shape_violations, or nullopt when the prefix still extends
/// to an image.
std::optional<ShapeViolation> h_shape_check(std::span<const std::string> y, const std::vector<std::string>& sigma,
                                            const HCoding& coding);

struct BlockRecord {
  std::uint64_t u = 0;
  std::uint64_t v = 0;
  std::string x;
  std::uint64_t w = 0;
  std::uint64_t z = 0;
  friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

struct BlockDecomposition {
  std::vector<BlockRecord> blocks;
  std::size_t trailing = 0;
};

/// Splits completed blocks of an h-image prefix given the per-block exponent
/// vectors (one entry per prime, each in {-1, 0, 1}).
BlockDecomposition h_block_decompose(std::span<const std::string> y, const HCoding& coding,
                                     const std::vector<std::vector<int>>& exponents);

}  // namespace kcounter
