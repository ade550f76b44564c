#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace merkle_falsify {

// Working precision for every real-valued probability: 100 significant
// decimal digits.
inline constexpr unsigned kWorkingDigits = 100;
using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<kWorkingDigits>, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

// Numerator growth (b * (m + 1) bits) up to which exact_falsification_prob
// also carries the exact rational.
inline constexpr std::uint64_t kExactRationalBitLimit = 4096;

// Bounds for the literal term-by-term sum.
inline constexpr unsigned kTermSumMaxBits = 16;
inline constexpr std::uint64_t kTermSumMaxPathLen = 4096;

// Hash width b and path length m. Throws ConfigError when b == 0.
struct PathParams {
  PathParams(unsigned bits, std::uint64_t path_len);

  unsigned bits;
  std::uint64_t path_len;
};

struct Probability {
  Real value;
  std::optional<Rational> exact_rational;
};

struct FalsificationEstimate {
  PathParams params;
  Probability exact;
  Probability approx;
  Real abs_diff;
};

// 2^-b, exact.
Probability single_collision_prob(unsigned bits);

// 1 - (1 - 2^-b)^(m+1), i.e. the probability that the root is unchanged after
// substituting a leaf along an m-step path. The real value is evaluated as
// -expm1((m+1) * log1p(-2^-b)), which keeps full relative precision for
// large b. The rational is attached when b*(m+1) <= kExactRationalBitLimit,
// and then the value is its correctly rounded conversion.
Probability exact_falsification_prob(const PathParams& params);

// (1 - 2^-b)^(m+1): the probability that the substitution changes the root.
// Stays representable after exact_falsification_prob has rounded to 1.
Real exact_complement_prob(const PathParams& params);

// Always-exact rational of the closed form. Throws UsageError when the
// denominator would exceed 2^24 bits.
Rational exact_falsification_rational(const PathParams& params);

// Literal sum 2^-b + sum_{k=1..m} (1 - 2^-b)^k 2^-b in rational arithmetic.
// Only for b <= 16, m <= 4096 (UsageError otherwise).
Probability exact_falsification_prob_termsum(const PathParams& params);

// g (1 - z^m) / (1 - z); zero for m == 0. Throws UsageError when z == 1.
Rational geometric_sum(const Rational& g, const Rational& z, std::uint64_t m);

// 2^-b + exp(-2^-b) - exp(-(m+1) 2^-b). Not clamped: for small b and large m
// the result exceeds 1 and is not a probability.
Probability approx_falsification_prob(const PathParams& params);

FalsificationEstimate approximation_error(const PathParams& params);

// Row-major over bits_list x path_lens. Throws UsageError on empty lists.
std::vector<FalsificationEstimate> diff_table(std::span<const unsigned> bits_list,
                                              std::span<const std::uint64_t> path_lens);

inline constexpr unsigned kDefaultTableBits[] = {2, 4, 6, 8, 10};
inline constexpr std::uint64_t kDefaultTablePathLens[] = {10, 50, 100, 500, 1000};

}  // namespace merkle_falsify
