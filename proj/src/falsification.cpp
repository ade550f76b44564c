#include "merkle_falsify/falsification.hpp"

#include <string>

#include "merkle_falsify/errors.hpp"

namespace merkle_falsify {

namespace mp = boost::multiprecision;

namespace {

constexpr std::uint64_t kRationalBitCeiling = std::uint64_t{1} << 24;

Integer pow2(std::uint64_t e) {
  Integer r = 1;
  return r << static_cast<unsigned>(e);
}

Rational pow_rational(const Rational& base, std::uint64_t e) {
  return Rational(mp::pow(mp::numerator(base), static_cast<unsigned>(e)),
                  mp::pow(mp::denominator(base), static_cast<unsigned>(e)));
}

Real inv_pow2(unsigned bits) { return mp::ldexp(Real(1), -static_cast<int>(bits)); }

}  // namespace

PathParams::PathParams(unsigned b, std::uint64_t m) : bits(b), path_len(m) {
  if (b < 1) throw ConfigError("hash bit length must be at least 1");
}

Probability single_collision_prob(unsigned bits) {
  if (bits < 1) throw ConfigError("hash bit length must be at least 1");
  return {inv_pow2(bits), Rational(Integer(1), pow2(bits))};
}

Rational exact_falsification_rational(const PathParams& params) {
  const std::uint64_t exponent = params.path_len + 1;
  if (params.bits * exponent > kRationalBitCeiling) {
    throw UsageError("exact rational for b=" + std::to_string(params.bits) +
                     ", m=" + std::to_string(params.path_len) + " is too large");
  }
  const Integer den = pow2(static_cast<std::uint64_t>(params.bits) * exponent);
  const Integer keep = mp::pow(pow2(params.bits) - 1, static_cast<unsigned>(exponent));
  return Rational(den - keep, den);
}

Real exact_complement_prob(const PathParams& params) {
  return mp::exp(Real(params.path_len + 1) * mp::log1p(-inv_pow2(params.bits)));
}

Probability exact_falsification_prob(const PathParams& params) {
  Probability p;
  if (params.bits * (params.path_len + 1) <= kExactRationalBitLimit) {
    p.exact_rational = exact_falsification_rational(params);
    p.value = Real(*p.exact_rational);
  } else if (params.path_len == 0) {
    p.value = inv_pow2(params.bits);
  } else {
    p.value = -mp::expm1(Real(params.path_len + 1) * mp::log1p(-inv_pow2(params.bits)));
  }
  return p;
}

Probability exact_falsification_prob_termsum(const PathParams& params) {
  if (params.bits > kTermSumMaxBits || params.path_len > kTermSumMaxPathLen) {
    throw UsageError("term sum is limited to b <= " + std::to_string(kTermSumMaxBits) +
                     ", m <= " + std::to_string(kTermSumMaxPathLen));
  }
  const Rational q(Integer(1), pow2(params.bits));
  const Rational miss = 1 - q;
  Rational total = q;
  Rational miss_pow = 1;
  for (std::uint64_t k = 1; k <= params.path_len; ++k) {
    miss_pow *= miss;
    total += miss_pow * q;
  }
  return {Real(total), total};
}

Rational geometric_sum(const Rational& g, const Rational& z, std::uint64_t m) {
  if (z == 1) throw UsageError("geometric_sum requires z != 1");
  if (m == 0) return 0;
  return g * (1 - pow_rational(z, m)) / (1 - z);
}

Probability approx_falsification_prob(const PathParams& params) {
  const Real q = inv_pow2(params.bits);
  // Grouped so the exponentials cancel exactly when m == 0.
  return {q + (mp::exp(-q) - mp::exp(-Real(params.path_len + 1) * q)), std::nullopt};
}

FalsificationEstimate approximation_error(const PathParams& params) {
  Probability exact = exact_falsification_prob(params);
  Probability approx = approx_falsification_prob(params);
  Real diff = mp::abs(approx.value - exact.value);
  return {params, std::move(exact), std::move(approx), std::move(diff)};
}

std::vector<FalsificationEstimate> diff_table(std::span<const unsigned> bits_list,
                                              std::span<const std::uint64_t> path_lens) {
  if (bits_list.empty() || path_lens.empty()) {
    throw UsageError("diff_table needs at least one b and one m");
  }
  std::vector<FalsificationEstimate> rows;
  rows.reserve(bits_list.size() * path_lens.size());
  for (unsigned b : bits_list) {
    for (std::uint64_t m : path_lens) rows.push_back(approximation_error(PathParams(b, m)));
  }
  return rows;
}

}  // namespace merkle_falsify
