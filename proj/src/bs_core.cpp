#include "chebiv/bs_core.hpp"

#include <cmath>

namespace chebiv {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrtPi = 0.56418958354775628695;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// exp(u*u) with the squaring error compensated: u^2 = hi + lo exactly
// (FMA remainder), so the exponential does not lose digits for large hi.
inline double exp_square_compensated(double u) {
  const double hi = u * u;
  const double lo = std::fma(u, u, -hi);
  return std::exp(hi) * (1.0 + lo);
}

}  // namespace

double erfcx_positive(double u) {
  if (!(u >= 0.0)) throw std::invalid_argument("erfcx_positive: u must be >= 0");
  if (u <= 24.0) {
    // erfc(u) is still comfortably normal here.
    return exp_square_compensated(u) * std::erfc(u);
  }
  // Asymptotic series 1/(u sqrt(pi)) * sum_k (-1)^k (2k-1)!!/(2u^2)^k;
  // terms decay below 1e-17 within ~8 terms for u > 24.
  const double z = 0.5 / (u * u);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 16; ++k) {
    term *= -z * static_cast<double>(2 * k - 1);
    sum += term;
    if (std::fabs(term) < 1e-17 * sum) break;
  }
  return sum * kInvSqrtPi / u;
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double normalized_call(double x, double v) {
  if (!(v > 0.0)) throw std::domain_error("normalized_call: v must be > 0");
  const double r = x / v;
  const double d_plus = r + 0.5 * v;
  const double d_minus = r - 0.5 * v;

  if (d_plus <= 0.0) {
    // Both tails: c = e^E (erfcx(u+) - erfcx(u-)) / 2 with the shared
    // exponent E = -r^2/2 - v^2/8; u+ < u- so the difference is positive.
    const double u_p = -d_plus * kInvSqrt2;
    const double u_m = -d_minus * kInvSqrt2;
    const double shared_exp = -0.5 * r * r - 0.125 * v * v;
    return 0.5 * std::exp(shared_exp) *
           (erfcx_positive(u_p) - erfcx_positive(u_m));
  }

  // d+ > 0: rewrite both CDFs through erf so the arguments do not straddle
  // the 0.5 plateau. For x <= 0, s- >= 0 always; for x > 0 the same algebra
  // holds with erf of either sign.
  const double s_p = d_plus * kInvSqrt2;
  const double s_m = -d_minus * kInvSqrt2;
  return std::sinh(0.5 * x) +
         0.5 * (std::exp(0.5 * x) * std::erf(s_p) +
                std::exp(-0.5 * x) * std::erf(s_m));
}

double vega_normalized(double x, double v) {
  if (!(v > 0.0)) throw std::domain_error("vega_normalized: v must be > 0");
  const double r = x / v;
  return kInvSqrt2Pi * std::exp(-0.5 * r * r - 0.125 * v * v);
}

NormalizedQuote normalize_quote(const OptionQuote& q) {
  if (!(q.spot > 0.0) || !(q.strike > 0.0) || !(q.maturity > 0.0)) {
    throw std::invalid_argument(
        "normalize_quote: spot, strike and maturity must be positive");
  }
  if (!(q.premium >= 0.0)) {
    throw std::invalid_argument("normalize_quote: premium must be >= 0");
  }
  const double x = q.rate * q.maturity + std::log(q.spot / q.strike);
  const double denom =
      std::sqrt(q.spot * std::exp(-q.rate * q.maturity) * q.strike);
  const double c = q.premium / denom;

  // premium >= S0 is exactly c >= e^{x/2} in normalized units.
  if (c >= std::exp(0.5 * x)) {
    throw std::domain_error(
        "normalize_quote: premium at or above the no-arbitrage bound S0");
  }
  const double intrinsic = x > 0.0 ? 2.0 * std::sinh(0.5 * x) : 0.0;
  if (c < intrinsic) {
    throw std::domain_error("normalize_quote: premium below intrinsic value");
  }
  return {x, c};
}

NormalizedQuote reduce_to_otm(double x, double c) {
  if (x <= 0.0) {
    if (!(c > 0.0)) {
      throw std::domain_error("reduce_to_otm: price must be positive");
    }
    return {x, c};
  }
  const double intrinsic = 2.0 * std::sinh(0.5 * x);  // e^{x/2} - e^{-x/2}
  if (!(c > intrinsic)) {
    throw std::domain_error(
        "reduce_to_otm: in-the-money price at or below intrinsic value");
  }
  if (c >= std::exp(0.5 * x)) {
    throw std::domain_error("reduce_to_otm: price at or above upper bound");
  }
  return {-x, c - intrinsic};
}

}  // namespace chebiv
