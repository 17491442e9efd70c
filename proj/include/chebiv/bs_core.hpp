// Normalized Black-Scholes pricing kernel.
//
// Works throughout in the reduced coordinates
//   x = r*T + log(S0/K)   (forward log-moneyness)
//   v = sigma*sqrt(T)     (time-scaled volatility)
//   c = C / sqrt(S0 * exp(-r*T) * K)   (normalized call premium)
// where the price surface is c(x,v) = e^{x/2} Phi(x/v + v/2) - e^{-x/2} Phi(x/v - v/2).
#pragma once

#include <stdexcept>

namespace chebiv {

/// Scaled complementary error function exp(u^2)*erfc(u) for u >= 0.
/// Accurate to a few ulp across the whole nonnegative axis; the large-u
/// branch switches to the asymptotic series before erfc goes subnormal.
double erfcx_positive(double u);

/// Standard normal CDF. Tail-accurate (relative, not just absolute) via erfc.
double norm_cdf(double z);

/// Normalized call price c(x,v).
///
/// Evaluated in a cancellation-safe split:
///  - when x/v + v/2 <= 0 both Gaussian tails share the exponent
///    E = -x^2/(2 v^2) - v^2/8 and c = e^E (erfcx(u+) - erfcx(u-)) / 2,
///    which keeps ~12 significant digits even for prices near 1e-300;
///  - otherwise c = sinh(x/2) + (e^{x/2} erf(s+) + e^{-x/2} erf(s-)) / 2
///    with both erf arguments nonnegative for x <= 0 (exact at x = 0).
/// Accepts x > 0 as well (same algebra, no tiny-price regime there).
/// Throws std::domain_error if v <= 0.
double normalized_call(double x, double v);

/// dc/dv = (2 pi)^{-1/2} exp(-x^2/(2 v^2) - v^2/8). Throws if v <= 0.
double vega_normalized(double x, double v);

struct OptionQuote {
  double spot;        // > 0
  double strike;      // > 0
  double maturity;    // years, > 0
  double rate;        // continuously compounded, any sign
  double premium;     // >= 0
};

struct NormalizedQuote {
  double x;  // forward log-moneyness
  double c;  // normalized call price
};

/// Moneyness/price normalization of a raw quote. No domain reduction here;
/// x may come out positive. Throws std::invalid_argument on bad spot/strike/
/// maturity and std::domain_error when the premium sits at or above the
/// no-arbitrage cap S0, or strictly below intrinsic value.
NormalizedQuote normalize_quote(const OptionQuote& q);

/// In-the-money reduction via c(-x,v) = c(x,v) + e^{-x/2} - e^{x/2}.
/// Identity for x <= 0. Throws std::domain_error when x > 0 and c does not
/// strictly exceed intrinsic (the reduced price would not be invertible).
NormalizedQuote reduce_to_otm(double x, double c);

}  // namespace chebiv
