// Area geometry for the split inversion domain: boundary volatility curves,
// the four-area classification in (x, c) and the per-area price rescalings
// onto [-1,1].
#pragma once

#include <utility>

#include "chebiv/cheb.hpp"

namespace chebiv {

/// Linear/constant volatility boundaries over x in [-5, 0]:
///   v_min(x) = 0.001 - 0.03 x,  v1(x) = 0.25 - 0.4 x,
///   v2(x)    = 2 - 0.4 x,       v_max = 6,
/// plus the low-volatility split abscissa x_split and the shift delta used
/// by the low-volatility price transform.
struct BoundaryCurves {
  double vmin_a = 0.001, vmin_b = -0.03;
  double v1_a = 0.25, v1_b = -0.4;
  double v2_a = 2.0, v2_b = -0.4;
  double v_max = 6.0;
  Interval x_range{-5.0, 0.0};
  double x_split = -0.0348;
  double delta = 1.0;

  double v_min(double x) const { return vmin_a + vmin_b * x; }
  double v1(double x) const { return v1_a + v1_b * x; }
  double v2(double x) const { return v2_a + v2_b * x; }
};

enum class AreaId { I = 0, IPrime = 1, II = 2, III = 3 };

const char* area_name(AreaId a);

struct BoundaryVols {
  double v_min;
  double v1;
  double v2;
  double v_max;
};

/// The four boundary volatilities at x. Throws std::domain_error outside
/// the x range.
BoundaryVols boundary_vols(const BoundaryCurves& curves, double x);

/// Inflection point of v -> c(x, v): v_c(x) = sqrt(2|x|).
double inflection_vol(double x);

/// Zeros of the tangent line at the inflection point (diagnostic pair
/// vtilde1 < v_c < vtilde2). Throws at x = 0 where the construction
/// degenerates.
std::pair<double, double> tangent_bounds(double x);

/// Exact root of sqrt(2|x|) = 0.25 - 0.4 x near zero; the stored x_split
/// keeps the published 4-decimal value, this is the diagnostic companion.
double x_split_exact();

struct BoundaryPrices {
  double c_min;
  double c1;
  double c2;
  double c_max;
};

enum class Classification {
  AreaI,
  AreaIPrime,
  AreaII,
  AreaIII,
  OutOfDomainLow,
  OutOfDomainHigh,
};

/// Bracket c against the boundary prices at x, cheapest bound first.
/// Ties land on the area above: c = c1 -> II, c = c2 -> III, c = c_max -> III,
/// c = c_min -> I/I'; x = x_split -> I'. `collar` widens the outer bounds
/// relatively (used online to absorb interpolated-boundary noise).
Classification classify(const BoundaryCurves& curves, double x, double c,
                        const BoundaryPrices& prices, double collar = 0.0);

/// Affine x map onto [-1,1]: phi(x) = 1 - 2 (x_max - x)/(x_max - x_min).
double phi_x(double x, Interval xr);
double phi_x_inv(double t, Interval xr);

/// Medium-volatility transform: linear in c between c1 and c2.
double phi2(double c, double c1, double c2);
double phi2_inv(double t, double c1, double c2);
double phi2_deriv(double c1, double c2);

/// Low-volatility transform. The Gaussian-tail shape
///   phitilde(c) = 2 (1 + 2 (log c1 - log c)/(x-delta)^2)^{-1/2} - 1
/// straightens the inverse price map; an affine stage then maps
/// [phitilde(c_min), 1] onto [-1,1].
double phi1(double c, double x, double c_min, double c1, double delta);
double phi1_inv(double t, double x, double c_min, double c1, double delta);
double phi1_deriv(double c, double x, double c_min, double c1, double delta);

/// High-volatility transform:
///   phitilde(c) = sqrt(-8 log((e^{x/2} - c)/(e^{x/2} - c2)))
/// (nonnegative root, so the map increases with c), affinely rescaled from
/// [0, phitilde(c_max)] onto [-1,1].
double phi3(double c, double x, double c2, double c_max);
double phi3_inv(double t, double x, double c2, double c_max);
double phi3_deriv(double c, double x, double c2, double c_max);

}  // namespace chebiv
