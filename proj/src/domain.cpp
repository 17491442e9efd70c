#include "chebiv/domain.hpp"

#include <cmath>

#include "chebiv/bs_core.hpp"

namespace chebiv {

namespace {

// Relative slack past interval ends tolerated by the transforms before a
// domain error; in-range spill is clamped.
constexpr double kEdgeSlack = 1e-9;

double clamp_to(double value, double lo, double hi, const char* what) {
  const double span = std::fabs(hi - lo);
  const double slack = kEdgeSlack * std::max({std::fabs(lo), std::fabs(hi), span});
  if (value < lo) {
    if (value < lo - slack) throw std::domain_error(what);
    return lo;
  }
  if (value > hi) {
    if (value > hi + slack) throw std::domain_error(what);
    return hi;
  }
  return value;
}

}  // namespace

const char* area_name(AreaId a) {
  switch (a) {
    case AreaId::I: return "I";
    case AreaId::IPrime: return "I'";
    case AreaId::II: return "II";
    case AreaId::III: return "III";
  }
  return "?";
}

BoundaryVols boundary_vols(const BoundaryCurves& curves, double x) {
  if (!(x >= curves.x_range.lo && x <= curves.x_range.hi)) {
    throw std::domain_error("boundary_vols: x outside the engine range");
  }
  return {curves.v_min(x), curves.v1(x), curves.v2(x), curves.v_max};
}

double inflection_vol(double x) { return std::sqrt(2.0 * std::fabs(x)); }

std::pair<double, double> tangent_bounds(double x) {
  if (!(x < 0.0)) {
    throw std::domain_error("tangent_bounds: requires x < 0");
  }
  const double vc = inflection_vol(x);
  const double price = normalized_call(x, vc);
  const double slope = vega_normalized(x, vc);
  const double v1 = vc - price / slope;
  const double v2 = vc + (std::exp(0.5 * x) - price) / slope;
  return {v1, v2};
}

double x_split_exact() {
  // sqrt(2u) = 0.25 + 0.4u  =>  0.16 u^2 - 1.8 u + 0.0625 = 0, smaller root.
  const double disc = std::sqrt(1.8 * 1.8 - 4.0 * 0.16 * 0.0625);
  return -(1.8 - disc) / (2.0 * 0.16);
}

Classification classify(const BoundaryCurves& curves, double x, double c,
                        const BoundaryPrices& prices, double collar) {
  (void)x;
  if (c > prices.c_max * (1.0 + collar)) return Classification::OutOfDomainHigh;
  if (c >= prices.c2) return Classification::AreaIII;
  if (c >= prices.c1) return Classification::AreaII;
  if (c < prices.c_min * (1.0 - collar)) return Classification::OutOfDomainLow;
  return x >= curves.x_split ? Classification::AreaIPrime
                             : Classification::AreaI;
}

double phi_x(double x, Interval xr) {
  const double xc = clamp_to(x, xr.lo, xr.hi, "phi_x: x outside interval");
  return 1.0 - 2.0 * (xr.hi - xc) / (xr.hi - xr.lo);
}

double phi_x_inv(double t, Interval xr) {
  const double tc = clamp_to(t, -1.0, 1.0, "phi_x_inv: t outside [-1,1]");
  return xr.hi - 0.5 * (1.0 - tc) * (xr.hi - xr.lo);
}

double phi2(double c, double c1, double c2) {
  const double cc = clamp_to(c, c1, c2, "phi2: c outside [c1,c2]");
  return 2.0 * (cc - c1) / (c2 - c1) - 1.0;
}

double phi2_inv(double t, double c1, double c2) {
  const double tc = clamp_to(t, -1.0, 1.0, "phi2_inv: t outside [-1,1]");
  return c1 + 0.5 * (tc + 1.0) * (c2 - c1);
}

double phi2_deriv(double c1, double c2) { return 2.0 / (c2 - c1); }

namespace {

// Shape stage of the low-volatility transform and its building blocks.
struct Phi1Frame {
  double w;        // (x - delta)^2
  double log_c1;
  double g_min;    // phitilde(c_min), the affine stage's left end
};

double phi1_shape(double c, const Phi1Frame& f) {
  const double radicand = 1.0 + 2.0 * (f.log_c1 - std::log(c)) / f.w;
  return 2.0 / std::sqrt(radicand) - 1.0;
}

Phi1Frame phi1_frame(double x, double c_min, double c1, double delta) {
  Phi1Frame f;
  const double d = x - delta;
  f.w = d * d;
  f.log_c1 = std::log(c1);
  const double radicand = 1.0 + 2.0 * (f.log_c1 - std::log(c_min)) / f.w;
  f.g_min = 2.0 / std::sqrt(radicand) - 1.0;
  return f;
}

}  // namespace

double phi1(double c, double x, double c_min, double c1, double delta) {
  const double cc = clamp_to(c, c_min, c1, "phi1: c outside [c_min,c1]");
  const auto f = phi1_frame(x, c_min, c1, delta);
  const double g = phi1_shape(cc, f);
  return 2.0 * (g - f.g_min) / (1.0 - f.g_min) - 1.0;
}

double phi1_inv(double t, double x, double c_min, double c1, double delta) {
  const double tc = clamp_to(t, -1.0, 1.0, "phi1_inv: t outside [-1,1]");
  const auto f = phi1_frame(x, c_min, c1, delta);
  const double g = f.g_min + 0.5 * (tc + 1.0) * (1.0 - f.g_min);
  const double gp = g + 1.0;
  return c1 * std::exp(-2.0 * f.w / (gp * gp) + 0.5 * f.w);
}

double phi1_deriv(double c, double x, double c_min, double c1, double delta) {
  const double cc = clamp_to(c, c_min, c1, "phi1_deriv: c outside [c_min,c1]");
  const auto f = phi1_frame(x, c_min, c1, delta);
  const double radicand = 1.0 + 2.0 * (f.log_c1 - std::log(cc)) / f.w;
  const double shape_deriv =
      (2.0 / f.w) / cc / (radicand * std::sqrt(radicand));
  return shape_deriv * 2.0 / (1.0 - f.g_min);
}

namespace {

double phi3_shape(double c, double cap, double c2) {
  // cap = e^{x/2}; ratio in (0, 1] for c in [c2, c_max].
  const double ratio = (cap - c) / (cap - c2);
  return std::sqrt(-8.0 * std::log(ratio));
}

}  // namespace

double phi3(double c, double x, double c2, double c_max) {
  const double cc = clamp_to(c, c2, c_max, "phi3: c outside [c2,c_max]");
  const double cap = std::exp(0.5 * x);
  return 2.0 * phi3_shape(cc, cap, c2) / phi3_shape(c_max, cap, c2) - 1.0;
}

double phi3_inv(double t, double x, double c2, double c_max) {
  const double tc = clamp_to(t, -1.0, 1.0, "phi3_inv: t outside [-1,1]");
  const double cap = std::exp(0.5 * x);
  const double g = 0.5 * (tc + 1.0) * phi3_shape(c_max, cap, c2);
  return cap - (cap - c2) * std::exp(-g * g / 8.0);
}

double phi3_deriv(double c, double x, double c2, double c_max) {
  const double cc = clamp_to(c, c2, c_max, "phi3_deriv: c outside [c2,c_max]");
  const double cap = std::exp(0.5 * x);
  const double shape = phi3_shape(cc, cap, c2);
  if (shape == 0.0) {
    throw std::domain_error("phi3_deriv: singular at c = c2");
  }
  return (4.0 / ((cap - cc) * shape)) * 2.0 / phi3_shape(c_max, cap, c2);
}

}  // namespace chebiv
