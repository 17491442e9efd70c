#include "chebiv/laplace.hpp"

#include <cmath>
#include <cstdio>

#include "brent.hpp"

namespace chebiv {

namespace {
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kCollar = 1e-9;
}  // namespace

namespace detail {

double laplace_d(double x, double v) {
  return -x / v - std::log1p(-0.5 * v * v) / v;
}

double laplace_branch_pos(double x, double v, double d_abs) {
  return 0.5 * std::exp(0.5 * x - (kSqrt2 - v) * d_abs) * (1.0 + v / kSqrt2) -
         0.5 * std::exp(-0.5 * x - kSqrt2 * d_abs);
}

double laplace_branch_neg(double x, double v, double d_abs) {
  return std::exp(-0.5 * x) * (0.5 * std::exp(-kSqrt2 * d_abs) - 1.0) -
         std::exp(0.5 * x) *
             (0.5 * std::exp(-(kSqrt2 + v) * d_abs) * (1.0 - v / kSqrt2) - 1.0);
}

}  // namespace detail

double laplace_normalized_call(double x, double v) {
  if (!(v > 0.0) || !(v < kSqrt2)) {
    throw std::domain_error("laplace_normalized_call: need 0 < v < sqrt(2)");
  }
  const double d = detail::laplace_d(x, v);
  if (d >= 0.0) return detail::laplace_branch_pos(x, v, d);
  return detail::laplace_branch_neg(x, v, -d);
}

LaplaceSurface build_laplace_surface(int n, double tol) {
  if (n < 5) {
    throw std::invalid_argument("build_laplace_surface: n must be >= 5");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("build_laplace_surface: tol must be > 0");
  }
  LaplaceSurface s;
  s.tol = tol;
  s.grid_order = n;

  auto target = [&](double x, double t_c) {
    const double c_lo = laplace_normalized_call(x, s.v_lo);
    const double c_hi = laplace_normalized_call(x, s.v_hi);
    const double c = c_lo + 0.5 * (t_c + 1.0) * (c_hi - c_lo);
    const auto br = detail::brent_root(
        [&](double v) { return laplace_normalized_call(x, v) - c; }, s.v_lo,
        s.v_hi, 1e-14, 0.0, 200);
    if (!br.converged) {
      char msg[128];
      std::snprintf(msg, sizeof msg,
                    "build_laplace_surface: node inversion failed at "
                    "x=%.6g c=%.6g",
                    x, c);
      throw BuildError(msg);
    }
    return br.root;
  };

  LowRankBuildInfo info;
  s.interp = lowrank_fit_grid(target, n, n, s.x_range, {-1.0, 1.0}, tol,
                              n + 1, &info);
  s.residual = info.residual;
  return s;
}

LaplaceInversion laplace_invert(const LaplaceSurface& s, double x, double c) {
  if (!std::isfinite(x) || !std::isfinite(c) ||
      x < s.x_range.lo - 1e-12 || x > s.x_range.hi + 1e-12) {
    return {InvertStatus::ArbitrageViolation, 0.0};
  }
  const double xc = std::fmin(std::fmax(x, s.x_range.lo), s.x_range.hi);
  const double c_lo = laplace_normalized_call(xc, s.v_lo);
  const double c_hi = laplace_normalized_call(xc, s.v_hi);
  if (c < c_lo * (1.0 - kCollar)) return {InvertStatus::OutOfDomainLow, 0.0};
  if (c > c_hi * (1.0 + kCollar)) return {InvertStatus::OutOfDomainHigh, 0.0};
  double t_c = 2.0 * (c - c_lo) / (c_hi - c_lo) - 1.0;
  t_c = std::fmin(std::fmax(t_c, -1.0), 1.0);
  return {InvertStatus::Ok, lowrank_eval_2d(s.interp, xc, t_c)};
}

}  // namespace chebiv
