// Laplace-market-model normalized pricing and its bivariate Chebyshev
// inversion on the rectangle x in [-0.4, 0], v in [0.25, 1].
#pragma once

#include "chebiv/cheb.hpp"
#include "chebiv/engine.hpp"

namespace chebiv {

/// Normalized Laplace call price. With d = -x/v - log(1 - v^2/2)/v:
///   d >= 0:  c = e^{x/2 - (sqrt2 - v) d} (1 + v/sqrt2)/2 - e^{-x/2 - sqrt2 d}/2
///   d <  0:  c = e^{-x/2} (e^{-sqrt2 |d|}/2 - 1)
///              - e^{x/2} (e^{-(sqrt2 + v)|d|} (1 - v/sqrt2)/2 - 1)
/// Both branches agree at d = 0; d = 0 is served by the first. For x <= 0,
/// d > 0 always, so the second branch only fires for in-the-money inputs.
/// Throws std::domain_error unless 0 < v < sqrt2.
double laplace_normalized_call(double x, double v);

namespace detail {
// The two branch formulas individually, for seam diagnostics.
double laplace_branch_pos(double x, double v, double d_abs);
double laplace_branch_neg(double x, double v, double d_abs);
double laplace_d(double x, double v);
}  // namespace detail

struct LaplaceSurface {
  LowRank2D interp;              // first variable x, second transformed price
  Interval x_range{-0.4, 0.0};
  double v_lo = 0.25;
  double v_hi = 1.0;
  double tol = 0.0;              // build tolerance (relative to scale)
  double residual = 0.0;         // final pivot residual / scale
  int grid_order = 0;
};

/// Fixed-(N+1)^2-grid build. Node prices are scaled linearly per x between
/// c(x, v_lo) and c(x, v_hi) and inverted with Brent-Dekker.
LaplaceSurface build_laplace_surface(int n, double tol);

struct LaplaceInversion {
  InvertStatus status = InvertStatus::Ok;
  double v = 0.0;
};

LaplaceInversion laplace_invert(const LaplaceSurface& s, double x, double c);

}  // namespace chebiv
