// Offline phase: the high-precision implied-volatility oracle used at
// interpolation nodes, the boundary-price interpolants, the per-area
// low-rank builds and the single-rectangle builder.
#pragma once

#include <array>
#include <string>

#include "chebiv/cheb.hpp"
#include "chebiv/domain.hpp"

namespace chebiv {

enum class Preset { Low = 0, Medium = 1, High = 2 };

double preset_tol(Preset p);          // 1e-6 / 1e-9 / 1e-12
const char* preset_name(Preset p);    // "low" / "medium" / "high"
bool preset_from_name(const std::string& s, Preset* out);

enum class RootMethod { Newton, Brent };

struct RootSolveReport {
  double v = 0.0;          // best iterate
  int iterations = 0;
  RootMethod method = RootMethod::Newton;
  double residual = 0.0;   // |c(x,v) - c_target|
  bool converged = false;
};

struct OracleOptions {
  double tol = 1e-12;      // price criterion tol*max(|c|,1e-300), step
                           // criterion tol*max(1,|v|)
  int max_iter = 200;
  enum class Mode { Auto, NewtonOnly, BrentOnly } mode = Mode::Auto;
  // Disable the price-residual early exit, converging on the step criterion
  // alone. In the flat price regions |c - c_target| <= tol*c still allows
  // volatility errors of tol*c/vega; interpolation nodes need the tighter
  // v-space guarantee.
  bool v_accuracy = false;
};

/// Invert c(x, .) = c_target. Newton starts at the inflection point
/// sqrt(2|x|) clamped into [v_min(x), v_max]; it hands over to Brent-Dekker
/// on [v_min(x)/2, 1.1 v_max] when an iterate leaves that bracket, vega
/// underflows, or the iteration budget runs out. Out-of-bracket targets are
/// reported unconverged with the best iterate rather than thrown.
/// Throws std::invalid_argument when no root can exist (c_target outside
/// (0, e^{x/2})).
RootSolveReport implied_vol_oracle(double x, double c_target,
                                   const OracleOptions& opts = {},
                                   const BoundaryCurves& curves = {});

RootSolveReport implied_vol_oracle(double x, double c_target, double tol);

class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Univariate interpolants of x -> c(x, v1(x)), c(x, v2(x)), c(x, v_max)
/// over the x range. c_min(x) is never interpolated; the engine prices it
/// directly.
struct BoundaryInterps {
  Cheb1D c1;
  Cheb1D c2;
  Cheb1D c_max;
};

/// Fit the three price curves, doubling the order (up to 256) until each
/// matches direct pricing to relative 1e-12 at 500 probe points. Throws
/// BuildError when the gate cannot be met.
BoundaryInterps build_boundary_interps(int order = 128,
                                       const BoundaryCurves& curves = {});

struct AreaBuildInfo {
  int rank = 0;
  int order_price = 0;   // points kept along the transformed-price variable
  int order_x = 0;       // points kept along the moneyness variable
  double residual = 0.0; // final pivot residual in v units
};

struct SurfaceModel {
  Preset preset = Preset::Low;
  BoundaryCurves curves;                // includes delta
  BoundaryInterps boundary;
  std::array<LowRank2D, 4> areas;       // indexed by AreaId
  std::array<AreaBuildInfo, 4> info;
  double oracle_tol = 0.0;              // node-inversion tolerance used
  std::string timestamp;                // metadata only
};

/// x interval covered by one area's moneyness axis.
Interval area_x_interval(AreaId area, const BoundaryCurves& curves);

/// Offline build of one area: the target (t_c, t_x) -> v is sampled through
/// the oracle at tolerance preset_tol*1e-2 and cross-approximated with an
/// absolute pivot threshold of preset_tol/2.
LowRank2D build_area(AreaId area, Preset preset, const BoundaryCurves& curves,
                     const BoundaryInterps& boundary,
                     AreaBuildInfo* info = nullptr);

SurfaceModel build_surface(Preset preset, double delta = 1.0);

/// Single-rectangle interpolant over x in x_range and c = xi e^{x/2},
/// xi in [xi_min, xi_max], built on a fixed (N+1)^2 grid.
struct SimpleSurface {
  LowRank2D interp;   // over (t_c, t_x) in [-1,1]^2
  Interval x_range{-5.0, 0.0};
  double xi_min = 0.05;
  double xi_max = 0.8;
};

SimpleSurface build_simple_surface(int n, Interval x_range = {-5.0, 0.0},
                                   double xi_min = 0.05, double xi_max = 0.8);

/// Evaluate the single-rectangle model at (x, c). Throws std::domain_error
/// outside the rectangle.
double simple_invert(const SimpleSurface& s, double x, double c);

}  // namespace chebiv
