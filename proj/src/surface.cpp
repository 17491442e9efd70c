#include "chebiv/surface.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "chebiv/bs_core.hpp"
#include "brent.hpp"

namespace chebiv {

double preset_tol(Preset p) {
  switch (p) {
    case Preset::Low: return 1e-6;
    case Preset::Medium: return 1e-9;
    case Preset::High: return 1e-12;
  }
  return 1e-6;
}

const char* preset_name(Preset p) {
  switch (p) {
    case Preset::Low: return "low";
    case Preset::Medium: return "medium";
    case Preset::High: return "high";
  }
  return "?";
}

bool preset_from_name(const std::string& s, Preset* out) {
  if (s == "low") { *out = Preset::Low; return true; }
  if (s == "medium") { *out = Preset::Medium; return true; }
  if (s == "high") { *out = Preset::High; return true; }
  return false;
}

namespace {

RootSolveReport brent_phase(double x, double c_target, double lo, double hi,
                            const OracleOptions& opts, int used_iterations) {
  auto fn = [&](double v) { return normalized_call(x, v) - c_target; };
  const double f_tol =
      opts.v_accuracy ? 0.0
                      : opts.tol * std::fmax(std::fabs(c_target), 1e-300);
  const auto br = detail::brent_root(fn, lo, hi, opts.tol,
                                     f_tol, opts.max_iter);
  RootSolveReport rep;
  rep.v = br.root;
  rep.iterations = used_iterations + br.iterations;
  rep.method = RootMethod::Brent;
  rep.residual = std::fabs(br.f_root);
  rep.converged = br.converged;
  return rep;
}

}  // namespace

RootSolveReport implied_vol_oracle(double x, double c_target,
                                   const OracleOptions& opts,
                                   const BoundaryCurves& curves) {
  if (!(c_target > 0.0) || !(c_target < std::exp(0.5 * x))) {
    throw std::invalid_argument(
        "implied_vol_oracle: target outside (0, e^{x/2}), no root exists");
  }
  const double v_floor = curves.v_min(x);
  const double lo = 0.5 * v_floor;
  const double hi = 1.1 * curves.v_max;

  if (opts.mode == OracleOptions::Mode::BrentOnly) {
    return brent_phase(x, c_target, lo, hi, opts, 0);
  }

  // Newton-Raphson from the inflection point, clamped into the volatility
  // band; this is the vega maximizer, so early steps are well scaled.
  double v = std::fmin(std::fmax(inflection_vol(x), v_floor), curves.v_max);
  const double c_tol = opts.tol * std::fmax(std::fabs(c_target), 1e-300);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double diff = normalized_call(x, v) - c_target;
    if (!opts.v_accuracy && std::fabs(diff) <= c_tol) {
      return {v, it + 1, RootMethod::Newton, std::fabs(diff), true};
    }
    const double slope = vega_normalized(x, v);
    if (!(slope > 1e-300)) break;  // flat: Newton cannot move
    const double v_next = v - diff / slope;
    if (!(v_next > lo) || !(v_next < hi)) break;  // left the bracket
    if (std::fabs(v_next - v) <= opts.tol * std::fmax(1.0, std::fabs(v))) {
      v = v_next;
      const double res = std::fabs(normalized_call(x, v) - c_target);
      return {v, it + 2, RootMethod::Newton, res, true};
    }
    v = v_next;
  }

  if (opts.mode == OracleOptions::Mode::NewtonOnly) {
    RootSolveReport rep;
    rep.v = v;
    rep.iterations = it;
    rep.method = RootMethod::Newton;
    rep.residual = std::fabs(normalized_call(x, v) - c_target);
    rep.converged = false;
    return rep;
  }
  return brent_phase(x, c_target, lo, hi, opts, it);
}

RootSolveReport implied_vol_oracle(double x, double c_target, double tol) {
  OracleOptions opts;
  opts.tol = tol;
  return implied_vol_oracle(x, c_target, opts);
}

namespace {

double boundary_curve_price(const BoundaryCurves& curves, int which, double x) {
  switch (which) {
    case 0: return normalized_call(x, curves.v1(x));
    case 1: return normalized_call(x, curves.v2(x));
    default: return normalized_call(x, curves.v_max);
  }
}

Cheb1D fit_boundary_curve(const BoundaryCurves& curves, int which, int order) {
  const auto nodes = cheb_nodes(order);
  std::vector<double> values(nodes.size());
  const Interval xr = curves.x_range;
  const double mid = 0.5 * (xr.lo + xr.hi);
  const double half = 0.5 * (xr.hi - xr.lo);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    double x = mid + half * nodes[k];
    if (k == 0) x = xr.hi;
    if (k + 1 == nodes.size()) x = xr.lo;
    values[k] = boundary_curve_price(curves, which, x);
  }
  return cheb_fit_1d(values, xr);
}

}  // namespace

BoundaryInterps build_boundary_interps(int order, const BoundaryCurves& curves) {
  if (order < 16) {
    throw std::invalid_argument("build_boundary_interps: order must be >= 16");
  }
  BoundaryInterps out;
  for (int which = 0; which < 3; ++which) {
    bool done = false;
    for (int n = order; n <= 256; n *= 2) {
      Cheb1D fit = fit_boundary_curve(curves, which, n);
      auto gate = [&](const Cheb1D& p) {
        double worst = 0.0;
        for (int i = 0; i < 500; ++i) {
          const double x = curves.x_range.lo +
                           (curves.x_range.hi - curves.x_range.lo) * i / 499.0;
          const double exact = boundary_curve_price(curves, which, x);
          worst = std::fmax(worst, std::fabs(cheb_eval_1d(p, x) - exact) /
                                       std::fabs(exact));
        }
        return worst < 1e-12;
      };
      if (!gate(fit)) continue;
      // Cut the machine-noise tail; keep the cut only if the gate survives.
      Cheb1D trimmed = fit;
      double top = 0.0;
      for (double a : trimmed.coeffs) top = std::fmax(top, std::fabs(a));
      std::size_t keep = trimmed.coeffs.size();
      while (keep > 1 && std::fabs(trimmed.coeffs[keep - 1]) < 1e-15 * top) {
        --keep;
      }
      trimmed.coeffs.resize(keep);
      if (gate(trimmed)) fit = std::move(trimmed);
      if (which == 0) out.c1 = std::move(fit);
      else if (which == 1) out.c2 = std::move(fit);
      else out.c_max = std::move(fit);
      done = true;
      break;
    }
    if (!done) {
      throw BuildError(
          "build_boundary_interps: 1e-12 relative gate unmet at order 256");
    }
  }
  return out;
}

Interval area_x_interval(AreaId area, const BoundaryCurves& curves) {
  switch (area) {
    case AreaId::I: return {curves.x_range.lo, curves.x_split};
    case AreaId::IPrime: return {curves.x_split, curves.x_range.hi};
    default: return curves.x_range;
  }
}

namespace {

// Price at the transformed coordinate t_c for a given x, through the same
// boundary-interpolant frame the online engine uses.
double area_price_from_tc(AreaId area, double t_c, double x,
                          const BoundaryCurves& curves,
                          const BoundaryInterps& boundary) {
  switch (area) {
    case AreaId::I:
    case AreaId::IPrime: {
      const double c_min = normalized_call(x, curves.v_min(x));
      const double c1 = cheb_eval_1d(boundary.c1, x);
      return phi1_inv(t_c, x, c_min, c1, curves.delta);
    }
    case AreaId::II: {
      const double c1 = cheb_eval_1d(boundary.c1, x);
      const double c2 = cheb_eval_1d(boundary.c2, x);
      return phi2_inv(t_c, c1, c2);
    }
    case AreaId::III:
    default: {
      const double c2 = cheb_eval_1d(boundary.c2, x);
      const double c_max = cheb_eval_1d(boundary.c_max, x);
      return phi3_inv(t_c, x, c2, c_max);
    }
  }
}

}  // namespace

LowRank2D build_area(AreaId area, Preset preset, const BoundaryCurves& curves,
                     const BoundaryInterps& boundary, AreaBuildInfo* info) {
  const double tol = preset_tol(preset);
  OracleOptions oracle;
  oracle.tol = tol * 1e-2;
  oracle.v_accuracy = true;

  const Interval xiv = area_x_interval(area, curves);
  auto target = [&](double t_c, double t_x) {
    const double x = phi_x_inv(t_x, xiv);
    const double c = area_price_from_tc(area, t_c, x, curves, boundary);
    const auto rep = implied_vol_oracle(x, c, oracle, curves);
    if (!rep.converged) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "build_area %s: node inversion failed at x=%.6g c=%.6g "
                    "(residual %.3g)",
                    area_name(area), x, c, rep.residual);
      throw BuildError(msg);
    }
    return rep.v;
  };

  LowRankOptions lr;
  // Half the preset tolerance as an absolute pivot stop keeps the seam
  // mismatch between adjacent areas inside 2*tol.
  lr.tol = 0.5 * tol;
  lr.tol_is_absolute = true;
  lr.max_rank = 64;
  lr.min_order = 16;
  lr.max_order = 128;

  LowRankBuildInfo raw;
  LowRank2D model =
      lowrank_fit_2d(target, {-1.0, 1.0}, {-1.0, 1.0}, lr, &raw);
  if (info) {
    info->rank = model.rank();
    info->order_price = model.max_row_order() + 1;
    info->order_x = model.max_col_order() + 1;
    info->residual = raw.residual * raw.scale;
  }
  return model;
}

SurfaceModel build_surface(Preset preset, double delta) {
  SurfaceModel m;
  m.preset = preset;
  m.curves.delta = delta;
  m.boundary = build_boundary_interps(128, m.curves);
  m.oracle_tol = preset_tol(preset) * 1e-2;
  for (int a = 0; a < 4; ++a) {
    m.areas[a] = build_area(static_cast<AreaId>(a), preset, m.curves,
                            m.boundary, &m.info[a]);
  }
  const auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m.timestamp = buf;
  return m;
}

SimpleSurface build_simple_surface(int n, Interval x_range, double xi_min,
                                   double xi_max) {
  if (n < 5) {
    throw std::invalid_argument("build_simple_surface: n must be >= 5");
  }
  SimpleSurface s;
  s.x_range = x_range;
  s.xi_min = xi_min;
  s.xi_max = xi_max;

  OracleOptions oracle;
  oracle.tol = 1e-13;
  oracle.v_accuracy = true;
  auto target = [&](double t_c, double t_x) {
    const double x = phi_x_inv(t_x, x_range);
    const double xi = xi_min + 0.5 * (t_c + 1.0) * (xi_max - xi_min);
    const double c = xi * std::exp(0.5 * x);
    const auto rep = implied_vol_oracle(x, c, oracle);
    if (!rep.converged) {
      throw BuildError("build_simple_surface: node inversion failed");
    }
    return rep.v;
  };
  s.interp = lowrank_fit_grid(target, n, n, {-1.0, 1.0}, {-1.0, 1.0}, 1e-13,
                              n + 1, nullptr);
  return s;
}

double simple_invert(const SimpleSurface& s, double x, double c) {
  const double xi = c * std::exp(-0.5 * x);
  if (!(xi >= s.xi_min * (1.0 - 1e-9)) || !(xi <= s.xi_max * (1.0 + 1e-9))) {
    throw std::domain_error("simple_invert: price outside the xi band");
  }
  double t_c = 2.0 * (xi - s.xi_min) / (s.xi_max - s.xi_min) - 1.0;
  t_c = std::fmin(std::fmax(t_c, -1.0), 1.0);
  const double t_x = phi_x(x, s.x_range);
  return lowrank_eval_2d(s.interp, t_c, t_x);
}

}  // namespace chebiv
