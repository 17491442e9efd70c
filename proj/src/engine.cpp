#include "chebiv/engine.hpp"

#include <cmath>
#include <limits>

namespace chebiv {

namespace {

// Relative widening of the outer price bounds during classification; absorbs
// the boundary interpolants' own error at the exact domain edges.
constexpr double kClassifyCollar = 1e-9;
constexpr double kSeamCollar = 1e-12;

inline double snap_unit(double t) { return std::fmin(std::fmax(t, -1.0), 1.0); }

struct Frame {
  // Shared per-quote state: reduced coordinates and boundary prices.
  double x;
  double c;
  Classification cls;
  double c_min = 0.0;  // filled only when the low areas are reached
  double c1 = 0.0;
  double c2 = 0.0;
  double c_max = 0.0;
};

// Staged classification in the cheap-first order: c_max, then c2, then c1;
// c_min (the expensive direct price) only for candidates of the low areas.
// The three boundary interpolants share the moneyness variable, so one
// recurrence table serves all of them.
Frame classify_quote(const SurfaceModel& m, double x, double c) {
  Frame f{x, c, Classification::OutOfDomainLow};
  const auto& curves = m.curves;

  constexpr int kStack = 288;
  double tab[kStack];
  const int top = std::max({m.boundary.c_max.order(), m.boundary.c2.order(),
                            m.boundary.c1.order()});
  const double s = detail::to_unit(x, m.boundary.c_max.interval);
  detail::fill_cheb_table(s, std::min(top, kStack - 1), tab);
  auto eval = [&](const Cheb1D& p) {
    return p.order() < kStack ? detail::dot_cheb(p.coeffs, tab)
                              : cheb_eval_1d(p, x);
  };

  f.c_max = eval(m.boundary.c_max);
  if (c > f.c_max * (1.0 + kClassifyCollar)) {
    f.cls = Classification::OutOfDomainHigh;
    return f;
  }
  f.c2 = eval(m.boundary.c2);
  if (c >= f.c2) {
    f.cls = Classification::AreaIII;
    return f;
  }
  f.c1 = eval(m.boundary.c1);
  if (c >= f.c1) {
    f.cls = Classification::AreaII;
    return f;
  }
  f.c_min = normalized_call(x, curves.v_min(x));
  if (c < f.c_min * (1.0 - kClassifyCollar)) {
    f.cls = Classification::OutOfDomainLow;
    return f;
  }
  f.cls = x >= curves.x_split ? Classification::AreaIPrime
                              : Classification::AreaI;
  return f;
}

AreaId area_of(Classification cls) {
  switch (cls) {
    case Classification::AreaI: return AreaId::I;
    case Classification::AreaIPrime: return AreaId::IPrime;
    case Classification::AreaII: return AreaId::II;
    default: return AreaId::III;
  }
}

double transform_price(const SurfaceModel& m, AreaId area, const Frame& f) {
  const auto& curves = m.curves;
  switch (area) {
    case AreaId::I:
    case AreaId::IPrime: {
      const double c = std::fmax(f.c, f.c_min);
      return phi1(std::fmin(c, f.c1), f.x, f.c_min, f.c1, curves.delta);
    }
    case AreaId::II:
      return phi2(std::fmin(f.c, f.c2), f.c1, f.c2);
    case AreaId::III:
    default:
      return phi3(std::fmin(f.c, f.c_max), f.x, f.c2, f.c_max);
  }
}

}  // namespace

const char* invert_status_name(InvertStatus s) {
  switch (s) {
    case InvertStatus::Ok: return "ok";
    case InvertStatus::OutOfDomainLow: return "out-of-domain-low";
    case InvertStatus::OutOfDomainHigh: return "out-of-domain-high";
    case InvertStatus::ArbitrageViolation: return "arbitrage-violation";
  }
  return "?";
}

namespace {

// Everything before the interpolant evaluation: reduction, classification
// and the price/moneyness transforms. Shared verbatim between the scalar
// and the batched entry points.
struct Prepared {
  InvertStatus status = InvertStatus::Ok;
  AreaId area = AreaId::II;
  double t_c = 0.0;
  double t_x = 0.0;
  double v_floor = 0.0;
  bool decided = false;  // status settled without an evaluation
};

Prepared prepare_quote(const SurfaceModel& m, double x, double c) {
  Prepared p;
  if (!std::isfinite(x) || !std::isfinite(c) || !(c > 0.0)) {
    p.status = InvertStatus::ArbitrageViolation;
    p.decided = true;
    return p;
  }
  if (x > 0.0) {
    const double intrinsic = 2.0 * std::sinh(0.5 * x);
    if (c >= std::exp(0.5 * x) || c <= intrinsic) {
      p.status = InvertStatus::ArbitrageViolation;
      p.decided = true;
      return p;
    }
    c -= intrinsic;
    x = -x;
  }
  const auto& xr = m.curves.x_range;
  if (x < xr.lo) {
    if (x < xr.lo - 1e-12) {
      p.status = InvertStatus::OutOfDomainLow;
      p.area = AreaId::I;
      p.decided = true;
      return p;
    }
    x = xr.lo;
  }

  const Frame f = classify_quote(m, x, c);
  if (f.cls == Classification::OutOfDomainHigh) {
    p.status = InvertStatus::OutOfDomainHigh;
    p.area = AreaId::III;
    p.decided = true;
    return p;
  }
  if (f.cls == Classification::OutOfDomainLow) {
    p.status = InvertStatus::OutOfDomainLow;
    p.area = AreaId::I;
    p.decided = true;
    return p;
  }
  p.area = area_of(f.cls);
  p.t_c = snap_unit(transform_price(m, p.area, f));
  p.t_x = snap_unit(phi_x(f.x, area_x_interval(p.area, m.curves)));
  p.v_floor = m.curves.v_min(f.x);
  return p;
}

}  // namespace

InversionResult invert(const SurfaceModel& m, double x, double c) {
  const Prepared p = prepare_quote(m, x, c);
  if (p.decided) return {p.status, p.area, 0.0};
  double v = lowrank_eval_2d(m.areas[static_cast<int>(p.area)], p.t_c, p.t_x);
  v = std::fmin(std::fmax(v, p.v_floor), m.curves.v_max);
  return {InvertStatus::Ok, p.area, v};
}

std::vector<InversionResult> invert_batch(
    const SurfaceModel& m, std::span<const NormalizedQuote> quotes) {
  const std::size_t n = quotes.size();
  std::vector<InversionResult> out(n);

  struct Lane {
    std::uint32_t idx;
    double t_c;
    double t_x;
    double v_floor;
  };
  std::array<std::vector<Lane>, 4> buckets;
  for (auto& b : buckets) b.reserve(n / 2 + 8);

  for (std::size_t i = 0; i < n; ++i) {
    const Prepared p = prepare_quote(m, quotes[i].x, quotes[i].c);
    if (p.decided) {
      out[i] = {p.status, p.area, 0.0};
    } else {
      buckets[static_cast<int>(p.area)].push_back(
          {static_cast<std::uint32_t>(i), p.t_c, p.t_x, p.v_floor});
    }
  }

  // Full blocks go through the lane-parallel kernel, the remainder through
  // the scalar path; both produce identical bits.
  constexpr int B = detail::kEvalBlock;
  for (int a = 0; a < 4; ++a) {
    const auto& lanes = buckets[a];
    const auto& model = m.areas[a];
    std::size_t i = 0;
    double s1[B], s2[B], v[B];
    for (; i + B <= lanes.size(); i += B) {
      for (int q = 0; q < B; ++q) {
        s1[q] = lanes[i + q].t_c;
        s2[q] = lanes[i + q].t_x;
      }
      detail::lowrank_eval_block8(model, s1, s2, v);
      for (int q = 0; q < B; ++q) {
        const Lane& l = lanes[i + q];
        out[l.idx] = {InvertStatus::Ok, static_cast<AreaId>(a),
                      std::fmin(std::fmax(v[q], l.v_floor), m.curves.v_max)};
      }
    }
    for (; i < lanes.size(); ++i) {
      const Lane& l = lanes[i];
      const double vi = lowrank_eval_2d(model, l.t_c, l.t_x);
      out[l.idx] = {InvertStatus::Ok, static_cast<AreaId>(a),
                    std::fmin(std::fmax(vi, l.v_floor), m.curves.v_max)};
    }
  }
  return out;
}

double dvdc(const SurfaceModel& m, double x, double c) {
  InversionResult probe = invert(m, x, c);
  if (probe.status != InvertStatus::Ok) {
    throw std::domain_error("dvdc: point not invertible");
  }
  if (x > 0.0) {
    // dc'/dc = 1 under the in-the-money shift, so the chain contributes
    // nothing; differentiate at the reduced point.
    c -= 2.0 * std::sinh(0.5 * x);
    x = -x;
  }
  const Frame f = classify_quote(m, x, c);
  const AreaId area = area_of(f.cls);

  auto near = [](double a, double b) {
    return std::fabs(a - b) <= kSeamCollar * std::fmax(1.0, std::fabs(b));
  };
  if (near(c, f.c1) || near(c, f.c2) ||
      ((area == AreaId::I || area == AreaId::IPrime) &&
       std::fabs(x - m.curves.x_split) <= kSeamCollar)) {
    throw std::domain_error("dvdc: point on an internal seam");
  }

  double t_c, dtdc;
  switch (area) {
    case AreaId::I:
    case AreaId::IPrime:
      t_c = phi1(c, x, f.c_min, f.c1, m.curves.delta);
      dtdc = phi1_deriv(c, x, f.c_min, f.c1, m.curves.delta);
      break;
    case AreaId::II:
      t_c = phi2(c, f.c1, f.c2);
      dtdc = phi2_deriv(f.c1, f.c2);
      break;
    case AreaId::III:
    default:
      t_c = phi3(c, x, f.c2, f.c_max);
      dtdc = phi3_deriv(c, x, f.c2, f.c_max);
      break;
  }
  const double t_x = snap_unit(phi_x(x, area_x_interval(area, m.curves)));
  const auto& lr = m.areas[static_cast<int>(area)];

  std::vector<double> tab(lr.max_col_order() + 1);
  detail::fill_cheb_table(detail::to_unit(t_x, lr.iv2),
                          static_cast<int>(tab.size()) - 1, tab.data());
  double sum = 0.0;
  for (int j = 0; j < lr.rank(); ++j) {
    sum += lr.weights[j] * detail::dot_cheb(lr.cols[j].coeffs, tab.data()) *
           cheb_eval_deriv_1d(lr.rows[j], snap_unit(t_c));
  }
  return sum * dtdc;
}

QuoteInversionResult invert_quote(const SurfaceModel& m, const OptionQuote& q) {
  QuoteInversionResult out;
  NormalizedQuote n;
  try {
    n = normalize_quote(q);
    n = reduce_to_otm(n.x, n.c);
  } catch (const std::domain_error&) {
    out.status = InvertStatus::ArbitrageViolation;
    out.x = out.c = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.x = n.x;
  out.c = n.c;
  const InversionResult r = invert(m, n.x, n.c);
  out.status = r.status;
  out.area = r.area;
  if (r.status == InvertStatus::Ok) {
    out.v = r.v;
    out.sigma = r.v / std::sqrt(q.maturity);
  }
  return out;
}

double eval_area(const SurfaceModel& m, AreaId area, double x, double c) {
  Frame f{x, c, Classification::AreaII};
  f.c_max = cheb_eval_1d(m.boundary.c_max, x);
  f.c2 = cheb_eval_1d(m.boundary.c2, x);
  f.c1 = cheb_eval_1d(m.boundary.c1, x);
  if (area == AreaId::I || area == AreaId::IPrime) {
    f.c_min = normalized_call(x, m.curves.v_min(x));
  }
  const double t_c = snap_unit(transform_price(m, area, f));
  const double t_x = snap_unit(phi_x(x, area_x_interval(area, m.curves)));
  return lowrank_eval_2d(m.areas[static_cast<int>(area)], t_c, t_x);
}

}  // namespace chebiv
