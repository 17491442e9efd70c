// Acceptance suite: end-to-end checks of the full engine, one line per
// criterion. Exit code = number of failed criteria.
//
//   ./acceptance [--seed N]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chebiv/engine.hpp"
#include "chebiv/laplace.hpp"
#include "chebiv/model_io.hpp"

using namespace chebiv;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%-4s criterion %2d %-28s %s\n", pass ? "PASS" : "FAIL", id,
              name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct GridErr {
  double max_dv = 0.0;
  double max_dc = 0.0;
};

// Error-table grid: equidistant x, then per x equidistant v between the
// domain bounds, priced forward and inverted back.
GridErr domain_grid_errors(const SurfaceModel& m, bool d2, int grid) {
  GridErr e;
  for (int i = 0; i < grid; ++i) {
    double x, v_lo, v_hi;
    if (d2) {
      x = -5.0 + 5.0 * i / (grid - 1.0);
      v_lo = m.curves.v_min(x);
      v_hi = m.curves.v_max;
    } else {
      x = -0.5 + 1.0 * i / (grid - 1.0);
      v_lo = std::fmax(0.5 * std::fabs(x), m.curves.v_min(-std::fabs(x)));
      v_hi = 1.0;
    }
    for (int j = 0; j < grid; ++j) {
      const double v = v_lo + (v_hi - v_lo) * j / (grid - 1.0);
      const double c = normalized_call(x, v);
      const auto r = invert(m, x, c);
      if (r.status != InvertStatus::Ok) {
        e.max_dv = 1e9;  // a rejected in-domain point is a hard failure
        return e;
      }
      const double xr = -std::fabs(x);
      e.max_dv = std::fmax(e.max_dv, std::fabs(r.v - v));
      e.max_dc = std::fmax(e.max_dc, std::fabs(normalized_call(xr, r.v) -
                                               normalized_call(xr, v)));
    }
  }
  return e;
}

double simple_grid_err(const SimpleSurface& s, int grid) {
  OracleOptions oracle;
  oracle.tol = 1e-13;
  oracle.v_accuracy = true;
  double worst = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = -5.0 + 5.0 * i / (grid - 1.0);
    const double cap = std::exp(0.5 * x);
    const double v_lo = implied_vol_oracle(x, 0.05 * cap, oracle).v;
    const double v_hi = implied_vol_oracle(x, 0.8 * cap, oracle).v;
    for (int j = 0; j < grid; ++j) {
      const double v = v_lo + (v_hi - v_lo) * j / (grid - 1.0);
      worst = std::fmax(
          worst, std::fabs(simple_invert(s, x, normalized_call(x, v)) - v));
    }
  }
  return worst;
}

double laplace_grid_err(const LaplaceSurface& s, int grid) {
  double worst = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = -0.4 + 0.4 * i / (grid - 1.0);
    for (int j = 0; j < grid; ++j) {
      const double v = 0.25 + 0.75 * j / (grid - 1.0);
      const auto r = laplace_invert(s, x, laplace_normalized_call(x, v));
      if (r.status != InvertStatus::Ok) return 1e9;
      worst = std::fmax(worst, std::fabs(r.v - v));
    }
  }
  return worst;
}

std::string eng(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

void criterion_1_simple_decay() {
  const double t0 = now_seconds();
  std::vector<double> errs;
  for (int n : {10, 20, 30, 40, 50}) {
    errs.push_back(simple_grid_err(build_simple_surface(n), 100));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < errs.size(); ++i) {
    if (!(errs[i] < errs[i - 1])) monotone = false;
  }
  const double dt = now_seconds() - t0;
  std::ostringstream d;
  d << "max_err(N=50) " << eng(errs.back()) << " < 1e-7, decay";
  for (double e : errs) d << ' ' << eng(e);
  d << ", " << eng(dt) << "s";
  report(1, "simple-domain decay", errs.back() < 1e-7 && monotone && dt < 120.0,
         d.str());
}

void criterion_2_d2(const SurfaceModel* models, const double* build_secs) {
  const double dv_band[3] = {5.1e-5, 1e-7, 5e-10};
  const double dc_band[3] = {1e-5, 1e-8, 5e-11};
  for (int p = 0; p < 3; ++p) {
    const double t0 = now_seconds();
    const GridErr e = domain_grid_errors(models[p], true, 200);
    const double dt = now_seconds() - t0 + build_secs[p];
    std::ostringstream d;
    d << preset_name(static_cast<Preset>(p)) << ": max|dsigma| "
      << eng(e.max_dv) << " < " << eng(dv_band[p]) << ", max|dc| "
      << eng(e.max_dc) << " < " << eng(dc_band[p]) << ", " << eng(dt)
      << "s incl. build";
    report(2, "D2 accuracy (200x200)",
           e.max_dv < dv_band[p] && e.max_dc < dc_band[p] && dt < 300.0,
           d.str());
  }
}

void criterion_3_d1(const SurfaceModel* models) {
  const double dv_band[3] = {5e-5, 1e-7, 1e-10};
  for (int p = 0; p < 3; ++p) {
    const GridErr e = domain_grid_errors(models[p], false, 200);
    std::ostringstream d;
    d << preset_name(static_cast<Preset>(p)) << ": max|dsigma| "
      << eng(e.max_dv) << " < " << eng(dv_band[p]);
    report(3, "D1 accuracy (200x200)", e.max_dv < dv_band[p], d.str());
  }
}

void criterion_4_footprint(const SurfaceModel* models) {
  // Reference rank k and grid sizes N1 (price), N2 (moneyness) per area.
  const int ref[3][4][3] = {
      {{10, 25, 36}, {9, 27, 18}, {6, 21, 20}, {5, 11, 9}},
      {{16, 46, 79}, {16, 51, 39}, {11, 36, 33}, {7, 17, 14}},
      {{22, 67, 122}, {23, 77, 57}, {14, 51, 47}, {9, 23, 19}},
  };
  for (int p = 0; p < 3; ++p) {
    bool ok = true;
    std::ostringstream d;
    d << preset_name(static_cast<Preset>(p)) << ":";
    for (int a = 0; a < 4; ++a) {
      const auto& info = models[p].info[a];
      const int got[3] = {info.rank, info.order_price, info.order_x};
      d << ' ' << area_name(static_cast<AreaId>(a)) << "(k" << got[0] << ",N"
        << got[1] << "," << got[2] << ")";
      for (int t = 0; t < 3; ++t) {
        if (!(2.0 * got[t] >= ref[p][a][t] && got[t] <= 2 * ref[p][a][t])) {
          ok = false;
        }
      }
    }
    report(4, "rank/grid footprint", ok, d.str());
  }
}

void criterion_5_laplace_decay() {
  std::vector<double> errs;
  for (int n : {10, 20, 30, 40, 50}) {
    errs.push_back(laplace_grid_err(build_laplace_surface(n, 1e-13), 100));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < errs.size(); ++i) {
    if (!(errs[i] < errs[i - 1])) monotone = false;
  }
  std::ostringstream d;
  d << "max_err(N=50) " << eng(errs.back()) << " < 1e-10, decay";
  for (double e : errs) d << ' ' << eng(e);
  report(5, "Laplace decay", errs.back() < 1e-10 && monotone, d.str());
}

void criterion_6_oracle(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ux(-5.0, 0.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const BoundaryCurves curves;
  OracleOptions newton, brent;
  newton.tol = brent.tol = 1e-13;
  newton.v_accuracy = brent.v_accuracy = true;
  newton.mode = OracleOptions::Mode::NewtonOnly;
  brent.mode = OracleOptions::Mode::BrentOnly;
  int newton_ok = 0, agree = 0, roundtrip = 0;
  const int n = 10000;
  double worst_rt = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = ux(gen);
    const double vmin = curves.v_min(x);
    const double v = vmin + u01(gen) * (6.0 - vmin);
    const double c = normalized_call(x, v);
    const auto rb = implied_vol_oracle(x, c, brent, curves);
    const auto rn = implied_vol_oracle(x, c, newton, curves);
    if (rb.converged && std::fabs(rb.v - v) <= 1e-12) ++roundtrip;
    worst_rt = std::fmax(worst_rt, std::fabs(rb.v - v));
    if (rn.converged) {
      ++newton_ok;
      if (std::fabs(rn.v - rb.v) <= 1e-12) ++agree;
    }
  }
  std::ostringstream d;
  d << "agree " << agree << "/" << newton_ok << " (Newton direct "
    << newton_ok << "/" << n << ", rest via fallback), round-trip "
    << roundtrip << "/" << n << " worst " << eng(worst_rt);
  report(6, "oracle integrity",
         agree == newton_ok && roundtrip == n && newton_ok > n * 9 / 10,
         d.str());
}

void criterion_7_derivative(const SurfaceModel& high, std::uint64_t seed) {
  std::mt19937_64 gen(seed + 7);
  std::uniform_real_distribution<double> ux(-4.95, -0.02);
  std::uniform_real_distribution<double> u01(0.03, 0.97);
  int tested = 0, id_ok = 0, fd_ok = 0;
  while (tested < 1000) {
    const double x = ux(gen);
    const double vmin = high.curves.v_min(x);
    const double v = vmin + u01(gen) * (6.0 - vmin);
    const double c = normalized_call(x, v);
    const auto r = invert(high, x, c);
    if (r.status != InvertStatus::Ok) continue;
    const double vega = vega_normalized(x, r.v);
    if (vega < 1e-30) continue;
    double d;
    try {
      d = dvdc(high, x, c);
    } catch (const std::domain_error&) {
      continue;
    }
    const double h = 4e-6 * c;
    const auto up = invert(high, x, c + h);
    const auto dn = invert(high, x, c - h);
    if (up.status != InvertStatus::Ok || dn.status != InvertStatus::Ok ||
        up.area != r.area || dn.area != r.area) {
      continue;
    }
    ++tested;
    if (std::fabs(d * vega - 1.0) < 1e-4) ++id_ok;
    const double fd = (up.v - dn.v) / (2.0 * h);
    if (std::fabs(d - fd) <= 1e-4 * std::fabs(fd)) ++fd_ok;
  }
  std::ostringstream d;
  d << "dvdc*vega identity " << id_ok << "/1000, finite-difference " << fd_ok
    << "/1000 at rel 1e-4";
  report(7, "derivative correctness", id_ok == 1000 && fd_ok == 1000, d.str());
}

void criterion_8_seams(const SurfaceModel* models) {
  for (int p = 0; p < 3; ++p) {
    const SurfaceModel& m = models[p];
    const double budget = 2.0 * preset_tol(static_cast<Preset>(p));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = -5.0 + 5.0 * i / 999.0;
      const double c1 = cheb_eval_1d(m.boundary.c1, x);
      const AreaId low = x >= m.curves.x_split ? AreaId::IPrime : AreaId::I;
      worst = std::fmax(worst, std::fabs(eval_area(m, low, x, c1) -
                                         eval_area(m, AreaId::II, x, c1)));
      const double c2 = cheb_eval_1d(m.boundary.c2, x);
      worst = std::fmax(worst, std::fabs(eval_area(m, AreaId::II, x, c2) -
                                         eval_area(m, AreaId::III, x, c2)));
      const double xs = m.curves.x_split;
      const double c = phi1_inv(-1.0 + 2.0 * i / 999.0, xs,
                                normalized_call(xs, m.curves.v_min(xs)),
                                cheb_eval_1d(m.boundary.c1, xs),
                                m.curves.delta);
      worst = std::fmax(worst, std::fabs(eval_area(m, AreaId::I, xs, c) -
                                         eval_area(m, AreaId::IPrime, xs, c)));
    }
    std::ostringstream d;
    d << preset_name(static_cast<Preset>(p)) << ": worst seam gap "
      << eng(worst) << " <= " << eng(budget);
    report(8, "seam continuity", worst <= budget, d.str());
  }
}

void criterion_9_performance(const SurfaceModel& medium, std::uint64_t seed) {
  std::mt19937_64 gen(seed + 9);
  std::uniform_real_distribution<double> ux(-5.0, 0.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int n = 1000000;
  std::vector<NormalizedQuote> quotes;
  quotes.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = ux(gen);
    const double vmin = medium.curves.v_min(x);
    quotes.push_back({x, normalized_call(x, vmin + u01(gen) * (6.0 - vmin))});
  }
  double t0 = now_seconds();
  const auto res = invert_batch(medium, quotes);
  const double engine_time = now_seconds() - t0;
  long ok = 0;
  for (const auto& r : res) ok += r.status == InvertStatus::Ok;

  OracleOptions oracle;
  oracle.tol = 1e-9;  // match the engine preset's accuracy target
  t0 = now_seconds();
  double sink = 0.0;
  for (const auto& q : quotes) {
    sink += implied_vol_oracle(q.x, q.c, oracle, medium.curves).v;
  }
  const double oracle_time = now_seconds() - t0;

  std::ostringstream d;
  d << "engine " << eng(engine_time) << "s vs Newton oracle "
    << eng(oracle_time) << "s, speedup x"
    << eng(oracle_time / engine_time) << " (" << ok << "/" << n
    << " ok, checksum " << eng(sink) << ")";
  report(9, "batch performance", ok == n && engine_time < oracle_time,
         d.str());
}

void criterion_10_persistence(const SurfaceModel* models, std::uint64_t seed) {
  for (int p = 0; p < 3; ++p) {
    const SurfaceModel& m = models[p];
    std::istringstream in(serialize_surface(m));
    const SurfaceModel m2 = deserialize_surface(in);
    std::mt19937_64 gen(seed + 10 + p);
    std::uniform_real_distribution<double> ux(-5.0, 0.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int identical = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const double x = ux(gen);
      const double vmin = m.curves.v_min(x);
      const double c = normalized_call(x, vmin + u01(gen) * (6.0 - vmin));
      const auto r1 = invert(m, x, c);
      const auto r2 = invert(m2, x, c);
      if (r1.status == r2.status &&
          (r1.status != InvertStatus::Ok ||
           (r1.v == r2.v && r1.area == r2.area))) {
        ++identical;
      }
    }
    std::ostringstream d;
    d << preset_name(static_cast<Preset>(p)) << ": " << identical << "/" << n
      << " evaluations bit-identical after round trip";
    report(10, "persistence", identical == n, d.str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 20240817ULL;
  for (int i = 1; i + 1 < argc + 1; ++i) {
    if (i + 1 < argc && std::strcmp(argv[i], "--seed") == 0) {
      seed = std::strtoull(argv[i + 1], nullptr, 10);
    }
  }
  std::printf("acceptance suite, seed %llu\n",
              static_cast<unsigned long long>(seed));

  SurfaceModel models[3];
  double build_secs[3];
  for (int p = 0; p < 3; ++p) {
    const double t0 = now_seconds();
    models[p] = build_surface(static_cast<Preset>(p));
    build_secs[p] = now_seconds() - t0;
  }

  criterion_1_simple_decay();
  criterion_2_d2(models, build_secs);
  criterion_3_d1(models);
  criterion_4_footprint(models);
  criterion_5_laplace_decay();
  criterion_6_oracle(seed);
  criterion_7_derivative(models[2], seed);
  criterion_8_seams(models);
  criterion_9_performance(models[1], seed);
  criterion_10_persistence(models, seed);

  std::printf("%s (%d failure%s)\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
              g_failures, g_failures == 1 ? "" : "s");
  return g_failures;
}
