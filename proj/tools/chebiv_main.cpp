// Command-line front end: offline builds, batch inversion of quote files,
// accuracy validation grids and error-decay studies.
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chebiv/engine.hpp"
#include "chebiv/laplace.hpp"
#include "chebiv/model_io.hpp"
#include "chebiv/quotes.hpp"

namespace {

using namespace chebiv;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBuild = 3;

std::string fmt(double v, int digits = 17) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

int cmd_build(const std::string& preset_name_arg, double delta,
              const std::string& out_path) {
  Preset preset;
  if (!preset_from_name(preset_name_arg, &preset)) {
    std::cerr << "unknown preset '" << preset_name_arg
              << "' (expected low, medium or high)\n";
    return kExitUsage;
  }
  const SurfaceModel m = build_surface(preset, delta);
  write_file_atomic(out_path, serialize_surface(m));

  std::printf("preset %s (tol %.0e), delta %g -> %s\n", preset_name(preset),
              preset_tol(preset), delta, out_path.c_str());
  std::printf("%-8s %6s %6s %6s %12s\n", "area", "k", "N1", "N2", "residual");
  for (int a = 0; a < 4; ++a) {
    std::printf("%-8s %6d %6d %6d %12.3e\n",
                area_name(static_cast<AreaId>(a)), m.info[a].rank,
                m.info[a].order_price, m.info[a].order_x, m.info[a].residual);
  }
  return kExitOk;
}

int cmd_invert(const std::string& model_path, const std::string& quotes_path,
               const std::string& out_path) {
  const SurfaceModel m = load_surface_file(model_path);
  std::ifstream in(quotes_path);
  if (!in) {
    std::cerr << "cannot open quote file: " << quotes_path << "\n";
    return kExitData;
  }
  const QuoteFile qf = read_quote_file(in);
  for (const auto& e : qf.row_errors) {
    std::cerr << quotes_path << ": " << e << "\n";
  }

  std::ostringstream out;
  out << qf.header << ",x,c,area,v,sigma,status\n";
  for (const auto& row : qf.rows) {
    const QuoteInversionResult r = invert_quote(m, row.quote);
    out << row.raw << ',';
    if (std::isfinite(r.x)) out << fmt(r.x) << ',' << fmt(r.c) << ',';
    else out << ",,";
    if (r.status == InvertStatus::Ok) {
      out << area_name(r.area) << ',' << fmt(r.v) << ',' << fmt(r.sigma);
    } else {
      out << ",,";
    }
    out << ',' << invert_status_name(r.status) << '\n';
  }
  write_file_atomic(out_path, out.str());
  std::printf("%zu rows inverted (%zu malformed skipped) -> %s\n",
              qf.rows.size(), qf.row_errors.size(), out_path.c_str());
  return kExitOk;
}

int cmd_validate(const std::string& model_path, int grid,
                 const std::string& domain, const std::string& out_path) {
  const SurfaceModel m = load_surface_file(model_path);
  double max_dv = 0.0, sum_dv = 0.0, max_dc = 0.0, sum_dc = 0.0;
  long n = 0, rejected = 0;

  for (int i = 0; i < grid; ++i) {
    double x, v_lo, v_hi;
    if (domain == "D2") {
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
        ++rejected;
        continue;
      }
      const double dv = std::fabs(r.v - v);
      const double xr = -std::fabs(x);  // repricing on the reduced side
      const double dc =
          std::fabs(normalized_call(xr, r.v) - normalized_call(xr, v));
      max_dv = std::fmax(max_dv, dv);
      max_dc = std::fmax(max_dc, dc);
      sum_dv += dv;
      sum_dc += dc;
      ++n;
    }
  }
  std::ostringstream out;
  out << "domain,preset,grid,points,rejected,max_dsigma,mean_dsigma,max_dc,"
         "mean_dc\n";
  out << domain << ',' << preset_name(m.preset) << ',' << grid << ',' << n
      << ',' << rejected << ',' << fmt(max_dv, 9) << ',' << fmt(sum_dv / n, 9)
      << ',' << fmt(max_dc, 9) << ',' << fmt(sum_dc / n, 9) << '\n';
  write_file_atomic(out_path, out.str());
  std::printf("%s %s %dx%d: max|dsigma| %.3e mean %.3e  max|dc| %.3e mean "
              "%.3e (%ld points, %ld rejected) -> %s\n",
              domain.c_str(), preset_name(m.preset), grid, grid, max_dv,
              sum_dv / n, max_dc, sum_dc / n, n, rejected, out_path.c_str());
  return kExitOk;
}

// Reference grid of the single-rectangle study: equidistant x, then per x
// equidistant v between the volatilities implied by the xi band edges.
void simple_decay_errors(const SimpleSurface& s, int grid, double* max_err,
                         double* mean_err) {
  OracleOptions oracle;
  oracle.tol = 1e-13;
  oracle.v_accuracy = true;
  double worst = 0.0, sum = 0.0;
  long n = 0;
  for (int i = 0; i < grid; ++i) {
    const double x =
        s.x_range.lo + (s.x_range.hi - s.x_range.lo) * i / (grid - 1.0);
    const double cap = std::exp(0.5 * x);
    const double v_lo = implied_vol_oracle(x, s.xi_min * cap, oracle).v;
    const double v_hi = implied_vol_oracle(x, s.xi_max * cap, oracle).v;
    for (int j = 0; j < grid; ++j) {
      const double v = v_lo + (v_hi - v_lo) * j / (grid - 1.0);
      const double err =
          std::fabs(simple_invert(s, x, normalized_call(x, v)) - v);
      worst = std::fmax(worst, err);
      sum += err;
      ++n;
    }
  }
  *max_err = worst;
  *mean_err = sum / n;
}

void laplace_decay_errors(const LaplaceSurface& s, int grid, double* max_err,
                          double* mean_err) {
  double worst = 0.0, sum = 0.0;
  long n = 0;
  for (int i = 0; i < grid; ++i) {
    const double x =
        s.x_range.lo + (s.x_range.hi - s.x_range.lo) * i / (grid - 1.0);
    for (int j = 0; j < grid; ++j) {
      const double v = s.v_lo + (s.v_hi - s.v_lo) * j / (grid - 1.0);
      const auto r = laplace_invert(s, x, laplace_normalized_call(x, v));
      const double err = std::fabs(r.v - v);
      worst = std::fmax(worst, err);
      sum += err;
      ++n;
    }
  }
  *max_err = worst;
  *mean_err = sum / n;
}

int cmd_decay(const std::string& mode, const std::vector<int>& n_list,
              int grid, const std::string& out_path) {
  std::ostringstream out;
  out << "n,max_err,mean_err\n";
  for (int n : n_list) {
    double max_err = 0.0, mean_err = 0.0;
    if (mode == "simple") {
      const SimpleSurface s = build_simple_surface(n);
      simple_decay_errors(s, grid, &max_err, &mean_err);
    } else {
      const LaplaceSurface s = build_laplace_surface(n, 1e-13);
      laplace_decay_errors(s, grid, &max_err, &mean_err);
    }
    out << n << ',' << fmt(max_err, 9) << ',' << fmt(mean_err, 9) << '\n';
    std::printf("%s N=%3d  max_err %.3e  mean_err %.3e\n", mode.c_str(), n,
                max_err, mean_err);
  }
  write_file_atomic(out_path, out.str());
  return kExitOk;
}

int cmd_laplace_build(int n, double tol, const std::string& out_path) {
  const LaplaceSurface s = build_laplace_surface(n, tol);
  write_file_atomic(out_path, serialize_laplace(s));
  std::printf("laplace grid %d, tol %.0e, rank %d, residual %.3e -> %s\n", n,
              tol, s.interp.rank(), s.residual, out_path.c_str());
  return kExitOk;
}

int cmd_laplace_invert(const std::string& model_path,
                       const std::string& quotes_path,
                       const std::string& out_path) {
  const LaplaceSurface s = load_laplace_file(model_path);
  std::ifstream in(quotes_path);
  if (!in) {
    std::cerr << "cannot open input file: " << quotes_path << "\n";
    return kExitData;
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,c", 0) != 0) {
    std::cerr << quotes_path << ": header 'x,c' required\n";
    return kExitData;
  }
  std::ostringstream out;
  out << "x,c,v,status\n";
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    double x, c;
    if (std::sscanf(line.c_str(), "%lf,%lf", &x, &c) != 2) {
      std::cerr << quotes_path << ": line " << line_no << ": bad row\n";
      continue;
    }
    const auto r = laplace_invert(s, x, c);
    out << fmt(x) << ',' << fmt(c) << ',';
    if (r.status == InvertStatus::Ok) out << fmt(r.v);
    out << ',' << invert_status_name(r.status) << '\n';
  }
  write_file_atomic(out_path, out.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Implied-volatility engine on split-domain low-rank "
               "Chebyshev interpolants"};
  app.require_subcommand(1);

  // Accepted everywhere for reproducibility of sampled workflows; current
  // commands are fully grid-based and deterministic.
  std::uint64_t seed = 0;
  app.add_option("--seed", seed,
                 "Random seed (reserved; commands are deterministic)");

  std::string preset = "low", out, model, quotes, domain = "D2",
              mode = "simple";
  double delta = 1.0, tol = 1e-13;
  int grid = 100, n = 50;
  std::vector<int> n_list = {10, 20, 30, 40, 50};

  auto* build = app.add_subcommand("build", "Precompute a surface model");
  build->add_option("--preset", preset, "low|medium|high")->required();
  build->add_option("--delta", delta, "Low-volatility transform shift");
  build->add_option("--out", out, "Model file path")->required();

  auto* invert = app.add_subcommand("invert", "Invert a quote file");
  invert->add_option("--model", model, "Model file")->required();
  invert->add_option("--quotes", quotes, "CSV quote file")->required();
  invert->add_option("--out", out, "Output CSV path")->required();

  auto* validate = app.add_subcommand("validate", "Round-trip error report");
  validate->add_option("--model", model, "Model file")->required();
  validate->add_option("--grid", grid, "Grid points per axis");
  validate->add_option("--domain", domain, "D1|D2")
      ->check(CLI::IsMember({"D1", "D2"}));
  validate->add_option("--out", out, "Report CSV path")->required();

  auto* decay = app.add_subcommand("decay", "Error-decay study over N");
  decay->add_option("--mode", mode, "simple|laplace")
      ->check(CLI::IsMember({"simple", "laplace"}));
  decay->add_option("--n", n_list, "Grid orders to test")->delimiter(',');
  decay->add_option("--grid", grid, "Reference grid points per axis");
  decay->add_option("--out", out, "Output CSV path")->required();

  auto* lbuild =
      app.add_subcommand("laplace-build", "Precompute the Laplace model");
  lbuild->add_option("--n", n, "Grid order");
  lbuild->add_option("--tol", tol, "Cross-approximation tolerance");
  lbuild->add_option("--out", out, "Model file path")->required();

  auto* linvert =
      app.add_subcommand("laplace-invert", "Invert normalized (x,c) rows");
  linvert->add_option("--model", model, "Laplace model file")->required();
  linvert->add_option("--quotes", quotes, "CSV with header x,c")->required();
  linvert->add_option("--out", out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
    if (*build) return cmd_build(preset, delta, out);
    if (*invert) return cmd_invert(model, quotes, out);
    if (*validate) return cmd_validate(model, grid, domain, out);
    if (*decay) return cmd_decay(mode, n_list, grid, out);
    if (*lbuild) return cmd_laplace_build(n, tol, out);
    if (*linvert) return cmd_laplace_invert(model, quotes, out);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ConvergenceError& e) {
    std::cerr << "build failure: " << e.what() << "\n";
    return kExitBuild;
  } catch (const BuildError& e) {
    std::cerr << "build failure: " << e.what() << "\n";
    return kExitBuild;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBuild;
  }
}
