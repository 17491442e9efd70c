#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "chebiv/cheb.hpp"
#include "test_util.hpp"

using namespace chebiv;
using testutil::rel_err;

namespace {

std::vector<double> sample_at_nodes(int n, const std::function<double(double)>& f) {
  auto nodes = cheb_nodes(n);
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) v[i] = f(nodes[i]);
  return v;
}

double dense_max_err_1d(const Cheb1D& p, const std::function<double(double)>& f,
                        int npts) {
  double worst = 0.0;
  for (int i = 0; i < npts; ++i) {
    const double t =
        p.interval.lo + (p.interval.hi - p.interval.lo) * i / (npts - 1.0);
    worst = std::fmax(worst, std::fabs(cheb_eval_1d(p, t) - f(t)));
  }
  return worst;
}

}  // namespace

TEST_CASE("cheb_nodes") {
  CHECK(cheb_nodes(1) == std::vector<double>{1.0, -1.0});
  CHECK(cheb_nodes(2) == std::vector<double>{1.0, 0.0, -1.0});
  const auto n4 = cheb_nodes(4);
  const double r = 0.70710678118654752440;
  CHECK(n4[0] == 1.0);
  CHECK(n4[1] == doctest::Approx(r).epsilon(1e-16));
  CHECK(n4[2] == 0.0);
  CHECK(n4[3] == doctest::Approx(-r).epsilon(1e-16));
  CHECK(n4[4] == -1.0);
  CHECK_THROWS_AS(cheb_nodes(0), std::invalid_argument);

  // Descending and exactly symmetric about zero.
  const auto n9 = cheb_nodes(9);
  for (std::size_t i = 1; i < n9.size(); ++i) CHECK(n9[i] < n9[i - 1]);
  for (std::size_t i = 0; i < n9.size(); ++i) CHECK(n9[i] == -n9[n9.size() - 1 - i]);
}

TEST_CASE("cheb_fit_1d basics") {
  for (int n : {1, 4, 9}) {
    const std::vector<double> vals(n + 1, 7.0);
    const auto p = cheb_fit_1d(vals);
    CHECK(p.coeffs[0] == doctest::Approx(7.0).epsilon(1e-14));
    for (int j = 1; j <= n; ++j) CHECK(std::fabs(p.coeffs[j]) < 1e-14);
  }
  {
    // Samples of T2 on the order-4 grid pick out exactly a_2.
    const auto vals =
        sample_at_nodes(4, [](double t) { return 2.0 * t * t - 1.0; });
    const auto p = cheb_fit_1d(vals);
    CHECK(p.coeffs[2] == doctest::Approx(1.0).epsilon(1e-15));
    for (int j : {0, 1, 3, 4}) CHECK(std::fabs(p.coeffs[j]) < 1e-14);
  }
  {
    const auto vals = sample_at_nodes(20, [](double t) { return std::exp(t); });
    const auto p = cheb_fit_1d(vals);
    CHECK(dense_max_err_1d(p, [](double t) { return std::exp(t); }, 1000) <
          1e-14);
  }
  {
    // Nodal reproduction.
    auto gen = testutil::rng();
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> vals(13);
    for (auto& v : vals) v = u(gen);
    const auto p = cheb_fit_1d(vals, {-2.0, 1.0});
    const auto nodes = cheb_nodes(12);
    double scale = 0.0;
    for (double v : vals) scale = std::fmax(scale, std::fabs(v));
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double t = -0.5 + 1.5 * nodes[k];
      CHECK(std::fabs(cheb_eval_1d(p, t) - vals[k]) < 1e-13 * scale);
    }
  }
  CHECK_THROWS_AS(cheb_fit_1d(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("cheb_eval_1d") {
  {
    Cheb1D t2{{0.0, 0.0, 1.0}, {-1.0, 1.0}};
    CHECK(cheb_eval_1d(t2, 0.5) == doctest::Approx(-0.5).epsilon(1e-15));
  }
  {
    Cheb1D ident{{0.0, 1.0}, {-1.0, 1.0}};
    for (double t : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
      CHECK(cheb_eval_1d(ident, t) == doctest::Approx(t).epsilon(1e-15));
    }
  }
  {
    const auto vals = sample_at_nodes(25, [](double t) { return std::sin(t); });
    const auto p = cheb_fit_1d(vals);
    CHECK(std::fabs(cheb_eval_1d(p, 0.3) - 0.2955202066613395751) < 1e-14);
  }
  {
    Cheb1D p{{1.0, 2.0}, {0.0, 4.0}};
    CHECK_NOTHROW(cheb_eval_1d(p, 4.0 + 1e-13));
    CHECK_NOTHROW(cheb_eval_1d(p, -1e-13));
    CHECK_THROWS_AS(cheb_eval_1d(p, 4.1), std::domain_error);
    CHECK_THROWS_AS(cheb_eval_1d(p, -0.1), std::domain_error);
  }
}

TEST_CASE("recurrence agrees with the cosine formula") {
  auto gen = testutil::rng();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  std::vector<double> coeffs(21);
  for (auto& a : coeffs) a = uc(gen);
  Cheb1D p{coeffs, {-1.0, 1.0}};
  for (int i = 0; i < 1000; ++i) {
    const double t = u(gen);
    double direct = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      direct += coeffs[j] * std::cos(j * std::acos(t));
    }
    CHECK(std::fabs(cheb_eval_1d(p, t) - direct) < 1e-13);
  }
}

TEST_CASE("fit-then-eval is exact for polynomials up to the order") {
  auto gen = testutil::rng();
  std::uniform_real_distribution<double> uc(-2.0, 2.0);
  std::uniform_real_distribution<double> ut(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int deg = 1 + trial % 8;
    std::vector<double> mono(deg + 1);
    for (auto& m : mono) m = uc(gen);
    auto poly = [&](double t) {
      double acc = 0.0;
      for (int j = deg; j >= 0; --j) acc = acc * t + mono[j];
      return acc;
    };
    const int n = deg + (trial % 3);  // fit order >= degree
    const auto p = cheb_fit_1d(sample_at_nodes(n, poly));
    for (int i = 0; i < 50; ++i) {
      const double t = ut(gen);
      CHECK(std::fabs(cheb_eval_1d(p, t) - poly(t)) < 1e-13);
    }
  }
}

TEST_CASE("cheb_eval_deriv_1d") {
  {
    // d/dt T3 = 3 U2; check against the monomial derivative of t^3.
    const auto p = cheb_fit_1d(
        sample_at_nodes(6, [](double t) { return t * t * t; }));
    for (double t : {-0.9, -0.2, 0.0, 0.4, 1.0}) {
      CHECK(std::fabs(cheb_eval_deriv_1d(p, t) - 3.0 * t * t) < 1e-13);
    }
  }
  {
    // Interval scaling.
    const auto vals = sample_at_nodes(30, [](double s) {
      const double t = 2.0 + 1.5 * (s + 1.0);  // [2, 5]
      return std::log(t);
    });
    const auto p = cheb_fit_1d(vals, {2.0, 5.0});
    for (double t : {2.1, 3.0, 4.5}) {
      CHECK(rel_err(cheb_eval_deriv_1d(p, t), 1.0 / t) < 1e-11);
    }
  }
}

TEST_CASE("tensor_fit_2d") {
  {
    std::vector<double> ones(5 * 5, 1.0);
    const auto m = tensor_fit_2d(ones, 4, 4);
    CHECK(m.coeffs[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t k = 1; k < m.coeffs.size(); ++k) {
      CHECK(std::fabs(m.coeffs[k]) < 1e-14);
    }
  }
  {
    // f = T1(x) T2(y) on a 5x5 grid isolates a_{12}.
    const auto nodes = cheb_nodes(4);
    std::vector<double> vals(25);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        vals[i * 5 + j] = nodes[i] * (2.0 * nodes[j] * nodes[j] - 1.0);
      }
    }
    const auto m = tensor_fit_2d(vals, 4, 4);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double want = (i == 1 && j == 2) ? 1.0 : 0.0;
        CHECK(std::fabs(m.coeffs[i * 5 + j] - want) < 1e-13);
      }
    }
  }
  {
    // exp(x+y), order 20: dense 100x100 error below 1e-13.
    const auto nodes = cheb_nodes(20);
    std::vector<double> vals(21 * 21);
    for (int i = 0; i < 21; ++i) {
      for (int j = 0; j < 21; ++j) {
        vals[i * 21 + j] = std::exp(nodes[i] + nodes[j]);
      }
    }
    const auto m = tensor_fit_2d(vals, 20, 20);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      for (int j = 0; j < 100; ++j) {
        const double x = -1.0 + 2.0 * i / 99.0;
        const double y = -1.0 + 2.0 * j / 99.0;
        worst = std::fmax(worst,
                          std::fabs(tensor_eval_2d(m, x, y) - std::exp(x + y)));
      }
    }
    CHECK(worst < 1e-13);
    CHECK(rel_err(tensor_eval_2d(m, 0.1, 0.2), 1.349858807576003104) < 1e-14);
  }
  CHECK_THROWS_AS(tensor_fit_2d(std::vector<double>{1.0}, 0, 0),
                  std::invalid_argument);
}

namespace {

// Rank an SVD oracle would assign at the same tolerance: number of singular
// values above tol * s_max of a dense sample matrix.
int svd_rank_at(const std::function<double(double, double)>& f, double tol) {
  const int n = 60;
  Eigen::MatrixXd a(n + 1, n + 1);
  const auto nodes = cheb_nodes(n);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) a(i, j) = f(nodes[i], nodes[j]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > tol * s(0)) ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("lowrank_fit_2d") {
  {
    auto f = [](double x, double y) { return std::sin(x) * std::cos(y); };
    LowRankOptions o;
    o.tol = 1e-12;
    LowRankBuildInfo info;
    const auto m = lowrank_fit_2d(f, {-1, 1}, {-1, 1}, o, &info);
    CHECK(m.rank() == 1);
    CHECK(info.residual <= 1e-12);
  }
  {
    auto f = [](double x, double y) { return x + y; };
    LowRankOptions o;
    o.tol = 1e-12;
    const auto m = lowrank_fit_2d(f, {-1, 1}, {-1, 1}, o);
    CHECK(m.rank() == 2);
  }
  {
    auto f = [](double x, double y) { return 1.0 / (1.0 + x * x + y * y); };
    LowRankOptions o;
    o.tol = 1e-10;
    const auto m = lowrank_fit_2d(f, {-1, 1}, {-1, 1}, o);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      for (int j = 0; j < 200; ++j) {
        const double x = -1.0 + 2.0 * i / 199.0;
        const double y = -1.0 + 2.0 * j / 199.0;
        worst = std::fmax(worst, std::fabs(lowrank_eval_2d(m, x, y) - f(x, y)));
      }
    }
    CHECK(worst < 1e-9);
    const int oracle_rank = svd_rank_at(f, 1e-10);
    CHECK(m.rank() <= oracle_rank + 2);
    CHECK(m.rank() >= oracle_rank - 2);
  }
}

TEST_CASE("lowrank_eval_2d") {
  {
    auto f = [](double x, double y) { return x * y; };
    LowRankOptions o;
    o.tol = 1e-13;
    const auto m = lowrank_fit_2d(f, {-1, 1}, {-1, 1}, o);
    CHECK(m.rank() == 1);
    CHECK(std::fabs(lowrank_eval_2d(m, 0.5, -0.5) + 0.25) < 1e-14);
  }
  {
    auto f = [](double x, double y) { return std::exp(x + y); };
    LowRankOptions o;
    o.tol = 1e-12;
    const auto m = lowrank_fit_2d(f, {-1, 1}, {-1, 1}, o);
    CHECK(std::fabs(lowrank_eval_2d(m, 0.1, 0.2) - 1.349858807576003104) <
          1e-12);
    // Construction-grid points reproduce f to the build tolerance.
    const auto nodes = cheb_nodes(16);
    for (double x : nodes) {
      for (double y : nodes) {
        CHECK(std::fabs(lowrank_eval_2d(m, x, y) - f(x, y)) < 2e-12);
      }
    }
  }
  {
    // Non-unit rectangles.
    auto f = [](double x, double y) { return std::sin(3.0 * x) + y * y; };
    LowRankOptions o;
    o.tol = 1e-12;
    const auto m = lowrank_fit_2d(f, {0.0, 2.0}, {-3.0, -1.0}, o);
    for (double x : {0.0, 0.37, 1.9}) {
      for (double y : {-2.9, -2.0, -1.05}) {
        CHECK(std::fabs(lowrank_eval_2d(m, x, y) - f(x, y)) < 1e-11);
      }
    }
    CHECK_THROWS_AS(lowrank_eval_2d(m, 2.5, -2.0), std::domain_error);
  }
}

TEST_CASE("lowrank agrees with the tensor interpolant") {
  auto f = [](double x, double y) {
    return std::exp(-x * y) + std::cos(2.0 * x + y);
  };
  const double tol = 1e-9;
  LowRankOptions o;
  o.tol = tol;
  const auto lr = lowrank_fit_2d(f, {-1, 1}, {-1, 1}, o);

  const int n = 40;
  const auto nodes = cheb_nodes(n);
  std::vector<double> vals((n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) vals[i * (n + 1) + j] = f(nodes[i], nodes[j]);
  }
  const auto tz = tensor_fit_2d(vals, n, n);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 60; ++j) {
      const double x = -1.0 + 2.0 * i / 59.0;
      const double y = -1.0 + 2.0 * j / 59.0;
      CHECK(std::fabs(lowrank_eval_2d(lr, x, y) - tensor_eval_2d(tz, x, y)) <
            2.0 * tol);
    }
  }
}

TEST_CASE("geometric error decay for analytic functions") {
  auto decay_check = [](const std::function<double(double, double)>& f) {
    std::vector<double> errs;
    double scale = 0.0;
    for (int n : {5, 10, 20, 30, 40, 50}) {
      const auto m =
          lowrank_fit_grid(f, n, n, {-1, 1}, {-1, 1}, 1e-15, n + 1, nullptr);
      double worst = 0.0;
      for (int i = 0; i < 80; ++i) {
        for (int j = 0; j < 80; ++j) {
          const double x = -1.0 + 2.0 * i / 79.0;
          const double y = -1.0 + 2.0 * j / 79.0;
          const double fv = f(x, y);
          scale = std::fmax(scale, std::fabs(fv));
          worst = std::fmax(worst, std::fabs(lowrank_eval_2d(m, x, y) - fv));
        }
      }
      errs.push_back(worst);
    }
    // Monotone log-decay past the first refinement, down to noise level.
    for (std::size_t i = 2; i < errs.size(); ++i) {
      CHECK(errs[i] <= std::fmax(errs[i - 1], 1e-14 * scale));
    }
    // And at least geometric overall until the noise floor.
    CHECK(errs.back() <= std::fmax(errs.front() * 1e-6, 1e-14 * scale));
  };
  decay_check([](double x, double y) { return std::exp(x + 0.5 * y); });
  decay_check([](double x, double y) {
    return 1.0 / (1.0 + 4.0 * (x * x + y * y));  // Runge-type
  });
}
