#include "chebiv/cheb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace chebiv {

namespace detail {

double to_unit(double t, Interval iv) {
  const double width = iv.hi - iv.lo;
  double s = (2.0 * t - iv.lo - iv.hi) / width;
  const double slack = 1e-12;
  if (s > 1.0) {
    if (s > 1.0 + slack) {
      throw std::domain_error("cheb_eval: point beyond interval");
    }
    s = 1.0;
  } else if (s < -1.0) {
    if (s < -1.0 - slack) {
      throw std::domain_error("cheb_eval: point beyond interval");
    }
    s = -1.0;
  }
  return s;
}

double dot_cheb(std::span<const double> coeffs, const double* t_table) {
  double sum = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) sum += coeffs[j] * t_table[j];
  return sum;
}

void fill_cheb_table(double s, int n, double* table) {
  table[0] = 1.0;
  if (n >= 1) table[1] = s;
  for (int j = 2; j <= n; ++j) table[j] = 2.0 * s * table[j - 1] - table[j - 2];
}

}  // namespace detail

namespace {

// cos(m*pi/N) for m = 0..2N-1, with the exact symmetries wired in so that
// node sets are bit-symmetric about zero.
std::vector<double> cosine_table(int n) {
  std::vector<double> tab(2 * n);
  for (int m = 0; m <= n / 2; ++m) {
    const double c = std::cos(static_cast<double>(m) * std::numbers::pi /
                              static_cast<double>(n));
    tab[m] = c;
    tab[n - m] = -c;
  }
  tab[0] = 1.0;
  if (n % 2 == 0) tab[n / 2] = 0.0;
  tab[n] = -1.0;
  for (int m = n + 1; m < 2 * n; ++m) tab[m] = tab[2 * n - m];
  return tab;
}

void check_finite(std::span<const double> values, const char* where) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(where) + ": non-finite sample");
    }
  }
}

// Coefficients of the order-N fit from nodal values; the k = 0 and k = N
// summands are halved, and a_0/a_N carry factor 1/N instead of 2/N.
std::vector<double> fit_coeffs(std::span<const double> values,
                               const std::vector<double>& cos_tab) {
  const int n = static_cast<int>(values.size()) - 1;
  std::vector<double> coeffs(n + 1);
  for (int j = 0; j <= n; ++j) {
    double acc = 0.5 * (values[0] * cos_tab[0] +
                        values[n] * cos_tab[(j * n) % (2 * n)]);
    for (int k = 1; k < n; ++k) {
      acc += values[k] * cos_tab[(j * k) % (2 * n)];
    }
    const double factor = (j == 0 || j == n) ? 1.0 : 2.0;
    coeffs[j] = acc * factor / static_cast<double>(n);
  }
  return coeffs;
}

double eval_unit(std::span<const double> coeffs, double s) {
  double sum = coeffs[0];
  if (coeffs.size() == 1) return sum;
  double t_prev = 1.0;
  double t_cur = s;
  sum += coeffs[1] * s;
  for (std::size_t j = 2; j < coeffs.size(); ++j) {
    const double t_next = 2.0 * s * t_cur - t_prev;
    sum += coeffs[j] * t_next;
    t_prev = t_cur;
    t_cur = t_next;
  }
  return sum;
}

}  // namespace

std::vector<double> cheb_nodes(int order) {
  if (order < 1) throw std::invalid_argument("cheb_nodes: order must be >= 1");
  const auto tab = cosine_table(order);
  return std::vector<double>(tab.begin(), tab.begin() + order + 1);
}

Cheb1D cheb_fit_1d(std::span<const double> values, Interval interval) {
  if (values.empty()) throw std::invalid_argument("cheb_fit_1d: empty input");
  if (!(interval.lo < interval.hi)) {
    throw std::invalid_argument("cheb_fit_1d: interval must satisfy lo < hi");
  }
  check_finite(values, "cheb_fit_1d");
  if (values.size() == 1) return Cheb1D{{values[0]}, interval};
  const int n = static_cast<int>(values.size()) - 1;
  return Cheb1D{fit_coeffs(values, cosine_table(n)), interval};
}

double cheb_eval_1d(const Cheb1D& p, double t) {
  return eval_unit(p.coeffs, detail::to_unit(t, p.interval));
}

double cheb_eval_deriv_1d(const Cheb1D& p, double t) {
  const double s = detail::to_unit(t, p.interval);
  // d/ds T_j = j U_{j-1}; chain through the affine map afterwards.
  double sum = 0.0;
  if (p.coeffs.size() >= 2) {
    double u_prev = 1.0;  // U_0
    sum += p.coeffs[1] * u_prev;
    double u_cur = 2.0 * s;  // U_1
    for (std::size_t j = 2; j < p.coeffs.size(); ++j) {
      sum += p.coeffs[j] * static_cast<double>(j) * u_cur;
      const double u_next = 2.0 * s * u_cur - u_prev;
      u_prev = u_cur;
      u_cur = u_next;
    }
  }
  return sum * 2.0 / (p.interval.hi - p.interval.lo);
}

Tensor2D tensor_fit_2d(std::span<const double> samples, int n1, int n2,
                       Interval iv1, Interval iv2) {
  if (n1 < 1 || n2 < 1) {
    throw std::invalid_argument("tensor_fit_2d: orders must be >= 1");
  }
  const std::size_t rows = static_cast<std::size_t>(n1) + 1;
  const std::size_t cols = static_cast<std::size_t>(n2) + 1;
  if (samples.size() != rows * cols) {
    throw std::invalid_argument("tensor_fit_2d: sample grid size mismatch");
  }
  check_finite(samples, "tensor_fit_2d");

  // Separable transform: fit along the second variable first, then along
  // the first; the 2D coefficient formula factorizes exactly this way.
  const auto tab2 = cosine_table(n2);
  std::vector<double> half(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    auto row = samples.subspan(i * cols, cols);
    const auto rc = fit_coeffs(row, tab2);
    std::copy(rc.begin(), rc.end(), half.begin() + i * cols);
  }
  const auto tab1 = cosine_table(n1);
  Tensor2D out;
  out.coeffs.resize(rows * cols);
  out.n1 = n1;
  out.n2 = n2;
  out.iv1 = iv1;
  out.iv2 = iv2;
  std::vector<double> column(rows);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows; ++i) column[i] = half[i * cols + j];
    const auto cc = fit_coeffs(column, tab1);
    for (std::size_t i = 0; i < rows; ++i) out.coeffs[i * cols + j] = cc[i];
  }
  return out;
}

double tensor_eval_2d(const Tensor2D& m, double t1, double t2) {
  const double s1 = detail::to_unit(t1, m.iv1);
  const double s2 = detail::to_unit(t2, m.iv2);
  std::vector<double> table2(m.n2 + 1);
  detail::fill_cheb_table(s2, m.n2, table2.data());
  const std::size_t cols = static_cast<std::size_t>(m.n2) + 1;
  double sum = 0.0;
  double t_prev = 1.0, t_cur = s1;
  for (int i = 0; i <= m.n1; ++i) {
    double ti;
    if (i == 0) {
      ti = 1.0;
    } else if (i == 1) {
      ti = s1;
    } else {
      ti = 2.0 * s1 * t_cur - t_prev;
      t_prev = t_cur;
      t_cur = ti;
    }
    const double inner = detail::dot_cheb(
        std::span<const double>(m.coeffs).subspan(i * cols, cols),
        table2.data());
    sum += ti * inner;
  }
  return sum;
}

int LowRank2D::max_row_order() const {
  int m = 0;
  for (const auto& r : rows) m = std::max(m, r.order());
  return m;
}

int LowRank2D::max_col_order() const {
  int m = 0;
  for (const auto& c : cols) m = std::max(m, c.order());
  return m;
}

void LowRank2D::pack() {
  // Slice-major zero-padded layout: slice j's coefficients occupy
  // [j*stride, j*stride + order_j]. Shared by the scalar and the blocked
  // evaluation kernels.
  const int k = rank();
  row_stride = max_row_order() + 1;
  col_stride = max_col_order() + 1;
  packed_rows.assign(static_cast<std::size_t>(k) * row_stride, 0.0);
  packed_cols.assign(static_cast<std::size_t>(k) * col_stride, 0.0);
  for (int j = 0; j < k; ++j) {
    std::copy(rows[j].coeffs.begin(), rows[j].coeffs.end(),
              packed_rows.begin() + static_cast<std::size_t>(j) * row_stride);
    std::copy(cols[j].coeffs.begin(), cols[j].coeffs.end(),
              packed_cols.begin() + static_cast<std::size_t>(j) * col_stride);
  }
}

double lowrank_eval_2d(const LowRank2D& m, double t1, double t2) {
  const double s1 = detail::to_unit(t1, m.iv1);
  const double s2 = detail::to_unit(t2, m.iv2);
  const int n1 = m.max_row_order();
  const int n2 = m.max_col_order();
  const int k = m.rank();
  // Both recurrence tables in one interleaved loop (independent chains).
  constexpr int kStack = 288;
  double buf1[kStack], buf2[kStack];
  std::vector<double> heap1, heap2;
  double* tab1 = buf1;
  double* tab2 = buf2;
  if (n1 >= kStack) {
    heap1.resize(n1 + 1);
    tab1 = heap1.data();
  }
  if (n2 >= kStack) {
    heap2.resize(n2 + 1);
    tab2 = heap2.data();
  }
  tab1[0] = 1.0;
  tab2[0] = 1.0;
  if (n1 >= 1) tab1[1] = s1;
  if (n2 >= 1) tab2[1] = s2;
  const int lo = std::min(n1, n2);
  for (int i = 2; i <= lo; ++i) {
    tab1[i] = 2.0 * s1 * tab1[i - 1] - tab1[i - 2];
    tab2[i] = 2.0 * s2 * tab2[i - 1] - tab2[i - 2];
  }
  for (int i = lo + 1; i <= n1; ++i) {
    tab1[i] = 2.0 * s1 * tab1[i - 1] - tab1[i - 2];
  }
  for (int i = lo + 1; i <= n2; ++i) {
    tab2[i] = 2.0 * s2 * tab2[i - 1] - tab2[i - 2];
  }

  double sum = 0.0;
  if (m.row_stride == n1 + 1 && m.col_stride == n2 + 1 &&
      m.packed_rows.size() == static_cast<std::size_t>(k) * m.row_stride &&
      m.packed_cols.size() == static_cast<std::size_t>(k) * m.col_stride) {
    for (int j = 0; j < k; ++j) {
      const double* rc = m.packed_rows.data() +
                         static_cast<std::size_t>(j) * m.row_stride;
      const double* cc = m.packed_cols.data() +
                         static_cast<std::size_t>(j) * m.col_stride;
      double rv = 0.0, cv = 0.0;
      for (int i = 0; i <= n1; ++i) rv += rc[i] * tab1[i];
      for (int i = 0; i <= n2; ++i) cv += cc[i] * tab2[i];
      sum += m.weights[j] * rv * cv;
    }
    return sum;
  }
  for (int j = 0; j < k; ++j) {
    sum += m.weights[j] * detail::dot_cheb(m.rows[j].coeffs, tab1) *
           detail::dot_cheb(m.cols[j].coeffs, tab2);
  }
  return sum;
}

namespace detail {

void lowrank_eval_block8(const LowRank2D& m, const double* s1,
                         const double* s2, double* out) {
  constexpr int B = kEvalBlock;
  const int n1 = m.max_row_order();
  const int n2 = m.max_col_order();
  const int k = m.rank();
  constexpr int kStack = 288;
  if (n1 >= kStack || n2 >= kStack ||
      m.row_stride != n1 + 1 || m.col_stride != n2 + 1) {
    // No packed cache (or oversized): scalar fallback, still identical.
    for (int q = 0; q < B; ++q) {
      out[q] = lowrank_eval_2d(m, m.iv1.lo + 0.5 * (s1[q] + 1.0) *
                                                 (m.iv1.hi - m.iv1.lo),
                               m.iv2.lo + 0.5 * (s2[q] + 1.0) *
                                              (m.iv2.hi - m.iv2.lo));
    }
    return;
  }
  // Recurrence chains advance for all lanes at once: tab[i][q]. Each lane's
  // arithmetic is exactly the scalar recurrence, so results match the
  // one-point path bit for bit.
  static thread_local std::vector<double> tabs;
  tabs.resize(static_cast<std::size_t>(n1 + n2 + 2) * B);
  double* t1 = tabs.data();
  double* t2 = tabs.data() + static_cast<std::size_t>(n1 + 1) * B;
  for (int q = 0; q < B; ++q) {
    t1[q] = 1.0;
    t2[q] = 1.0;
    if (n1 >= 1) t1[B + q] = s1[q];
    if (n2 >= 1) t2[B + q] = s2[q];
  }
  for (int i = 2; i <= n1; ++i) {
    double* cur = t1 + static_cast<std::size_t>(i) * B;
    for (int q = 0; q < B; ++q) {
      cur[q] = 2.0 * s1[q] * cur[q - B] - cur[q - 2 * B];
    }
  }
  for (int i = 2; i <= n2; ++i) {
    double* cur = t2 + static_cast<std::size_t>(i) * B;
    for (int q = 0; q < B; ++q) {
      cur[q] = 2.0 * s2[q] * cur[q - B] - cur[q - 2 * B];
    }
  }
  for (int q = 0; q < B; ++q) out[q] = 0.0;
  double rv[B], cv[B];
  for (int j = 0; j < k; ++j) {
    const double* rc =
        m.packed_rows.data() + static_cast<std::size_t>(j) * m.row_stride;
    const double* cc =
        m.packed_cols.data() + static_cast<std::size_t>(j) * m.col_stride;
    for (int q = 0; q < B; ++q) {
      rv[q] = 0.0;
      cv[q] = 0.0;
    }
    for (int i = 0; i <= n1; ++i) {
      const double a = rc[i];
      const double* row = t1 + static_cast<std::size_t>(i) * B;
      for (int q = 0; q < B; ++q) rv[q] += a * row[q];
    }
    for (int i = 0; i <= n2; ++i) {
      const double a = cc[i];
      const double* row = t2 + static_cast<std::size_t>(i) * B;
      for (int q = 0; q < B; ++q) cv[q] += a * row[q];
    }
    const double w = m.weights[j];
    for (int q = 0; q < B; ++q) out[q] += w * rv[q] * cv[q];
  }
}

}  // namespace detail

namespace {

struct CrossResult {
  bool converged = false;
  double scale = 0.0;
  double residual = 0.0;  // last pivot magnitude (absolute)
  std::vector<double> weights;
  std::vector<std::vector<double>> row_slices;  // values over the 1st variable
  std::vector<std::vector<double>> col_slices;  // values over the 2nd variable
};

// Gauss elimination with complete pivoting on the sampled matrix
// E[i][j] = f(x_i, y_j). Each step records the pivot cross: the residual's
// pivot column (a function of the first variable) and pivot row (a function
// of the second variable), contributing col(t1)*row(t2)/pivot.
CrossResult cross_eliminate(std::vector<double> e, int n1, int n2,
                            double threshold_abs, bool threshold_is_relative,
                            double rel_tol, int max_rank) {
  const std::size_t rows = static_cast<std::size_t>(n1) + 1;
  const std::size_t cols = static_cast<std::size_t>(n2) + 1;
  CrossResult res;
  for (double v : e) res.scale = std::max(res.scale, std::fabs(v));
  const double stop = threshold_is_relative ? rel_tol * res.scale
                                            : threshold_abs;

  for (int k = 0;; ++k) {
    std::size_t p_i = 0, p_j = 0;
    double p_abs = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double* row = e.data() + i * cols;
      for (std::size_t j = 0; j < cols; ++j) {
        const double a = std::fabs(row[j]);
        if (a > p_abs) {
          p_abs = a;
          p_i = i;
          p_j = j;
        }
      }
    }
    res.residual = p_abs;
    if (p_abs <= stop || p_abs == 0.0) {
      res.converged = true;
      break;
    }
    if (k == max_rank) break;

    const double pivot = e[p_i * cols + p_j];
    std::vector<double> col_slice(rows);  // residual at (x_i, y_pj)
    std::vector<double> row_slice(cols);  // residual at (x_pi, y_j)
    for (std::size_t i = 0; i < rows; ++i) col_slice[i] = e[i * cols + p_j];
    for (std::size_t j = 0; j < cols; ++j) row_slice[j] = e[p_i * cols + j];
    res.weights.push_back(1.0 / pivot);
    res.row_slices.push_back(col_slice);
    res.col_slices.push_back(row_slice);

    for (std::size_t i = 0; i < rows; ++i) {
      const double ci = col_slice[i] / pivot;
      if (ci == 0.0) continue;
      double* row = e.data() + i * cols;
      for (std::size_t j = 0; j < cols; ++j) row[j] -= ci * row_slice[j];
    }
  }
  return res;
}

void trim_trailing(Cheb1D& p, double threshold) {
  std::size_t keep = p.coeffs.size();
  while (keep > 1 && std::fabs(p.coeffs[keep - 1]) < threshold) --keep;
  p.coeffs.resize(keep);
}

LowRank2D assemble(const CrossResult& cr, Interval iv1, Interval iv2,
                   double trim_threshold) {
  LowRank2D out;
  out.iv1 = iv1;
  out.iv2 = iv2;
  if (cr.weights.empty()) {
    // Zero (or constant-zero) function: keep a valid rank-1 zero skeleton.
    out.weights = {0.0};
    out.rows = {Cheb1D{{0.0}, iv1}};
    out.cols = {Cheb1D{{0.0}, iv2}};
    out.pack();
    return out;
  }
  out.weights = cr.weights;
  for (const auto& slice : cr.row_slices) {
    out.rows.push_back(cheb_fit_1d(slice, iv1));
    trim_trailing(out.rows.back(), trim_threshold);
  }
  for (const auto& slice : cr.col_slices) {
    out.cols.push_back(cheb_fit_1d(slice, iv2));
    trim_trailing(out.cols.back(), trim_threshold);
  }
  out.pack();
  return out;
}

// Tail decay check per direction: the last two raw coefficients of every
// skeleton slice must sit below the stopping threshold, otherwise that
// direction's grid has not resolved the function yet.
bool direction_resolved(const std::vector<std::vector<double>>& slices,
                        Interval iv, double threshold) {
  for (const auto& slice : slices) {
    const Cheb1D fit = cheb_fit_1d(slice, iv);
    const std::size_t n = fit.coeffs.size();
    if (n < 3) continue;
    if (std::fabs(fit.coeffs[n - 1]) > threshold ||
        std::fabs(fit.coeffs[n - 2]) > threshold) {
      return false;
    }
  }
  return true;
}

std::vector<double> sample_grid(const std::function<double(double, double)>& f,
                                const std::vector<double>& x_nodes,
                                const std::vector<double>& y_nodes,
                                long long* evaluations) {
  std::vector<double> e(x_nodes.size() * y_nodes.size());
  for (std::size_t i = 0; i < x_nodes.size(); ++i) {
    for (std::size_t j = 0; j < y_nodes.size(); ++j) {
      e[i * y_nodes.size() + j] = f(x_nodes[i], y_nodes[j]);
    }
  }
  if (evaluations) *evaluations += static_cast<long long>(e.size());
  return e;
}

std::vector<double> nodes_on(Interval iv, int order) {
  auto nodes = cheb_nodes(order);
  const double mid = 0.5 * (iv.lo + iv.hi);
  const double half = 0.5 * (iv.hi - iv.lo);
  for (auto& t : nodes) t = mid + half * t;
  // Pin the endpoints so refinement levels share them bit-exactly.
  nodes.front() = iv.hi;
  nodes.back() = iv.lo;
  return nodes;
}

}  // namespace

LowRank2D lowrank_fit_2d(const std::function<double(double, double)>& f,
                         Interval iv1, Interval iv2,
                         const LowRankOptions& opts, LowRankBuildInfo* info) {
  if (!(opts.tol > 0.0)) {
    throw std::invalid_argument("lowrank_fit_2d: tol must be > 0");
  }
  long long evals = 0;
  CrossResult cr;
  // Each direction refines independently; an under-resolved moneyness axis
  // must not drag the price axis to the same order.
  int n1 = opts.min_order;
  int n2 = opts.min_order;
  for (;;) {
    const auto xn = nodes_on(iv1, n1);
    const auto yn = nodes_on(iv2, n2);
    auto e = sample_grid(f, xn, yn, &evals);
    cr = cross_eliminate(std::move(e), n1, n2, opts.tol,
                         !opts.tol_is_absolute, opts.tol, opts.max_rank);
    const double threshold =
        opts.tol_is_absolute ? opts.tol : opts.tol * cr.scale;
    const bool ok1 = direction_resolved(cr.row_slices, iv1, threshold);
    const bool ok2 = direction_resolved(cr.col_slices, iv2, threshold);
    if (cr.converged && ok1 && ok2) break;
    const bool can1 = n1 < opts.max_order;
    const bool can2 = n2 < opts.max_order;
    if (!can1 && !can2) {
      if (!cr.converged) {
        throw ConvergenceError(
            "lowrank_fit_2d: pivot residual " + std::to_string(cr.residual) +
                " above threshold at max_rank/max_order",
            cr.scale > 0.0 ? cr.residual / cr.scale : cr.residual);
      }
      break;  // pivots converged, tails as good as the schedule allows
    }
    if (!cr.converged) {
      // Unconverged pivots say nothing about directions; grow both.
      if (can1) n1 = std::min(2 * n1, opts.max_order);
      if (can2) n2 = std::min(2 * n2, opts.max_order);
    } else {
      if (!ok1 && can1) n1 = std::min(2 * n1, opts.max_order);
      if (!ok2 && can2) n2 = std::min(2 * n2, opts.max_order);
      if ((ok1 || !can1) && (ok2 || !can2)) break;  // nothing left to grow
    }
  }
  const double threshold =
      opts.tol_is_absolute ? opts.tol : opts.tol * cr.scale;
  if (info) {
    info->residual = cr.scale > 0.0 ? cr.residual / cr.scale : 0.0;
    info->scale = cr.scale;
    info->grid_order = std::max(n1, n2);
    info->evaluations = evals;
  }
  return assemble(cr, iv1, iv2, threshold * opts.trim_factor);
}

LowRank2D lowrank_fit_grid(const std::function<double(double, double)>& f,
                           int n1, int n2, Interval iv1, Interval iv2,
                           double tol, int max_rank, LowRankBuildInfo* info) {
  if (n1 < 1 || n2 < 1) {
    throw std::invalid_argument("lowrank_fit_grid: orders must be >= 1");
  }
  long long evals = 0;
  const auto xn = nodes_on(iv1, n1);
  const auto yn = nodes_on(iv2, n2);
  auto e = sample_grid(f, xn, yn, &evals);
  const CrossResult cr =
      cross_eliminate(std::move(e), n1, n2, tol, true, tol, max_rank);
  if (info) {
    info->residual = cr.scale > 0.0 ? cr.residual / cr.scale : 0.0;
    info->scale = cr.scale;
    info->grid_order = std::max(n1, n2);
    info->evaluations = evals;
  }
  return assemble(cr, iv1, iv2, tol * cr.scale * 1e-2);
}

}  // namespace chebiv
