// Chebyshev interpolation tools: univariate fits, bivariate tensor fits and
// adaptive low-rank (cross approximation with complete pivoting) fits.
//
// Node convention: order N uses the N+1 points cos(k*pi/N), k = 0..N,
// descending from +1 to -1.
#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace chebiv {

struct Interval {
  double lo;
  double hi;
};

/// Univariate interpolant sum_j a_j T_j(s) with s the affine image of the
/// source interval on [-1,1].
struct Cheb1D {
  std::vector<double> coeffs;  // a_0 .. a_N, never empty
  Interval interval{-1.0, 1.0};

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Chebyshev points of order N (N+1 values, descending). Throws for N < 1.
std::vector<double> cheb_nodes(int order);

/// Fit from nodal values f(x_k), k = 0..N in node order. The first/last
/// summands of the coefficient sums are halved, as the discrete
/// orthogonality requires. Throws on empty input or non-finite values.
Cheb1D cheb_fit_1d(std::span<const double> values, Interval interval = {-1.0, 1.0});

/// Evaluate by the three-term recurrence T_{k+1} = 2 s T_k - T_{k-1}
/// (no trig calls). Points up to 1e-12 past the interval ends are clamped;
/// beyond that a std::domain_error is thrown.
double cheb_eval_1d(const Cheb1D& p, double t);

/// Derivative dp/dt via the Chebyshev-U recurrence, same clamping rules.
double cheb_eval_deriv_1d(const Cheb1D& p, double t);

/// Dense bivariate tensor interpolant sum_ij a_ij T_i(s1) T_j(s2).
struct Tensor2D {
  std::vector<double> coeffs;  // (n1+1) x (n2+1), row-major in the first index
  int n1 = 0;                  // order in the first variable
  int n2 = 0;                  // order in the second variable
  Interval iv1{-1.0, 1.0};
  Interval iv2{-1.0, 1.0};
};

/// samples[i*(n2+1)+j] = f(x_i, y_j) on the order-(n1,n2) node grid.
Tensor2D tensor_fit_2d(std::span<const double> samples, int n1, int n2,
                       Interval iv1 = {-1.0, 1.0}, Interval iv2 = {-1.0, 1.0});

double tensor_eval_2d(const Tensor2D& m, double t1, double t2);

/// Rank-k skeleton sum_j d_j * rows[j](t1) * cols[j](t2).
struct LowRank2D {
  std::vector<double> weights;  // d_1 .. d_k
  std::vector<Cheb1D> rows;     // k interpolants over the first variable
  std::vector<Cheb1D> cols;     // k interpolants over the second variable
  Interval iv1{-1.0, 1.0};
  Interval iv2{-1.0, 1.0};

  // Derived evaluation cache: slice coefficients packed into contiguous
  // zero-padded matrices so batch evaluation runs on uniform dots. Rebuilt
  // by pack(); never serialized.
  std::vector<double> packed_rows;
  std::vector<double> packed_cols;
  int row_stride = 0;
  int col_stride = 0;

  int rank() const { return static_cast<int>(weights.size()); }
  int max_row_order() const;
  int max_col_order() const;
  void pack();
};

struct LowRankOptions {
  double tol = 1e-12;       // pivot stopping threshold, relative to the
                            // largest sampled |f| unless tol_is_absolute
  bool tol_is_absolute = false;
  int max_rank = 64;
  int min_order = 16;       // nested grid schedule: min_order, 2x, ... max_order
  int max_order = 128;
  double trim_factor = 1e-2;  // trailing coefficients below
                              // threshold*trim_factor are dropped
};

struct LowRankBuildInfo {
  double residual = 0.0;     // final pivot residual / scale
  double scale = 0.0;        // max sampled |f|
  int grid_order = 0;        // order of the construction grid finally used
  long long evaluations = 0; // total calls into f
};

/// Thrown when the pivot residual cannot be brought below the threshold
/// within (max_rank, max_order).
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved_residual)
      : std::runtime_error(what), achieved(achieved_residual) {}
  double achieved;  // residual relative to the sampled scale
};

/// Adaptive cross approximation of a black-box f on iv1 x iv2. Runs full
/// Gauss elimination with complete pivoting on nested Chebyshev grids
/// (min_order, doubling up to max_order), accepting a grid once the pivots
/// fall below the threshold and the skeleton slices' coefficient tails have
/// decayed. The k pivot cross slices are then refit at the final order.
LowRank2D lowrank_fit_2d(const std::function<double(double, double)>& f,
                         Interval iv1, Interval iv2,
                         const LowRankOptions& opts = {},
                         LowRankBuildInfo* info = nullptr);

/// Same elimination on one fixed order-(n1,n2) grid, no refinement.
LowRank2D lowrank_fit_grid(const std::function<double(double, double)>& f,
                           int n1, int n2, Interval iv1, Interval iv2,
                           double tol, int max_rank,
                           LowRankBuildInfo* info = nullptr);

double lowrank_eval_2d(const LowRank2D& m, double t1, double t2);

namespace detail {
/// Map t in [lo,hi] onto [-1,1], clamping 1e-12 slack past either end.
double to_unit(double t, Interval iv);
/// Evaluate sum a_j T_j(s) with a precomputed T table (size >= coeffs size).
double dot_cheb(std::span<const double> coeffs, const double* t_table);
/// Fill table[j] = T_j(s) for j = 0..n.
void fill_cheb_table(double s, int n, double* table);

/// Lanes per block in the batched evaluation kernels. The recurrences then
/// advance all lanes per step, which turns the serial three-term chain into
/// throughput-bound arithmetic.
inline constexpr int kEvalBlock = 8;

/// Evaluate m at kEvalBlock points at once; s1/s2 are unit coordinates.
/// Lane results are bit-identical to lowrank_eval_2d.
void lowrank_eval_block8(const LowRank2D& m, const double* s1,
                         const double* s2, double* out);
}  // namespace detail

}  // namespace chebiv
