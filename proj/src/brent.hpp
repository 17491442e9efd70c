// Brent-Dekker scalar root finding (internal helper).
#pragma once

#include <cmath>
#include <functional>

namespace chebiv::detail {

struct BrentResult {
  double root = 0.0;
  double f_root = 0.0;
  int iterations = 0;
  bool converged = false;
  bool bracketed = true;
};

// Classic Brent-Dekker on [a, b]. Stops when the bracket shrinks below
// 2*eps*|b| + 0.5*x_tol or |f| <= f_tol. Requires f(a), f(b) of opposite
// sign (zero endpoint values count as roots).
inline BrentResult brent_root(const std::function<double(double)>& f, double a,
                              double b, double x_tol, double f_tol,
                              int max_iter) {
  BrentResult res;
  double fa = f(a);
  double fb = f(b);
  res.iterations = 2;
  if (fa == 0.0) {
    res.root = a;
    res.f_root = 0.0;
    res.converged = true;
    return res;
  }
  if (fb == 0.0) {
    res.root = b;
    res.f_root = 0.0;
    res.converged = true;
    return res;
  }
  if ((fa > 0.0) == (fb > 0.0)) {
    res.bracketed = false;
    res.root = std::fabs(fa) < std::fabs(fb) ? a : b;
    res.f_root = std::fabs(fa) < std::fabs(fb) ? fa : fb;
    return res;
  }

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 2.220446049250313e-16 * std::fabs(b) + 0.5 * x_tol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0 || std::fabs(fb) <= f_tol) {
      res.root = b;
      res.f_root = fb;
      res.converged = true;
      return res;
    }
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      // Inverse quadratic interpolation (secant when a == c).
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::fmin(3.0 * xm * q - std::fabs(tol1 * q),
                              std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    ++res.iterations;
  }
  res.root = b;
  res.f_root = fb;
  return res;
}

}  // namespace chebiv::detail
