#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace chiarella::numerics {

/// log(cosh(z)) without overflow: |z| + log1p(exp(-2|z|)) - log 2.
inline double log_cosh(double z) noexcept {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

/// Adaptive Gauss-Kronrod on [a, b]. Infinite limits are allowed.
/// Throws QuadratureFailure if the error estimate misses rel_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

/// Sum of integrals over consecutive [cuts[i], cuts[i+1]]. The tolerance
/// applies to the total, so pieces far out in a tail may be inexact.
double integrate_pieces(const std::function<double(double)>& f, const std::vector<double>& cuts,
                        double rel_tol = 1e-12);

/// Integral over the real line of a function concentrated around `center`
/// with width `scale`: integrates |x - center| <= 10 scale, then keeps adding
/// outer shells until a shell contributes less than 1e-12 of the total.
double integrate_line(const std::function<double(double)>& f, double center, double scale,
                      double rel_tol = 1e-12);

/// Bisection on [lo, hi] to absolute tolerance `tol`. Requires a sign change;
/// throws BracketFailure otherwise.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

/// Trapezoid rule over a tabulated function.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace chiarella::numerics
