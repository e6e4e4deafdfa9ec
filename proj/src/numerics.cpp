#include "chiarella/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <limits>
#include <string>
#include <vector>

#include "chiarella/error.hpp"

namespace chiarella::numerics {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  double err = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 20, rel_tol, &err, &l1);
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::QuadratureFailure, "integral is not finite");
  }
  // Accept the tolerance relative to the L1 norm so that integrands with
  // cancelling lobes are not rejected spuriously.
  const double scale = std::max(std::abs(value), l1);
  if (err > std::max(10.0 * rel_tol * scale, std::numeric_limits<double>::min())) {
    throw Error(ErrorCode::QuadratureFailure,
                "error estimate " + std::to_string(err) + " exceeds tolerance for value " +
                    std::to_string(value));
  }
  return value;
}

double integrate_pieces(const std::function<double(double)>& f, const std::vector<double>& cuts,
                        double rel_tol) {
  double total = 0.0, err_total = 0.0, l1_total = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    double err = 0.0, l1 = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i - 1], cuts[i], 20, rel_tol,
                                                                           &err, &l1);
    err_total += err;
    l1_total += l1;
  }
  if (!std::isfinite(total)) throw Error(ErrorCode::QuadratureFailure, "integral is not finite");
  if (err_total > std::max(10.0 * rel_tol * std::max(std::abs(total), l1_total), std::numeric_limits<double>::min())) {
    throw Error(ErrorCode::QuadratureFailure, "error estimate " + std::to_string(err_total) +
                                                  " exceeds tolerance for value " + std::to_string(total));
  }
  return total;
}

double integrate_line(const std::function<double(double)>& f, double center, double scale,
                      double rel_tol) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::QuadratureFailure, "integration scale must be positive");
  }
  double half = 10.0 * scale;
  double total = integrate(f, center - half, center + half, rel_tol);
  for (int shell = 0; shell < 60; ++shell) {
    const double left = integrate(f, center - 2.0 * half, center - half, rel_tol);
    const double right = integrate(f, center + half, center + 2.0 * half, rel_tol);
    total += left + right;
    half *= 2.0;
    if (std::abs(left) + std::abs(right) <= 1e-12 * std::abs(total)) return total;
  }
  throw Error(ErrorCode::QuadratureFailure, "tail contributions did not decay");
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw Error(ErrorCode::BracketFailure, "no sign change on [" + std::to_string(lo) + ", " +
                                               std::to_string(hi) + "]");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size() && i < y.size(); ++i) {
    s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  }
  return s;
}

}  // namespace chiarella::numerics
