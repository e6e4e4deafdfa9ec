#include "chiarella/stationary_linear.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>

#include "chiarella/error.hpp"

namespace chiarella::linear {

namespace {

double max_abs_of(std::initializer_list<double> terms) {
  double m = 0.0;
  for (double t : terms) m = std::max(m, std::abs(t));
  return m;
}

double sum_of(std::initializer_list<double> terms) {
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace

double StationaryCovariance::cov() const { return rho * std::sqrt(var_delta * var_m); }

double StationaryCovariance::det() const { return var_delta * var_m * (1.0 - rho * rho); }

StationaryCovariance lyapunov_covariance(const ModelParams& p) {
  const double k = p.kappa();
  const double a = p.alpha();
  const double bg = p.beta() * p.gamma();
  const double sn2 = p.sigma_n() * p.sigma_n();
  const double s2 = sn2 + p.sigma_v() * p.sigma_v();
  if (!(s2 > 0.0)) throw Error(ErrorCode::InvalidParameter, "stationary law needs noise");
  const double margin = a * (1.0 - bg) + k;
  if (!(margin > 0.0)) {
    throw Error(ErrorCode::NoStationaryDistribution,
                "alpha (1 - beta gamma) + kappa <= 0; the linear system diverges");
  }
  const double delta_num = (k + a * (bg - 1.0) * (bg - 1.0)) * s2 + a * bg * (2.0 - bg) * sn2;
  const double m_num = k * s2 + (a - k) * sn2;
  StationaryCovariance c{};
  c.var_delta = delta_num / (2.0 * k * margin);
  c.var_m = a * m_num / (2.0 * margin);
  c.rho = std::sqrt(a * k) * ((bg - 1.0) * s2 + (2.0 - bg) * sn2) / std::sqrt(delta_num * m_num);
  return c;
}

double log_joint_density(const StationaryCovariance& c, double delta, double m) {
  const double det = c.det();
  const double q = (c.var_m * delta * delta - 2.0 * c.cov() * delta * m + c.var_delta * m * m) / det;
  return -0.5 * q - std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det);
}

double joint_density(const StationaryCovariance& c, double delta, double m) {
  return std::exp(log_joint_density(c, delta, m));
}

double log_marginal_delta_density(const StationaryCovariance& c, double delta) {
  return -0.5 * delta * delta / c.var_delta - 0.5 * std::log(2.0 * std::numbers::pi * c.var_delta);
}

double marginal_delta_density(const StationaryCovariance& c, double delta) {
  return std::exp(log_marginal_delta_density(c, delta));
}

double FpeResiduals::max_abs() const {
  double m = 0.0;
  for (double r : normalized) m = std::max(m, std::abs(r));
  return m;
}

FpeResiduals fpe_residuals(const ModelParams& p, const StationaryCovariance& c) {
  const double det = c.det();
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw Error(ErrorCode::SingularCovariance, "covariance determinant is not positive");
  }
  // Precision matrix entries.
  const double a = c.var_m / det;
  const double b = -c.cov() / det;
  const double cc = c.var_delta / det;

  const double k = p.kappa();
  const double al = p.alpha();
  const double bg = p.beta() * p.gamma();
  const double sn2 = p.sigma_n() * p.sigma_n();
  const double s2 = sn2 + p.sigma_v() * p.sigma_v();

  FpeResiduals r;
  const std::array<std::initializer_list<double>, 4> terms{
      std::initializer_list<double>{k, al * (1.0 - bg), -0.5 * s2 * a, -al * sn2 * b,
                                    -0.5 * al * al * sn2 * cc},
      std::initializer_list<double>{-k * a, -al * k * b, 0.5 * s2 * a * a, al * sn2 * a * b,
                                    0.5 * al * al * sn2 * b * b},
      std::initializer_list<double>{bg * b, -al * (1.0 - bg) * cc, 0.5 * s2 * b * b,
                                    al * sn2 * b * cc, 0.5 * al * al * sn2 * cc * cc},
      std::initializer_list<double>{-k * b, bg * a, -al * k * cc, -al * (1.0 - bg) * b,
                                    s2 * a * b, al * sn2 * (a * cc + b * b), al * al * sn2 * b * cc},
  };
  for (std::size_t i = 0; i < 4; ++i) {
    r.raw[i] = sum_of(terms[i]);
    const double scale = max_abs_of(terms[i]);
    r.normalized[i] = scale > 0.0 ? r.raw[i] / scale : 0.0;
  }
  return r;
}

LinearValidity linear_validity(const ModelParams& p, const StationaryCovariance& c) {
  LinearValidity v{};
  v.gamma_sigma_m = p.gamma() * std::sqrt(c.var_m);
  const double bg = p.beta() * p.gamma();
  v.large_alpha_form = bg < 1.0 ? p.gamma() * p.gamma() * p.alpha() * p.sigma_n() * p.sigma_n() /
                                      (2.0 * (1.0 - bg))
                                : std::numeric_limits<double>::infinity();
  v.valid = v.gamma_sigma_m < kValidityThreshold;
  return v;
}

}  // namespace chiarella::linear
