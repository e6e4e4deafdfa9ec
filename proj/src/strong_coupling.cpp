#include "chiarella/strong_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chiarella/error.hpp"
#include "chiarella/numerics.hpp"

namespace chiarella::strong_coupling {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

// log(erfc(u)), accurate where erfc underflows.
double log_erfc(double u) {
  if (u < 25.0) return std::log(std::erfc(u));
  const double inv = 1.0 / (u * u);
  return -u * u - std::log(u * kSqrtPi) + std::log1p(-0.5 * inv + 0.75 * inv * inv - 1.875 * inv * inv * inv);
}

// log(1 + erf z)
double log_one_plus_erf(double z) { return log_erfc(-z); }

double sigma_n_checked(const ModelParams& p) {
  if (!(p.sigma_n() > 0.0)) throw Error(ErrorCode::DivisionByZero, "strong coupling requires sigma_n > 0");
  return p.sigma_n();
}

// Exponent of the cosh power in p(M|x) and p(M); zero without a cosh term.
double cosh_power(const ModelParams& p) {
  const double sn = sigma_n_checked(p);
  if (p.gamma() == 0.0 || p.beta() == 0.0) return 0.0;
  return 2.0 * p.beta() / (sn * sn * p.alpha() * p.gamma());
}

struct ConditionalM {
  double power;
  double gamma;
  double quad;    // 1 / (sigma_n^2 alpha)
  double linear;  // 2 kappa x / (sigma_n^2 alpha)

  double log_f(double m) const {
    const double c = power == 0.0 ? 0.0 : power * numerics::log_cosh(gamma * m);
    return c - quad * m * m + linear * m;
  }
};

ConditionalM conditional_of(double x, const ModelParams& p) {
  const double sn = sigma_n_checked(p);
  const double v = sn * sn * p.alpha();
  return {cosh_power(p), p.gamma(), 1.0 / v, 2.0 * p.kappa() * x / v};
}

// Returns (shift, integral of exp(log_f - shift)) for the conditional law.
std::pair<double, double> conditional_normaliser(const ConditionalM& c, double x, const ModelParams& p) {
  // Stationary points solve M = beta tanh(gamma M) + kappa x, so |M| <= beta + kappa |x|.
  const double spread = p.sigma_n() * std::sqrt(p.alpha() / 2.0);
  const double reach = p.beta() + p.kappa() * std::abs(x) + 6.0 * spread;
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 4000; ++i) shift = std::max(shift, c.log_f(-reach + 2.0 * reach * i / 4000.0));
  const double total = numerics::integrate_line([&](double m) { return std::exp(c.log_f(m) - shift); }, 0.0,
                                                spread + (p.beta() + p.kappa() * std::abs(x)) / 10.0, 1e-11);
  if (!(total > 0.0)) throw Error(ErrorCode::QuadratureFailure, "conditional normaliser <= 0");
  return {shift, total};
}

}  // namespace

double z_of_theta(double theta) {
  if (!(theta >= 0.0)) throw Error(ErrorCode::InvalidParameter, "theta must be >= 0");
  return 1.0 - 2.0 * theta * theta +
         2.0 / kSqrtPi * theta * std::exp(-theta * theta - log_one_plus_erf(theta));
}

double theta_critical(double tol) { return numerics::bisect(z_of_theta, 1e-6, 2.0, tol); }

TanhExpectation expected_tanh_given_x(double x, const ModelParams& p) {
  const double sn = sigma_n_checked(p);
  const double a = p.alpha();
  const double b = p.beta();
  const double k = p.kappa();
  const double ra = std::sqrt(a) * sn;
  const double expo = 2.0 * x * b * k / (a * sn * sn);
  const double log_a1 = expo + log_one_plus_erf((b + x * k) / ra);
  const double log_a2 = -expo + log_one_plus_erf((b - x * k) / ra);

  const double theta = b / ra;
  TanhExpectation out{};
  out.exact = std::tanh(0.5 * (log_a1 - log_a2));
  out.linearised = 2.0 * k * x * b / (sn * sn * a) +
                   2.0 * k * x / ra * std::exp(-theta * theta - log_one_plus_erf(theta)) / kSqrtPi;
  out.warning = p.gamma() * ra < kTanhWarnThreshold;
  return out;
}

double sigma_x_sq(const ModelParams& p) {
  const double sn = sigma_n_checked(p);
  const auto d = derive_params(p);
  const double t = d.theta();
  return sn * sn * (1.0 + d.xi_sq() + 4.0 * t / kSqrtPi + 2.0 * std::numbers::ln2 * t * t);
}

double quasi_static_x_variance(const ModelParams& p) {
  const double z = z_of_theta(derive_params(p).theta());
  if (!(z > 0.0)) {
    throw Error(ErrorCode::NoGaussianDensity,
                "Z(Theta) <= 0: no quasi-static Gaussian; the mispricing may be bimodal");
  }
  return sigma_x_sq(p) / (2.0 * z * p.kappa());
}

double log_quasi_static_x_density(double x, const ModelParams& p) {
  const double v = quasi_static_x_variance(p);
  return -0.5 * x * x / v - 0.5 * std::log(2.0 * std::numbers::pi * v);
}

double quasi_static_x_density(double x, const ModelParams& p) {
  return std::exp(log_quasi_static_x_density(x, p));
}

double log_conditional_density_M_given_x(double m, double x, const ModelParams& p) {
  const auto c = conditional_of(x, p);
  const auto [shift, total] = conditional_normaliser(c, x, p);
  return c.log_f(m) - shift - std::log(total);
}

double conditional_density_M_given_x(double m, double x, const ModelParams& p) {
  return std::exp(log_conditional_density_M_given_x(m, x, p));
}

double conditional_mean_M_given_x(double x, const ModelParams& p) {
  const auto c = conditional_of(x, p);
  const auto [shift, total] = conditional_normaliser(c, x, p);
  const double spread = p.sigma_n() * std::sqrt(p.alpha() / 2.0);
  // First moment; centre the line integral on the bulk so cancellation stays mild.
  const double first = numerics::integrate_line(
      [&](double m) { return m * std::exp(c.log_f(m) - shift); }, 0.0,
      spread + (p.beta() + p.kappa() * std::abs(x)) / 10.0, 1e-10);
  return first / total;
}

double trend_marginal_coefficient(const ModelParams& p) {
  const double sn = sigma_n_checked(p);
  const double z = z_of_theta(derive_params(p).theta());
  return z / (sigma_x_sq(p) * p.kappa() + z * p.alpha() * sn * sn);
}

double log_trend_marginal_unnormalised(double m, const ModelParams& p) {
  const double c = trend_marginal_coefficient(p);
  if (!(c > 0.0)) {
    throw Error(ErrorCode::NoGaussianDensity, "trend marginal is not normalisable for these parameters");
  }
  const double power = cosh_power(p);
  const double cosh_part = power == 0.0 ? 0.0 : power * numerics::log_cosh(p.gamma() * m);
  return cosh_part - c * m * m;
}

std::vector<double> trend_marginal_density(std::span<const double> grid, const ModelParams& p) {
  if (grid.size() < 2) throw Error(ErrorCode::InvalidParameter, "grid needs at least two points");
  std::vector<double> logs(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) logs[i] = log_trend_marginal_unnormalised(grid[i], p);
  const double top = *std::max_element(logs.begin(), logs.end());
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = std::exp(logs[i] - top);
  const double mass = numerics::trapezoid(std::vector<double>(grid.begin(), grid.end()), vals);
  if (!(mass > 0.0)) throw Error(ErrorCode::QuadratureFailure, "trend marginal has no mass on the grid");
  for (double& v : vals) v /= mass;
  return vals;
}

TrendBimodality trend_bimodality(const ModelParams& p) {
  const double sn = sigma_n_checked(p);
  const double z = z_of_theta(derive_params(p).theta());
  TrendBimodality out{};
  out.curvature = 2.0 * p.beta() * p.gamma() / (p.alpha() * sn * sn) -
                  2.0 * z / (sigma_x_sq(p) * p.kappa() + z * p.alpha() * sn * sn);
  out.sign = out.curvature > 0.0 ? 1 : (out.curvature < 0.0 ? -1 : 0);
  out.simple_criterion = p.beta() * p.gamma() > 1.0;
  return out;
}

double arrhenius_crossing_time(const ModelParams& p) {
  if (!(p.beta() * p.gamma() > 1.0)) {
    throw Error(ErrorCode::NoBarrier, "beta gamma <= 1: the trend has a single well");
  }
  const double t = derive_params(p).theta();
  return std::exp(t * t) / p.alpha();
}

StrongCouplingReport report(const ModelParams& p) {
  StrongCouplingReport r{};
  r.theta = derive_params(p).theta();
  r.z_value = z_of_theta(r.theta);
  r.sigma_x_sq = sigma_x_sq(p);
  r.kappa_eff = p.kappa() * r.z_value;
  if (p.beta() * p.gamma() > 1.0) {
    r.crossing_time = arrhenius_crossing_time(p);
    r.validity_score = p.kappa() * *r.crossing_time;
  }
  r.trend_curvature_sign = trend_bimodality(p).sign;
  r.mispricing_modality = predict_modality(p, Regime::StrongCoupling);
  return r;
}

}  // namespace chiarella::strong_coupling
