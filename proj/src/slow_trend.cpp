#include "chiarella/slow_trend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "chiarella/error.hpp"
#include "chiarella/numerics.hpp"

namespace chiarella::slow_trend {

namespace {

using numerics::log_cosh;

double sigma_sq_of(const ModelParams& p) {
  const double s2 = p.sigma_n() * p.sigma_n() + p.sigma_v() * p.sigma_v();
  if (!(s2 > 0.0)) throw Error(ErrorCode::InvalidParameter, "slow-trend densities need noise");
  return s2;
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

double log_normalization_A_closed_form(double y, const ModelParams& p, int n) {
  const double s2 = sigma_sq_of(p);
  const double k = p.kappa();
  const double gy = p.gamma() * y;
  const double agsig = p.alpha() * p.gamma();
  const double c = agsig * agsig * s2 / (4.0 * k);
  const int parity = n % 2;
  const int centre = (n - parity) / 2;

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n / 2 + 1));
  if (parity == 0) {
    terms.push_back(log_binomial(n, centre) - std::numbers::ln2);
  } else {
    terms.push_back(log_binomial(n, centre) + log_cosh(gy) + c);
  }
  for (int j = 1; j <= n / 2; ++j) {
    const double mj = 2.0 * j + parity;
    terms.push_back(log_binomial(n, centre - j) + log_cosh(gy * mj) + c * mj * mj);
  }
  return 0.5 * std::log(std::numbers::pi * s2 / k) - (n - 1) * std::numbers::ln2 +
         log_sum_exp(terms);
}

double log_normalization_A_quadrature(double y, const ModelParams& p) {
  const double s2 = sigma_sq_of(p);
  const double k = p.kappa();
  const double n = derive_params(p).n_exponent();
  if (!std::isfinite(n)) throw Error(ErrorCode::QuadratureFailure, "exponent n is not finite");
  const double g = p.gamma();
  const double a = p.alpha();
  auto log_f = [&](double x) { return -k * x * x / s2 + n * log_cosh(g * (a * x + y)); };

  // The integrand peaks inside |x| <= beta/kappa; scan for a scaling shift.
  const double spread = std::sqrt(s2 / (2.0 * k));
  const double reach = p.beta() / k + 6.0 * spread;
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 4000; ++i) {
    const double x = -reach + 2.0 * reach * i / 4000.0;
    shift = std::max(shift, log_f(x));
  }
  const double integral = numerics::integrate_line(
      [&](double x) { return std::exp(log_f(x) - shift); }, 0.0,
      spread + p.beta() / (10.0 * k), 1e-11);
  if (!(integral > 0.0)) throw Error(ErrorCode::QuadratureFailure, "normaliser integral <= 0");
  return shift + std::log(integral);
}

double log_normalization_A(double y, const ModelParams& p) {
  if (const auto n = integer_exponent(derive_params(p).n_exponent())) {
    return log_normalization_A_closed_form(y, p, *n);
  }
  return log_normalization_A_quadrature(y, p);
}

double normalization_A(double y, const ModelParams& p) { return std::exp(log_normalization_A(y, p)); }

double log_conditional_density_x_given_y(double x, double y, const ModelParams& p) {
  const double s2 = sigma_sq_of(p);
  const double n = derive_params(p).n_exponent();
  const double cosh_part = n == 0.0 ? 0.0 : n * log_cosh(p.gamma() * (p.alpha() * x + y));
  return -p.kappa() * x * x / s2 + cosh_part - log_normalization_A(y, p);
}

double conditional_density_x_given_y(double x, double y, const ModelParams& p) {
  return std::exp(log_conditional_density_x_given_y(x, y, p));
}

double log_gaussian_cosh_density(double x, const ModelParams& p) {
  const double s2 = sigma_sq_of(p);
  const double k = p.kappa();
  const double b = p.beta();
  return 0.5 * std::log(k / (std::numbers::pi * s2)) - b * b / (k * s2) +
         log_cosh(2.0 * b * x / s2) - k * x * x / s2;
}

double gaussian_cosh_density(double x, const ModelParams& p) {
  return std::exp(log_gaussian_cosh_density(x, p));
}

double marginal_x_by_quadrature(double x, const ModelParams& p, double var_y) {
  if (!(var_y > 0.0)) throw Error(ErrorCode::InvalidParameter, "var_y must be > 0");
  const double sd = std::sqrt(var_y);
  const double lim = 12.0 * sd;
  auto integrand = [&](double y) {
    return std::exp(log_conditional_density_x_given_y(x, y, p) - 0.5 * y * y / var_y) /
           std::sqrt(2.0 * std::numbers::pi * var_y);
  };
  // The conditional law changes on the scale 1/gamma around y = -alpha x and y = 0.
  std::vector<double> cuts{-lim, lim};
  const double w = p.gamma() > 0.0 ? 1.0 / p.gamma() : sd;
  for (double centre : {-p.alpha() * x, 0.0}) {
    for (double m : {0.0, 1.0, 4.0, 16.0, 64.0, 256.0}) {
      for (double sgn : {-1.0, 1.0}) {
        const double c = centre + sgn * m * w;
        if (c > -lim && c < lim) cuts.push_back(c);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return numerics::integrate_pieces(integrand, cuts, 1e-9);
}

double bimodality_threshold_kappa(const ModelParams& p) {
  return 2.0 * p.beta() * p.beta() / sigma_sq_of(p);
}

double curvature_at_zero(const ModelParams& p) {
  const double s2 = sigma_sq_of(p);
  return 4.0 * p.beta() * p.beta() / (s2 * s2) - 2.0 * p.kappa() / s2;
}

ModalityVerdict locate_modes(const ModelParams& p) {
  const double s2 = sigma_sq_of(p);
  ModalityVerdict v;
  v.source = VerdictSource::AnalyticSlowTrend;
  v.curvature_at_zero = curvature_at_zero(p);
  if (p.kappa() >= bimodality_threshold_kappa(p)) {
    v.modality = Modality::Unimodal;
    v.modes = {0.0};
    return v;
  }
  const double b = p.beta();
  const double k = p.kappa();
  auto f = [&](double x) { return b * std::tanh(2.0 * b * x / s2) - k * x; };
  const double scale = b / k;
  double hi = scale * 1.01;
  for (int i = 0; i < 8 && f(hi) >= 0.0; ++i) hi *= 2.0;
  const double lo = scale * 1e-12;
  const double root = numerics::bisect(f, lo, hi, 1e-15 * scale);
  v.modality = Modality::Bimodal;
  v.modes = {-root, root};
  return v;
}

}  // namespace chiarella::slow_trend
