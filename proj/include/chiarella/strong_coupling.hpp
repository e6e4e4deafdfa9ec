#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chiarella/model_core.hpp"

namespace chiarella::strong_coupling {

/// Z(Theta) = 1 - 2 Theta^2 + (2 / sqrt(pi)) Theta exp(-Theta^2) / (1 + erf Theta).
double z_of_theta(double theta);

/// Root of Z on (0, 2) by bisection to `tol`.
double theta_critical(double tol = 1e-10);

struct TanhExpectation {
  double exact;       // erf-ratio form
  double linearised;  // first order in kappa x
  bool warning;       // gamma sigma_n sqrt(alpha) below kTanhWarnThreshold
};

inline constexpr double kTanhWarnThreshold = 3.0;

/// E[tanh(gamma M) | x] in the quasi-static limit. Throws DivisionByZero when sigma_n = 0.
TanhExpectation expected_tanh_given_x(double x, const ModelParams& p);

/// Effective noise variance sigma_n^2 (1 + Xi^2 + 4 Theta / sqrt(pi) + 2 ln2 Theta^2).
double sigma_x_sq(const ModelParams& p);

/// Centred Gaussian with variance sigma_x^2 / (2 Z kappa). Throws NoGaussianDensity when Z <= 0.
double quasi_static_x_density(double x, const ModelParams& p);
double log_quasi_static_x_density(double x, const ModelParams& p);
double quasi_static_x_variance(const ModelParams& p);

/// Conditional trend law, normalised by quadrature.
double conditional_density_M_given_x(double m, double x, const ModelParams& p);
double log_conditional_density_M_given_x(double m, double x, const ModelParams& p);
double conditional_mean_M_given_x(double x, const ModelParams& p);

/// Quadratic coefficient of the trend marginal, Z / (sigma_x^2 kappa + Z alpha sigma_n^2).
double trend_marginal_coefficient(const ModelParams& p);

/// Unnormalised log p(M). Throws NoGaussianDensity unless the quadratic coefficient is positive.
double log_trend_marginal_unnormalised(double m, const ModelParams& p);

/// p(M) on `grid`, renormalised to unit trapezoid mass.
std::vector<double> trend_marginal_density(std::span<const double> grid, const ModelParams& p);

struct TrendBimodality {
  double curvature;     // 2 beta gamma / (alpha sigma_n^2) - 2 Z / (sigma_x^2 kappa + Z alpha sigma_n^2)
  int sign;             // +1 bimodal, -1 unimodal, 0 degenerate
  bool simple_criterion;  // beta gamma > 1
};

TrendBimodality trend_bimodality(const ModelParams& p);

/// exp(Theta^2) / alpha. Throws NoBarrier when beta gamma <= 1.
double arrhenius_crossing_time(const ModelParams& p);

struct StrongCouplingReport {
  double z_value;
  double theta;
  double sigma_x_sq;
  double kappa_eff;
  std::optional<double> crossing_time;   // absent without a barrier
  std::optional<double> validity_score;  // kappa * crossing_time; invalid near or above 1
  int trend_curvature_sign;
  ModalityVerdict mispricing_modality;
};

StrongCouplingReport report(const ModelParams& p);

}  // namespace chiarella::strong_coupling
