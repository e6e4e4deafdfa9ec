#pragma once

#include <array>

#include "chiarella/model_core.hpp"

namespace chiarella::linear {

/// Stationary covariance of (delta, m) for the linearised trend feedback.
struct StationaryCovariance {
  double var_delta;
  double var_m;
  double rho;

  double cov() const;
  double det() const;
};

/// Closed-form solution of A S + S A^T + D = 0. Throws NoStationaryDistribution
/// unless alpha (1 - beta gamma) + kappa > 0, InvalidParameter without noise.
StationaryCovariance lyapunov_covariance(const ModelParams& p);

double joint_density(const StationaryCovariance& c, double delta, double m);
double log_joint_density(const StationaryCovariance& c, double delta, double m);
double marginal_delta_density(const StationaryCovariance& c, double delta);
double log_marginal_delta_density(const StationaryCovariance& c, double delta);

/// Coefficients of the constant, delta^2, m^2 and delta*m terms left after
/// substituting the Gaussian into the stationary Fokker-Planck operator.
/// Each entry is divided by the largest absolute term that builds it.
struct FpeResiduals {
  std::array<double, 4> normalized{};  // constant, delta^2, m^2, delta*m
  std::array<double, 4> raw{};
  double max_abs() const;
};

/// Throws SingularCovariance when the covariance cannot be inverted.
FpeResiduals fpe_residuals(const ModelParams& p, const StationaryCovariance& c);

struct LinearValidity {
  double gamma_sigma_m;   // gamma * sigma_M
  double large_alpha_form;  // gamma^2 alpha sigma_n^2 / (2 (1 - beta gamma)); +inf at beta gamma >= 1
  bool valid;             // gamma_sigma_m < kValidityThreshold
};

inline constexpr double kValidityThreshold = 0.1;

LinearValidity linear_validity(const ModelParams& p, const StationaryCovariance& c);

}  // namespace chiarella::linear
