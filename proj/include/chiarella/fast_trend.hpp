#pragma once

#include <string>
#include <vector>

#include "chiarella/model_core.hpp"

namespace chiarella::fast_trend {

/// Autocovariance of sign(OU) with relaxation rate alpha: (2/pi) asin(exp(-alpha tau)).
double telegraph_autocov(double tau, double alpha);

struct EffectiveParams {
  double kappa_eff;
  double beta_eff;
};

/// kappa and beta both scaled by 1 + 2 Theta / sqrt(pi). Throws DivisionByZero when sigma_n = 0.
EffectiveParams effective_params(const ModelParams& p);

struct FastTrendMoments {
  double kappa_eff;
  double beta_eff;
  double a_sq;
  double ab;
  double x_sq_exact;      // a_sq + sigma^2 / (2 kappa_eff) + 2 ab
  double x_sq_truncated;  // second order in Theta
};

FastTrendMoments variance_x(const ModelParams& p);

/// Centred Gaussian with variance x_sq_exact.
double weak_coupling_density(double x, const ModelParams& p);
double log_weak_coupling_density(double x, const ModelParams& p);

struct GammaRatio {
  double exact;        // Gamma(1/2 + eps) / Gamma(1 + eps)
  double first_order;  // sqrt(pi) (1 - 2 ln2 eps)
};

/// Requires 0 <= eps < 0.5.
GammaRatio gamma_ratio_expansion(double eps);

struct NovikovExpectation {
  double w;
  double leading;     // 2 / sqrt(2 pi w)
  double quadrature;  // E[sech^2 X], X ~ N(0, w)
};

NovikovExpectation novikov_cosh_expectation(double w);
/// w = gamma^2 alpha sigma_n^2 / 2.
NovikovExpectation novikov_cosh_expectation(const ModelParams& p);

inline constexpr double kMinTimescaleRatio = 50.0;  // alpha / kappa
inline constexpr double kMaxTheta = 0.3;

/// Human-readable warnings when the parameters leave the fast-trend regime.
std::vector<std::string> regime_warnings(const ModelParams& p);

}  // namespace chiarella::fast_trend
