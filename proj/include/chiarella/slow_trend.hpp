#pragma once

#include "chiarella/model_core.hpp"

namespace chiarella::slow_trend {

/// Normaliser of the quasi-static conditional law of x given y,
///   A(y) = integral exp(-kappa x^2 / sigma^2) cosh^n(gamma (alpha x + y)) dx,
/// returned as log A(y). Uses the binomial cosh-sum when n is an integer
/// (relative tolerance 1e-9) and adaptive quadrature otherwise.
double log_normalization_A(double y, const ModelParams& p);
double normalization_A(double y, const ModelParams& p);

/// Closed-form binomial sum; requires integer n. Exposed so tests can compare
/// both routes directly.
double log_normalization_A_closed_form(double y, const ModelParams& p, int n);
/// Quadrature route for any n >= 0.
double log_normalization_A_quadrature(double y, const ModelParams& p);

double log_conditional_density_x_given_y(double x, double y, const ModelParams& p);
double conditional_density_x_given_y(double x, double y, const ModelParams& p);

/// Large-gamma Gaussian-cosh mispricing law; independent of alpha and gamma.
double log_gaussian_cosh_density(double x, const ModelParams& p);
double gaussian_cosh_density(double x, const ModelParams& p);

/// p(x) = integral p(x|y) N(y; 0, var_y) dy by quadrature. Used to check the
/// large-gamma limit against the Gaussian-cosh law.
double marginal_x_by_quadrature(double x, const ModelParams& p, double var_y);

/// kappa threshold 2 beta^2 / sigma^2 below which the Gaussian-cosh law is bimodal.
double bimodality_threshold_kappa(const ModelParams& p);

/// Curvature sign carrier 4 beta^2 / sigma^4 - 2 kappa / sigma^2 at x = 0.
double curvature_at_zero(const ModelParams& p);

/// Unimodal {0} when kappa >= 2 beta^2 / sigma^2; otherwise +-x* with
/// beta tanh(2 beta x* / sigma^2) = kappa x*. Throws BracketFailure if the
/// root cannot be bracketed.
ModalityVerdict locate_modes(const ModelParams& p);

}  // namespace chiarella::slow_trend
