#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "chiarella/model_core.hpp"

namespace chiarella::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Report {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  std::size_t n_passed() const;
};

struct Options {
  std::uint64_t seed = 20240611;
  /// Scale sigma_delta^2 by 1.01 inside the residual check, which must then fail.
  bool inject_variance_error = false;
};

/// Runs every named oracle check.
Report run_all(const Options& opts = {});

/// Random parameters with a positive Hopf margin, rates spread log-uniformly.
ModelParams random_stable_params(std::uint64_t seed, std::uint64_t index);

/// Largest normalised residual over `n` random stable parameter sets.
double max_fpe_residual(std::size_t n, std::uint64_t seed, double variance_scale = 1.0);

/// Covariance of the linearised system from a direct 3x3 solve of the
/// Lyapunov equation; returns {var_delta, cov, var_m}.
std::array<double, 3> lyapunov_direct(const ModelParams& p);

struct TelegraphEstimate {
  double lag;
  double estimate;
  double std_error;
  double exact;
};

/// Autocovariance of sign(X) for a unit-variance OU process X with rate
/// alpha, sampled with the exact transition. Each positive lag is measured
/// on its own path whose step divides the lag; errors come from 50 batch means.
std::vector<TelegraphEstimate> telegraph_autocov_simulation(double alpha, const std::vector<double>& lags,
                                                            std::uint64_t steps_per_lag_path, std::uint64_t seed);

}  // namespace chiarella::verify
