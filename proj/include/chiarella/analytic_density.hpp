#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "chiarella/model_core.hpp"

namespace chiarella {

enum class DensityKind { LinearGaussian, GaussianCosh, FastTrendGaussian, StrongCouplingQuasiStatic, TrendMarginal };

std::string_view to_string(DensityKind k);

/// A normalised 1-D density tagged with the closed form it evaluates.
class AnalyticDensity {
 public:
  /// Mispricing density for `regime`. Linear -> bivariate-Gaussian marginal,
  /// SlowTrend -> Gaussian-cosh, FastTrendWeak -> Gaussian with the exact
  /// fast-trend variance, StrongCoupling -> quasi-static Gaussian (throws
  /// NoGaussianDensity when Z <= 0).
  static AnalyticDensity mispricing(const ModelParams& p, Regime regime);
  /// Strong-coupling trend marginal p(M), normalised by quadrature.
  static AnalyticDensity trend_marginal(const ModelParams& p);

  double log_pdf(double x) const { return log_pdf_(x); }
  double pdf(double x) const;
  DensityKind kind() const noexcept { return kind_; }
  /// Stable identifier of the closed form, e.g. "gaussian-cosh".
  std::string_view equation() const noexcept { return to_string(kind_); }
  /// Regime-guard messages; the density is still returned.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  AnalyticDensity(DensityKind k, std::function<double(double)> f, std::vector<std::string> w)
      : kind_(k), log_pdf_(std::move(f)), warnings_(std::move(w)) {}

  DensityKind kind_;
  std::function<double(double)> log_pdf_;
  std::vector<std::string> warnings_;
};

}  // namespace chiarella
