#include "chiarella/analytic_density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chiarella/error.hpp"
#include "chiarella/fast_trend.hpp"
#include "chiarella/numerics.hpp"
#include "chiarella/slow_trend.hpp"
#include "chiarella/stationary_linear.hpp"
#include "chiarella/strong_coupling.hpp"

namespace chiarella {

std::string_view to_string(DensityKind k) {
  switch (k) {
    case DensityKind::LinearGaussian: return "linear-gaussian";
    case DensityKind::GaussianCosh: return "gaussian-cosh";
    case DensityKind::FastTrendGaussian: return "fast-trend-gaussian";
    case DensityKind::StrongCouplingQuasiStatic: return "strong-coupling-quasi-static";
    case DensityKind::TrendMarginal: return "trend-marginal";
  }
  return "unknown";
}

double AnalyticDensity::pdf(double x) const { return std::exp(log_pdf_(x)); }

AnalyticDensity AnalyticDensity::mispricing(const ModelParams& p, Regime regime) {
  std::vector<std::string> warn;
  switch (regime) {
    case Regime::Linear: {
      const auto c = linear::lyapunov_covariance(p);
      const auto v = linear::linear_validity(p, c);
      if (!v.valid) {
        std::ostringstream s;
        s << "gamma sigma_M = " << v.gamma_sigma_m << " >= " << linear::kValidityThreshold
          << "; linearisation is unreliable";
        warn.push_back(s.str());
      }
      return {DensityKind::LinearGaussian, [c](double x) { return linear::log_marginal_delta_density(c, x); },
              std::move(warn)};
    }
    case Regime::SlowTrend: {
      if (p.alpha() > p.kappa() / fast_trend::kMinTimescaleRatio) {
        std::ostringstream s;
        s << "kappa/alpha = " << p.kappa() / p.alpha() << " < " << fast_trend::kMinTimescaleRatio
          << "; slow-trend limit is unreliable";
        warn.push_back(s.str());
      }
      slow_trend::bimodality_threshold_kappa(p);  // rejects noise-free parameters up front
      return {DensityKind::GaussianCosh, [p](double x) { return slow_trend::log_gaussian_cosh_density(x, p); },
              std::move(warn)};
    }
    case Regime::FastTrendWeak: {
      warn = fast_trend::regime_warnings(p);
      const double v = fast_trend::variance_x(p).x_sq_exact;
      return {DensityKind::FastTrendGaussian,
              [v](double x) { return -0.5 * x * x / v - 0.5 * std::log(2.0 * std::numbers::pi * v); },
              std::move(warn)};
    }
    case Regime::StrongCoupling: {
      const double v = strong_coupling::quasi_static_x_variance(p);
      const auto r = strong_coupling::report(p);
      if (r.validity_score && *r.validity_score >= 1.0) {
        std::ostringstream s;
        s << "kappa T_cross = " << *r.validity_score << " >= 1; quasi-static approximation breaks down";
        warn.push_back(s.str());
      }
      return {DensityKind::StrongCouplingQuasiStatic,
              [v](double x) { return -0.5 * x * x / v - 0.5 * std::log(2.0 * std::numbers::pi * v); },
              std::move(warn)};
    }
  }
  throw Error(ErrorCode::UnsupportedRegime, "unknown regime");
}

AnalyticDensity AnalyticDensity::trend_marginal(const ModelParams& p) {
  const double c = strong_coupling::trend_marginal_coefficient(p);
  strong_coupling::log_trend_marginal_unnormalised(0.0, p);  // throws when not normalisable
  // Peaks sit inside |M| <= beta; the Gaussian factor has width 1/sqrt(2c).
  const double width = 1.0 / std::sqrt(2.0 * c);
  double shift = -1e300;
  const double reach = p.beta() + 6.0 * width;
  for (int i = 0; i <= 4000; ++i) {
    shift = std::max(shift, strong_coupling::log_trend_marginal_unnormalised(-reach + 2.0 * reach * i / 4000.0, p));
  }
  const double mass = numerics::integrate_line(
      [&](double m) { return std::exp(strong_coupling::log_trend_marginal_unnormalised(m, p) - shift); }, 0.0,
      width + p.beta() / 10.0, 1e-11);
  const double log_norm = shift + std::log(mass);
  return {DensityKind::TrendMarginal,
          [p, log_norm](double m) { return strong_coupling::log_trend_marginal_unnormalised(m, p) - log_norm; },
          {}};
}

}  // namespace chiarella
