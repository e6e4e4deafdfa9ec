#pragma once

#include <optional>
#include <vector>

#include "chiarella/analytic_density.hpp"
#include "chiarella/histogram.hpp"
#include "chiarella/model_core.hpp"
#include "chiarella/sde_engine.hpp"

namespace chiarella {

struct EmpiricalDensity {
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth = 0.0;
};

/// 0.9 min(std, IQR / 1.34) n_eff^(-1/5), with std and quartiles read off the histogram.
double silverman_bandwidth(const Histogram1D& h, double n_eff);

/// Gaussian-kernel smoothing of the binned counts, evaluated at the bin
/// centres and renormalised to unit trapezoid mass. n_eff defaults to the
/// histogram total. Throws InsufficientData when total < 1000.
EmpiricalDensity smooth(const Histogram1D& h, std::optional<double> n_eff = std::nullopt);

/// Fraction of the highest value a peak must rise above its surroundings
/// to count as a mode.
inline constexpr double kDefaultProminence = 0.02;

/// Local maxima whose topographic prominence is at least fraction * max.
ModalityVerdict count_modes(const EmpiricalDensity& d, double prominence_fraction = kDefaultProminence);

/// Integral of |d - f| over the grid plus the analytic mass outside it.
double l1_distance(const EmpiricalDensity& d, const AnalyticDensity& f);
/// Both densities on one grid; throws SupportMismatch when the grids differ.
double l1_distance(const EmpiricalDensity& a, const EmpiricalDensity& b);
/// Largest gap between the two CDFs on the grid.
double ks_distance(const EmpiricalDensity& d, const AnalyticDensity& f);

struct MomentReport {
  std::uint64_t n = 0;
  double n_eff_mean = 0.0;  // for the mean and odd moments
  double n_eff_var = 0.0;   // for the variance and even moments
  double mean = 0.0;
  double var = 0.0;
  double skew = 0.0;
  double excess_kurtosis = 0.0;
  double se_mean = 0.0;
  double se_var = 0.0;
  double se_skew = 0.0;
  double se_kurtosis = 0.0;
};

/// Sample spacing `lag` (time) with exponential decorrelation at `rate`:
/// n (1 - r) / (1 + r) with r = exp(-rate * lag), the OU integrated
/// autocorrelation correction. Capped at n.
double effective_sample_size(std::uint64_t n, double lag, double rate);

/// Moments from raw power sums. Neighbouring retained samples are `lag`
/// apart; the mean decorrelates at `rate`, squares at 2 * rate. Throws
/// InsufficientData below 100 samples.
MomentReport moments_with_errors(const RawMoments& m, double lag, double rate, bool antithetic = false);

enum class Variable { Delta, Trend };

/// Retained-sample spacing and antithetic flag are read from the stats.
MomentReport moments_with_errors(const TrajectoryStats& s, Variable v, double rate);

/// Default decorrelation rate: min(kappa, alpha) for the mispricing (kappa in
/// the slow-trend regime), alpha for the trend, and 1 / T_cross for the trend
/// under strong coupling.
double default_decorrelation_rate(const ModelParams& p, Variable v, Regime regime);

}  // namespace chiarella
