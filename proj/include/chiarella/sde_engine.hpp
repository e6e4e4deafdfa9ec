#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chiarella/histogram.hpp"
#include "chiarella/model_core.hpp"

namespace chiarella {

struct FullState {
  double p = 0.0;  // log-price
  double m = 0.0;  // trend
  double v = 0.0;  // log-value
  bool operator==(const FullState&) const = default;
};

struct ReducedState {
  double delta = 0.0;  // mispricing p - v
  double m = 0.0;
  bool operator==(const ReducedState&) const = default;
};

/// Standard normal draws (xi_N, xi_V) for one step.
using NoisePair = std::array<double, 2>;

/// One Euler-Maruyama step of the price/trend/value system. The trend update
/// uses the price increment computed in the same step.
FullState step_full(const FullState& s, const ModelParams& p, double dt, const NoisePair& noise);

/// One Euler-Maruyama step of the mispricing/trend system. The mispricing noise
/// is sigma_n xi_N - sigma_v xi_V; the value noise re-enters the trend update.
ReducedState step_reduced(const ReducedState& s, const ModelParams& p, double dt,
                          const NoisePair& noise);

/// x = delta, y = m - alpha delta.
std::pair<double, double> to_xy(const ReducedState& s, const ModelParams& p);
ReducedState from_xy(double x, double y, const ModelParams& p);

struct SimSpec {
  ModelParams params;
  double dt = 0.0;
  double total_time = 0.0;
  double burn_in_fraction = 0.1;
  std::uint64_t subsample_stride = 1;
  std::uint64_t seed = 0;
  std::uint32_t n_paths = 1;
  /// Paths come in pairs sharing one stream, the second with negated noise.
  bool antithetic = false;
  std::variant<ReducedState, FullState> init = ReducedState{};
  std::size_t n_bins = 400;
  std::pair<double, double> delta_range{-1.0, 1.0};
  std::pair<double, double> m_range{-1.0, 1.0};

  /// Spec with the documented defaults for dt, stride and histogram ranges.
  static SimSpec with_defaults(const ModelParams& params, double total_time, std::uint64_t seed);

  /// Throws InvalidParameter when an invariant fails.
  void validate() const;
  std::uint64_t n_steps() const;
};

/// 20 steps per fastest time scale among 1/alpha, 1/kappa, and gamma/2.
double default_dt(const ModelParams& p);
/// Stride so that stride * dt is about one decorrelation time 1/min(kappa, alpha).
std::uint64_t default_stride(const ModelParams& p, double dt);
std::pair<double, double> default_delta_range(const ModelParams& p);
std::pair<double, double> default_m_range(const ModelParams& p);

struct TrajectoryStats {
  Histogram1D hist_delta;
  Histogram1D hist_m;
  RawMoments moments_delta;
  RawMoments moments_m;
  std::uint64_t n_retained = 0;

  // Provenance.
  std::uint64_t seed = 0;
  std::string generator;
  std::uint32_t n_paths = 0;
  bool antithetic = false;
  double dt = 0.0;
  std::uint64_t subsample_stride = 1;

  /// Counts and sums add; provenance must match.
  void merge(const TrajectoryStats& other);
};

/// Name recorded in every output next to the seed.
inline constexpr const char* kGeneratorName =
    "mt19937_64/seed_seq(seed,stream)/boost-ziggurat-normal";

/// Engine for path `stream` of a run seeded with `seed`.
std::mt19937_64 child_engine(std::uint64_t seed, std::uint64_t stream);

/// Runs every path (on up to `threads` worker threads) and merges the results
/// in path order, so the output does not depend on the thread count.
/// Throws NonFinite with the path and step index on blow-up.
TrajectoryStats simulate(const SimSpec& spec, unsigned threads = 1);

/// Single path with an explicit sign on all noise; exposed for tests.
TrajectoryStats simulate_path(const SimSpec& spec, std::uint64_t stream, double noise_sign);

/// Retained (delta, m) samples of one path, for diagnostics and tests.
std::vector<ReducedState> sample_path(const SimSpec& spec, std::uint64_t stream, double noise_sign);

}  // namespace chiarella
