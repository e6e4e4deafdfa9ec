#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chiarella/analytic_density.hpp"
#include "chiarella/empirics.hpp"
#include "chiarella/model_core.hpp"
#include "chiarella/sde_engine.hpp"

namespace chiarella::figures {

struct Options {
  bool full = false;  // caption run lengths instead of desk scale
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// One simulated panel and what it is checked against.
struct PanelSetup {
  std::string label;  // filename-safe
  ModelParams params;
  Regime regime;
  double total_time;
  double dt;
  double sample_interval;  // time between retained samples
  std::uint32_t n_paths;
  bool antithetic;            // mirrored path pairs
  bool check_variance;        // empirical Var[delta] against the analytic value
  bool check_delta_l1;        // smoothed p(delta) against the analytic density
  std::optional<int> expected_delta_modes;
  std::optional<int> expected_m_modes;
};

/// Independent mispricing samples each panel should hold before a density
/// comparison is meaningful; short desk runs are split over several paths.
inline constexpr double kTargetIndependentSamples = 1e4;

/// Desk runs divide caption run lengths by this factor (Figs. 1-2: 100,
/// Figs. 3-4: 10); the tolerances are widened by kDeskToleranceFactor.
double desk_scale(int figure);
inline constexpr double kDeskToleranceFactor = 3.0;

/// Panel list for figure 1..4. Throws InvalidParameter otherwise.
std::vector<PanelSetup> figure_panels(int figure, bool full);

SimSpec panel_spec(const PanelSetup& setup, std::uint64_t seed);

struct PanelResult {
  PanelSetup setup;
  SimSpec spec;
  TrajectoryStats stats;
  MomentReport delta_moments;
  MomentReport m_moments;
  EmpiricalDensity delta_density;
  EmpiricalDensity m_density;
  ModalityVerdict delta_modes;
  ModalityVerdict m_modes;
  std::optional<ModalityVerdict> predicted_delta;
  std::optional<AnalyticDensity> delta_analytic;
  std::optional<AnalyticDensity> m_analytic;
  std::optional<double> analytic_var;
  std::optional<double> l1_delta;
  std::optional<double> ks_delta;
  std::optional<double> l1_m;
  std::vector<std::string> notes;  // analytic refusals and regime warnings
};

PanelResult run_panel(const PanelSetup& setup, const Options& opts, std::uint64_t panel_index);

struct Criterion {
  std::string name;
  bool passed;
  std::string detail;
};

/// Checks a panel with the given tolerance factor (1 for caption tolerances).
std::vector<Criterion> evaluate_panel(const PanelResult& r, double tolerance_factor);

inline constexpr double kL1Tolerance = 0.05;
inline constexpr double kVarianceSigmas = 3.0;
inline constexpr double kFastTrendRelTolerance = 0.05;

}  // namespace chiarella::figures
