#include "chiarella/figures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chiarella/error.hpp"
#include "chiarella/fast_trend.hpp"
#include "chiarella/stationary_linear.hpp"

namespace chiarella::figures {

namespace {

std::string num(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

std::uint32_t paths_for(double rate, double total_time, double burn_in) {
  const double per_path = rate * total_time * (1.0 - burn_in);
  const auto n = static_cast<std::uint32_t>(std::ceil(kTargetIndependentSamples / per_path));
  if (n <= 4) return std::max<std::uint32_t>(n, 1);
  return (n + 3) / 4 * 4;  // whole groups of interleaved paths
}

PanelSetup make(std::string label, const ModelParams& p, Regime regime, double total_time, double dt,
                double sample_interval, bool split_paths) {
  PanelSetup s{std::move(label), p, regime, total_time, dt, sample_interval, 1, false, false, false, {}, {}};
  if (split_paths) s.n_paths = paths_for(std::min(p.kappa(), p.alpha()), total_time, 0.1);
  return s;
}

double analytic_variance(const PanelSetup& s) {
  switch (s.regime) {
    case Regime::Linear: return linear::lyapunov_covariance(s.params).var_delta;
    case Regime::FastTrendWeak: return fast_trend::variance_x(s.params).x_sq_exact;
    default: throw Error(ErrorCode::UnsupportedRegime, "no analytic variance for this panel");
  }
}

}  // namespace

double desk_scale(int figure) { return figure <= 2 ? 100.0 : 10.0; }

std::vector<PanelSetup> figure_panels(int figure, bool full) {
  std::vector<PanelSetup> out;
  const double shrink = full ? 1.0 : desk_scale(figure);
  switch (figure) {
    case 1:
      for (double gamma : {1e-4, 1e-3, 1e-2, 1e-1}) {
        const ModelParams p(0.1, 0.2, gamma, 0.2, 0.2, 0.1);
        auto s = make("gamma_" + num(gamma), p, Regime::Linear, gamma * 1e9 / shrink, gamma / 2.0, 2.5, true);
        s.check_variance = true;
        s.check_delta_l1 = true;
        s.expected_delta_modes = 1;
        out.push_back(std::move(s));
      }
      break;
    case 2:
      for (double kappa : {0.2, 0.075, 0.02}) {
        const ModelParams p(kappa, 0.05, 5e4, 2e-5, 0.2, 0.1);
        auto s = make("kappa_" + num(kappa), p, Regime::SlowTrend, 5e7 / shrink, 0.01, 0.25 / kappa, false);
        // The trend sign that picks a well flips only a few times per run;
        // mirrored pairs cancel the resulting imbalance between the wells.
        s.antithetic = true;
        s.n_paths = 2 * paths_for(kappa, s.total_time, 0.1);
        s.check_delta_l1 = true;
        s.expected_delta_modes = kappa >= 0.1 ? 1 : 2;
        out.push_back(std::move(s));
      }
      break;
    case 3:
      for (auto [kappa, beta] : {std::pair{1.0, 0.5}, {0.5, 1.0}, {1.0, 1.0}, {1.0, 2.0}}) {
        const ModelParams p(kappa, beta, 1.0, 500.0, 0.8, 0.1);
        auto s = make("kappa_" + num(kappa) + "_beta_" + num(beta), p, Regime::FastTrendWeak, 1e5 / shrink, 1e-3,
                      0.25 / kappa, true);
        s.check_variance = true;
        s.check_delta_l1 = true;
        s.expected_delta_modes = 1;
        out.push_back(std::move(s));
      }
      break;
    case 4: {
      // The bottom run must span many well-to-well crossings (T_cross ~ 1.1e4),
      // so it keeps the caption length at desk scale too.
      auto top = make("top", ModelParams(0.05, 5.0, 1.0, 50.0, 0.7, 0.2), Regime::StrongCoupling, 1e5 / shrink, 1e-3,
                      0.05, false);
      top.n_paths = 4;
      top.antithetic = true;
      top.expected_m_modes = 2;
      top.expected_delta_modes = 1;
      auto bottom = make("bottom", ModelParams(0.05, 18.0, 1.0, 50.0, 0.7, 0.2), Regime::StrongCoupling, 1e5, 1e-3,
                         0.05, false);
      bottom.n_paths = 4;
      bottom.antithetic = true;
      bottom.expected_m_modes = 2;
      bottom.expected_delta_modes = 2;
      out.push_back(std::move(top));
      out.push_back(std::move(bottom));
      break;
    }
    default:
      throw Error(ErrorCode::InvalidParameter, "figure must be 1, 2, 3 or 4, got " + std::to_string(figure));
  }
  return out;
}

SimSpec panel_spec(const PanelSetup& setup, std::uint64_t seed) {
  SimSpec spec = SimSpec::with_defaults(setup.params, setup.total_time, seed);
  spec.dt = setup.dt;
  spec.subsample_stride = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(setup.sample_interval / setup.dt)));
  spec.n_paths = setup.n_paths;
  spec.antithetic = setup.antithetic;
  return spec;
}

PanelResult run_panel(const PanelSetup& setup, const Options& opts, std::uint64_t panel_index) {
  PanelResult r{setup, panel_spec(setup, opts.seed + 1000 * panel_index), {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  r.stats = simulate(r.spec, opts.threads);

  const auto& p = setup.params;
  const double lag = r.spec.dt * static_cast<double>(r.spec.subsample_stride);
  const double rate_delta = default_decorrelation_rate(p, Variable::Delta, setup.regime);
  const double rate_m = default_decorrelation_rate(p, Variable::Trend, setup.regime);
  r.delta_moments = moments_with_errors(r.stats, Variable::Delta, rate_delta);
  r.m_moments = moments_with_errors(r.stats, Variable::Trend, rate_m);

  const double pair = r.spec.antithetic ? 0.5 : 1.0;
  auto n_eff = [&](double rate) {
    double total = 0.0;
    // Paths are independent, so effective sizes add path by path.
    const std::uint64_t per_path = r.stats.n_retained / std::max<std::uint32_t>(1, r.stats.n_paths);
    total = r.stats.n_paths * effective_sample_size(per_path, lag, rate);
    return std::max(2.0, pair * total);
  };
  r.delta_density = smooth(r.stats.hist_delta, n_eff(rate_delta));
  r.m_density = smooth(r.stats.hist_m, n_eff(rate_m));
  r.delta_modes = count_modes(r.delta_density);
  r.m_modes = count_modes(r.m_density);

  try {
    r.predicted_delta = predict_modality(p, setup.regime);
  } catch (const Error& e) {
    r.notes.emplace_back(std::string("modality prediction: ") + e.what());
  }
  try {
    r.delta_analytic = AnalyticDensity::mispricing(p, setup.regime);
    for (const auto& w : r.delta_analytic->warnings()) r.notes.push_back(w);
    r.l1_delta = l1_distance(r.delta_density, *r.delta_analytic);
    r.ks_delta = ks_distance(r.delta_density, *r.delta_analytic);
  } catch (const Error& e) {
    r.notes.emplace_back(std::string("mispricing density: ") + e.what());
  }
  if (setup.regime == Regime::StrongCoupling) {
    try {
      r.m_analytic = AnalyticDensity::trend_marginal(p);
      r.l1_m = l1_distance(r.m_density, *r.m_analytic);
    } catch (const Error& e) {
      r.notes.emplace_back(std::string("trend marginal: ") + e.what());
    }
  }
  if (setup.check_variance) r.analytic_var = analytic_variance(setup);
  return r;
}

std::vector<Criterion> evaluate_panel(const PanelResult& r, double tolerance_factor) {
  std::vector<Criterion> out;
  const auto& s = r.setup;
  if (s.check_variance && r.analytic_var) {
    const double diff = r.delta_moments.var - *r.analytic_var;
    if (s.regime == Regime::FastTrendWeak) {
      const double rel = std::abs(diff) / *r.analytic_var;
      out.push_back({"variance", rel < kFastTrendRelTolerance * tolerance_factor,
                     "relative error " + num(rel) + " (var " + num(r.delta_moments.var) + " vs " +
                         num(*r.analytic_var) + ")"});
    } else {
      const double z = std::abs(diff) / r.delta_moments.se_var;
      out.push_back({"variance", z < kVarianceSigmas * tolerance_factor,
                     num(z) + " standard errors (var " + num(r.delta_moments.var) + " vs " + num(*r.analytic_var) +
                         ")"});
    }
  }
  if (s.check_delta_l1) {
    if (r.l1_delta) {
      out.push_back({"delta-l1", *r.l1_delta < kL1Tolerance * tolerance_factor, "L1 " + num(*r.l1_delta)});
    } else {
      out.push_back({"delta-l1", false, "no analytic density"});
    }
  }
  if (s.expected_delta_modes) {
    const auto got = static_cast<int>(r.delta_modes.modes.size());
    out.push_back({"delta-modes", got == *s.expected_delta_modes,
                   std::to_string(got) + " modes, expected " + std::to_string(*s.expected_delta_modes)});
  }
  if (s.expected_m_modes) {
    const auto got = static_cast<int>(r.m_modes.modes.size());
    out.push_back({"m-modes", got == *s.expected_m_modes,
                   std::to_string(got) + " modes, expected " + std::to_string(*s.expected_m_modes)});
  }
  return out;
}

}  // namespace chiarella::figures
