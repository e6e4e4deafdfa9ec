#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "chiarella/analytic_density.hpp"
#include "chiarella/empirics.hpp"
#include "chiarella/error.hpp"
#include "chiarella/fast_trend.hpp"
#include "chiarella/figures.hpp"
#include "chiarella/io.hpp"
#include "chiarella/model_core.hpp"
#include "chiarella/sde_engine.hpp"
#include "chiarella/slow_trend.hpp"
#include "chiarella/stationary_linear.hpp"
#include "chiarella/strong_coupling.hpp"
#include "chiarella/verify.hpp"

namespace fs = std::filesystem;
using namespace chiarella;
using io::json;

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitRefused = 4;

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

unsigned thread_count(const Common& c) {
  if (c.threads) return std::max(1u, *c.threads);
  if (const char* env = std::getenv("CHIARELLA_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "CHIARELLA_THREADS must be an integer");
    }
  }
  return 1;
}

json load_config(const Common& c) {
  if (c.config.empty()) throw Error(ErrorCode::ConfigError, "--config is required");
  json j = io::read_json_file(c.config);
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

io::OutputMeta meta_for(const json& config, std::uint64_t seed) {
  return {io::config_hash(config), seed, kGeneratorName};
}

Regime regime_of(const json& j, const std::string& flag) {
  if (!flag.empty()) return parse_regime(flag);
  const auto it = j.find("regime");
  if (it == j.end() || !it->is_string()) throw Error(ErrorCode::ConfigError, "missing key 'regime'");
  return parse_regime(it->get<std::string>());
}

int cmd_simulate(const Common& c) {
  const json config = load_config(c);
  const SimSpec spec = io::sim_spec_from_json(config);
  const auto stats = simulate(spec, thread_count(c));
  const auto meta = meta_for(config, spec.seed);
  const fs::path out(c.out);
  io::write_histogram_csv(out / "delta_hist.csv", meta, stats.hist_delta);
  io::write_histogram_csv(out / "m_hist.csv", meta, stats.hist_m);

  const double lag = spec.dt * static_cast<double>(spec.subsample_stride);
  const Regime regime = config.contains("regime") ? regime_of(config, "") : Regime::Linear;
  json body = {{"spec", io::to_json(spec)},
               {"generator", stats.generator},
               {"n_retained", stats.n_retained},
               {"n_paths", stats.n_paths},
               {"outside_delta", stats.hist_delta.outside()},
               {"outside_m", stats.hist_m.outside()}};
  for (auto [v, key] : {std::pair{Variable::Delta, "delta"}, {Variable::Trend, "m"}}) {
    const double rate = default_decorrelation_rate(spec.params, v, regime);
    const auto& raw = v == Variable::Delta ? stats.moments_delta : stats.moments_m;
    if (raw.count >= 100) {
      body["moments_" + std::string(key)] = io::to_json(moments_with_errors(raw, lag, rate, spec.antithetic));
    } else {
      body["moments_" + std::string(key)] = nullptr;
    }
    body["decorrelation_rate_" + std::string(key)] = rate;
  }
  io::write_json(out / "stats.json", meta, body);
  std::cout << "retained " << stats.n_retained << " samples from " << stats.n_paths << " path(s); wrote "
            << (out / "stats.json").string() << '\n';
  return 0;
}

int cmd_density(const Common& c, const std::string& regime_flag, const std::string& variable) {
  const json config = load_config(c);
  const ModelParams p = io::params_from_json(config);
  const Regime regime = regime_of(config, regime_flag);
  const bool trend = variable == "m";
  if (!trend && variable != "delta") throw Error(ErrorCode::ConfigError, "--variable must be delta or m");
  if (trend && regime != Regime::StrongCoupling) {
    throw Error(ErrorCode::UnsupportedRegime, "the trend marginal is only available under strong coupling");
  }
  const auto density = trend ? AnalyticDensity::trend_marginal(p) : AnalyticDensity::mispricing(p, regime);

  const auto range = trend ? default_m_range(p) : default_delta_range(p);
  const json grid = config.value("grid", json::object());
  const double lo = grid.value("lo", range.first);
  const double hi = grid.value("hi", range.second);
  const int n = grid.value("n", 801);
  if (!(hi > lo) || n < 2) throw Error(ErrorCode::ConfigError, "grid needs lo < hi and n >= 2");

  std::vector<double> xs(static_cast<std::size_t>(n)), ps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    ps[static_cast<std::size_t>(i)] = density.pdf(xs[static_cast<std::size_t>(i)]);
  }
  const auto meta = meta_for(config, config.value("seed", std::uint64_t{0}));
  const fs::path out(c.out);
  io::write_csv(out / "density.csv", meta, {"x", "p"}, {xs, ps});
  json body = {{"params", io::to_json(p)},
               {"regime", to_string(regime)},
               {"variable", variable},
               {"equation", density.equation()},
               {"warnings", density.warnings()}};
  io::write_json(out / "density.json", meta, body);
  for (const auto& w : density.warnings()) std::cerr << "warning: " << w << '\n';
  std::cout << density.equation() << " density on " << n << " points written to " << (out / "density.csv").string()
            << '\n';
  return 0;
}

int cmd_modality(const Common& c, const std::string& regime_flag) {
  const json config = load_config(c);
  const ModelParams p = io::params_from_json(config);
  const Regime regime = regime_of(config, regime_flag);
  json body = {{"params", io::to_json(p)},
               {"regime", to_string(regime)},
               {"phase", to_string(classify_deterministic_phase(p).phase)},
               {"hopf_margin", classify_deterministic_phase(p).margin},
               {"analytic", io::to_json(predict_modality(p, regime))}};
  if (regime == Regime::StrongCoupling) body["strong_coupling"] = io::to_json(strong_coupling::report(p));
  std::uint64_t seed = config.value("seed", std::uint64_t{0});
  if (config.contains("total_time")) {
    const SimSpec spec = io::sim_spec_from_json(config);
    seed = spec.seed;
    const auto stats = simulate(spec, thread_count(c));
    const double lag = spec.dt * static_cast<double>(spec.subsample_stride);
    const double rate = default_decorrelation_rate(p, Variable::Delta, regime);
    const double n_eff = std::max(2.0, effective_sample_size(stats.n_retained, lag, rate));
    body["empirical"] = io::to_json(count_modes(smooth(stats.hist_delta, n_eff)));
  }
  const auto meta = meta_for(config, seed);
  io::write_json(fs::path(c.out) / "modality.json", meta, body);
  std::cout << body.dump(2) << '\n';
  return 0;
}

std::vector<double> values_of(const json& sweep, const char* key) {
  const auto it = sweep.find(key);
  if (it == sweep.end()) return {};
  if (it->is_array()) {
    std::vector<double> v;
    for (const auto& x : *it) {
      if (!x.is_number()) throw Error(ErrorCode::ConfigError, std::string("'") + key + "' must hold numbers");
      v.push_back(x.get<double>());
    }
    return v;
  }
  if (it->is_object()) {  // {"start", "stop", "n"}
    const double a = it->value("start", 0.0), b = it->value("stop", 0.0);
    const int n = it->value("n", 0);
    if (n < 1) throw Error(ErrorCode::ConfigError, std::string("'") + key + "' needs n >= 1");
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return v;
  }
  throw Error(ErrorCode::ConfigError, std::string("'") + key + "' must be a list or {start, stop, n}");
}

int cmd_sweep(const Common& c) {
  const json config = load_config(c);
  const ModelParams base = io::params_from_json(config);
  const auto it = config.find("sweep");
  if (it == config.end() || !it->is_object()) throw Error(ErrorCode::ConfigError, "missing key 'sweep'");
  const json& sweep = *it;
  const std::string name1 = sweep.value("param1", "");
  const std::string name2 = sweep.value("param2", "");
  if (name1.empty()) throw Error(ErrorCode::ConfigError, "missing key 'sweep.param1'");
  const auto v1 = values_of(sweep, "values1");
  auto v2 = values_of(sweep, "values2");
  if (v1.empty()) throw Error(ErrorCode::ConfigError, "missing key 'sweep.values1'");
  if (!name2.empty() && v2.empty()) throw Error(ErrorCode::ConfigError, "missing key 'sweep.values2'");
  if (name2.empty()) v2 = {0.0};
  const Regime regime = config.contains("regime") ? regime_of(config, "") : Regime::SlowTrend;
  const bool empirical = config.contains("total_time");

  std::vector<std::vector<std::string>> rows;
  std::uint64_t index = 0;
  for (double a : v1) {
    for (double b : v2) {
      ModelParams p = base.with(name1, a);
      if (!name2.empty()) p = p.with(name2, b);
      const auto phase = classify_deterministic_phase(p);
      std::string analytic;
      try {
        analytic = std::string(to_string(predict_modality(p, regime).modality));
      } catch (const Error& e) {
        analytic = "n/a";
      }
      std::string modes;
      if (empirical) {
        json point = config;
        point.erase("sweep");
        for (const auto& f : ModelParams::field_names()) point[f] = p.get(f);
        point["seed"] = config.value("seed", std::uint64_t{0}) + index;
        point.erase("delta_range");
        point.erase("m_range");
        const SimSpec spec = io::sim_spec_from_json(point);
        const auto stats = simulate(spec, thread_count(c));
        const double lag = spec.dt * static_cast<double>(spec.subsample_stride);
        const double rate = default_decorrelation_rate(p, Variable::Delta, regime);
        const double n_eff = std::max(2.0, effective_sample_size(stats.n_retained, lag, rate));
        modes = std::to_string(count_modes(smooth(stats.hist_delta, n_eff)).modes.size());
      }
      rows.push_back({io::format_double(a), name2.empty() ? "" : io::format_double(b),
                      std::string(to_string(phase.phase)), analytic, modes});
      ++index;
    }
  }
  const auto meta = meta_for(config, config.value("seed", std::uint64_t{0}));
  io::write_rows(fs::path(c.out) / "sweep.csv", meta,
                 {"param1", "param2", "hopf_phase", "analytic_modality", "empirical_modes"}, rows);
  std::cout << rows.size() << " grid points written to " << (fs::path(c.out) / "sweep.csv").string() << '\n';
  return 0;
}

int cmd_verify(const Common& c, bool inject) {
  verify::Options opts;
  if (c.seed) opts.seed = *c.seed;
  opts.inject_variance_error = inject;
  const auto report = verify::run_all(opts);
  json checks = json::array();
  for (const auto& check : report.checks) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
    checks.push_back({{"name", check.name}, {"passed", check.passed}, {"detail", check.detail}});
  }
  const json body = {{"checks", checks},
                     {"n_checks", report.checks.size()},
                     {"n_passed", report.n_passed()},
                     {"injected_error", inject}};
  io::write_json(fs::path(c.out) / "verify.json", {io::config_hash(json{{"inject", inject}}), opts.seed, kGeneratorName},
                 body);
  std::cout << report.n_passed() << "/" << report.checks.size() << " checks passed\n";
  return report.all_passed() ? 0 : kExitVerifyFailed;
}

void write_panel(const fs::path& dir, const io::OutputMeta& meta, int figure, const figures::PanelResult& r) {
  const std::string stem = "fig" + std::to_string(figure) + "_" + r.setup.label;
  io::write_histogram_csv(dir / (stem + "_delta_hist.csv"), meta, r.stats.hist_delta);
  io::write_histogram_csv(dir / (stem + "_m_hist.csv"), meta, r.stats.hist_m);
  auto overlay = [&](const EmpiricalDensity& d, const std::optional<AnalyticDensity>& f, const std::string& name) {
    std::vector<double> analytic(d.grid.size(), 0.0);
    if (f) {
      for (std::size_t i = 0; i < d.grid.size(); ++i) analytic[i] = f->pdf(d.grid[i]);
    }
    std::vector<std::vector<double>> cols{d.grid, d.values};
    std::vector<std::string> header{"x", "empirical"};
    if (f) {
      cols.push_back(analytic);
      header.emplace_back("analytic");
    }
    io::write_csv(dir / (stem + "_" + name + "_density.csv"), meta, header, cols);
  };
  overlay(r.delta_density, r.delta_analytic, "delta");
  overlay(r.m_density, r.m_analytic, "m");
}

int cmd_reproduce(const Common& c, int figure, bool full) {
  if (figure < 1 || figure > 4) {
    throw Error(ErrorCode::ConfigError, "figure must be 1, 2, 3 or 4, got " + std::to_string(figure));
  }
  figures::Options opts;
  opts.full = full;
  opts.seed = c.seed.value_or(1);
  opts.threads = thread_count(c);
  const double tol = full ? 1.0 : figures::kDeskToleranceFactor;
  const auto panels = figures::figure_panels(figure, full);
  const json config = {{"figure", figure}, {"full", full}, {"seed", opts.seed}};
  const auto meta = meta_for(config, opts.seed);
  const fs::path dir(c.out);

  json verdict_panels = json::array();
  bool all = true;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto r = figures::run_panel(panels[i], opts, i);
    write_panel(dir, meta, figure, r);
    json crit = json::array();
    for (const auto& k : figures::evaluate_panel(r, tol)) {
      all = all && k.passed;
      crit.push_back({{"name", k.name}, {"passed", k.passed}, {"detail", k.detail}});
      std::cout << "fig" << figure << " " << r.setup.label << " " << k.name << ": " << (k.passed ? "pass" : "FAIL")
                << " (" << k.detail << ")\n";
    }
    json panel = {{"label", r.setup.label},
                  {"params", io::to_json(r.setup.params)},
                  {"regime", to_string(r.setup.regime)},
                  {"spec", io::to_json(r.spec)},
                  {"moments_delta", io::to_json(r.delta_moments)},
                  {"moments_m", io::to_json(r.m_moments)},
                  {"modes_delta", io::to_json(r.delta_modes)},
                  {"modes_m", io::to_json(r.m_modes)},
                  {"criteria", crit},
                  {"notes", r.notes}};
    if (r.predicted_delta) panel["predicted_delta"] = io::to_json(*r.predicted_delta);
    if (r.delta_analytic) panel["equation_delta"] = r.delta_analytic->equation();
    if (r.analytic_var) panel["analytic_var_delta"] = *r.analytic_var;
    if (r.l1_delta) panel["l1_delta"] = *r.l1_delta;
    if (r.ks_delta) panel["ks_delta"] = *r.ks_delta;
    if (r.l1_m) panel["l1_m"] = *r.l1_m;
    verdict_panels.push_back(panel);
  }
  const json body = {{"figure", figure},
                     {"full", full},
                     {"tolerance_factor", tol},
                     {"passed", all},
                     {"panels", verdict_panels}};
  io::write_json(dir / ("fig" + std::to_string(figure) + "_verdict.json"), meta, body);
  std::cout << "figure " << figure << ": " << (all ? "all criteria met" : "some criteria failed") << '\n';
  return 0;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidParameter:
    case ErrorCode::UnsupportedRegime:
      return kExitConfig;
    case ErrorCode::NoGaussianDensity:
    case ErrorCode::NoStationaryDistribution:
    case ErrorCode::NoBarrier:
      return kExitRefused;
    default:
      return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and stationary-density laboratory for the Chiarella mispricing/trend model"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON config file");
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
    sub->add_option("--seed", common.seed, "override the seed");
    sub->add_option("--threads", common.threads, "worker threads (fallback: CHIARELLA_THREADS)");
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "simulate and write histograms and moments");
  add_common(simulate_cmd);

  std::string regime_flag;
  std::string variable = "delta";
  auto* density_cmd = app.add_subcommand("density", "evaluate an analytic stationary density on a grid");
  add_common(density_cmd);
  density_cmd->add_option("--regime", regime_flag, "linear | slow-trend | fast-trend | strong-coupling");
  density_cmd->add_option("--variable", variable, "delta or m (trend marginal, strong coupling only)");

  auto* modality_cmd = app.add_subcommand("modality", "analytic (and optionally empirical) modality verdict");
  add_common(modality_cmd);
  modality_cmd->add_option("--regime", regime_flag, "regime for the analytic verdict");

  auto* sweep_cmd = app.add_subcommand("sweep", "phase diagram over one or two parameters");
  add_common(sweep_cmd);

  bool inject = false;
  auto* verify_cmd = app.add_subcommand("verify", "run the oracle suite");
  add_common(verify_cmd);
  verify_cmd->add_flag("--inject-error", inject, "scale sigma_delta^2 by 1.01 inside the residual check");

  int figure = 0;
  bool full = false;
  auto* fig_cmd = app.add_subcommand("reproduce-fig", "regenerate the data behind a figure");
  add_common(fig_cmd);
  fig_cmd->add_option("figure", figure, "figure number 1-4")->required();
  fig_cmd->add_flag("--full", full, "use caption run lengths instead of desk scale");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(common);
    if (*density_cmd) return cmd_density(common, regime_flag, variable);
    if (*modality_cmd) return cmd_modality(common, regime_flag);
    if (*sweep_cmd) return cmd_sweep(common);
    if (*verify_cmd) return cmd_verify(common, inject);
    if (*fig_cmd) return cmd_reproduce(common, figure, full);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
