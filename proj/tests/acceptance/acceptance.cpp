// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chiarella/figures.hpp"
#include "chiarella/verify.hpp"

using namespace chiarella;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

// Panel checks restricted to `wanted` criteria names; empty means all.
Outcome check_panels(int figure, const std::vector<std::size_t>& which, const std::vector<std::string>& wanted,
                     const figures::Options& opts, double tolerance_factor,
                     const std::function<std::string(const figures::PanelResult&)>& extra = {}) {
  const auto panels = figures::figure_panels(figure, false);
  Outcome out{true, ""};
  for (std::size_t i : which) {
    const auto r = figures::run_panel(panels[i], opts, i);
    for (const auto& c : figures::evaluate_panel(r, tolerance_factor)) {
      if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) continue;
      out.passed = out.passed && c.passed;
      out.detail += panels[i].label + " " + c.name + " " + (c.passed ? "ok" : "FAIL") + " (" + c.detail + "); ";
    }
    if (extra) out.detail += extra(r);
  }
  return out;
}

// Depth of the central minimum relative to the lower of the two side maxima.
std::string central_dip(const figures::PanelResult& r) {
  const auto& g = r.delta_density.grid;
  const auto& v = r.delta_density.values;
  double left = 0.0, right = 0.0, centre = 0.0, top = 0.0;
  std::size_t mid = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    top = std::max(top, v[i]);
    if (g[i] < 0.0) left = std::max(left, v[i]);
    else right = std::max(right, v[i]);
    if (std::abs(g[i]) < std::abs(g[mid])) mid = i;
  }
  centre = v[mid];
  const double dip = (std::min(left, right) - centre) / top;
  return r.setup.label + " central dip " + fmt(100.0 * dip) + "% of peak; ";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  figures::Options opts;
  std::vector<int> only;
  app.add_option("--seed", opts.seed, "base seed for the simulated criteria");
  app.add_option("--threads", opts.threads, "worker threads");
  app.add_option("--only", only, "criteria numbers to run");
  CLI11_PARSE(app, argc, argv);

  const auto t_verify = Clock::now();
  const auto report = verify::run_all();
  const double verify_seconds = seconds_since(t_verify);
  std::printf("# oracle checks for AC4, AC6, AC7, AC8, AC10 took %.2fs\n", verify_seconds);
  std::map<std::string, const verify::CheckResult*> by_name;
  for (const auto& c : report.checks) by_name[c.name] = &c;
  auto from_verify = [&](const std::string& name) {
    const auto* c = by_name.at(name);
    return Outcome{c->passed, c->detail};
  };

  std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1,
       [&] {
         // The residual suite is timed separately so its own 1 s budget is checked.
         const auto t0 = Clock::now();
         const double worst = verify::max_fpe_residual(1000, verify::Options{}.seed);
         const double t = seconds_since(t0);
         return Outcome{worst < 1e-9 && t < 1.0, "max residual " + fmt(worst) + " in " + fmt(t) + " s"};
       }},
      {2, [&] { return check_panels(1, {0}, {}, opts, 1.0); }},
      {3, [&] { return check_panels(2, {0, 1, 2}, {"delta-modes"}, opts, 1.0); }},
      {4, [&] { return from_verify("normaliser-closed-form"); }},
      {5, [&] { return check_panels(3, {0, 1, 2, 3}, {"variance", "delta-l1"}, opts, 1.0); }},
      {6,
       [&] {
         auto o = from_verify("telegraph-autocovariance");
         const double third = 2.0 / std::numbers::pi * std::asin(std::exp(-std::numbers::ln2));
         o.passed = o.passed && std::abs(third - 1.0 / 3.0) < 1e-14;
         return o;
       }},
      {7, [&] { return from_verify("theta-critical"); }},
      {8, [&] { return from_verify("gamma-ratio-order"); }},
      {9, [&] { return check_panels(4, {0, 1}, {"delta-modes", "m-modes"}, opts, 1.0, central_dip); }},
      {10, [&] { return from_verify("novikov-expectation"); }},
  };

  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o{false, ""};
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double t = seconds_since(t0);
    std::printf("AC%d %s  [%.1fs] %s\n", id, o.passed ? "PASS" : "FAIL", t, o.detail.c_str());
    std::fflush(stdout);
    if (!o.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
