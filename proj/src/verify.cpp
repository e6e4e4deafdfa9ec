#include "chiarella/verify.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "chiarella/fast_trend.hpp"
#include "chiarella/sde_engine.hpp"
#include "chiarella/slow_trend.hpp"
#include "chiarella/stationary_linear.hpp"
#include "chiarella/strong_coupling.hpp"

namespace chiarella::verify {

namespace {

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

CheckResult check_fpe(const Options& o) {
  const double worst = max_fpe_residual(1000, o.seed, o.inject_variance_error ? 1.01 : 1.0);
  return {"fpe-residuals", worst < 1e-9, "max normalised residual " + fmt(worst) + " over 1000 draws"};
}

CheckResult check_lyapunov(const Options& o) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto p = random_stable_params(o.seed + 1, i);
    const auto c = linear::lyapunov_covariance(p);
    const auto d = lyapunov_direct(p);
    worst = std::max({worst, std::abs(c.var_delta / d[0] - 1.0), std::abs(c.var_m / d[2] - 1.0),
                      std::abs(c.cov() - d[1]) / std::sqrt(d[0] * d[2])});
  }
  return {"lyapunov-closed-form", worst < 1e-10, "max relative deviation " + fmt(worst)};
}

CheckResult check_normaliser(const Options& o) {
  std::mt19937_64 rng(o.seed + 2);
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    for (int k = 0; k < 50; ++k) {
      const double kappa = log_uniform(rng, 0.05, 5.0);
      const double alpha = log_uniform(rng, 1e-3, 1.0);
      const double sn = log_uniform(rng, 0.05, 1.0);
      const double sv = log_uniform(rng, 0.05, 1.0);
      const double s2 = sn * sn + sv * sv;
      // Keep (alpha gamma sigma)^2 / (4 kappa) of order one so both routes stay well conditioned.
      const double gamma = log_uniform(rng, 0.1, 3.0) * std::sqrt(kappa / s2) / alpha;
      const double beta = n * alpha * gamma * s2 / 2.0;
      const ModelParams p(kappa, beta, gamma, alpha, sn, sv);
      std::uniform_real_distribution<double> uy(-3.0 / gamma, 3.0 / gamma);
      const double y = uy(rng);
      const double closed = slow_trend::log_normalization_A_closed_form(y, p, n);
      const double quad = slow_trend::log_normalization_A_quadrature(y, p);
      worst = std::max(worst, std::abs(std::expm1(closed - quad)));
    }
  }
  return {"normaliser-closed-form", worst < 1e-8, "max relative error " + fmt(worst) + " over 200 draws"};
}

CheckResult check_gamma_ratio() {
  auto err = [](double e) {
    const auto g = fast_trend::gamma_ratio_expansion(e);
    return std::abs(g.exact - g.first_order);
  };
  const double r1 = err(1e-2) / err(5e-3);
  const double r2 = err(5e-3) / err(2.5e-3);
  const bool ok = std::abs(r1 - 4.0) < 0.3 && std::abs(r2 - 4.0) < 0.3;
  return {"gamma-ratio-order", ok, "error ratios " + fmt(r1) + ", " + fmt(r2)};
}

CheckResult check_theta_critical() {
  const double t = strong_coupling::theta_critical();
  return {"theta-critical", std::abs(t - 0.797999) < 1e-5, "root " + fmt(t)};
}

CheckResult check_truncation_order() {
  // Small kappa / alpha so the Theta^3 remainder dominates the O(kappa / alpha) terms.
  auto gap = [](double beta) {
    const ModelParams p(1e-4, beta, 1.0, 500.0, 0.8, 0.1);
    const auto m = fast_trend::variance_x(p);
    return std::abs(m.x_sq_exact - m.x_sq_truncated) * p.kappa();
  };
  const double theta_beta = 0.8 * std::sqrt(500.0);  // beta giving Theta = 1
  const double r = gap(0.02 * theta_beta) / gap(0.01 * theta_beta);
  return {"fast-trend-truncation-order", std::abs(r - 8.0) < 0.8, "ratio " + fmt(r)};
}

CheckResult check_novikov() {
  double worst_margin = 0.0;
  bool ok = true;
  for (double w : {50.0, 100.0, 500.0}) {
    const auto e = fast_trend::novikov_cosh_expectation(w);
    const double rel = std::abs(e.quadrature / e.leading - 1.0);
    ok = ok && rel < 2.0 / w;
    worst_margin = std::max(worst_margin, rel * w / 2.0);
  }
  return {"novikov-expectation", ok, "worst error / (2/w) = " + fmt(worst_margin)};
}

CheckResult check_telegraph(const Options& o) {
  const std::vector<double> lags{0.0, 1.0, 2.0, std::numbers::ln2};
  const auto est = telegraph_autocov_simulation(1.0, lags, 2'000'000, o.seed + 3);
  bool ok = true;
  std::ostringstream s;
  for (const auto& e : est) {
    const double z = e.std_error > 0.0 ? std::abs(e.estimate - e.exact) / e.std_error : std::abs(e.estimate - e.exact);
    ok = ok && (e.std_error > 0.0 ? z < 3.0 : z < 1e-12);
    s << "lag " << fmt(e.lag) << ": " << fmt(e.estimate) << " vs " << fmt(e.exact) << "; ";
  }
  return {"telegraph-autocovariance", ok, s.str()};
}

}  // namespace

bool Report::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::size_t Report::n_passed() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; }));
}

ModelParams random_stable_params(std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng = child_engine(seed, index);
  for (;;) {
    const double kappa = log_uniform(rng, 1e-3, 10.0);
    const double alpha = log_uniform(rng, 1e-3, 100.0);
    const double beta = log_uniform(rng, 1e-3, 10.0);
    const double gamma = log_uniform(rng, 1e-3, 10.0);
    const double sn = log_uniform(rng, 1e-2, 2.0);
    const double sv = log_uniform(rng, 1e-2, 2.0);
    ModelParams p(kappa, beta, gamma, alpha, sn, sv);
    // Keep away from the Hopf line, where the covariance blows up.
    if (classify_deterministic_phase(p).margin > 1e-3 * (kappa + alpha)) return p;
  }
}

double max_fpe_residual(std::size_t n, std::uint64_t seed, double variance_scale) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = random_stable_params(seed, i);
    auto c = linear::lyapunov_covariance(p);
    c.var_delta *= variance_scale;
    worst = std::max(worst, linear::fpe_residuals(p, c).max_abs());
  }
  return worst;
}

std::array<double, 3> lyapunov_direct(const ModelParams& p) {
  const double k = p.kappa(), a = p.alpha(), bg = p.beta() * p.gamma();
  const double sn2 = p.sigma_n() * p.sigma_n();
  const double s2 = sn2 + p.sigma_v() * p.sigma_v();
  const double a11 = -k, a12 = bg, a21 = -a * k, a22 = a * (bg - 1.0);
  const double d11 = s2, d12 = a * sn2, d22 = a * a * sn2;
  // Unknowns (S11, S12, S22).
  const double m[3][3] = {{2.0 * a11, 2.0 * a12, 0.0}, {a21, a11 + a22, a12}, {0.0, 2.0 * a21, 2.0 * a22}};
  const double rhs[3] = {-d11, -d12, -d22};
  auto det3 = [](const double q[3][3]) {
    return q[0][0] * (q[1][1] * q[2][2] - q[1][2] * q[2][1]) - q[0][1] * (q[1][0] * q[2][2] - q[1][2] * q[2][0]) +
           q[0][2] * (q[1][0] * q[2][1] - q[1][1] * q[2][0]);
  };
  const double det = det3(m);
  std::array<double, 3> out{};
  for (int col = 0; col < 3; ++col) {
    double q[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) q[r][c] = c == col ? rhs[r] : m[r][c];
    }
    out[static_cast<std::size_t>(col)] = det3(q) / det;
  }
  return out;
}

std::vector<TelegraphEstimate> telegraph_autocov_simulation(double alpha, const std::vector<double>& lags,
                                                            std::uint64_t steps_per_lag_path, std::uint64_t seed) {
  constexpr std::uint64_t kStepsPerLag = 20;
  constexpr std::size_t kBatches = 50;
  std::vector<TelegraphEstimate> out;
  for (std::size_t li = 0; li < lags.size(); ++li) {
    const double lag = lags[li];
    TelegraphEstimate e{lag, 1.0, 0.0, fast_trend::telegraph_autocov(lag, alpha)};
    if (lag == 0.0) {  // sign^2 is identically one
      out.push_back(e);
      continue;
    }
    const double dt = lag / kStepsPerLag;
    const double decay = std::exp(-alpha * dt);
    const double kick = std::sqrt(1.0 - decay * decay);
    auto rng = child_engine(seed, li);
    boost::random::normal_distribution<double> normal;
    std::vector<double> ring(kStepsPerLag);
    double x = normal(rng);
    for (auto& r : ring) {
      x = decay * x + kick * normal(rng);
      r = x > 0.0 ? 1.0 : -1.0;
    }
    const std::uint64_t per_batch = steps_per_lag_path / kBatches;
    std::vector<double> batch_means(kBatches, 0.0);
    std::size_t pos = 0;
    for (std::size_t b = 0; b < kBatches; ++b) {
      double acc = 0.0;
      for (std::uint64_t i = 0; i < per_batch; ++i) {
        x = decay * x + kick * normal(rng);
        const double s = x > 0.0 ? 1.0 : -1.0;
        acc += s * ring[pos];  // ring[pos] is the sign kStepsPerLag steps ago
        ring[pos] = s;
        pos = pos + 1 == kStepsPerLag ? 0 : pos + 1;
      }
      batch_means[b] = acc / static_cast<double>(per_batch);
    }
    double mean = 0.0;
    for (double m : batch_means) mean += m;
    mean /= kBatches;
    double var = 0.0;
    for (double m : batch_means) var += (m - mean) * (m - mean);
    var /= (kBatches - 1);
    e.estimate = mean;
    e.std_error = std::sqrt(var / kBatches);
    out.push_back(e);
  }
  return out;
}

Report run_all(const Options& opts) {
  Report r;
  r.checks.push_back(check_fpe(opts));
  r.checks.push_back(check_lyapunov(opts));
  r.checks.push_back(check_normaliser(opts));
  r.checks.push_back(check_gamma_ratio());
  r.checks.push_back(check_theta_critical());
  r.checks.push_back(check_truncation_order());
  r.checks.push_back(check_novikov());
  r.checks.push_back(check_telegraph(opts));
  return r;
}

}  // namespace chiarella::verify
