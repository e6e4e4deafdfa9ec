#include "chiarella/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chiarella/error.hpp"
#include "chiarella/numerics.hpp"
#include "chiarella/strong_coupling.hpp"

namespace chiarella {

namespace {

// Position below which `frac` of the histogram mass lies, linear inside a bin.
double histogram_quantile(const Histogram1D& h, double frac) {
  const double target = frac * static_cast<double>(h.total());
  double acc = 0.0;
  const auto& c = h.counts();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double next = acc + static_cast<double>(c[i]);
    if (next >= target && c[i] > 0) {
      return h.lo() + (static_cast<double>(i) + (target - acc) / static_cast<double>(c[i])) * h.bin_width();
    }
    acc = next;
  }
  return h.hi();
}

void check_grid(const std::vector<double>& g) {
  if (g.size() < 2) throw Error(ErrorCode::SupportMismatch, "density grid needs at least two points");
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!(g[i] > g[i - 1])) throw Error(ErrorCode::SupportMismatch, "density grid is not increasing");
  }
}

}  // namespace

double silverman_bandwidth(const Histogram1D& h, double n_eff) {
  if (h.total() == 0) throw Error(ErrorCode::EmptyInput, "empty histogram");
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < h.n_bins(); ++i) {
    const double w = static_cast<double>(h.counts()[i]);
    const double x = h.bin_center(i);
    s0 += w;
    s1 += w * x;
    s2 += w * x * x;
  }
  const double mean = s1 / s0;
  const double sd = std::sqrt(std::max(0.0, s2 / s0 - mean * mean));
  const double iqr = histogram_quantile(h, 0.75) - histogram_quantile(h, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = std::max(sd, h.bin_width());
  return 0.9 * spread * std::pow(n_eff, -0.2);
}

EmpiricalDensity smooth(const Histogram1D& h, std::optional<double> n_eff) {
  if (h.total() < 1000) {
    throw Error(ErrorCode::InsufficientData, "smoothing needs at least 1000 samples, have " + std::to_string(h.total()));
  }
  const double n = n_eff.value_or(static_cast<double>(h.total()));
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidParameter, "effective sample size must be > 0");
  EmpiricalDensity d;
  d.bandwidth = silverman_bandwidth(h, n);
  const std::size_t nb = h.n_bins();
  d.grid.resize(nb);
  d.values.assign(nb, 0.0);
  for (std::size_t i = 0; i < nb; ++i) d.grid[i] = h.bin_center(i);

  // The kernel only matters within 8 bandwidths.
  const double inv_h = 1.0 / d.bandwidth;
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(8.0 * d.bandwidth / h.bin_width()));
  const auto& counts = h.counts();
  for (std::size_t j = 0; j < nb; ++j) {
    if (counts[j] == 0) continue;
    const double w = static_cast<double>(counts[j]);
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(j) - reach);
    const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(nb) - 1, static_cast<std::ptrdiff_t>(j) + reach);
    for (auto i = lo; i <= hi; ++i) {
      const double u = (d.grid[static_cast<std::size_t>(i)] - d.grid[j]) * inv_h;
      d.values[static_cast<std::size_t>(i)] += w * std::exp(-0.5 * u * u);
    }
  }
  const double mass = numerics::trapezoid(d.grid, d.values);
  for (double& v : d.values) v /= mass;
  return d;
}

ModalityVerdict count_modes(const EmpiricalDensity& d, double prominence_fraction) {
  const auto& y = d.values;
  const std::size_t n = y.size();
  ModalityVerdict v;
  v.source = VerdictSource::Empirical;
  if (n == 0) return v;
  const double top = *std::max_element(y.begin(), y.end());
  const double threshold = prominence_fraction * top;

  // Candidate peaks: plateau-aware local maxima, located at the plateau middle.
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && y[j + 1] == y[i]) ++j;
    const bool left_ok = i == 0 || y[i - 1] < y[i];
    const bool right_ok = j + 1 == n || y[j + 1] < y[i];
    if (left_ok && right_ok && y[i] > 0.0) peaks.push_back((i + j) / 2);
    i = j + 1;
  }

  for (std::size_t p : peaks) {
    // Walk each way until a strictly higher point or the edge, tracking the minimum.
    double left_min = y[p];
    for (std::size_t k = p; k-- > 0;) {
      if (y[k] > y[p]) break;
      left_min = std::min(left_min, y[k]);
    }
    double right_min = y[p];
    for (std::size_t k = p + 1; k < n; ++k) {
      if (y[k] > y[p]) break;
      right_min = std::min(right_min, y[k]);
    }
    const double prominence = y[p] - std::max(left_min, right_min);
    if (prominence >= threshold) v.modes.push_back(d.grid[p]);
  }
  // A flat-topped single peak reports no prominence against itself; fall back to the maximum.
  if (v.modes.empty()) {
    v.modes.push_back(d.grid[static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin())]);
  }
  v.modality = v.modes.size() == 1 ? Modality::Unimodal
               : v.modes.size() == 2 ? Modality::Bimodal
                                     : Modality::Multimodal;
  return v;
}

double l1_distance(const EmpiricalDensity& d, const AnalyticDensity& f) {
  check_grid(d.grid);
  std::vector<double> diff(d.grid.size());
  for (std::size_t i = 0; i < d.grid.size(); ++i) diff[i] = std::abs(d.values[i] - f.pdf(d.grid[i]));
  const double inside_mass = numerics::integrate([&](double x) { return f.pdf(x); }, d.grid.front(), d.grid.back(), 1e-10);
  return numerics::trapezoid(d.grid, diff) + std::max(0.0, 1.0 - inside_mass);
}

double l1_distance(const EmpiricalDensity& a, const EmpiricalDensity& b) {
  check_grid(a.grid);
  if (a.grid != b.grid) throw Error(ErrorCode::SupportMismatch, "densities live on different grids");
  std::vector<double> diff(a.grid.size());
  for (std::size_t i = 0; i < a.grid.size(); ++i) diff[i] = std::abs(a.values[i] - b.values[i]);
  return numerics::trapezoid(a.grid, diff);
}

double ks_distance(const EmpiricalDensity& d, const AnalyticDensity& f) {
  check_grid(d.grid);
  auto pdf = [&](double x) { return f.pdf(x); };
  double fa = numerics::integrate(pdf, -std::numeric_limits<double>::infinity(), d.grid.front(), 1e-10);
  double fe = 0.0;
  double gap = std::abs(fa - fe);
  for (std::size_t i = 1; i < d.grid.size(); ++i) {
    const double a = d.grid[i - 1];
    const double b = d.grid[i];
    fa += numerics::integrate(pdf, a, b, 1e-10);
    fe += 0.5 * (d.values[i - 1] + d.values[i]) * (b - a);
    gap = std::max(gap, std::abs(fa - fe));
  }
  return gap;
}

double effective_sample_size(std::uint64_t n, double lag, double rate) {
  if (!(lag > 0.0) || !(rate > 0.0)) throw Error(ErrorCode::InvalidParameter, "lag and rate must be > 0");
  const double r = std::exp(-rate * lag);
  return static_cast<double>(n) * (1.0 - r) / (1.0 + r);
}

MomentReport moments_with_errors(const RawMoments& m, double lag, double rate, bool antithetic) {
  if (m.count < 100) {
    throw Error(ErrorCode::InsufficientData, "moments need at least 100 samples, have " + std::to_string(m.count));
  }
  MomentReport r;
  r.n = m.count;
  const double n = static_cast<double>(m.count);
  r.mean = m.s1 / n;
  const double e2 = m.s2 / n, e3 = m.s3 / n, e4 = m.s4 / n;
  const double mu = r.mean;
  r.var = e2 - mu * mu;
  const double c3 = e3 - 3.0 * mu * e2 + 2.0 * mu * mu * mu;
  const double c4 = e4 - 4.0 * mu * e3 + 6.0 * mu * mu * e2 - 3.0 * mu * mu * mu * mu;
  r.skew = r.var > 0.0 ? c3 / std::pow(r.var, 1.5) : 0.0;
  r.excess_kurtosis = r.var > 0.0 ? c4 / (r.var * r.var) - 3.0 : 0.0;

  // Mirrored paths repeat every squared sample, so a pair carries one path's information.
  const double pair_factor = antithetic ? 0.5 : 1.0;
  r.n_eff_mean = pair_factor * effective_sample_size(m.count, lag, rate);
  r.n_eff_var = pair_factor * effective_sample_size(m.count, lag, 2.0 * rate);
  r.se_mean = std::sqrt(std::max(0.0, r.var) / r.n_eff_mean);
  r.se_var = std::sqrt(std::max(0.0, c4 - r.var * r.var) / r.n_eff_var);
  r.se_skew = std::sqrt(6.0 / r.n_eff_mean);
  r.se_kurtosis = std::sqrt(24.0 / r.n_eff_var);
  return r;
}

MomentReport moments_with_errors(const TrajectoryStats& s, Variable v, double rate) {
  const double lag = s.dt * static_cast<double>(s.subsample_stride);
  return moments_with_errors(v == Variable::Delta ? s.moments_delta : s.moments_m, lag, rate, s.antithetic);
}

double default_decorrelation_rate(const ModelParams& p, Variable v, Regime regime) {
  if (v == Variable::Delta) {
    // With a slow trend the mispricing equilibrates at kappa around a frozen y.
    return regime == Regime::SlowTrend ? p.kappa() : std::min(p.kappa(), p.alpha());
  }
  if (regime == Regime::StrongCoupling && p.beta() * p.gamma() > 1.0 && p.sigma_n() > 0.0) {
    return 1.0 / strong_coupling::arrhenius_crossing_time(p);
  }
  return p.alpha();
}

}  // namespace chiarella
