#include "chiarella/fast_trend.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "chiarella/error.hpp"
#include "chiarella/numerics.hpp"

namespace chiarella::fast_trend {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

double sigma_sq_of(const ModelParams& p) {
  return p.sigma_n() * p.sigma_n() + p.sigma_v() * p.sigma_v();
}

}  // namespace

double telegraph_autocov(double tau, double alpha) {
  if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidParameter, "tau must be >= 0");
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidParameter, "alpha must be > 0");
  return 2.0 / std::numbers::pi * std::asin(std::exp(-alpha * tau));
}

EffectiveParams effective_params(const ModelParams& p) {
  const double factor = 1.0 + 2.0 * derive_params(p).theta() / kSqrtPi;
  return {p.kappa() * factor, p.beta() * factor};
}

FastTrendMoments variance_x(const ModelParams& p) {
  const double theta = derive_params(p).theta();
  const auto [ke, be] = effective_params(p);
  const double a = p.alpha();
  const double sn = p.sigma_n();
  const double s2 = sigma_sq_of(p);

  FastTrendMoments m{};
  m.kappa_eff = ke;
  m.beta_eff = be;
  // Gamma((a + ke) / 2a) / Gamma((2a + ke) / 2a) through lgamma to avoid overflow.
  const double ratio = std::exp(std::lgamma((a + ke) / (2.0 * a)) - std::lgamma((2.0 * a + ke) / (2.0 * a)));
  m.a_sq = be * be / (kSqrtPi * ke * ke) * (kSqrtPi - ratio);
  m.ab = be * sn * std::sqrt(a / std::numbers::pi) / (ke * (a + ke));
  m.x_sq_exact = m.a_sq + s2 / (2.0 * ke) + 2.0 * m.ab;
  m.x_sq_truncated = s2 / (2.0 * ke) + 2.0 * a * sn * sn * theta / (kSqrtPi * p.kappa() * (a + ke)) +
                     std::numbers::ln2 * sn * sn * theta * theta / p.kappa();
  return m;
}

double log_weak_coupling_density(double x, const ModelParams& p) {
  const double v = variance_x(p).x_sq_exact;
  return -0.5 * x * x / v - 0.5 * std::log(2.0 * std::numbers::pi * v);
}

double weak_coupling_density(double x, const ModelParams& p) {
  return std::exp(log_weak_coupling_density(x, p));
}

GammaRatio gamma_ratio_expansion(double eps) {
  if (!(eps >= 0.0 && eps < 0.5)) throw Error(ErrorCode::InvalidParameter, "eps must lie in [0, 0.5)");
  return {std::tgamma(0.5 + eps) / std::tgamma(1.0 + eps),
          kSqrtPi * (1.0 - 2.0 * std::numbers::ln2 * eps)};
}

NovikovExpectation novikov_cosh_expectation(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidParameter, "w must be > 0");
  NovikovExpectation out{};
  out.w = w;
  out.leading = 2.0 / std::sqrt(2.0 * std::numbers::pi * w);
  // sech^2 confines the integrand to |X| of order 40; beyond that it is below 1e-34.
  auto f = [w](double x) {
    const double s = 1.0 / std::cosh(x);
    return std::exp(-0.5 * x * x / w) * s * s;
  };
  const double lim = 40.0;
  double total = 0.0;
  for (double lo : {-lim, -4.0, 0.0, 4.0}) {
    const double hi = lo == -lim ? -4.0 : (lo == 4.0 ? lim : lo + 4.0);
    total += numerics::integrate(f, lo, hi, 1e-13);
  }
  out.quadrature = total / std::sqrt(2.0 * std::numbers::pi * w);
  return out;
}

NovikovExpectation novikov_cosh_expectation(const ModelParams& p) {
  const double w = derive_params(p).w();
  if (!(w > 0.0)) throw Error(ErrorCode::DivisionByZero, "w = gamma^2 alpha sigma_n^2 / 2 vanishes");
  return novikov_cosh_expectation(w);
}

std::vector<std::string> regime_warnings(const ModelParams& p) {
  std::vector<std::string> out;
  const double ratio = p.alpha() / p.kappa();
  if (ratio < kMinTimescaleRatio) {
    std::ostringstream s;
    s << "alpha/kappa = " << ratio << " < " << kMinTimescaleRatio << "; fast-trend expansion is unreliable";
    out.push_back(s.str());
  }
  const double theta = derive_params(p).theta();
  if (theta > kMaxTheta) {
    std::ostringstream s;
    s << "Theta = " << theta << " > " << kMaxTheta << "; weak-coupling expansion is unreliable";
    out.push_back(s.str());
  }
  return out;
}

}  // namespace chiarella::fast_trend
