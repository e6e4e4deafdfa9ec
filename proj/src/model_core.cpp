#include "chiarella/model_core.hpp"

#include <cmath>
#include <limits>

#include "chiarella/error.hpp"

namespace chiarella {

namespace {

void require(bool ok, std::string_view field, const char* rule, double value) {
  if (!ok) {
    throw Error(ErrorCode::InvalidParameter,
                std::string(field) + " must be " + rule + " (got " + std::to_string(value) + ")");
  }
}

}  // namespace

ModelParams::ModelParams(double kappa, double beta, double gamma, double alpha, double sigma_n,
                         double sigma_v, double g)
    : kappa_(kappa),
      beta_(beta),
      gamma_(gamma),
      alpha_(alpha),
      sigma_n_(sigma_n),
      sigma_v_(sigma_v),
      g_(g) {
  require(std::isfinite(kappa) && kappa > 0.0, "kappa", "finite and > 0", kappa);
  require(std::isfinite(alpha) && alpha > 0.0, "alpha", "finite and > 0", alpha);
  require(std::isfinite(beta) && beta >= 0.0, "beta", "finite and >= 0", beta);
  require(std::isfinite(gamma) && gamma >= 0.0, "gamma", "finite and >= 0", gamma);
  require(std::isfinite(sigma_n) && sigma_n >= 0.0, "sigma_n", "finite and >= 0", sigma_n);
  require(std::isfinite(sigma_v) && sigma_v >= 0.0, "sigma_v", "finite and >= 0", sigma_v);
  require(std::isfinite(g), "g", "finite", g);
}

const std::vector<std::string>& ModelParams::field_names() {
  static const std::vector<std::string> names{"kappa",   "beta",    "gamma", "alpha",
                                              "sigma_n", "sigma_v", "g"};
  return names;
}

double ModelParams::get(std::string_view field) const {
  if (field == "kappa") return kappa_;
  if (field == "beta") return beta_;
  if (field == "gamma") return gamma_;
  if (field == "alpha") return alpha_;
  if (field == "sigma_n") return sigma_n_;
  if (field == "sigma_v") return sigma_v_;
  if (field == "g") return g_;
  throw Error(ErrorCode::InvalidParameter, "unknown parameter '" + std::string(field) + "'");
}

ModelParams ModelParams::with(std::string_view field, double value) const {
  double k = kappa_, b = beta_, gm = gamma_, a = alpha_, sn = sigma_n_, sv = sigma_v_, gg = g_;
  if (field == "kappa") k = value;
  else if (field == "beta") b = value;
  else if (field == "gamma") gm = value;
  else if (field == "alpha") a = value;
  else if (field == "sigma_n") sn = value;
  else if (field == "sigma_v") sv = value;
  else if (field == "g") gg = value;
  else throw Error(ErrorCode::InvalidParameter, "unknown parameter '" + std::string(field) + "'");
  return ModelParams(k, b, gm, a, sn, sv, gg);
}

DerivedParams derive_params(const ModelParams& p) {
  DerivedParams d;
  const double sn2 = p.sigma_n() * p.sigma_n();
  const double sv2 = p.sigma_v() * p.sigma_v();
  d.sigma_sq_ = sn2 + sv2;
  d.sigma_ = std::sqrt(d.sigma_sq_);
  const double denom = p.alpha() * p.gamma() * d.sigma_sq_;
  if (p.beta() == 0.0) {
    d.n_exponent_ = 0.0;
  } else {
    d.n_exponent_ = denom > 0.0 ? 2.0 * p.beta() / denom : std::numeric_limits<double>::infinity();
  }
  d.w_ = p.gamma() * p.gamma() * p.alpha() * sn2 / 2.0;
  if (p.sigma_n() > 0.0) {
    d.theta_ = p.beta() / (p.sigma_n() * std::sqrt(p.alpha()));
    d.xi_sq_ = sv2 / sn2;
  }
  return d;
}

double DerivedParams::theta() const {
  if (!theta_) throw Error(ErrorCode::DivisionByZero, "theta requires sigma_n > 0");
  return *theta_;
}

double DerivedParams::xi_sq() const {
  if (!xi_sq_) throw Error(ErrorCode::DivisionByZero, "xi_sq requires sigma_n > 0");
  return *xi_sq_;
}

std::optional<int> integer_exponent(double n) {
  if (!std::isfinite(n) || n < 0.0) return std::nullopt;
  const double r = std::round(n);
  if (r > 1e6) return std::nullopt;
  if (std::abs(n - r) <= 1e-9 * std::max(1.0, std::abs(n))) return static_cast<int>(r);
  return std::nullopt;
}

PhaseVerdict classify_deterministic_phase(const ModelParams& p) {
  const double margin = p.alpha() * (1.0 - p.beta() * p.gamma()) + p.kappa();
  return {margin > 0.0 ? Phase::StableSpiral : Phase::LimitCycle, margin};
}

Regime parse_regime(std::string_view name) {
  if (name == "linear") return Regime::Linear;
  if (name == "slow-trend") return Regime::SlowTrend;
  if (name == "fast-trend" || name == "fast-trend-weak") return Regime::FastTrendWeak;
  if (name == "strong-coupling") return Regime::StrongCoupling;
  throw Error(ErrorCode::UnsupportedRegime, "unknown regime '" + std::string(name) + "'");
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Linear: return "linear";
    case Regime::SlowTrend: return "slow-trend";
    case Regime::FastTrendWeak: return "fast-trend";
    case Regime::StrongCoupling: return "strong-coupling";
  }
  return "unknown";
}

std::string_view to_string(Phase p) {
  return p == Phase::StableSpiral ? "stable-spiral" : "limit-cycle";
}

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::Unimodal: return "unimodal";
    case Modality::Bimodal: return "bimodal";
    case Modality::Multimodal: return "multimodal";
  }
  return "unknown";
}

std::string_view to_string(VerdictSource s) {
  switch (s) {
    case VerdictSource::AnalyticSlowTrend: return "analytic-slow-trend";
    case VerdictSource::AnalyticStrongCoupling: return "analytic-strong-coupling";
    case VerdictSource::AnalyticGaussian: return "analytic-gaussian";
    case VerdictSource::Empirical: return "empirical";
  }
  return "unknown";
}

}  // namespace chiarella
