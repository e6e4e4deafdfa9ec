#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chiarella {

/// Rates of the mispricing/trend system. Validated on construction, so every
/// other module may assume the invariants hold.
///
/// kappa, alpha > 0; beta, gamma, sigma_n, sigma_v >= 0; all finite.
/// Zero noise and zero feedback are accepted (deterministic runs, OU limits);
/// operations that need a noise source check for it themselves.
class ModelParams {
 public:
  ModelParams(double kappa, double beta, double gamma, double alpha, double sigma_n,
              double sigma_v, double g = 0.0);

  double kappa() const noexcept { return kappa_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }
  double alpha() const noexcept { return alpha_; }
  double sigma_n() const noexcept { return sigma_n_; }
  double sigma_v() const noexcept { return sigma_v_; }
  double g() const noexcept { return g_; }

  /// Copy with one field replaced by name ("kappa", "beta", ...); revalidates.
  ModelParams with(std::string_view field, double value) const;
  double get(std::string_view field) const;

  bool operator==(const ModelParams&) const = default;

  static const std::vector<std::string>& field_names();

 private:
  double kappa_;
  double beta_;
  double gamma_;
  double alpha_;
  double sigma_n_;
  double sigma_v_;
  double g_;
};

/// Dimensionless combinations used throughout the analytic modules.
class DerivedParams {
 public:
  double sigma() const noexcept { return sigma_; }
  double sigma_sq() const noexcept { return sigma_sq_; }
  /// n = 2 beta / (alpha gamma sigma^2); +inf when gamma or sigma vanish.
  double n_exponent() const noexcept { return n_exponent_; }
  /// Stationary variance of gamma * (trend OU driven by sigma_n).
  double w() const noexcept { return w_; }
  /// beta / (sigma_n sqrt(alpha)). Throws DivisionByZero when sigma_n = 0.
  double theta() const;
  /// sigma_v^2 / sigma_n^2. Throws DivisionByZero when sigma_n = 0.
  double xi_sq() const;

  friend DerivedParams derive_params(const ModelParams& p);

 private:
  double sigma_ = 0.0;
  double sigma_sq_ = 0.0;
  double n_exponent_ = 0.0;
  double w_ = 0.0;
  std::optional<double> theta_;
  std::optional<double> xi_sq_;
};

DerivedParams derive_params(const ModelParams& p);

/// True when n is a non-negative integer to relative tolerance 1e-9.
std::optional<int> integer_exponent(double n);

enum class Phase { StableSpiral, LimitCycle };

struct PhaseVerdict {
  Phase phase;
  double margin;  // alpha (1 - beta gamma) + kappa
};

PhaseVerdict classify_deterministic_phase(const ModelParams& p);

enum class Regime { Linear, SlowTrend, FastTrendWeak, StrongCoupling };

enum class Modality { Unimodal, Bimodal, Multimodal };
enum class VerdictSource { AnalyticSlowTrend, AnalyticStrongCoupling, AnalyticGaussian, Empirical };

struct ModalityVerdict {
  Modality modality = Modality::Unimodal;
  std::vector<double> modes;
  VerdictSource source = VerdictSource::Empirical;
  /// Set when the classification is only indicative (strong coupling).
  std::optional<std::string> qualifier;
  /// Sign-carrying curvature of the density at the origin, when known.
  std::optional<double> curvature_at_zero;
};

/// Analytic modality prediction for the mispricing distribution.
ModalityVerdict predict_modality(const ModelParams& p, Regime regime);

Regime parse_regime(std::string_view name);
std::string_view to_string(Regime r);
std::string_view to_string(Phase p);
std::string_view to_string(Modality m);
std::string_view to_string(VerdictSource s);

}  // namespace chiarella
