#include "chiarella/error.hpp"
#include "chiarella/model_core.hpp"
#include "chiarella/slow_trend.hpp"
#include "chiarella/strong_coupling.hpp"

namespace chiarella {

ModalityVerdict predict_modality(const ModelParams& p, Regime regime) {
  ModalityVerdict v;
  switch (regime) {
    case Regime::Linear:
    case Regime::FastTrendWeak:
      v.modality = Modality::Unimodal;
      v.modes = {0.0};
      v.source = VerdictSource::AnalyticGaussian;
      return v;
    case Regime::SlowTrend:
      return slow_trend::locate_modes(p);
    case Regime::StrongCoupling: {
      const double z = strong_coupling::z_of_theta(derive_params(p).theta());
      v.source = VerdictSource::AnalyticStrongCoupling;
      // Z < 0 only says the quasi-static Gaussian cannot hold; the true threshold
      // may sit higher, so the verdict is flagged rather than trusted.
      v.qualifier = "indicative lower bound";
      if (z < 0.0) {
        v.modality = Modality::Bimodal;
        v.modes = {-p.beta() / p.kappa(), p.beta() / p.kappa()};
      } else {
        v.modality = Modality::Unimodal;
        v.modes = {0.0};
      }
      return v;
    }
  }
  throw Error(ErrorCode::UnsupportedRegime, "unknown regime");
}

}  // namespace chiarella
