#include <boost/math/quadrature/sinh_sinh.hpp>
#include <cmath>
#include <random>

#include "chiarella/error.hpp"
#include "chiarella/numerics.hpp"
#include "chiarella/slow_trend.hpp"
#include "doctest.h"

using namespace chiarella;

namespace {

// Independent route: double-exponential quadrature of the raw integrand.
double log_A_oracle(double y, const ModelParams& p) {
  const double s2 = p.sigma_n() * p.sigma_n() + p.sigma_v() * p.sigma_v();
  const double n = 2.0 * p.beta() / (p.alpha() * p.gamma() * s2);
  boost::math::quadrature::sinh_sinh<double> q;
  const double v = q.integrate([&](double x) {
    const double z = std::abs(p.gamma() * (p.alpha() * x + y));
    return std::exp(-p.kappa() * x * x / s2 + n * (z + std::log1p(std::exp(-2.0 * z)) - std::log(2.0)));
  });
  return std::log(v);
}

}  // namespace

TEST_CASE("normaliser against independent quadrature") {
  SUBCASE("integer exponents use the closed form") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 1; n <= 4; ++n) {
      for (int i = 0; i < 10; ++i) {
        const double kappa = 0.1 + u(rng), alpha = 0.2 + u(rng), sn = 0.2 + 0.5 * u(rng), sv = 0.1 + 0.3 * u(rng);
        const double s2 = sn * sn + sv * sv;
        const double gamma = (0.3 + u(rng)) * std::sqrt(kappa / s2) / alpha;
        const ModelParams p(kappa, n * alpha * gamma * s2 / 2.0, gamma, alpha, sn, sv);
        const double y = (u(rng) - 0.5) * 4.0 / gamma;
        REQUIRE(integer_exponent(derive_params(p).n_exponent()) == n);
        const double oracle = log_A_oracle(y, p);
        CHECK(slow_trend::log_normalization_A(y, p) == doctest::Approx(oracle).epsilon(1e-9));
        CHECK(slow_trend::log_normalization_A_closed_form(y, p, n) ==
              doctest::Approx(slow_trend::log_normalization_A_quadrature(y, p)).epsilon(1e-9));
      }
    }
  }
  SUBCASE("non-integer exponent, high-precision reference") {
    const ModelParams p(0.3, 0.07, 2.0, 0.5, 0.3, 0.2);  // n = 14/13
    CHECK(slow_trend::log_normalization_A(0.4, p) == doctest::Approx(0.58832469617686388).epsilon(1e-10));
  }
  SUBCASE("zero exponent is a plain Gaussian integral") {
    const ModelParams p(0.3, 0.0, 2.0, 0.5, 0.3, 0.2);
    CHECK(slow_trend::normalization_A(1.0, p) == doctest::Approx(std::sqrt(M_PI * 0.13 / 0.3)).epsilon(1e-12));
  }
}

TEST_CASE("conditional law of x given y integrates to one") {
  const ModelParams p(0.3, 0.07, 2.0, 0.5, 0.3, 0.2);
  for (double y : {-1.0, 0.0, 0.7}) {
    const double mass = numerics::integrate_line(
        [&](double x) { return slow_trend::conditional_density_x_given_y(x, y, p); }, 0.0, 1.0, 1e-11);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("Gaussian-cosh mispricing law") {
  const ModelParams p(0.02, 0.05, 5e4, 2e-5, 0.2, 0.1);
  SUBCASE("high-precision value") {
    CHECK(slow_trend::gaussian_cosh_density(1.5, p) == doctest::Approx(0.11988985840742585).epsilon(1e-12));
  }
  SUBCASE("normalised and even") {
    const double mass = numerics::integrate_line([&](double x) { return slow_trend::gaussian_cosh_density(x, p); },
                                                 0.0, 2.0, 1e-12);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(slow_trend::gaussian_cosh_density(-0.8, p) == slow_trend::gaussian_cosh_density(0.8, p));
  }
  SUBCASE("no feedback gives the OU Gaussian") {
    const ModelParams q(0.2, 0.0, 5e4, 2e-5, 0.2, 0.1);
    const double var = 0.05 / 0.4;
    CHECK(slow_trend::gaussian_cosh_density(0.3, q) ==
          doctest::Approx(std::exp(-0.09 / (2 * var)) / std::sqrt(2 * M_PI * var)).epsilon(1e-13));
  }
  SUBCASE("large-gamma limit of the full marginal") {
    // Once gamma sd(y) >> 1 the y-average of the conditional law approaches the Gaussian-cosh form.
    for (double x : {0.0, 1.0, 2.5}) {
      const double f = slow_trend::gaussian_cosh_density(x, p);
      const double coarse = std::abs(slow_trend::marginal_x_by_quadrature(x, p, 1e-8) / f - 1.0);
      const double fine = std::abs(slow_trend::marginal_x_by_quadrature(x, p, 1e-4) / f - 1.0);
      CHECK(fine < 5e-3);  // leading correction is of order 1 / (gamma sd) = 2e-3
      CHECK(fine < coarse);
    }
  }
}

TEST_CASE("mode location") {
  SUBCASE("threshold and curvature") {
    const ModelParams p(0.2, 0.05, 5e4, 2e-5, 0.2, 0.1);
    CHECK(slow_trend::bimodality_threshold_kappa(p) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(slow_trend::curvature_at_zero(p) < 0.0);
    CHECK(slow_trend::curvature_at_zero(p.with("kappa", 0.075)) > 0.0);
  }
  SUBCASE("high-precision root") {
    const auto v = slow_trend::locate_modes(ModelParams(0.02, 0.05, 5e4, 2e-5, 0.2, 0.1));
    REQUIRE(v.modes.size() == 2);
    CHECK(v.modes[1] == doctest::Approx(2.4997728042880814).epsilon(1e-12));
  }
  SUBCASE("modes are stationary points of the density") {
    const ModelParams p(0.075, 0.05, 5e4, 2e-5, 0.2, 0.1);
    const double x = slow_trend::locate_modes(p).modes[1];
    const double h = 1e-5;
    const double slope = (slow_trend::log_gaussian_cosh_density(x + h, p) -
                          slow_trend::log_gaussian_cosh_density(x - h, p)) / (2 * h);
    CHECK(std::abs(slope) < 1e-6);
  }
  SUBCASE("boundary belongs to the unimodal side") {
    const auto v = slow_trend::locate_modes(ModelParams(0.1, 0.05, 5e4, 2e-5, 0.2, 0.1));
    CHECK(v.modality == Modality::Unimodal);
    CHECK(v.modes == std::vector<double>{0.0});
  }
}

TEST_CASE("noise is required") {
  CHECK_THROWS_AS(slow_trend::gaussian_cosh_density(0.0, ModelParams(0.2, 0.05, 1.0, 1.0, 0.0, 0.0)), Error);
}
