#include <Eigen/Dense>
#include <cmath>

#include "chiarella/error.hpp"
#include "chiarella/numerics.hpp"
#include "chiarella/stationary_linear.hpp"
#include "chiarella/verify.hpp"
#include "doctest.h"

using namespace chiarella;

namespace {

Eigen::Matrix4d kron(const Eigen::Matrix2d& x, const Eigen::Matrix2d& y) {
  Eigen::Matrix4d out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = x(i, j) * y(k, l);
  return out;
}

// Generic solve of A S + S A^T + D = 0 via the Kronecker form; returns S.
Eigen::Matrix2d lyapunov_oracle(const ModelParams& p) {
  const double k = p.kappa(), a = p.alpha(), bg = p.beta() * p.gamma();
  Eigen::Matrix2d A;
  A << -k, bg, -a * k, a * (bg - 1.0);
  Eigen::Matrix2d B;  // columns: trend noise, value noise
  B << p.sigma_n(), -p.sigma_v(), a * p.sigma_n(), 0.0;
  const Eigen::Matrix2d D = B * B.transpose();
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  const Eigen::Matrix4d L = kron(I, A) + kron(A, I);
  const Eigen::Vector4d d(D(0, 0), D(1, 0), D(0, 1), D(1, 1));
  const Eigen::Vector4d s = L.fullPivLu().solve(-d);
  Eigen::Matrix2d S;
  S << s(0), s(2), s(1), s(3);
  return S;
}

void check_against_oracle(const ModelParams& p) {
  const auto c = linear::lyapunov_covariance(p);
  const auto S = lyapunov_oracle(p);
  CHECK(c.var_delta == doctest::Approx(S(0, 0)).epsilon(1e-12));
  CHECK(c.var_m == doctest::Approx(S(1, 1)).epsilon(1e-12));
  CHECK(c.cov() == doctest::Approx(S(0, 1)).epsilon(1e-11));
}

}  // namespace

TEST_CASE("covariance matches a generic Lyapunov solve") {
  SUBCASE("linear-regime figure parameters at every gamma") {
    for (double g : {1e-4, 1e-3, 1e-2, 1e-1}) check_against_oracle(ModelParams(0.1, 0.2, g, 0.2, 0.2, 0.1));
  }
  SUBCASE("random stable parameters") {
    for (std::uint64_t i = 0; i < 50; ++i) check_against_oracle(verify::random_stable_params(99, i));
  }
}

TEST_CASE("weak-feedback limits") {
  const ModelParams p(0.3, 0.0, 1.0, 0.7, 0.4, 0.0);
  const auto c = linear::lyapunov_covariance(p);
  CHECK(c.var_delta == doctest::Approx(0.16 / 0.6).epsilon(1e-14));
  CHECK(c.var_m == doctest::Approx(0.49 * 0.16 / (2.0 * 1.0)).epsilon(1e-14));
  const auto q = linear::lyapunov_covariance(ModelParams(0.3, 0.0, 1.0, 0.7, 0.4, 0.3));
  CHECK(q.var_delta == doctest::Approx(0.25 / 0.6).epsilon(1e-14));
}

TEST_CASE("variance is continuous as the feedback gain vanishes") {
  const double base = linear::lyapunov_covariance(ModelParams(0.1, 0.0, 1.0, 0.2, 0.2, 0.1)).var_delta;
  const double tiny = linear::lyapunov_covariance(ModelParams(0.1, 1e-9, 1.0, 0.2, 0.2, 0.1)).var_delta;
  CHECK(tiny == doctest::Approx(base).epsilon(1e-7));
}

TEST_CASE("no stationary law past the Hopf line") {
  try {
    (void)linear::lyapunov_covariance(ModelParams(0.02, 0.05, 5e4, 2e-5, 0.2, 0.1));
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoStationaryDistribution);
  }
}

TEST_CASE("densities are normalised Gaussians") {
  const auto c = linear::lyapunov_covariance(ModelParams(0.1, 0.2, 0.1, 0.2, 0.2, 0.1));
  CHECK(c.det() > 0.0);
  CHECK(std::abs(c.rho) <= 1.0);
  const double sd = std::sqrt(c.var_delta);
  const double mass = numerics::integrate([&](double x) { return linear::marginal_delta_density(c, x); }, -20 * sd,
                                          20 * sd, 1e-12);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  // Marginalising the joint density over m gives the delta marginal.
  const double sm = std::sqrt(c.var_m);
  for (double x : {-1.0, 0.0, 0.3}) {
    const double m = numerics::integrate([&](double y) { return linear::joint_density(c, x, y); }, -20 * sm, 20 * sm,
                                         1e-12);
    CHECK(m == doctest::Approx(linear::marginal_delta_density(c, x)).epsilon(1e-9));
  }
  CHECK(linear::log_marginal_delta_density(c, 0.4) ==
        doctest::Approx(std::log(linear::marginal_delta_density(c, 0.4))).epsilon(1e-13));
}

TEST_CASE("stationary Fokker-Planck residuals vanish") {
  SUBCASE("random stable draws") { CHECK(verify::max_fpe_residual(100, 5) < 1e-10); }
  SUBCASE("no feedback") {
    const ModelParams p(0.3, 0.0, 1.0, 0.7, 0.4, 0.2);
    CHECK(linear::fpe_residuals(p, linear::lyapunov_covariance(p)).max_abs() < 1e-14);
  }
  SUBCASE("a one percent variance error shows up in the constant term") {
    const ModelParams p(0.1, 0.2, 0.1, 0.2, 0.2, 0.1);
    auto c = linear::lyapunov_covariance(p);
    c.var_delta *= 1.01;
    const auto r = linear::fpe_residuals(p, c);
    CHECK(std::abs(r.normalized[0]) > 1e-3);
  }
}

TEST_CASE("validity of the linearisation") {
  SUBCASE("small gamma is valid") {
    const ModelParams p(0.1, 0.2, 1e-4, 0.2, 0.2, 0.1);
    const auto v = linear::linear_validity(p, linear::lyapunov_covariance(p));
    CHECK(v.valid);
    CHECK(v.gamma_sigma_m < 1e-4);
  }
  SUBCASE("gamma zero") {
    const ModelParams p(0.1, 0.2, 0.0, 0.2, 0.2, 0.1);
    const auto v = linear::linear_validity(p, linear::lyapunov_covariance(p));
    CHECK(v.gamma_sigma_m == 0.0);
    CHECK(v.valid);
  }
  SUBCASE("saturation gain near one with a fast trend") {
    const ModelParams p(0.1, 0.999, 1.0, 50.0, 0.2, 0.1);
    const auto v = linear::linear_validity(p, linear::lyapunov_covariance(p));
    CHECK_FALSE(v.valid);
    CHECK(v.large_alpha_form > 1.0);
  }
}
