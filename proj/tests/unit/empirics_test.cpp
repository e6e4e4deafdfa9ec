#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "chiarella/empirics.hpp"
#include "chiarella/error.hpp"
#include "chiarella/histogram.hpp"
#include "chiarella/numerics.hpp"
#include "doctest.h"

using namespace chiarella;

namespace {

std::vector<double> normal_draws(std::size_t n, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mean, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Standard normal as an AnalyticDensity: OU mispricing with variance one.
AnalyticDensity unit_normal() { return AnalyticDensity::mispricing(ModelParams(0.5, 0.0, 0.0, 1.0, 0.8, 0.6), Regime::Linear); }

}  // namespace

TEST_CASE("histogram construction") {
  SUBCASE("constant samples fill one bin") {
    const std::vector<double> v(500, 3.25);
    const auto h = build_histogram(v, 50);
    CHECK(std::count_if(h.counts().begin(), h.counts().end(), [](auto c) { return c > 0; }) == 1);
    CHECK(h.total() == 500);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_histogram(std::vector<double>{}, 50), Error);
    CHECK_THROWS_AS(build_histogram(std::vector<double>{1.0, 2.0}, 5), Error);
  }
  SUBCASE("out-of-range samples are tallied separately") {
    const std::vector<double> v{-2.0, 0.5, 1.0, 3.0};
    const auto h = build_histogram(v, 10, 0.0, 1.0);
    CHECK(h.total() == 1);
    CHECK(h.outside() == 3);
  }
  SUBCASE("Gaussian draws pass a chi-squared test") {
    const auto v = normal_draws(1'000'000, 5);
    const auto h = build_histogram(v, 60, -4.0, 4.0);
    boost::math::normal_distribution<double> n01;
    double chi2 = 0.0;
    int dof = 0;
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < h.n_bins(); ++i) {
      const double lo = h.edges()[i], hi = h.edges()[i + 1];
      const double expected = n * (cdf(n01, hi) - cdf(n01, lo));
      if (expected < 5.0) continue;
      chi2 += std::pow(static_cast<double>(h.counts()[i]) - expected, 2) / expected;
      ++dof;
    }
    boost::math::chi_squared_distribution<double> chi(dof - 1);
    CHECK(chi2 < quantile(chi, 0.999));
  }
}

TEST_CASE("kernel smoothing") {
  const auto h = build_histogram(normal_draws(200'000, 1), 200, -6.0, 6.0);
  SUBCASE("normalised") {
    const auto d = smooth(h);
    CHECK(numerics::trapezoid(d.grid, d.values) == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("symmetric counts give a symmetric density") {
    Histogram1D s(-1.0, 1.0, 20);
    for (int i = 0; i < 2000; ++i) {
      const double x = -0.95 + 0.1 * (i % 10);
      s.add(x);
      s.add(-x);
    }
    const auto d = smooth(s);
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      CHECK(d.values[i] == doctest::Approx(d.values[d.values.size() - 1 - i]).epsilon(1e-12));
    }
  }
  SUBCASE("bandwidth shrinks as the fifth root of the effective size") {
    CHECK(silverman_bandwidth(h, 1e4) / silverman_bandwidth(h, 32e4) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(smooth(h, 1e3).bandwidth > smooth(h, 1e5).bandwidth);
  }
  SUBCASE("needs enough samples") {
    Histogram1D small(-1.0, 1.0, 20);
    for (int i = 0; i < 999; ++i) small.add(0.0);
    CHECK_THROWS_AS(smooth(small), Error);
  }
}

TEST_CASE("mode counting") {
  auto density_of = [](auto f) {
    EmpiricalDensity d;
    for (int i = 0; i <= 1000; ++i) {
      d.grid.push_back(-10.0 + 0.02 * i);
      d.values.push_back(f(d.grid.back()));
    }
    return d;
  };
  auto g = [](double x, double m) { return std::exp(-0.5 * (x - m) * (x - m)) / std::sqrt(2 * M_PI); };
  SUBCASE("one Gaussian") {
    const auto v = count_modes(density_of([&](double x) { return g(x, 0.0); }));
    CHECK(v.modality == Modality::Unimodal);
    REQUIRE(v.modes.size() == 1);
    CHECK(v.modes[0] == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("well-separated mixture") {
    const auto v = count_modes(density_of([&](double x) { return 0.5 * g(x, -5.0) + 0.5 * g(x, 5.0); }));
    CHECK(v.modality == Modality::Bimodal);
    REQUIRE(v.modes.size() == 2);
    CHECK(v.modes[0] == doctest::Approx(-5.0).epsilon(0.01));
    CHECK(v.modes[1] == doctest::Approx(5.0).epsilon(0.01));
  }
  SUBCASE("three peaks") {
    const auto v = count_modes(density_of([&](double x) { return g(x, -5.0) + g(x, 0.0) + g(x, 5.0); }));
    CHECK(v.modality == Modality::Multimodal);
    CHECK(v.modes.size() == 3);
  }
  SUBCASE("ripples below the prominence floor are ignored") {
    const auto v = count_modes(density_of([&](double x) { return g(x, 0.0) * (1.0 + 0.005 * std::sin(20.0 * x)); }));
    CHECK(v.modes.size() == 1);
  }
  SUBCASE("a flat top counts once") {
    const auto v = count_modes(density_of([](double x) { return std::abs(x) < 3.0 ? 1.0 : 0.0; }));
    CHECK(v.modes.size() == 1);
  }
}

TEST_CASE("density distances") {
  const auto f = unit_normal();
  SUBCASE("identical densities") {
    EmpiricalDensity d;
    for (int i = 0; i <= 2000; ++i) {
      d.grid.push_back(-10.0 + 0.01 * i);
      d.values.push_back(f.pdf(d.grid.back()));
    }
    CHECK(l1_distance(d, f) < 1e-6);
    CHECK(ks_distance(d, f) < 1e-5);
    CHECK(l1_distance(d, d) == 0.0);
  }
  SUBCASE("disjoint supports") {
    EmpiricalDensity d;
    for (int i = 0; i <= 1000; ++i) {
      d.grid.push_back(100.0 + 0.01 * i);
      d.values.push_back(0.1);
    }
    CHECK(l1_distance(d, f) == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("sampled Gaussian against its law") {
    const auto h = build_histogram(normal_draws(1'000'000, 9), 400, -6.0, 6.0);
    CHECK(l1_distance(smooth(h), f) < 0.01);
  }
  SUBCASE("different grids are rejected") {
    EmpiricalDensity a{{0.0, 1.0}, {1.0, 1.0}, 0.0}, b{{0.0, 2.0}, {0.5, 0.5}, 0.0};
    CHECK_THROWS_AS(l1_distance(a, b), Error);
  }
}

TEST_CASE("moments with correlated samples") {
  SUBCASE("effective sample size") {
    const double r = std::exp(-0.5);
    CHECK(effective_sample_size(1000, 1.0, 0.5) == doctest::Approx(1000.0 * (1 - r) / (1 + r)));
    CHECK(effective_sample_size(1000, 1e6, 0.5) == doctest::Approx(1000.0));
  }
  RawMoments small, big;
  for (double x : normal_draws(10'000, 3, 1.0, 2.0)) small.add(x);
  for (double x : normal_draws(20'000, 4, 1.0, 2.0)) big.add(x);
  const auto a = moments_with_errors(small, 1e6, 1.0);
  const auto b = moments_with_errors(big, 1e6, 1.0);
  SUBCASE("independent Gaussian draws") {
    CHECK(std::abs(a.mean - 1.0) < 3 * a.se_mean);
    CHECK(std::abs(a.var - 4.0) < 3 * a.se_var);
    CHECK(std::abs(a.skew) < 3 * a.se_skew);
    CHECK(std::abs(a.excess_kurtosis) < 3 * a.se_kurtosis);
  }
  SUBCASE("doubling the samples shrinks the errors by root two") {
    CHECK(a.se_mean / b.se_mean == doctest::Approx(std::sqrt(2.0)).epsilon(0.03));
    CHECK(a.se_var / b.se_var == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
  }
  SUBCASE("mirrored pairs halve the effective size") {
    const auto c = moments_with_errors(small, 1e6, 1.0, true);
    CHECK(c.n_eff_mean == doctest::Approx(a.n_eff_mean / 2));
  }
  SUBCASE("too few samples") {
    RawMoments tiny;
    tiny.add(1.0);
    CHECK_THROWS_AS(moments_with_errors(tiny, 1.0, 1.0), Error);
  }
}

TEST_CASE("default decorrelation rates") {
  const ModelParams p(0.2, 0.05, 5e4, 2e-5, 0.2, 0.1);
  CHECK(default_decorrelation_rate(p, Variable::Delta, Regime::SlowTrend) == 0.2);
  CHECK(default_decorrelation_rate(p, Variable::Delta, Regime::Linear) == 2e-5);
  CHECK(default_decorrelation_rate(p, Variable::Trend, Regime::Linear) == 2e-5);
}
