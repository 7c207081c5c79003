#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <random>

#include "core/error.hpp"
#include "core/observation.hpp"
#include "core/quadrature.hpp"
#include "test_util.hpp"

using namespace splinelab;
using doctest::Approx;

TEST_CASE("design sampling is seeded") {
  const auto u = DesignDistribution::uniform();
  CHECK(sample_design(u, 5, 42) == sample_design(u, 5, 42));
  CHECK(sample_design(u, 5, 42) != sample_design(u, 5, 43));
  const auto big = sample_design(u, 100000, 1);
  const double mean = std::accumulate(big.begin(), big.end(), 0.0) / big.size();
  CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("piecewise design respects its bins") {
  // Strictly positive density is required, so the upper bin carries a
  // negligible 1e-12 share instead of zero.
  const auto left = DesignDistribution::piecewise({0.0, 0.25, 0.5, 1.0}, {1.0, 3.0, 1e-12});
  for (double t : sample_design(left, 100, 9)) CHECK(t <= 0.5);
  CHECK_THROWS_AS(DesignDistribution::piecewise({0.0, 0.5, 1.0}, {1.0, 0.0}), Error);
  CHECK_THROWS_AS(DesignDistribution::piecewise({0.0, 0.6, 0.5, 1.0}, {1, 1, 1}), Error);
  CHECK_THROWS_AS(DesignDistribution::piecewise({0.1, 1.0}, {1}), Error);

  const auto d = DesignDistribution::piecewise({0.0, 0.2, 1.0}, {3.0, 1.0});
  CHECK(d.density(0.1) == Approx(0.75 / 0.2));
  CHECK(d.density(0.6) == Approx(0.25 / 0.8));
  const auto draws = sample_design(d, 200000, 5);
  const double below = std::count_if(draws.begin(), draws.end(), [](double t) { return t < 0.2; });
  CHECK(below / draws.size() == Approx(0.75).epsilon(0.01));
}

TEST_CASE("datasets") {
  const KernelSpace space(2);
  const SpanElement truth = add(representer(space, 0.35), scaled(representer(space, 0.8), 0.5));
  const auto u = DesignDistribution::uniform();

  const Dataset clean = sample_dataset(space, truth, u, {NoiseKind::kGaussian, 0.0}, 50, 3);
  REQUIRE(clean.size() == 50);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    CHECK(clean.responses[i] == evaluate(space, truth, clean.design[i]));
  }

  for (auto kind : {NoiseKind::kGaussian, NoiseKind::kUniform}) {
    const Dataset noisy =
        sample_dataset(space, SpanElement::zero(space), u, {kind, 1.0}, 10000, 4);
    double mean = 0.0, var = 0.0;
    for (double y : noisy.responses) mean += y;
    mean /= noisy.size();
    for (double y : noisy.responses) var += (y - mean) * (y - mean);
    var /= noisy.size() - 1;
    CHECK(var == Approx(1.0).epsilon(0.05));
  }

  const Dataset a = sample_dataset(space, truth, u, {NoiseKind::kGaussian, 0.5}, 100, 77);
  const Dataset b = sample_dataset(space, truth, u, {NoiseKind::kGaussian, 0.5}, 100, 77);
  CHECK(a.design == b.design);
  CHECK(a.responses == b.responses);
  // Same seed, same design regardless of noise level.
  const Dataset c = sample_dataset(space, truth, u, {NoiseKind::kGaussian, 0.0}, 100, 77);
  CHECK(a.design == c.design);

  CHECK_THROWS_AS(sample_dataset(space, truth, u, {NoiseKind::kGaussian, -1.0}, 10, 1), Error);
}

TEST_CASE("child seeds") {
  CHECK(child_seed(1, 50, 0) == child_seed(1, 50, 0));
  CHECK(child_seed(1, 50, 0) != child_seed(1, 50, 1));
  CHECK(child_seed(1, 50, 0) != child_seed(1, 100, 0));
  CHECK(child_seed(1, 50, 0) != child_seed(2, 50, 0));
  CHECK(child_seed(7, 3, 9) == mix64(mix64(mix64(7) ^ 3) ^ 9));
}

TEST_CASE("functionals") {
  const KernelSpace space(2);
  CHECK(functional_apply(space, FunctionalSpec::point_eval(0.5), SpanElement::basis(space, 0)) ==
        1.0);
  std::mt19937_64 gen(5);
  const auto a = testutil::random_element(space, gen, 3);
  const double sq = span_norms(space, a).full;
  CHECK(functional_apply(space, FunctionalSpec::inner(a), a) == Approx(sq * sq));
  CHECK(functional_apply(space, FunctionalSpec::point_eval(0.6), representer(space, 0.25)) ==
        Approx(kernel(space, 0.25, 0.6)).epsilon(1e-14));
  // The representer of point evaluation reproduces it.
  const auto f = FunctionalSpec::point_eval(0.3);
  CHECK(span_inner(space, f.representer(space), a) == Approx(functional_apply(space, f, a)));
}

TEST_CASE("population objective") {
  const KernelSpace space(2);
  const auto u = DesignDistribution::uniform();
  std::mt19937_64 gen(21);
  const auto truth = testutil::random_element(space, gen, 2);
  CHECK(f_infinity(space, truth, truth, u, 0.7) == Approx(0.49).epsilon(1e-14));
  CHECK(f_infinity(space, SpanElement::zero(space), SpanElement::basis(space, 0), u, 0.0) ==
        Approx(1.0).epsilon(1e-12));

  // Monte Carlo oracle with 1e6 draws of (t, y).
  for (const auto& dist : {u, DesignDistribution::piecewise({0.0, 0.3, 1.0}, {2.0, 1.0})}) {
    const auto mu = testutil::random_element(space, gen, 3);
    const double sigma = 0.4;
    const double exact = f_infinity(space, truth, mu, dist, sigma);
    const Dataset ds = sample_dataset(space, truth, dist, {NoiseKind::kGaussian, sigma},
                                      1000000, 99);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const double r = ds.responses[i] - evaluate(space, mu, ds.design[i]);
      const double v = r * r;
      const double delta = v - mean;
      mean += delta / (i + 1);
      m2 += delta * (v - mean);
    }
    const double se = std::sqrt(m2 / (ds.size() - 1) / ds.size());
    CAPTURE(exact);
    CAPTURE(mean);
    CHECK(std::abs(mean - exact) < 3.0 * se);
  }
}

TEST_CASE("Gateaux derivatives") {
  std::mt19937_64 gen(8);
  for (int m = 1; m <= 3; ++m) {
    const KernelSpace space(m);
    const auto dist = DesignDistribution::piecewise({0.0, 0.5, 1.0}, {1.0, 2.0});
    const auto truth = testutil::random_element(space, gen, 2);
    for (int rep = 0; rep < 20; ++rep) {
      const auto nu = testutil::random_element(space, gen, 2);
      CHECK(std::abs(gateaux_first(space, truth, truth, nu, dist)) < 1e-10);
    }
    const auto mu = testutil::random_element(space, gen, 3);
    const auto nu = testutil::random_element(space, gen, 2);
    const double r = 1e-5;
    const double fd = (f_infinity(space, truth, add(mu, scaled(nu, r)), dist, 0.0) -
                       f_infinity(space, truth, add(mu, scaled(nu, -r)), dist, 0.0)) /
                      (2 * r);
    CHECK(std::abs(gateaux_first(space, truth, mu, nu, dist) - fd) < 1e-6);
    const double fd2 = (f_infinity(space, truth, add(mu, scaled(nu, 1e-3)), dist, 0.0) -
                        2 * f_infinity(space, truth, mu, dist, 0.0) +
                        f_infinity(space, truth, add(mu, scaled(nu, -1e-3)), dist, 0.0)) /
                       1e-6;
    CHECK(gateaux_second(space, nu, dist) == Approx(fd2).epsilon(1e-4));
    CHECK(gateaux_second(space, nu, dist) > 0.0);
    CHECK(f_infinity(space, truth, mu, dist, 0.3) > f_infinity(space, truth, truth, dist, 0.3));
  }
}

TEST_CASE("Gauss-Legendre rule") {
  for (int nodes : {2, 3, 10, 201, 400}) {
    const GaussLegendre rule(nodes);
    CHECK(rule.size() == nodes);
    const int exact_degree = std::min(2 * nodes - 1, 30);
    for (int k = 0; k <= exact_degree; ++k) {
      const double v = rule.integrate([k](double x) { return std::pow(x, k); }, 0.2, 0.9);
      const double expect = (std::pow(0.9, k + 1) - std::pow(0.2, k + 1)) / (k + 1);
      CAPTURE(nodes);
      CAPTURE(k);
      CHECK(v == Approx(expect).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(GaussLegendre(1), Error);
}
