#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "core/error.hpp"
#include "core/solver.hpp"
#include "test_util.hpp"

using namespace splinelab;
using doctest::Approx;

namespace {

Dataset make_dataset(std::vector<double> t, std::vector<double> y) {
  Dataset ds;
  ds.design = std::move(t);
  ds.responses = std::move(y);
  return ds;
}

Dataset random_dataset(std::mt19937_64& gen, const KernelSpace& space, std::size_t n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto truth = testutil::random_element(space, gen, 3);
  Dataset ds = make_dataset(testutil::random_design(gen, n, 1e-3), {});
  for (double t : ds.design) ds.responses.push_back(evaluate(space, truth, t) + 0.3 * gauss(gen));
  ds.truth = truth;
  return ds;
}

double rel_vec_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace

TEST_CASE("assemble") {
  const auto sys = assemble(KernelSpace(1), std::vector<double>{0.3, 0.7});
  CHECK(sys.sigma(0, 0) == Approx(0.3));
  CHECK(sys.sigma(0, 1) == Approx(0.3));
  CHECK(sys.sigma(1, 0) == Approx(0.3));
  CHECK(sys.sigma(1, 1) == Approx(0.7));
  CHECK(sys.basis(0, 0) == 1.0);
  CHECK(sys.basis(1, 0) == 1.0);

  try {
    fit(KernelSpace(2), make_dataset({0.5}, {1.0}), 0.1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooFewPoints);
  }

  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 10; ++rep) {
    const auto s = assemble(KernelSpace(1 + rep % 3), testutil::random_design(gen, 15)).sigma;
    CHECK((s - s.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("input checks") {
  const KernelSpace space(2);
  auto code_of = [&](const Dataset& ds, double lambda) {
    try {
      fit(space, ds, lambda);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  CHECK(code_of(make_dataset({0.1, 0.4, 0.4 + 1e-13}, {1, 2, 3}), 0.1) ==
        ErrorCode::kDuplicateKnots);
  CHECK(code_of(make_dataset({0.1, 1.2}, {1, 2}), 0.1) == ErrorCode::kOutOfDomain);
  CHECK(code_of(make_dataset({0.1, 0.2}, {1, 2}), -1.0) == ErrorCode::kInvalidArgument);
  CHECK(code_of(make_dataset({0.1, 0.2}, {1}), 0.1) == ErrorCode::kInvalidArgument);
  // Near-duplicates above the tolerance are accepted.
  CHECK_NOTHROW(fit(space, make_dataset({0.1, 0.4, 0.4 + 1e-9}, {1, 2, 3}), 0.1));
}

TEST_CASE("zero and affine data") {
  const KernelSpace space(2);
  const auto zero = fit(space, make_dataset({0.1, 0.5, 0.9}, {0, 0, 0}), 0.3);
  CHECK(zero.c().norm() == 0.0);
  CHECK(zero.d().norm() == 0.0);
  for (double t : {0.0, 0.3, 1.0}) CHECK(evaluate(zero, t) == 0.0);
  const Norms zn = fit_norms(zero);
  CHECK(zn.full == 0.0);

  std::mt19937_64 gen(4);
  const auto t = testutil::random_design(gen, 20);
  for (double lambda : {1e-8, 1e-3, 1.0, 1e3}) {
    std::vector<double> y;
    for (double x : t) y.push_back(1.5 - 2.0 * x);
    const auto f = fit(space, make_dataset(t, y), lambda);
    CAPTURE(lambda);
    CHECK(f.d()[0] == Approx(1.5).epsilon(1e-8));
    CHECK(f.d()[1] == Approx(-2.0).epsilon(1e-8));
    CHECK(f.c().lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(evaluate(f, 0.42) == Approx(1.5 - 0.84).epsilon(1e-8));
  }

  const SplineFit line(space, {}, Eigen::VectorXd(0), Eigen::Vector2d(3.0, 4.0), 0.1, {});
  const Norms ln = fit_norms(line);
  CHECK(ln.h0 == Approx(5.0));
  CHECK(ln.h1 == 0.0);
  CHECK(evaluate(line, 0.5) == Approx(5.0));
}

TEST_CASE("brute-force oracle agreement") {
  std::mt19937_64 gen(12);
  const KernelSpace space(2);
  const Dataset ds = random_dataset(gen, space, 12);
  const auto a = fit(space, ds, 0.05);
  const auto b = fit_bruteforce(space, ds, 0.05);
  CHECK(rel_vec_err(a.coefficients(), b.coefficients()) < 1e-8);
  // Each solution is no worse than the other under the shared objective.
  CHECK(empirical_risk(b, ds, 0.05) <= empirical_risk(a, ds, 0.05) + 1e-12);
  CHECK(empirical_risk(a, ds, 0.05) <= empirical_risk(b, ds, 0.05) + 1e-12);

  const auto z = fit_bruteforce(space, make_dataset({0.2, 0.6, 0.7}, {0, 0, 0}), 0.1);
  CHECK(z.coefficients().norm() == 0.0);
  CHECK_THROWS_AS(fit_bruteforce(space, ds, 0.0), Error);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 60; ++rep) {
    const KernelSpace sp(1 + rep % 3);
    const std::size_t n = 3 + static_cast<std::size_t>(unif(gen) * 47);
    const double lambda = std::pow(10.0, -6.0 + 7.0 * unif(gen));
    const Dataset d = random_dataset(gen, sp, n);
    worst = std::max(worst, rel_vec_err(fit(sp, d, lambda).coefficients(),
                                        fit_bruteforce(sp, d, lambda).coefficients()));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("fit invariants") {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const KernelSpace space(1 + rep % 3);
    const double lambda = std::pow(10.0, -5.0 + rep % 6);
    const Dataset ds = random_dataset(gen, space, 25);
    const auto f = fit(space, ds, lambda);
    const auto sys = assemble(space, ds.design);
    const double n = static_cast<double>(ds.size());
    CAPTURE(rep);

    // T^T c = 0
    CHECK((sys.basis.transpose() * f.c()).norm() <= 1e-8 * f.c().norm() + 1e-14);
    // Normal equations (Sigma + n lambda I) c + T d = y.
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ds.responses.data(), 25);
    const Eigen::VectorXd lhs = sys.sigma * f.c() + n * lambda * f.c() + sys.basis * f.d();
    CHECK((lhs - y).norm() <= 1e-8 * y.norm());
    CHECK(f.diagnostics().residual < 1e-12);

    // Coefficient form of G mu = (1/n) sum y_i eta_i in the basis
    // (zeta, chi1 eta_i): U x + lambda diag(0, I) x = (1/n) [T^T y; y].
    const Eigen::Index m = space.order();
    Eigen::MatrixXd u(m + 25, m + 25);
    u << sys.basis.transpose() * sys.basis, sys.basis.transpose() * sys.sigma, sys.basis,
        sys.sigma;
    u /= n;
    Eigen::VectorXd rhs(m + 25);
    rhs << sys.basis.transpose() * y, y;
    rhs /= n;
    Eigen::VectorXd g_x = u * f.coefficients();
    g_x.tail(25) += lambda * f.c();
    CHECK((g_x - rhs).norm() <= 1e-8 * rhs.norm());

    // Minimality against random probes inside and outside the span.
    const double best = empirical_risk(f, ds, lambda);
    const SpanElement mu = f.as_element();
    for (int k = 0; k < 50; ++k) {
      const double scale = std::pow(10.0, -4.0 + 4.0 * (k % 5) / 4.0);
      const auto dir = k % 2 ? testutil::random_element(space, gen, 3)
                             : [&] {
                                 SpanElement e = SpanElement::zero(space);
                                 for (double& d : e.poly) d = gauss(gen);
                                 for (double t : ds.design) e.knots.push_back({t, gauss(gen)});
                                 return e;
                               }();
      CHECK(best <= empirical_risk(space, add(mu, scaled(dir, scale)), ds, lambda) + 1e-10);
    }
    CHECK(best <= empirical_risk(space, ds.truth, ds, lambda) + 1e-10);
  }
}

TEST_CASE("interpolation limit") {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const KernelSpace space(2);
  std::vector<double> t, y;
  for (int i = 0; i < 10; ++i) {
    t.push_back((i + 0.5) / 10.0);
    y.push_back(gauss(gen));
  }
  const auto ds = make_dataset(t, y);
  const auto tiny = fit(space, ds, 1e-12);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(evaluate(tiny, t[i]) - y[i]) < 1e-6);
  const auto exact = fit(space, ds, 0.0);
  CHECK(exact.diagnostics().interpolating);
  CHECK(empirical_risk(exact, ds, 0.0) < 1e-10);

  // Roughness decreases as lambda grows.
  double previous = fit_norms(exact).h1;
  CHECK(previous > fit_norms(fit(space, ds, 0.1)).h1);
  for (double lambda : {1e-8, 1e-6, 1e-4, 1e-2, 1.0, 100.0}) {
    const double h1 = fit_norms(fit(space, ds, lambda)).h1;
    CHECK(h1 <= previous * (1 + 1e-10));
    previous = h1;
  }
}

TEST_CASE("fit risk beats the truth") {
  const KernelSpace space(2);
  const SpanElement truth = add(representer(space, 0.35), scaled(representer(space, 0.8), 0.5));
  const Dataset ds = sample_dataset(space, truth, DesignDistribution::uniform(),
                                    {NoiseKind::kGaussian, 0.5}, 80, 5);
  for (double lambda : {1e-4, 1e-2, 1.0}) {
    CHECK(empirical_risk(fit(space, ds, lambda), ds, lambda) <=
          empirical_risk(space, truth, ds, lambda));
  }
  CHECK(empirical_risk(space, SpanElement::zero(space),
                       make_dataset({0.1, 0.2}, {0.0, 0.0}), 1.0) == 0.0);
}

TEST_CASE("conditioning diagnostics") {
  const KernelSpace space(3);
  std::vector<double> t, y;
  for (int i = 0; i < 40; ++i) {
    t.push_back(i / 39.0);
    y.push_back(std::sin(6 * t.back()));
  }
  const auto f = fit(space, make_dataset(t, y), 0.0);
  CHECK(f.diagnostics().condition_estimate > 1e12);
  CHECK(f.diagnostics().ill_conditioned);
  CHECK_FALSE(fit(space, make_dataset(t, y), 1.0).diagnostics().ill_conditioned);
}

TEST_CASE("lambda schedule") {
  const LambdaSchedule s{0.25, 2.0};
  CHECK(s.at(16) == Approx(1.0));
  CHECK_NOTHROW(s.validate());
  CHECK_THROWS_AS((LambdaSchedule{0.0, 1.0}.validate()), Error);
  CHECK_THROWS_AS((LambdaSchedule{1.6, 1.0}.validate()), Error);
  CHECK_THROWS_AS((LambdaSchedule{0.5, 0.0}.validate()), Error);
}
