#include "core/observation.hpp"

#include <cmath>
#include <random>
#include <string>

#include "core/error.hpp"

namespace splinelab {

DesignDistribution::DesignDistribution(std::vector<double> edges,
                                       std::vector<double> masses)
    : edges_(std::move(edges)), masses_(std::move(masses)) {
  cdf_.assign(edges_.size(), 0.0);
  for (std::size_t k = 0; k < masses_.size(); ++k) cdf_[k + 1] = cdf_[k] + masses_[k];
  cdf_.back() = 1.0;
}

DesignDistribution DesignDistribution::uniform() { return {{0.0, 1.0}, {1.0}}; }

DesignDistribution DesignDistribution::piecewise(std::vector<double> edges,
                                                 std::vector<double> weights) {
  if (edges.size() < 2 || weights.size() + 1 != edges.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "piecewise density needs k+1 edges for k weights");
  }
  if (edges.front() != 0.0 || edges.back() != 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "density edges must start at 0 and end at 1");
  }
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    if (!(edges[k + 1] > edges[k])) {
      throw Error(ErrorCode::kInvalidArgument, "density edges must be strictly increasing");
    }
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "density weights must be finite and strictly positive");
    }
    total += w;
  }
  for (double& w : weights) w /= total;
  return {std::move(edges), std::move(weights)};
}

double DesignDistribution::density(double t) const {
  check_point(t, "t");
  auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
  std::size_t k = it == edges_.begin() ? 0 : static_cast<std::size_t>(it - edges_.begin()) - 1;
  k = std::min(k, masses_.size() - 1);
  return masses_[k] / (edges_[k + 1] - edges_[k]);
}

double DesignDistribution::inverse_cdf(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t k = it == cdf_.begin() ? 0 : static_cast<std::size_t>(it - cdf_.begin()) - 1;
  k = std::min(k, masses_.size() - 1);
  const double frac = (u - cdf_[k]) / masses_[k];
  const double t = edges_[k] + frac * (edges_[k + 1] - edges_[k]);
  return std::clamp(t, edges_[k], edges_[k + 1]);
}

FunctionalSpec FunctionalSpec::point_eval(double t) {
  check_point(t, "functional point");
  FunctionalSpec f;
  f.kind = Kind::kPointEval;
  f.point = t;
  return f;
}

FunctionalSpec FunctionalSpec::inner(SpanElement xi) {
  FunctionalSpec f;
  f.kind = Kind::kInner;
  f.xi = std::move(xi);
  return f;
}

SpanElement FunctionalSpec::representer(const KernelSpace& space) const {
  if (kind == Kind::kPointEval) return splinelab::representer(space, point);
  validate(space, xi);
  return xi;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t child_seed(std::uint64_t base, std::uint64_t n,
                         std::uint64_t replicate) noexcept {
  return mix64(mix64(mix64(base) ^ n) ^ replicate);
}

namespace {

std::vector<double> draw_design(const DesignDistribution& dist, std::size_t n,
                                std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> t(n);
  for (double& v : t) v = dist.is_uniform() ? unif(gen) : dist.inverse_cdf(unif(gen));
  return t;
}

}  // namespace

std::vector<double> sample_design(const DesignDistribution& dist, std::size_t n,
                                  std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  std::mt19937_64 gen(seed);
  return draw_design(dist, n, gen);
}

Dataset sample_dataset(const KernelSpace& space, const SpanElement& truth,
                       const DesignDistribution& dist, const NoiseModel& noise,
                       std::size_t n, std::uint64_t seed) {
  validate(space, truth);
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "noise sigma must be finite and >= 0");
  }
  std::mt19937_64 gen(seed);
  Dataset ds;
  ds.design = draw_design(dist, n, gen);
  ds.responses.resize(n);
  ds.sigma = noise.sigma;
  ds.seed = seed;
  ds.truth = truth;

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double half_width = std::sqrt(3.0);
  std::uniform_real_distribution<double> unif(-half_width, half_width);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = noise.kind == NoiseKind::kGaussian ? gauss(gen) : unif(gen);
    ds.responses[i] = evaluate(space, truth, ds.design[i]) + noise.sigma * z;
  }
  return ds;
}

double functional_apply(const KernelSpace& space, const FunctionalSpec& f,
                        const SpanElement& a) {
  if (f.kind == FunctionalSpec::Kind::kPointEval) return evaluate(space, a, f.point);
  return span_inner(space, a, f.xi);
}

namespace {

std::vector<double> knot_breaks(std::initializer_list<const SpanElement*> elems) {
  std::vector<double> b;
  for (const SpanElement* e : elems) {
    for (const Knot& k : e->knots) b.push_back(k.s);
  }
  return b;
}

}  // namespace

double f_infinity(const KernelSpace& space, const SpanElement& truth,
                  const SpanElement& mu, const DesignDistribution& dist, double sigma,
                  int quad) {
  validate(space, truth);
  validate(space, mu);
  const auto breaks = knot_breaks({&truth, &mu});
  const double sq = integrate_design(dist, breaks, quad, [&](double t) {
    const double r = evaluate(space, mu, t) - evaluate(space, truth, t);
    return r * r;
  });
  return sq + sigma * sigma;
}

double gateaux_first(const KernelSpace& space, const SpanElement& truth,
                     const SpanElement& mu, const SpanElement& nu,
                     const DesignDistribution& dist, int quad) {
  validate(space, truth);
  validate(space, mu);
  validate(space, nu);
  const auto breaks = knot_breaks({&truth, &mu, &nu});
  return 2.0 * integrate_design(dist, breaks, quad, [&](double t) {
           return (evaluate(space, mu, t) - evaluate(space, truth, t)) *
                  evaluate(space, nu, t);
         });
}

double gateaux_second(const KernelSpace& space, const SpanElement& nu,
                      const DesignDistribution& dist, int quad) {
  validate(space, nu);
  const auto breaks = knot_breaks({&nu});
  return 2.0 * integrate_design(dist, breaks, quad, [&](double t) {
           const double v = evaluate(space, nu, t);
           return v * v;
         });
}

}  // namespace splinelab
