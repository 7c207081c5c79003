#pragma once

// Synthetic data y_i = mu(t_i) + eps_i, point/inner-product functionals and the
// population objective f_inf(mu) = int (mu - mu_true)^2 dphi_T + sigma^2.

#include <cstdint>
#include <span>
#include <vector>

#include "core/rkhs.hpp"

namespace splinelab {

class DesignDistribution {
 public:
  static DesignDistribution uniform();
  // Piecewise-constant density. `edges` must start at 0, end at 1 and be
  // strictly increasing; one strictly positive weight per bin.
  static DesignDistribution piecewise(std::vector<double> edges,
                                      std::vector<double> weights);

  bool is_uniform() const noexcept { return edges_.size() == 2; }
  const std::vector<double>& edges() const noexcept { return edges_; }
  // Normalized bin probabilities.
  const std::vector<double>& masses() const noexcept { return masses_; }

  double density(double t) const;
  double inverse_cdf(double u) const;

 private:
  DesignDistribution(std::vector<double> edges, std::vector<double> masses);

  std::vector<double> edges_;
  std::vector<double> masses_;
  std::vector<double> cdf_;  // cdf_[k] = P(t < edges_[k])
};

enum class NoiseKind { kGaussian, kUniform };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kGaussian;
  double sigma = 0.0;
};

struct Dataset {
  std::vector<double> design;
  std::vector<double> responses;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  SpanElement truth;

  std::size_t size() const noexcept { return design.size(); }
};

struct FunctionalSpec {
  enum class Kind { kPointEval, kInner };
  Kind kind = Kind::kPointEval;
  double point = 0.5;
  SpanElement xi;

  static FunctionalSpec point_eval(double t);
  static FunctionalSpec inner(SpanElement xi);

  // Riesz representer of the functional.
  SpanElement representer(const KernelSpace& space) const;
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;
// Seed of replicate `replicate` at sample size `n`:
//   mix64(mix64(mix64(base) ^ n) ^ replicate).
std::uint64_t child_seed(std::uint64_t base, std::uint64_t n,
                         std::uint64_t replicate) noexcept;

std::vector<double> sample_design(const DesignDistribution& dist, std::size_t n,
                                  std::uint64_t seed);

// Design draws come first from one mt19937_64 stream seeded with `seed`, then
// the n noise draws, so noise is independent of the design.
Dataset sample_dataset(const KernelSpace& space, const SpanElement& truth,
                       const DesignDistribution& dist, const NoiseModel& noise,
                       std::size_t n, std::uint64_t seed);

double functional_apply(const KernelSpace& space, const FunctionalSpec& f,
                        const SpanElement& a);

// Integrates g(t) * density(t) over [0,1], splitting at bin edges and at the
// given breakpoints so each piece is polynomial.
template <class F>
double integrate_design(const DesignDistribution& dist, std::span<const double> breaks,
                        int quad, F&& g);

double f_infinity(const KernelSpace& space, const SpanElement& truth,
                  const SpanElement& mu, const DesignDistribution& dist, double sigma,
                  int quad = 201);
double gateaux_first(const KernelSpace& space, const SpanElement& truth,
                     const SpanElement& mu, const SpanElement& nu,
                     const DesignDistribution& dist, int quad = 201);
// 2 int nu^2 dphi_T; independent of mu.
double gateaux_second(const KernelSpace& space, const SpanElement& nu,
                      const DesignDistribution& dist, int quad = 201);

}  // namespace splinelab

#include "core/observation_inl.hpp"
