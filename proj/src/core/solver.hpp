#pragma once

// Minimizer of f_n(mu) = (1/n) sum (y_i - mu(t_i))^2 + lambda |chi1 mu|^2
// over H0 + span{chi1 eta_{t_i}}.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core/observation.hpp"
#include "core/rkhs.hpp"

namespace splinelab {

struct LambdaSchedule {
  double p = 0.25;
  double scale = 1.0;

  // scale * n^-p
  double at(std::size_t n) const;
  void validate() const;
};

inline constexpr double kDuplicateKnotTolerance = 1e-12;
inline constexpr double kConditionWarning = 1e12;

struct SystemMatrices {
  Eigen::MatrixXd sigma;  // K1 gram at the knots
  Eigen::MatrixXd basis;  // T_ij = zeta_j(t_i)
};

SystemMatrices assemble(const KernelSpace& space, std::span<const double> design);
SystemMatrices assemble(const KernelSpace& space, const Dataset& data, double lambda);

struct FitDiagnostics {
  double residual = 0.0;            // relative residual of the solve
  double condition_estimate = 0.0;  // of the factored system
  bool interpolating = false;       // lambda == 0
  bool ill_conditioned = false;     // condition_estimate > kConditionWarning
};

class SplineFit {
 public:
  SplineFit(KernelSpace space, std::vector<double> knots, Eigen::VectorXd c,
            Eigen::VectorXd d, double lambda, FitDiagnostics diagnostics);

  const KernelSpace& space() const noexcept { return space_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  const Eigen::VectorXd& c() const noexcept { return c_; }
  const Eigen::VectorXd& d() const noexcept { return d_; }
  double lambda() const noexcept { return lambda_; }
  const FitDiagnostics& diagnostics() const noexcept { return diagnostics_; }

  SpanElement as_element() const;
  // (d, c) stacked.
  Eigen::VectorXd coefficients() const;

 private:
  KernelSpace space_;
  std::vector<double> knots_;
  Eigen::VectorXd c_;
  Eigen::VectorXd d_;
  double lambda_;
  FitDiagnostics diagnostics_;
};

// Validates lambda, knot spacing and count; returns n.
std::size_t check_fit_inputs(const KernelSpace& space, std::span<const double> design,
                             double lambda);

// Solves (Sigma + n lambda I) c + T d = y, T^T c = 0.
SplineFit fit(const KernelSpace& space, const Dataset& data, double lambda);
SplineFit fit(const KernelSpace& space, std::span<const double> design,
              std::span<const double> responses, double lambda);

// Minimizes the (m+n)-dimensional quadratic form in (d, c) directly from its
// first-order conditions, in extended precision. Requires lambda > 0: at
// lambda = 0 the unconstrained form has a flat direction.
SplineFit fit_bruteforce(const KernelSpace& space, const Dataset& data, double lambda);

double evaluate(const SplineFit& fitted, double t);

double empirical_risk(const KernelSpace& space, const SpanElement& mu,
                      const Dataset& data, double lambda);
double empirical_risk(const SplineFit& fitted, const Dataset& data, double lambda);

Norms fit_norms(const SplineFit& fitted);

}  // namespace splinelab
