#pragma once

// Coefficient-space views of the empirical operator
//   U_n mu = (1/n) sum_i eta_{t_i} mu(t_i)
// and of G_{n,lambda} = U_n + lambda chi1, in the basis
//   (zeta_0, ..., zeta_{m-1}, chi1 eta_{t_1}, ..., chi1 eta_{t_n}).

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core/observation.hpp"
#include "core/rkhs.hpp"
#include "core/solver.hpp"

namespace splinelab {

struct OperatorMatrices {
  Eigen::MatrixXd u;       // (m+n) x (m+n)
  Eigen::MatrixXd g;       // u + lambda diag(0_m, I_n)
  Eigen::MatrixXd metric;  // basis Gram matrix diag(I_m, Sigma)
  Eigen::MatrixXd sigma;   // K1 gram at the knots
  Eigen::MatrixXd basis;   // T
  double lambda = 0.0;
};

OperatorMatrices build_operators(const KernelSpace& space, std::span<const double> design,
                                 double lambda);
OperatorMatrices build_operators(const KernelSpace& space, const Dataset& data,
                                 double lambda);

inline constexpr double kDefaultRelativeCutoff = 1e-12;

struct InvBetaSum {
  double value = 0.0;
  double cutoff = 0.0;
  std::size_t discarded = 0;
};

struct SpectralReport {
  std::vector<double> betas;  // descending
  double op_norm = 0.0;       // |G^-1 U| in the metric; NaN when not computed
  InvBetaSum inv_beta;
  std::size_t rank = 0;       // betas above the cutoff
};

// Eigenvalues of U_n on span{eta_i}: the spectrum of K/n with K the full
// kernel Gram matrix at the design points, in descending order.
std::vector<double> un_spectrum(const KernelSpace& space, std::span<const double> design);

// Sum of 1/beta over betas strictly above `cutoff`.
InvBetaSum inv_beta_sum(std::span<const double> betas, double cutoff);

// Operator norm of A = G^-1 U_n measured in the metric M = diag(I, Sigma),
// i.e. sqrt of the top eigenvalue of the pencil (A^T M A, M).
double g_inverse_un_norm(const KernelSpace& space, std::span<const double> design,
                         double lambda);
double g_inverse_un_norm(const OperatorMatrices& ops);

// Full report; the cutoff is relative_cutoff * max(beta).
SpectralReport spectral_report(const KernelSpace& space, std::span<const double> design,
                               double lambda,
                               double relative_cutoff = kDefaultRelativeCutoff);

// max_j |chi1 psi_j - P chi1 psi_j| over unit eigenfunctions psi_j of U_n,
// with P the orthogonal projection onto span{eta_i}. Zero would mean chi1
// maps the range of U_n into itself.
double range_leakage(const KernelSpace& space, std::span<const double> design);

struct RateReport {
  double bias_term = 0.0;   // |(G^-1 U mu_true - P mu_true, xi)|
  double proj_term = 0.0;   // |(mu_true - P mu_true, xi)|
  double noise_term = 0.0;  // (sigma/n) |((G^-1 eta_i, xi))_i|
  double q_estimate = 0.0;  // filled by studies; NaN for a single instance
};

// (P mu_true, xi) for P the orthogonal projection onto span{eta_i}.
double projected_pairing(const KernelSpace& space, std::span<const double> design,
                         const SpanElement& truth, const SpanElement& xi);

RateReport rate_terms(const KernelSpace& space, const Dataset& data,
                      const SpanElement& truth, const SpanElement& xi, double lambda,
                      double sigma);
// Same, with (P mu_true, xi) precomputed by projected_pairing. When fitted is
// non-null it receives the fit to data.responses from the same factorization.
RateReport rate_terms(const KernelSpace& space, const Dataset& data,
                      const SpanElement& truth, const SpanElement& xi, double lambda,
                      double sigma, double projected,
                      std::optional<SplineFit>* fitted = nullptr);

}  // namespace splinelab
