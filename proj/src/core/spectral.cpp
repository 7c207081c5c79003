#include "core/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <lapacke.h>

#include "core/bordered.hpp"
#include "core/error.hpp"
#include "core/solver.hpp"

namespace splinelab {

OperatorMatrices build_operators(const KernelSpace& space, std::span<const double> design,
                                 double lambda) {
  const std::size_t n = check_fit_inputs(space, design, lambda);
  const SystemMatrices sys = assemble(space, design);
  const auto ni = static_cast<Eigen::Index>(n);
  const Eigen::Index m = space.order();
  const double inv_n = 1.0 / static_cast<double>(n);

  OperatorMatrices ops;
  ops.sigma = sys.sigma;
  ops.basis = sys.basis;
  ops.lambda = lambda;
  ops.u.resize(m + ni, m + ni);
  ops.u.topLeftCorner(m, m) = inv_n * sys.basis.transpose() * sys.basis;
  ops.u.topRightCorner(m, ni) = inv_n * sys.basis.transpose() * sys.sigma;
  ops.u.bottomLeftCorner(ni, m) = inv_n * sys.basis;
  ops.u.bottomRightCorner(ni, ni) = inv_n * sys.sigma;
  ops.g = ops.u;
  ops.g.bottomRightCorner(ni, ni).diagonal().array() += lambda;
  ops.metric = Eigen::MatrixXd::Zero(m + ni, m + ni);
  ops.metric.topLeftCorner(m, m).setIdentity();
  ops.metric.bottomRightCorner(ni, ni) = sys.sigma;
  return ops;
}

OperatorMatrices build_operators(const KernelSpace& space, const Dataset& data,
                                 double lambda) {
  return build_operators(space, data.design, lambda);
}

std::vector<double> un_spectrum(const KernelSpace& space, std::span<const double> design) {
  const std::size_t n = check_fit_inputs(space, design, 0.0);
  const Eigen::MatrixXd k = gram(space, design, KernelKind::kFull) / static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kInternal, "symmetric eigensolver did not converge");
  }
  std::vector<double> betas(eig.eigenvalues().data(),
                            eig.eigenvalues().data() + eig.eigenvalues().size());
  std::reverse(betas.begin(), betas.end());
  return betas;
}

InvBetaSum inv_beta_sum(std::span<const double> betas, double cutoff) {
  if (!(cutoff > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eigenvalue cutoff must be > 0");
  }
  InvBetaSum out;
  out.cutoff = cutoff;
  for (double b : betas) {
    if (b > cutoff) {
      out.value += 1.0 / b;
    } else {
      ++out.discarded;
    }
  }
  return out;
}

// With M = R^T R and R = diag(I, R_sigma), the whitened operators are
//   U^ = R U R^-1 = (1/n) B B^T,  B = [T^T; R_sigma],
//   G^ = U^ + lambda diag(0, I),
// so |A|_M = |G^-1^ U^|_2 and R never has to be inverted.
double g_inverse_un_norm(const OperatorMatrices& ops) {
  if (!(ops.lambda > 0.0)) {
    throw Error(ErrorCode::kSingularSystem,
                "G is singular on the coefficient space when lambda = 0");
  }
  const Eigen::Index n = ops.sigma.rows();
  const Eigen::Index m = ops.basis.cols();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ops.sigma);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kInternal, "symmetric eigensolver did not converge");
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd b(m + n, n);
  b.topRows(m) = ops.basis.transpose();
  b.bottomRows(n) = root.asDiagonal() * eig.eigenvectors().transpose();

  const Eigen::MatrixXd u_hat = (b * b.transpose()) / static_cast<double>(n);
  Eigen::MatrixXd g_hat = u_hat;
  g_hat.bottomRightCorner(n, n).diagonal().array() += ops.lambda;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(g_hat);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularSystem, "whitened G is not factorizable");
  }
  const Eigen::MatrixXd a_hat = ldlt.solve(u_hat);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a_hat);
  return svd.singularValues()(0);
}

double g_inverse_un_norm(const KernelSpace& space, std::span<const double> design,
                         double lambda) {
  return g_inverse_un_norm(build_operators(space, design, lambda));
}

SpectralReport spectral_report(const KernelSpace& space, std::span<const double> design,
                               double lambda, double relative_cutoff) {
  if (!(relative_cutoff > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "relative cutoff must be > 0");
  }
  SpectralReport report;
  report.betas = un_spectrum(space, design);
  const double top = report.betas.empty() ? 0.0 : report.betas.front();
  const double cutoff = top > 0.0 ? relative_cutoff * top : relative_cutoff;
  report.inv_beta = inv_beta_sum(report.betas, cutoff);
  report.rank = report.betas.size() - report.inv_beta.discarded;
  report.op_norm = lambda > 0.0 ? g_inverse_un_norm(space, design, lambda)
                                : std::numeric_limits<double>::quiet_NaN();
  return report;
}

double range_leakage(const KernelSpace& space, std::span<const double> design) {
  check_fit_inputs(space, design, 0.0);
  const Eigen::MatrixXd k = gram(space, design, KernelKind::kFull);
  const Eigen::MatrixXd sigma = gram(space, design, KernelKind::kH1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  const Eigen::VectorXd& kappa = eig.eigenvalues();
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const double cutoff = kDefaultRelativeCutoff * kappa.maxCoeff();

  Eigen::VectorXd inv = Eigen::VectorXd::Zero(kappa.size());
  for (Eigen::Index j = 0; j < kappa.size(); ++j) {
    if (kappa(j) > cutoff) inv(j) = 1.0 / kappa(j);
  }
  double worst = 0.0;
  for (Eigen::Index j = 0; j < kappa.size(); ++j) {
    if (kappa(j) <= cutoff) continue;
    // psi_j = sum_i a_i eta_i with |psi_j| = 1.
    const Eigen::VectorXd a = v.col(j) / std::sqrt(kappa(j));
    const Eigen::VectorXd sa = sigma * a;  // ((eta_i, chi1 psi_j))_i
    const Eigen::VectorXd coords = v.transpose() * sa;
    const double projected = coords.dot(inv.asDiagonal() * coords);
    const double leak2 = a.dot(sa) - projected;
    worst = std::max(worst, std::sqrt(std::max(leak2, 0.0)));
  }
  return worst;
}

// v^T K^-1 w on the subspace selected by pivoted Cholesky of the full kernel
// Gram matrix, truncated at a relative tolerance.
double projected_pairing(const KernelSpace& space, std::span<const double> design,
                         const SpanElement& truth, const SpanElement& xi) {
  const std::size_t n = check_fit_inputs(space, design, 0.0);
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd k = gram(space, design, KernelKind::kFull);
  Eigen::VectorXd v(ni), w(ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    v(i) = evaluate(space, truth, design[i]);
    w(i) = evaluate(space, xi, design[i]);
  }
  std::vector<lapack_int> piv(n);
  lapack_int rank = 0;
  const double tol = kDefaultRelativeCutoff * k.diagonal().maxCoeff();
  const auto ld = static_cast<lapack_int>(n);
  const lapack_int info =
      LAPACKE_dpstrf(LAPACK_COL_MAJOR, 'L', ld, k.data(), ld, piv.data(), &rank, tol);
  if (info < 0) throw Error(ErrorCode::kInternal, "dpstrf: invalid argument");
  Eigen::VectorXd vr(rank), wr(rank);
  for (lapack_int i = 0; i < rank; ++i) {
    vr(i) = v(piv[i] - 1);
    wr(i) = w(piv[i] - 1);
  }
  const auto l = k.topLeftCorner(rank, rank).triangularView<Eigen::Lower>();
  l.solveInPlace(vr);
  l.solveInPlace(wr);
  return vr.dot(wr);
}

RateReport rate_terms(const KernelSpace& space, const Dataset& data,
                      const SpanElement& truth, const SpanElement& xi, double lambda,
                      double sigma, double projected, std::optional<SplineFit>* fitted) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rate terms need lambda > 0");
  }
  validate(space, truth);
  validate(space, xi);
  const std::size_t n = check_fit_inputs(space, data.design, lambda);
  const auto ni = static_cast<Eigen::Index>(n);
  const double nd = static_cast<double>(n);
  const SystemMatrices sys = assemble(space, data.design);
  const BorderedSystem kkt(sys.sigma, sys.basis, nd * lambda);

  // G^-1 U mu_true is the noiseless fit to (mu_true(t_i))_i.
  Eigen::VectorXd v(ni);
  for (Eigen::Index i = 0; i < ni; ++i) v(i) = evaluate(space, truth, data.design[i]);
  const auto clean = kkt.solve(v, Eigen::VectorXd::Zero(space.order()));
  const SplineFit clean_fit(space, data.design, clean.top, clean.bottom, lambda, {});
  const double fit_pairing = span_inner(space, clean_fit.as_element(), xi);

  // (G^-1 eta_i, xi) = e_i^T G^-T b with b_k = (basis_k, xi). G^T z = b is
  // the same bordered system:
  //   (Sigma + n lambda I) w + T d' = n b1,  T^T w = n b0,
  // and e_i^T z = w_i.
  Eigen::VectorXd b0 = Eigen::Map<const Eigen::VectorXd>(xi.poly.data(), space.order());
  Eigen::VectorXd b1 = Eigen::VectorXd::Zero(ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (const Knot& kn : xi.knots) b1(i) += kn.w * k1(space, kn.s, data.design[i]);
  }
  const auto adj = kkt.solve(nd * b1, nd * b0);

  if (fitted) {
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.responses.data(), ni);
    const auto sol = kkt.solve(y, Eigen::VectorXd::Zero(space.order()));
    FitDiagnostics diag;
    diag.residual = sol.residual;
    diag.condition_estimate = kkt.condition_estimate();
    diag.ill_conditioned = !(diag.condition_estimate <= kConditionWarning);
    fitted->emplace(space, data.design, sol.top, sol.bottom, lambda, diag);
  }

  RateReport r;
  r.bias_term = std::abs(fit_pairing - projected);
  r.proj_term = std::abs(span_inner(space, truth, xi) - projected);
  r.noise_term = sigma / nd * adj.top.norm();
  r.q_estimate = std::numeric_limits<double>::quiet_NaN();
  return r;
}

RateReport rate_terms(const KernelSpace& space, const Dataset& data,
                      const SpanElement& truth, const SpanElement& xi, double lambda,
                      double sigma) {
  return rate_terms(space, data, truth, xi, lambda, sigma,
                    projected_pairing(space, data.design, truth, xi));
}

}  // namespace splinelab
