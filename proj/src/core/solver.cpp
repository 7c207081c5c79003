#include "core/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "core/bordered.hpp"
#include "core/error.hpp"

namespace splinelab {

double LambdaSchedule::at(std::size_t n) const {
  return scale * std::pow(static_cast<double>(n), -p);
}

void LambdaSchedule::validate() const {
  if (!(p > 0.0 && p <= 1.5)) {
    throw Error(ErrorCode::kInvalidArgument,
                "lambda exponent p must lie in (0, 1.5], got " + std::to_string(p));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda scale must be finite and > 0");
  }
}

std::size_t check_fit_inputs(const KernelSpace& space, std::span<const double> design,
                             double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be finite and >= 0");
  }
  for (double t : design) check_point(t, "design point");
  std::vector<double> sorted(design.begin(), design.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] - sorted[i - 1] < kDuplicateKnotTolerance) {
      throw Error(ErrorCode::kDuplicateKnots,
                  "design points " + std::to_string(sorted[i - 1]) + " and " +
                      std::to_string(sorted[i]) + " coincide within 1e-12");
    }
  }
  if (sorted.size() < static_cast<std::size_t>(space.order())) {
    throw Error(ErrorCode::kTooFewPoints,
                std::to_string(sorted.size()) + " distinct design points, need at least m = " +
                    std::to_string(space.order()));
  }
  return sorted.size();
}

SystemMatrices assemble(const KernelSpace& space, std::span<const double> design) {
  if (design.empty()) throw Error(ErrorCode::kTooFewPoints, "empty design");
  const auto n = static_cast<Eigen::Index>(design.size());
  SystemMatrices sys;
  sys.sigma = gram(space, design, KernelKind::kH1);
  sys.basis.resize(n, space.order());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto z = zeta_vector(space, design[i]);
    for (int j = 0; j < space.order(); ++j) sys.basis(i, j) = z[j];
  }
  return sys;
}

SystemMatrices assemble(const KernelSpace& space, const Dataset& data, double lambda) {
  check_fit_inputs(space, data.design, lambda);
  return assemble(space, data.design);
}

SplineFit::SplineFit(KernelSpace space, std::vector<double> knots, Eigen::VectorXd c,
                     Eigen::VectorXd d, double lambda, FitDiagnostics diagnostics)
    : space_(space),
      knots_(std::move(knots)),
      c_(std::move(c)),
      d_(std::move(d)),
      lambda_(lambda),
      diagnostics_(diagnostics) {}

SpanElement SplineFit::as_element() const {
  SpanElement e;
  e.poly.assign(d_.data(), d_.data() + d_.size());
  e.knots.reserve(knots_.size());
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    e.knots.push_back({knots_[i], c_[static_cast<Eigen::Index>(i)]});
  }
  return e;
}

Eigen::VectorXd SplineFit::coefficients() const {
  Eigen::VectorXd x(d_.size() + c_.size());
  x << d_, c_;
  return x;
}

SplineFit fit(const KernelSpace& space, std::span<const double> design,
              std::span<const double> responses, double lambda) {
  if (design.size() != responses.size()) {
    throw Error(ErrorCode::kInvalidArgument, "design and responses differ in length");
  }
  const std::size_t n = check_fit_inputs(space, design, lambda);
  const SystemMatrices sys = assemble(space, design);
  const BorderedSystem kkt(sys.sigma, sys.basis, static_cast<double>(n) * lambda);
  const Eigen::VectorXd y =
      Eigen::Map<const Eigen::VectorXd>(responses.data(), static_cast<Eigen::Index>(n));
  const auto sol = kkt.solve(y, Eigen::VectorXd::Zero(space.order()));

  FitDiagnostics diag;
  diag.residual = sol.residual;
  diag.condition_estimate = kkt.condition_estimate();
  diag.interpolating = lambda == 0.0;
  diag.ill_conditioned = !(diag.condition_estimate <= kConditionWarning);
  return SplineFit(space, {design.begin(), design.end()}, sol.top, sol.bottom, lambda, diag);
}

SplineFit fit(const KernelSpace& space, const Dataset& data, double lambda) {
  return fit(space, data.design, data.responses, lambda);
}

SplineFit fit_bruteforce(const KernelSpace& space, const Dataset& data, double lambda) {
  using Real = boost::multiprecision::number<
      boost::multiprecision::cpp_bin_float<50>, boost::multiprecision::et_off>;
  using MatrixL = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorL = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  if (data.design.size() != data.responses.size()) {
    throw Error(ErrorCode::kInvalidArgument, "design and responses differ in length");
  }
  const std::size_t n = check_fit_inputs(space, data.design, lambda);
  if (lambda == 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "brute-force oracle needs lambda > 0 for a unique critical point");
  }
  const SystemMatrices sys = assemble(space, data.design);
  const auto ni = static_cast<Eigen::Index>(n);
  const Eigen::Index m = space.order();

  // Q(d, c) = (1/n) |y - T d - S c|^2 + lambda c^T S c. Setting the gradient
  // to zero and multiplying through by n/2 gives A x = b with
  //   A = [T S]^T [T S] + n lambda diag(0, S),  b = [T S]^T y.
  MatrixL design_matrix(ni, m + ni);
  design_matrix << sys.basis.cast<Real>(), sys.sigma.cast<Real>();
  MatrixL a = design_matrix.transpose() * design_matrix;
  a.bottomRightCorner(ni, ni) +=
      Real(static_cast<double>(n)) * Real(lambda) * sys.sigma.cast<Real>();
  const VectorL y =
      Eigen::Map<const Eigen::VectorXd>(data.responses.data(), ni).cast<Real>();
  const VectorL b = design_matrix.transpose() * y;

  const Eigen::LDLT<MatrixL> ldlt(a);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularSystem, "brute-force normal equations are singular");
  }
  const VectorL x = ldlt.solve(b);

  FitDiagnostics diag;
  const Real denom =
      a.lpNorm<Eigen::Infinity>() * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  diag.residual =
      denom > 0 ? static_cast<double>(Real((a * x - b).lpNorm<Eigen::Infinity>() / denom))
                : 0.0;
  const VectorL pivots = ldlt.vectorD().cwiseAbs();
  const Real dmax = pivots.maxCoeff();
  const Real dmin = pivots.minCoeff();
  diag.condition_estimate = dmin > 0 ? static_cast<double>(Real(dmax / dmin))
                                      : std::numeric_limits<double>::infinity();
  diag.ill_conditioned = !(diag.condition_estimate <= kConditionWarning);
  Eigen::VectorXd c(ni), d(m);
  for (Eigen::Index i = 0; i < ni; ++i) c(i) = static_cast<double>(x(m + i));
  for (Eigen::Index j = 0; j < m; ++j) d(j) = static_cast<double>(x(j));
  return SplineFit(space, data.design, c, d, lambda, diag);
}

double evaluate(const SplineFit& fitted, double t) {
  check_point(t, "t");
  const KernelSpace& space = fitted.space();
  const auto z = zeta_vector(space, t);
  double v = 0.0;
  for (int j = 0; j < space.order(); ++j) v += fitted.d()[j] * z[j];
  const auto& knots = fitted.knots();
  for (std::size_t i = 0; i < knots.size(); ++i) {
    v += fitted.c()[static_cast<Eigen::Index>(i)] * k1(space, knots[i], t);
  }
  return v;
}

double empirical_risk(const KernelSpace& space, const SpanElement& mu,
                      const Dataset& data, double lambda) {
  validate(space, mu);
  const std::size_t n = data.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty dataset");
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = data.responses[i] - evaluate(space, mu, data.design[i]);
    sse += r * r;
  }
  const double h1 = span_norms(space, mu).h1;
  return sse / static_cast<double>(n) + lambda * h1 * h1;
}

double empirical_risk(const SplineFit& fitted, const Dataset& data, double lambda) {
  return empirical_risk(fitted.space(), fitted.as_element(), data, lambda);
}

Norms fit_norms(const SplineFit& fitted) {
  return span_norms(fitted.space(), fitted.as_element());
}

}  // namespace splinelab
