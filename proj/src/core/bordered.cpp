#include "core/bordered.hpp"

#include <limits>
#include <string>

#include <lapacke.h>

#include "core/error.hpp"

namespace splinelab {

BorderedSystem::BorderedSystem(const Eigen::MatrixXd& s, const Eigen::MatrixXd& t,
                               double shift)
    : n_(s.rows()), m_(t.cols()) {
  if (s.cols() != n_ || t.rows() != n_) {
    throw Error(ErrorCode::kInvalidArgument, "bordered system: shape mismatch");
  }
  const Eigen::Index dim = n_ + m_;
  full_ = Eigen::MatrixXd::Zero(dim, dim);
  full_.topLeftCorner(n_, n_) = s;
  full_.topLeftCorner(n_, n_).diagonal().array() += shift;
  full_.topRightCorner(n_, m_) = t;
  full_.bottomLeftCorner(m_, n_) = t.transpose();

  factors_ = full_;
  ipiv_.assign(static_cast<std::size_t>(dim), 0);
  const auto ld = static_cast<lapack_int>(dim);
  const double anorm =
      LAPACKE_dlansy(LAPACK_COL_MAJOR, '1', 'L', ld, factors_.data(), ld);
  lapack_int info =
      LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', ld, factors_.data(), ld, ipiv_.data());
  if (info > 0) {
    throw Error(ErrorCode::kSingularSystem,
                "bordered system is exactly singular (pivot " + std::to_string(info) + ")");
  }
  if (info < 0) throw Error(ErrorCode::kInternal, "dsytrf: invalid argument");
  double rcond = 0.0;
  info = LAPACKE_dsycon(LAPACK_COL_MAJOR, 'L', ld, factors_.data(), ld, ipiv_.data(),
                        anorm, &rcond);
  if (info != 0) throw Error(ErrorCode::kInternal, "dsycon failed");
  cond_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
}

BorderedSystem::Solution BorderedSystem::solve(const Eigen::VectorXd& rhs_top,
                                               const Eigen::VectorXd& rhs_bottom) const {
  if (rhs_top.size() != n_ || rhs_bottom.size() != m_) {
    throw Error(ErrorCode::kInvalidArgument, "bordered solve: rhs shape mismatch");
  }
  Eigen::VectorXd b(n_ + m_);
  b << rhs_top, rhs_bottom;
  Eigen::VectorXd x = b;
  const auto ld = static_cast<lapack_int>(n_ + m_);
  const lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', ld, 1, factors_.data(), ld,
                                         ipiv_.data(), x.data(), ld);
  if (info != 0) throw Error(ErrorCode::kInternal, "dsytrs failed");
  const double denom = full_.lpNorm<Eigen::Infinity>() * x.lpNorm<Eigen::Infinity>() +
                       b.lpNorm<Eigen::Infinity>();
  const double residual =
      denom > 0.0 ? (full_ * x - b).lpNorm<Eigen::Infinity>() / denom : 0.0;
  return {x.head(n_), x.tail(m_), residual};
}

}  // namespace splinelab
