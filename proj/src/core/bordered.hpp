#pragma once

#include <vector>

#include <Eigen/Dense>

namespace splinelab {

// Bunch-Kaufman factorization of the symmetric indefinite matrix
//
//   [ S + shift*I   T ]
//   [ T^T           0 ]
//
// with S (n x n) symmetric and T (n x m).
class BorderedSystem {
 public:
  BorderedSystem(const Eigen::MatrixXd& s, const Eigen::MatrixXd& t, double shift);

  struct Solution {
    Eigen::VectorXd top;     // n entries
    Eigen::VectorXd bottom;  // m entries
    // |Kx - b|_inf / (|K|_inf |x|_inf + |b|_inf)
    double residual = 0.0;
  };

  Solution solve(const Eigen::VectorXd& rhs_top, const Eigen::VectorXd& rhs_bottom) const;

  // 1-norm condition estimate from dsycon.
  double condition_estimate() const noexcept { return cond_; }

  Eigen::Index n() const noexcept { return n_; }
  Eigen::Index m() const noexcept { return m_; }

 private:
  Eigen::Index n_;
  Eigen::Index m_;
  Eigen::MatrixXd full_;     // unfactored, for residuals
  Eigen::MatrixXd factors_;  // column-major LAPACK storage
  std::vector<int> ipiv_;
  double cond_ = 0.0;
};

}  // namespace splinelab
