#pragma once

#include <vector>

namespace splinelab {

// Gauss-Legendre rule with `nodes` points, mapped on demand to [a, b].
class GaussLegendre {
 public:
  explicit GaussLegendre(int nodes);

  int size() const noexcept { return static_cast<int>(x_.size()); }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) sum += w_[i] * f(mid + half * x_[i]);
    return half * sum;
  }

 private:
  std::vector<double> x_;  // on [-1, 1]
  std::vector<double> w_;
};

}  // namespace splinelab
