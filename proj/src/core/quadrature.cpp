#include "core/quadrature.hpp"

#include <algorithm>
#include <string>

#include <boost/math/special_functions/legendre.hpp>

#include "core/error.hpp"

namespace splinelab {

GaussLegendre::GaussLegendre(int nodes) {
  if (nodes < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "quadrature needs at least 2 nodes, got " + std::to_string(nodes));
  }
  // Boost returns the non-negative roots of P_n; mirror them.
  const auto roots = boost::math::legendre_p_zeros<double>(nodes);
  auto weight = [nodes](double x) {
    const double d = boost::math::legendre_p_prime(nodes, x);
    return 2.0 / ((1.0 - x * x) * d * d);
  };
  for (double x : roots) {
    x_.push_back(x);
    w_.push_back(weight(x));
    if (x != 0.0) {
      x_.push_back(-x);
      w_.push_back(weight(x));
    }
  }
}

}  // namespace splinelab
