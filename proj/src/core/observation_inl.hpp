#pragma once

#include <algorithm>

#include "core/quadrature.hpp"

namespace splinelab {

template <class F>
double integrate_design(const DesignDistribution& dist, std::span<const double> breaks,
                        int quad, F&& g) {
  const GaussLegendre rule(quad);
  std::vector<double> cuts = dist.edges();
  for (double b : breaks) {
    if (b > 0.0 && b < 1.0) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    if (b <= a) continue;
    const double rho = dist.density(0.5 * (a + b));
    total += rho * rule.integrate(g, a, b);
  }
  return total;
}

}  // namespace splinelab
