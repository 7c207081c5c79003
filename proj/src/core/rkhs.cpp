#include "core/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace splinelab {
namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

KernelSpace::KernelSpace(int order) : m_(order) {
  if (order < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "kernel space order must be >= 1, got " + std::to_string(order));
  }
}

void check_point(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::kOutOfDomain,
                std::string(what) + " must lie in [0,1], got " + std::to_string(t));
  }
}

SpanElement SpanElement::zero(const KernelSpace& space) {
  return SpanElement{std::vector<double>(space.order(), 0.0), {}};
}

SpanElement SpanElement::basis(const KernelSpace& space, int index) {
  if (index < 0 || index >= space.order()) {
    throw Error(ErrorCode::kInvalidArgument, "basis index out of range");
  }
  SpanElement e = zero(space);
  e.poly[index] = 1.0;
  return e;
}

SpanElement SpanElement::h1_representer(const KernelSpace& space, double s) {
  check_point(s, "knot");
  SpanElement e = zero(space);
  e.knots.push_back({s, 1.0});
  return e;
}

double zeta(const KernelSpace& space, int index, double t) {
  if (index < 0 || index >= space.order()) {
    throw Error(ErrorCode::kInvalidArgument,
                "zeta index " + std::to_string(index) + " outside [0, m)");
  }
  check_point(t, "t");
  return std::pow(t, index) / factorial(index);
}

std::vector<double> zeta_vector(const KernelSpace& space, double t) {
  check_point(t, "t");
  std::vector<double> out(space.order());
  double term = 1.0;
  for (int i = 0; i < space.order(); ++i) {
    out[i] = term;
    term *= t / (i + 1);
  }
  return out;
}

double greens(const KernelSpace& space, double t, double u) {
  check_point(t, "t");
  check_point(u, "u");
  if (t <= u) return 0.0;
  const int m = space.order();
  return std::pow(t - u, m - 1) / factorial(m - 1);
}

double k0(const KernelSpace& space, double s, double t) {
  const auto zs = zeta_vector(space, s);
  const auto zt = zeta_vector(space, t);
  double sum = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) sum += zs[i] * zt[i];
  return sum;
}

// With a = min(s,t), b = max(s,t), d = b - a and v = a - u:
//   int_0^a (a-u)^{m-1} (b-u)^{m-1} du = int_0^a v^{m-1} (d+v)^{m-1} dv
//     = sum_k C(m-1,k) d^{m-1-k} a^{m+k} / (m+k).
// Every term is non-negative, so the sum has no cancellation.
double k1(const KernelSpace& space, double s, double t) {
  check_point(s, "s");
  check_point(t, "t");
  const int m = space.order();
  const double a = std::min(s, t);
  const double d = std::max(s, t) - a;
  if (a == 0.0) return 0.0;
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    sum += binomial(m - 1, k) * std::pow(d, m - 1 - k) * std::pow(a, m + k) / (m + k);
  }
  const double f = factorial(m - 1);
  return sum / (f * f);
}

double kernel(const KernelSpace& space, double s, double t) {
  return k0(space, s, t) + k1(space, s, t);
}

double kernel(const KernelSpace& space, KernelKind which, double s, double t) {
  switch (which) {
    case KernelKind::kH0: return k0(space, s, t);
    case KernelKind::kH1: return k1(space, s, t);
    case KernelKind::kFull: break;
  }
  return kernel(space, s, t);
}

Eigen::MatrixXd gram(const KernelSpace& space, std::span<const double> points,
                     KernelKind which) {
  if (points.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "gram matrix needs at least one point");
  }
  for (double p : points) check_point(p, "gram point");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel(space, which, points[i], points[j]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

SpanElement representer(const KernelSpace& space, double t) {
  return SpanElement{zeta_vector(space, t), {{t, 1.0}}};
}

void validate(const KernelSpace& space, const SpanElement& a) {
  if (static_cast<int>(a.poly.size()) != space.order()) {
    throw Error(ErrorCode::kInvalidArgument,
                "element has " + std::to_string(a.poly.size()) +
                    " polynomial coefficients, space order is " +
                    std::to_string(space.order()));
  }
  for (const Knot& k : a.knots) check_point(k.s, "knot");
}

double evaluate(const KernelSpace& space, const SpanElement& a, double t) {
  validate(space, a);
  const auto z = zeta_vector(space, t);
  double v = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) v += a.poly[j] * z[j];
  for (const Knot& k : a.knots) v += k.w * k1(space, k.s, t);
  return v;
}

double span_inner(const KernelSpace& space, const SpanElement& a,
                  const SpanElement& b) {
  validate(space, a);
  validate(space, b);
  double v = 0.0;
  for (int j = 0; j < space.order(); ++j) v += a.poly[j] * b.poly[j];
  for (const Knot& ka : a.knots) {
    for (const Knot& kb : b.knots) v += ka.w * kb.w * k1(space, ka.s, kb.s);
  }
  return v;
}

Norms span_norms(const KernelSpace& space, const SpanElement& a) {
  validate(space, a);
  double h0sq = 0.0;
  for (double d : a.poly) h0sq += d * d;
  double h1sq = 0.0;
  for (std::size_t k = 0; k < a.knots.size(); ++k) {
    const Knot& x = a.knots[k];
    h1sq += x.w * x.w * k1(space, x.s, x.s);
    for (std::size_t l = 0; l < k; ++l) {
      h1sq += 2.0 * x.w * a.knots[l].w * k1(space, x.s, a.knots[l].s);
    }
  }
  h1sq = std::max(h1sq, 0.0);
  return Norms{std::sqrt(h0sq), std::sqrt(h1sq), std::sqrt(h0sq + h1sq)};
}

SpanElement add(const SpanElement& a, const SpanElement& b) {
  if (a.poly.size() != b.poly.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot add elements of different order");
  }
  SpanElement out = a;
  for (std::size_t j = 0; j < out.poly.size(); ++j) out.poly[j] += b.poly[j];
  out.knots.insert(out.knots.end(), b.knots.begin(), b.knots.end());
  return out;
}

SpanElement scaled(const SpanElement& a, double factor) {
  SpanElement out = a;
  for (double& d : out.poly) d *= factor;
  for (Knot& k : out.knots) k.w *= factor;
  return out;
}

}  // namespace splinelab
