#pragma once

// Reproducing kernels of H^m([0,1]) split as H0 (polynomials of degree < m,
// unpenalized) plus H1 (functions with vanishing derivatives of order < m at
// the origin, normed by the L2 norm of the m-th derivative).

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace splinelab {

class KernelSpace {
 public:
  explicit KernelSpace(int order);

  int order() const noexcept { return m_; }

  friend bool operator==(const KernelSpace&, const KernelSpace&) = default;

 private:
  int m_;
};

struct Knot {
  double s = 0.0;  // location in [0,1]
  double w = 0.0;  // weight on chi1 eta_s
};

// sum_j poly[j] * zeta_j + sum_k knots[k].w * chi1 eta_{knots[k].s}
struct SpanElement {
  std::vector<double> poly;
  std::vector<Knot> knots;

  static SpanElement zero(const KernelSpace& space);
  // zeta_index as an element.
  static SpanElement basis(const KernelSpace& space, int index);
  // Pure H1 part chi1 eta_s with unit weight.
  static SpanElement h1_representer(const KernelSpace& space, double s);
};

enum class KernelKind { kFull, kH0, kH1 };

struct Norms {
  double h0 = 0.0;
  double h1 = 0.0;
  double full = 0.0;
};

double zeta(const KernelSpace& space, int index, double t);
double greens(const KernelSpace& space, double t, double u);
double k0(const KernelSpace& space, double s, double t);
double k1(const KernelSpace& space, double s, double t);
double kernel(const KernelSpace& space, double s, double t);
double kernel(const KernelSpace& space, KernelKind which, double s, double t);

// (zeta_0(t), ..., zeta_{m-1}(t))
std::vector<double> zeta_vector(const KernelSpace& space, double t);

Eigen::MatrixXd gram(const KernelSpace& space, std::span<const double> points,
                     KernelKind which);

// eta_t as a SpanElement: poly = zeta(t), one knot (t, 1).
SpanElement representer(const KernelSpace& space, double t);

double evaluate(const KernelSpace& space, const SpanElement& a, double t);
double span_inner(const KernelSpace& space, const SpanElement& a,
                  const SpanElement& b);
Norms span_norms(const KernelSpace& space, const SpanElement& a);

// Throws unless `a` has m polynomial coefficients and knots inside [0,1].
void validate(const KernelSpace& space, const SpanElement& a);

SpanElement add(const SpanElement& a, const SpanElement& b);
SpanElement scaled(const SpanElement& a, double factor);

// Throws kOutOfDomain unless t in [0,1].
void check_point(double t, const char* what);

}  // namespace splinelab
