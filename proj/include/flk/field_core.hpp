#ifndef FLK_FIELD_CORE_HPP
#define FLK_FIELD_CORE_HPP

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

// Core domain types: points, dimensions, fractional orders, scalar fields
// with declared far-field tails, drift/zero-order coefficient sets, and the
// polar (radial x spherical) quadrature rules everything else is built on.

namespace flk {

struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int dim = 0;

  Vec() = default;
  Vec(double x, int n) : c{x, 0.0, 0.0}, dim(n) {}
  Vec(double x, double y) : c{x, y, 0.0}, dim(2) {}
  Vec(double x, double y, double z) : c{x, y, z}, dim(3) {}

  static Vec zero(int n) {
    Vec v;
    v.dim = n;
    return v;
  }

  double operator[](int i) const { return c[static_cast<size_t>(i)]; }
  double& operator[](int i) { return c[static_cast<size_t>(i)]; }

  Vec operator+(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r.c[i] += o.c[i];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r.c[i] -= o.c[i];
    return r;
  }
  Vec operator*(double a) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r.c[i] *= a;
    return r;
  }
  double dot(const Vec& o) const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += c[i] * o.c[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec operator*(double a, const Vec& v) { return v * a; }

struct Dimension {
  int n;
  explicit Dimension(int n_) : n(n_) {
    if (n < 1) throw std::invalid_argument("Dimension: n must be >= 1");
  }
};

struct FracOrder {
  double s;
  explicit FracOrder(double s_) : s(s_) {
    if (!(s > 0.0 && s < 1.0))
      throw std::invalid_argument("FracOrder: s must lie in (0,1)");
  }
};

// Far-field behaviour a field declares about itself.  Compact: identically
// zero outside B_{support_radius}.  Algebraic: |u(y)| <= amplitude*(1+|y|)^-p.
// WeightBound: only a finite nonlocal-weight integral is promised.
enum class TailKind { Compact, Algebraic, WeightBound };

struct TailProfile {
  TailKind kind = TailKind::Compact;
  double support_radius = 0.0;  // Compact
  double amplitude = 0.0;       // Algebraic
  double decay_p = 0.0;         // Algebraic
  double weight_bound = 0.0;    // WeightBound

  static TailProfile compact(double R) {
    TailProfile t;
    t.kind = TailKind::Compact;
    t.support_radius = R;
    return t;
  }
  static TailProfile algebraic(double A, double p) {
    TailProfile t;
    t.kind = TailKind::Algebraic;
    t.amplitude = A;
    t.decay_p = p;
    return t;
  }
  static TailProfile bounded(double A) { return algebraic(A, 0.0); }
  static TailProfile weight_bounded(double W) {
    TailProfile t;
    t.kind = TailKind::WeightBound;
    t.weight_bound = W;
    return t;
  }
};

struct ScalarField {
  std::function<double(const Vec&)> eval;
  TailProfile tail;
  int dim = 0;
  // Distance from x to the nearest point where the field fails to be smooth
  // (a pole, a kink sphere, ...).  Null means smooth everywhere.  Used to pick
  // the near-field radius of singular-integral evaluations.
  std::function<double(const Vec&)> smooth_distance;
  // Isolated points where |u| blows up (integrably).  Singular-integral
  // evaluators excise graded charts around these instead of letting a smooth
  // product rule straddle the pole.
  std::vector<Vec> poles;

  double operator()(const Vec& x) const { return eval(x); }
};

using Mat3 = std::array<std::array<double, 3>, 3>;

struct CoefficientSet {
  std::function<Vec(const Vec&)> b;       // drift
  std::function<Mat3(const Vec&)> grad_b; // Jacobian of b
  std::function<double(const Vec&)> c;    // zero-order coefficient
  double bound_M = 0.0;

  static CoefficientSet zero(int n) {
    CoefficientSet cs;
    cs.b = [n](const Vec&) { return Vec::zero(n); };
    cs.grad_b = [](const Vec&) { return Mat3{}; };
    cs.c = [](const Vec&) { return 0.0; };
    cs.bound_M = 0.0;
    return cs;
  }
  double div_b(const Vec& x) const {
    Mat3 g = grad_b(x);
    double s = 0;
    for (int i = 0; i < x.dim; ++i) s += g[i][i];
    return s;
  }
};

// Surface measure of the unit sphere S^{n-1}.
double sphere_surface(int n);
// Volume of the unit ball B_1 in R^n.
double ball_volume(int n);

// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int k, std::vector<double>& x, std::vector<double>& w);

struct QuadratureRule {
  std::vector<std::pair<double, double>> radial;  // (r, weight)
  std::vector<std::pair<Vec, double>> sphere;     // (unit direction, weight)
  double near_rho = 0.0;
  double far_R = 0.0;
  int dim = 0;
  enum class TailMode { Analytic, Truncate } tail_mode = TailMode::Analytic;
};

// Product rule on the annulus rho < |y| < R: geometric radial panels with
// Gauss-Legendre nodes, times a sphere rule exact for spherical polynomials
// of degree <= sphere_order.  n in {1,2,3}.
QuadratureRule make_polar_rule(Dimension dim, int radial_order,
                               int sphere_order, double rho, double R);

// Rule on the ball |y| < R with dyadic radial grading toward the origin, for
// integrable singularities at 0.  graded_levels dyadic panels plus one core
// panel [0, R*2^-levels].
QuadratureRule make_ball_rule(Dimension dim, int radial_order,
                              int sphere_order, double R,
                              int graded_levels = 30);

std::vector<std::pair<Vec, double>> make_sphere_rule(int n, int sphere_order);

// Rule tuned for integrands that combine an integrable singularity at the
// center with smooth-but-oscillatory structure on [0, rad] (bump profiles and
// their derivatives): dyadic core toward 0, uniform panels across [0, rad],
// geometric panels on (rad, R_total] when R_total > rad.
QuadratureRule make_support_rule(Dimension dim, int radial_order,
                                 int sphere_order, double rad, double R_total,
                                 int core_levels = 40,
                                 int support_panels = 20);

// Integrates f over the shell set of the rule, centered at `center`:
// sum_r w_r r^{n-1} sum_omega w_omega f(center + r*omega).
template <class F>
double integrate_polar(const QuadratureRule& q, const Vec& center, F&& f) {
  double total = 0.0;
  for (const auto& [r, wr] : q.radial) {
    double shell = 0.0;
    for (const auto& [omega, ws] : q.sphere) shell += ws * f(center + r * omega);
    double rpow = 1.0;
    for (int i = 1; i < q.dim; ++i) rpow *= r;
    total += wr * rpow * shell;
  }
  return total;
}

// Same but hands (y, r, omega) to f; used when the integrand is cheaper in
// polar form.
template <class F>
double integrate_polar_rw(const QuadratureRule& q, const Vec& center, F&& f) {
  double total = 0.0;
  for (const auto& [r, wr] : q.radial) {
    double shell = 0.0;
    for (const auto& [omega, ws] : q.sphere)
      shell += ws * f(center + r * omega, r, omega);
    double rpow = 1.0;
    for (int i = 1; i < q.dim; ++i) rpow *= r;
    total += wr * rpow * shell;
  }
  return total;
}

// 1-D Gauss-Legendre integral of f over [a,b].
template <class F>
double integrate_gl(F&& f, double a, double b, int order) {
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += w[i] * f(mid + half * x[i]);
  return s * half;
}

// 1-D integral over [a,b] on geometric panels (ratio<=2), GL `order` each.
template <class F>
double integrate_geometric(F&& f, double a, double b, int order) {
  if (!(b > a) || a <= 0.0)
    throw std::invalid_argument("integrate_geometric: need 0 < a < b");
  int panels = std::max(1, (int)std::ceil(std::log2(b / a)));
  double ratio = std::pow(b / a, 1.0 / panels);
  double s = 0.0, lo = a;
  for (int p = 0; p < panels; ++p) {
    double hi = (p + 1 == panels) ? b : lo * ratio;
    s += integrate_gl(f, lo, hi, order);
    lo = hi;
  }
  return s;
}

// 1-D integral over (a,b) with dyadic panel grading toward both endpoints,
// for integrable endpoint singularities like (x-a)^{-s} or (b-x)^{-s}.
template <class F>
double integrate_graded_both(F&& f, double a, double b, int order,
                             int levels = 40) {
  double mid = 0.5 * (a + b), s = 0.0;
  double lo = a, hi = mid;
  // panels clustering at a
  double width = hi - lo;
  for (int k = levels; k >= 1; --k) {
    double pa = lo + width * std::pow(0.5, k);
    double pb = lo + width * std::pow(0.5, k - 1);
    s += integrate_gl(f, pa, pb, order);
  }
  s += integrate_gl(f, lo, lo + width * std::pow(0.5, levels), order);
  // panels clustering at b
  lo = mid;
  hi = b;
  width = hi - lo;
  for (int k = levels; k >= 1; --k) {
    double pa = hi - width * std::pow(0.5, k - 1);
    double pb = hi - width * std::pow(0.5, k);
    s += integrate_gl(f, pa, pb, order);
  }
  s += integrate_gl(f, hi - width * std::pow(0.5, levels), hi, order);
  return s;
}

// Numerical membership integral int |u(y)| / (1 + |y|^{n+2s}) dy.
double l2s_weight_integral(const ScalarField& u, FracOrder s, Dimension dim);

}  // namespace flk

#endif  // FLK_FIELD_CORE_HPP
