#include "flk/potentials.hpp"

#include <mutex>
#include <tuple>

namespace flk {

ScalarField fundamental_solution(Dimension dim, FundKind kind) {
  const int n = dim.n;
  ScalarField f;
  f.dim = n;
  f.smooth_distance = [](const Vec& x) { return x.norm(); };
  f.poles = {Vec::zero(n)};
  if (kind.classical) {
    if (n < 2)
      throw std::invalid_argument("fundamental_solution: classical needs n >= 2");
    if (n == 2) {
      f.eval = [](const Vec& x) { return -std::log(x.norm()) / (2.0 * M_PI); };
      // |log| grows, but slower than any power: declare a unit-amplitude
      // zero-exponent tail; consumers treat the weight integral directly.
      f.tail = TailProfile::algebraic(1.0, 0.0);
    } else {
      double C = 1.0 / (double(n) * (n - 2.0) * ball_volume(n));
      f.eval = [C, n](const Vec& x) { return C * std::pow(x.norm(), 2.0 - n); };
      f.tail = TailProfile::algebraic(C, double(n - 2));
    }
    return f;
  }
  double s = kind.s;
  if (n <= 2.0 * s)
    throw std::invalid_argument("fundamental_solution: fractional needs n > 2s");
  double C = fundamental_constant(n, s);
  f.eval = [C, n, s](const Vec& x) {
    return C * std::pow(x.norm(), 2.0 * s - n);
  };
  f.tail = TailProfile::algebraic(C, n - 2.0 * s);
  return f;
}

ScalarField fundamental_solution_1d() {
  ScalarField f;
  f.dim = 1;
  f.eval = [](const Vec& x) { return -0.5 * std::abs(x[0]); };
  f.tail = TailProfile::algebraic(1.0, -1.0);  // grows linearly
  f.smooth_distance = [](const Vec& x) { return std::abs(x[0]); };
  return f;
}

double potential_against(const MeasureApprox& m, const ScalarField& Phi,
                         const Vec& x) {
  const int n = x.dim;
  double v = 0.0;
  for (const auto& [loc, mass] : m.atoms) {
    Vec d = x - loc;
    if (d.norm() < 1e-14)
      throw std::invalid_argument("potential_against: x coincides with an atom");
    v += mass * Phi(d);
  }
  if (m.has_density) {
    // Integrate Phi(x-y) density(y) around the kernel singularity at y = x:
    // ball rule centered at x, radius covering the density support.
    double R = x.norm() + m.density_radius + 0.1;
    QuadratureRule q = make_ball_rule(Dimension(n), 10, 24, R, 40);
    v += integrate_polar(q, x, [&](const Vec& y) {
      Vec d = x - y;
      double r = d.norm();
      if (r < 1e-300) return 0.0;
      return Phi(d) * m.density(y);
    });
  }
  return v;
}

double riesz_potential(const MeasureApprox& m, FracOrder s, Dimension dim,
                       const Vec& x) {
  return potential_against(m, fundamental_solution(dim, FundKind::frac(s.s)), x);
}

double newton_potential(const MeasureApprox& m, Dimension dim, const Vec& x) {
  return potential_against(m, fundamental_solution(dim, FundKind::classic()), x);
}

double delta_ball_average(const ScalarField& u, double delta,
                          double s_exponent, Dimension dim) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta_ball_average: delta <= 0");
  QuadratureRule q = make_ball_rule(dim, 10, 20, delta, 40);
  double I = integrate_polar(q, Vec::zero(dim.n), [&](const Vec& y) { return u(y); });
  return I / std::pow(delta, s_exponent);
}

Vec delta_ball_first_moment(const ScalarField& u, double delta, Dimension dim) {
  QuadratureRule q = make_ball_rule(dim, 10, 20, delta, 40);
  Vec mom = Vec::zero(dim.n);
  for (int i = 0; i < dim.n; ++i) {
    mom[i] = integrate_polar(q, Vec::zero(dim.n),
                             [&](const Vec& y) { return u(y) * y[i]; });
  }
  return mom;
}

double poisson_normalization(int n, double s) {
  // At x = 0 the exterior mass reduces (via |y| = t/zeta) to
  //   c * omega_{n-1} * int_0^1 zeta^{2s-1} (1-zeta^2)^{-s} dzeta = 1.
  static std::mutex mtx;
  static std::vector<std::tuple<int, double, double>> cache;
  {
    std::lock_guard<std::mutex> lock(mtx);
    for (const auto& [cn, cs, cv] : cache)
      if (cn == n && cs == s) return cv;
  }
  double I = integrate_graded_both(
      [&](double z) {
        return std::pow(z, 2.0 * s - 1.0) * std::pow(1.0 - z * z, -s);
      },
      0.0, 1.0, 12, 45);
  double v = 1.0 / (sphere_surface(n) * I);
  std::lock_guard<std::mutex> lock(mtx);
  cache.push_back({n, s, v});
  return v;
}

PoissonKernel::PoissonKernel(double t_, FracOrder s_, Dimension d)
    : t(t_), s(s_.s), dim(d.n) {
  if (!(t > 0.0)) throw std::invalid_argument("PoissonKernel: t <= 0");
  c = poisson_normalization(dim, s);
}

double PoissonKernel::value(const Vec& x, const Vec& y) const {
  double rx = x.norm(), ry = y.norm();
  if (rx >= t || ry <= t) return 0.0;
  double num = t * t - rx * rx;
  double den = ry * ry - t * t;
  return c * std::pow(num / den, s) * std::pow((x - y).norm(), -(double)dim);
}

namespace {

// Exterior radial integral int_{B_t^c} P_t(x,y) f(y) dy with |y| = t/zeta:
//   t^{n-2s} (t^2-|x|^2)^s c int_0^1 zeta^{2s-n-1}(1-zeta^2)^{-s}
//       [ sum_omega w |x - (t/zeta) omega|^{-n} f((t/zeta) omega) ] dzeta
// after absorbing r^{n-1} dr.  Grading at zeta=1 handles the boundary
// singularity; grading at zeta=0 handles the far field.
template <class F>
double exterior_kernel_integral(const PoissonKernel& k, const Vec& x, F&& f,
                                double zeta_hi = 1.0) {
  const int n = k.dim;
  auto sph = make_sphere_rule(n, 24);
  double rx = x.norm();
  double pref = std::pow(k.t, n - 2.0 * k.s) *
                std::pow(k.t * k.t - rx * rx, k.s) * k.c;
  double I = integrate_graded_both(
      [&](double z) {
        double r = k.t / z;
        double shell = 0.0;
        for (const auto& [omega, w] : sph) {
          Vec y = r * omega;
          shell += w * std::pow((x - y).norm(), -(double)n) * f(y);
        }
        return std::pow(z, 2.0 * k.s - n - 1.0) *
               std::pow(1.0 - z * z, -k.s) * shell;
      },
      0.0, zeta_hi, 12, 45);
  return pref * I;
}

}  // namespace

double poisson_extend(const ScalarField& exterior_data, const PoissonKernel& k,
                      const Vec& x) {
  if (x.norm() >= k.t)
    throw std::invalid_argument("poisson_extend: |x| >= t");
  return exterior_kernel_integral(k, x,
                                  [&](const Vec& y) { return exterior_data(y); });
}

double poisson_kernel_mass(const PoissonKernel& k, const Vec& x) {
  if (x.norm() >= k.t)
    throw std::invalid_argument("poisson_kernel_mass: |x| >= t");
  return exterior_kernel_integral(k, x, [](const Vec&) { return 1.0; });
}

AveragedKernel::AveragedKernel(double r_, double delta0_, FracOrder s_,
                               Dimension d)
    : r(r_), delta0(delta0_), s(s_.s), dim(d.n) {
  if (!(delta0 > 0.0 && delta0 < r))
    throw std::invalid_argument("AveragedKernel: need 0 < delta0 < r");
}

double AveragedKernel::value(const Vec& x, const Vec& y) const {
  double ry = y.norm();
  double hi = std::min(ry, r);
  double lo = r - delta0;
  if (hi <= lo) return 0.0;
  double v = integrate_graded_both(
      [&](double t) {
        PoissonKernel k(t, FracOrder(s), Dimension(dim));
        return k.value(x, y);
      },
      lo, hi, 8, 30);
  return v / delta0;
}

double averaged_kernel_extend(const ScalarField& exterior_data,
                              const AveragedKernel& g, const Vec& x) {
  if (x.norm() >= g.r - g.delta0)
    throw std::invalid_argument("averaged_kernel_extend: |x| >= r - delta0");
  double v = integrate_gl(
      [&](double t) {
        PoissonKernel k(t, FracOrder(g.s), Dimension(g.dim));
        return poisson_extend(exterior_data, k, x);
      },
      g.r - g.delta0, g.r, 16);
  return v / g.delta0;
}

}  // namespace flk
