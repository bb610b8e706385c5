#include "flk/mollify.hpp"

namespace flk {

namespace {
// Shared unit-ball rule for mollification integrals.  Uniform radial panels
// across [0,1] are essential: the bump profile and its derivatives have sharp
// interior structure that dyadic-to-zero grading under-resolves.
const QuadratureRule& unit_ball_rule(int n) {
  static const QuadratureRule r1 =
      make_support_rule(Dimension(1), 10, 2, 1.0, 1.0, 12, 16);
  static const QuadratureRule r2 =
      make_support_rule(Dimension(2), 10, 20, 1.0, 1.0, 12, 16);
  static const QuadratureRule r3 =
      make_support_rule(Dimension(3), 10, 14, 1.0, 1.0, 12, 16);
  switch (n) {
    case 1: return r1;
    case 2: return r2;
    case 3: return r3;
  }
  throw std::invalid_argument("unit_ball_rule: n in {1,2,3}");
}
}  // namespace

MollifierKernel::MollifierKernel(double delta_, Dimension d)
    : delta(delta_), dim(d.n) {
  if (!(delta > 0.0)) throw std::invalid_argument("MollifierKernel: delta <= 0");
  // Z = omega_{n-1} int_0^1 exp(-1/(1-r^2)) r^{n-1} dr to ~1e-12
  double radial = integrate_gl([&](double r) {
    return profile(r) * std::pow(r, dim - 1);
  }, 0.0, 1.0, 60);
  Z = sphere_surface(dim) * radial;
}

double MollifierKernel::second_moment() const {
  double radial = integrate_gl([&](double r) {
    return profile(r) * std::pow(r, dim + 1);
  }, 0.0, 1.0, 60);
  return sphere_surface(dim) * radial / Z;
}

double mollify(const ScalarField& u, const MollifierKernel& k, const Vec& x) {
  const auto& q = unit_ball_rule(k.dim);
  return integrate_polar(q, Vec::zero(k.dim), [&](const Vec& z) {
    return k.j(z) * u(x - k.delta * z);
  });
}

Vec mollify_gradient(const ScalarField& u, const MollifierKernel& k,
                     const Vec& x) {
  // grad_x int j(z) u(x - delta z) dz = (1/delta) int grad j(z) u(x - delta z) dz
  // (substitute y = x - delta z back to the convolution form to see the sign).
  const auto& q = unit_ball_rule(k.dim);
  Vec g = Vec::zero(k.dim);
  for (int i = 0; i < k.dim; ++i) {
    g[i] = integrate_polar(q, Vec::zero(k.dim), [&](const Vec& z) {
      return k.grad_j(z)[i] * u(x - k.delta * z);
    }) / k.delta;
  }
  return g;
}

ScalarField mollified_field(const ScalarField& u, const MollifierKernel& k) {
  ScalarField f;
  f.dim = u.dim;
  f.eval = [u, k](const Vec& x) { return mollify(u, k, x); };
  f.tail = u.tail;
  if (u.tail.kind == TailKind::Compact)
    f.tail.support_radius = u.tail.support_radius + k.delta;
  return f;
}

double mollify_laplacian(const ScalarField& u, const MollifierKernel& k,
                         const Vec& x) {
  const auto& q = unit_ball_rule(k.dim);
  return integrate_polar(q, Vec::zero(k.dim), [&](const Vec& z) {
    return k.lap_j(z) * u(x - k.delta * z);
  }) / (k.delta * k.delta);
}

double mollified_ball_indicator(double eps, const MollifierKernel& k,
                                const Vec& x) {
  const auto& q = unit_ball_rule(k.dim);
  return integrate_polar(q, Vec::zero(k.dim), [&](const Vec& z) {
    return k.j(z) * ((x - k.delta * z).norm() < eps ? 1.0 : 0.0);
  });
}

double mollified_indicator(const ScalarField& u, const MollifierKernel& k,
                           const Vec& x) {
  const auto& q = unit_ball_rule(k.dim);
  return integrate_polar(q, Vec::zero(k.dim), [&](const Vec& z) {
    return k.j(z) * (u(x - k.delta * z) > 0.0 ? 1.0 : 0.0);
  });
}

double commutator_n_delta(const ScalarField& u, const CoefficientSet& coeffs,
                          const MollifierKernel& k, const Vec& x) {
  // With y = x - delta z:
  //   div_y[(b(y)-b(x)) j^delta(x-y)] dy
  //     = [div b(y) j(z) - (b(y)-b(x)).grad j(z)/delta] dz
  const auto& q = unit_ball_rule(k.dim);
  Vec bx = coeffs.b(x);
  return integrate_polar(q, Vec::zero(k.dim), [&](const Vec& z) {
    Vec y = x - k.delta * z;
    double term = coeffs.div_b(y) * k.j(z) -
                  (coeffs.b(y) - bx).dot(k.grad_j(z)) / k.delta;
    return u(y) * term;
  });
}

CommutatorReport commutator_report(const ScalarField& u,
                                   const CoefficientSet& coeffs,
                                   const MollifierKernel& k,
                                   const std::vector<Vec>& grid) {
  CommutatorReport rep;
  rep.grid = grid;

  // ||grad u||_{L^inf({u>0})} sampled on the delta-inflated grid hull; finite
  // differences with a step well below delta.
  double h = 1e-5;
  double gs = 0.0;
  double K = 0.0;
  for (const auto& x : grid) {
    const auto& q = unit_ball_rule(k.dim);
    for (const auto& [r, wr] : q.radial) {
      (void)wr;
      for (const auto& [omega, ws] : q.sphere) {
        (void)ws;
        Vec y = x - (k.delta * r) * omega;
        if (u(y) > 0.0) {
          double g2 = 0.0;
          for (int i = 0; i < k.dim; ++i) {
            Vec e = Vec::zero(k.dim);
            e[i] = h;
            double d = (u(y + e) - u(y - e)) / (2.0 * h);
            g2 += d * d;
          }
          gs = std::max(gs, std::sqrt(g2));
        }
        // Frobenius norm of grad b dominates the operator norm
        Mat3 gb = coeffs.grad_b(y);
        double fn = 0.0;
        for (int i = 0; i < k.dim; ++i)
          for (int j = 0; j < k.dim; ++j) fn += gb[i][j] * gb[i][j];
        K = std::max(K, std::sqrt(fn));
      }
    }
  }
  rep.grad_sup = gs;
  rep.K = K;

  double acc = 0.0;
  for (const auto& x : grid) {
    double nd = commutator_n_delta(u, coeffs, k, x);
    rep.n_delta_values.push_back(nd);
    rep.bound_rhs.push_back(K * k.delta * gs * mollified_indicator(u, k, x));
    acc += std::abs(nd);
  }
  rep.l1_norm = grid.empty() ? 0.0 : acc / (double)grid.size();
  return rep;
}

std::pair<double, double> mollified_fraclap_commutes(const ScalarField& u,
                                                     FracOrder s,
                                                     const MollifierKernel& k,
                                                     const Vec& x) {
  EvalBudget budget;
  ScalarField ud = mollified_field(u, k);
  double lhs = eval_fraclap(ud, x, s, budget).value;

  const auto& q = unit_ball_rule(k.dim);
  double rhs = integrate_polar(q, Vec::zero(k.dim), [&](const Vec& z) {
    return k.j(z) * eval_fraclap(u, x - k.delta * z, s, budget).value;
  });
  return {lhs, rhs};
}

}  // namespace flk
