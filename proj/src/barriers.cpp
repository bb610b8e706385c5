#include "flk/barriers.hpp"

#include "flk/spline.hpp"

#include <algorithm>

namespace flk {

double Barrier::phi(double r) const {
  switch (family) {
    case BarrierFamily::ClassicalN2Log: {
      double q = std::log(r) / std::log(eps);
      return 1.0 + sigma * r * r - std::pow(q, alpha);
    }
    case BarrierFamily::ClassicalN3Power:
      return 1.0 + sigma * r * r - std::pow(eps / r, alpha);
    case BarrierFamily::FractionalPower:
      return 1.0 - std::pow(eps / r, alpha);
  }
  return 0.0;
}

double Barrier::dphi(double r) const {
  switch (family) {
    case BarrierFamily::ClassicalN2Log: {
      double L = std::log(eps);
      double q = std::log(r) / L;
      return 2.0 * sigma * r - alpha * std::pow(q, alpha - 1.0) / (r * L);
    }
    case BarrierFamily::ClassicalN3Power:
      return 2.0 * sigma * r +
             alpha * std::pow(eps, alpha) * std::pow(r, -alpha - 1.0);
    case BarrierFamily::FractionalPower:
      return alpha * std::pow(eps, alpha) * std::pow(r, -alpha - 1.0);
  }
  return 0.0;
}

double Barrier::lap_phi(double r) const {
  switch (family) {
    case BarrierFamily::ClassicalN2Log: {
      // n = 2: Delta[(log r/log eps)^alpha] = alpha(alpha-1) q^{alpha-2}/(r log eps)^2
      double L = std::log(eps);
      double q = std::log(r) / L;
      return 2.0 * dim * sigma -
             alpha * (alpha - 1.0) * std::pow(q, alpha - 2.0) / (r * r * L * L);
    }
    case BarrierFamily::ClassicalN3Power:
      return 2.0 * dim * sigma + alpha * (dim - 2.0 - alpha) *
                                     std::pow(eps, alpha) *
                                     std::pow(r, -alpha - 2.0);
    default:
      throw std::logic_error("lap_phi: classical families only");
  }
}

double Barrier::fraclap_phi(double r) const {
  if (family != BarrierFamily::FractionalPower)
    throw std::logic_error("fraclap_phi: fractional family only");
  return -std::pow(eps, alpha) * K * std::pow(r, -alpha - 2.0 * s);
}

double Barrier::grad_sup_positive() const {
  if (family == BarrierFamily::FractionalPower)
    return dphi(eps);  // |grad phi| decreasing on B_eps^c; sup at r = eps
  double hi = (family == BarrierFamily::ClassicalN2Log) ? 0.9 : 1.0;
  double sup = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    double r = std::exp(std::log(1e-6) +
                        (std::log(hi) - std::log(1e-6)) * i / 4000.0);
    if (phi(r) > 0.0) sup = std::max(sup, std::abs(dphi(r)));
  }
  return sup;
}

Barrier make_barrier(BarrierFamily family, double eps, double alpha, double M,
                     Dimension dim, double s) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("make_barrier: eps outside (0,1)");
  if (M < 0.0) throw std::invalid_argument("make_barrier: M < 0");
  Barrier b;
  b.family = family;
  b.eps = eps;
  b.alpha = alpha;
  b.M = M;
  b.dim = dim.n;
  switch (family) {
    case BarrierFamily::ClassicalN2Log:
      if (dim.n != 2)
        throw std::invalid_argument("make_barrier: n2-log needs n = 2");
      if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("make_barrier: n2-log needs alpha in (0,1)");
      b.sigma = (2.0 * M + 1.0) / dim.n;
      break;
    case BarrierFamily::ClassicalN3Power:
      if (dim.n < 3)
        throw std::invalid_argument("make_barrier: power family needs n >= 3");
      if (!(alpha > 0.0 && alpha < dim.n - 2.0))
        throw std::invalid_argument(
            "make_barrier: power family needs alpha in (0, n-2)");
      b.sigma = (2.0 * M + 1.0) / dim.n;
      break;
    case BarrierFamily::FractionalPower:
      if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("make_barrier: fractional needs s in (0,1)");
      if (!(alpha > 0.0 && alpha < dim.n - 2.0 * s))
        throw std::invalid_argument(
            "make_barrier: fractional needs alpha in (0, n-2s)");
      b.s = s;
      b.K = power_fraclap_constant(dim.n, s, alpha);
      break;
  }
  return b;
}

namespace {

double barrier_margin(const Barrier& b, const CoefficientSet& coeffs,
                      const Vec& x) {
  double r = x.norm();
  double drift = coeffs.b(x).dot(b.grad_phi(x));
  if (b.family == BarrierFamily::FractionalPower)
    return b.fraclap_phi(r) - drift + 2.0 * b.M * b.phi(r) - 2.0 * b.M;
  return -b.lap_phi(r) - drift + (2.0 * b.M + 1.0) * b.phi(r);
}

std::vector<Vec> candidate_ball_samples(int n, double rc) {
  // >= 200 points per candidate ball: 25 dyadically graded radii x directions
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs = {Vec(1.0, 1), Vec(-1.0, 1)};
  } else if (n == 2) {
    for (int i = 0; i < 16; ++i) {
      double th = 2.0 * M_PI * i / 16.0 + 0.05;
      dirs.push_back(Vec(std::cos(th), std::sin(th)));
    }
  } else {
    for (auto& [w, wt] : make_sphere_rule(3, 6)) {
      (void)wt;
      dirs.push_back(w);
    }
  }
  std::vector<Vec> pts;
  for (int j = 0; j <= 24; ++j) {
    double r = rc * std::pow(2.0, -0.5 * j);
    for (const auto& d : dirs) pts.push_back(r * d);
  }
  return pts;
}

}  // namespace

BarrierCertification certify_barrier_inequality(const Barrier& b,
                                                const CoefficientSet& coeffs,
                                                const std::vector<Vec>& grid,
                                                const EvalBudget& budget) {
  (void)budget;  // margins are analytic per-point; no quadrature budget needed
  const double tol = 1e-9;
  BarrierCertification cert;
  for (int k = 1; k <= 12; ++k) {
    double rc = std::pow(2.0, -k);
    double worst = -std::numeric_limits<double>::infinity();
    std::vector<Vec> fails;
    auto consider = [&](const Vec& x) {
      double m = barrier_margin(b, coeffs, x);
      if (m > worst) worst = m;
      if (m > tol) fails.push_back(x);
    };
    for (const auto& x : candidate_ball_samples(b.dim, rc)) consider(x);
    for (const auto& x : grid)
      if (x.norm() <= rc && x.norm() > 0.0) consider(x);
    cert.sweep.push_back({rc, worst});
    if (fails.empty()) {
      cert.r0 = rc;
      cert.passed = true;
      return cert;
    }
    cert.failing_points = fails;
  }
  cert.r0 = 0.0;
  cert.passed = false;
  return cert;
}

namespace {

// Radial profile of J_delta psi via a spline through directly mollified
// values, dense across the kink smoothing zone [eps-delta, eps+2delta].
struct PsiDeltaProfile {
  double eps, delta, alpha;
  CubicSpline spline;
  double lo, hi;

  PsiDeltaProfile(const Barrier& b, const MollifierKernel& k) {
    eps = b.eps;
    delta = k.delta;
    alpha = b.alpha;
    ScalarField psi;
    psi.dim = b.dim;
    psi.eval = [b](const Vec& x) { return b.psi(x.norm()); };
    psi.tail = TailProfile::bounded(1.0);
    lo = eps - delta;
    hi = std::max(4.0, 8.0 * eps);
    std::vector<double> xs, ys;
    auto add = [&](double r) {
      Vec x = Vec::zero(b.dim);
      x[0] = r;
      xs.push_back(r);
      ys.push_back(mollify(psi, k, x));
    };
    // dense across the smoothing zone, geometric beyond
    double z1 = eps + 2.0 * delta;
    for (int i = 0; i <= 240; ++i) add(lo + (z1 - lo) * i / 240.0);
    int m = 360;
    for (int i = 1; i <= m; ++i)
      add(z1 * std::pow(hi / z1, (double)i / m));
    spline = CubicSpline(xs, ys);
  }

  // g(r) = J_delta psi (r) - 1, decaying like -(eps/r)^alpha
  double g(double r) const {
    if (r <= lo) return -1.0;
    if (r >= hi) return -std::pow(eps / r, alpha);
    return spline(r) - 1.0;
  }
};

}  // namespace

MollifiedBarrierReport certify_mollified_barrier(const Barrier& b,
                                                 const CoefficientSet& coeffs,
                                                 const MollifierKernel& k,
                                                 const std::vector<Vec>& grid) {
  MollifiedBarrierReport rep;
  const double tol = 1e-6;
  rep.worst_margin = -std::numeric_limits<double>::infinity();

  ScalarField phif, psif;
  phif.dim = psif.dim = b.dim;
  phif.eval = [b](const Vec& x) { return b.phi(x.norm()); };
  psif.eval = [b](const Vec& x) { return b.psi(x.norm()); };
  phif.tail = psif.tail = TailProfile::bounded(1.0);

  if (b.family == BarrierFamily::FractionalPower) {
    if (!(k.delta < 0.5 * b.eps))
      throw std::invalid_argument(
          "certify_mollified_barrier: need delta < eps/2");
    PsiDeltaProfile prof(b, k);
    double grad_sup = b.grad_sup_positive();  // = alpha/eps at r = eps
    for (const auto& x : grid) {
      double r = x.norm();
      double frac = radial_fraclap([&](double rr) { return prof.g(rr); }, r,
                                   b.dim, b.s);
      double psid = prof.g(r) + 1.0;
      double drift = coeffs.b(x).dot(mollify_gradient(psif, k, x));
      double lhs = frac - drift + 2.0 * b.M * psid;
      double rhs = 2.0 * b.M + b.M * k.delta * grad_sup *
                                   mollified_ball_indicator(b.eps, k, x);
      double m = lhs - rhs;
      rep.margins.push_back({x, m});
      rep.worst_margin = std::max(rep.worst_margin, m);
    }
  } else {
    double grad_sup = b.grad_sup_positive();
    for (const auto& x : grid) {
      double lap = mollify_laplacian(psif, k, x);
      double drift = coeffs.b(x).dot(mollify_gradient(psif, k, x));
      double psid = mollify(psif, k, x);
      double lhs = -lap - drift + (2.0 * b.M + 1.0) * psid;
      double rhs = b.M * k.delta * grad_sup * mollified_indicator(phif, k, x);
      double m = lhs - rhs;
      rep.margins.push_back({x, m});
      rep.worst_margin = std::max(rep.worst_margin, m);
    }
  }
  rep.passed = rep.worst_margin <= tol;
  return rep;
}

DecayReport decay_bound_report(const ScalarField& eta, const ScalarField& psi,
                               FracOrder s, const std::vector<Vec>& sample_xs) {
  DecayReport rep;
  rep.sample_xs = sample_xs;
  const int n = eta.dim;
  const double p = n + 2.0 * s.s;
  EvalBudget budget;

  for (const auto& x : sample_xs) {
    double k1 = std::abs(psi(x) * eval_fraclap(eta, x, s, budget).value);

    // K2: the integrand vanishes once both points leave supp eta, and decays
    // like |x-y|^{-n-2s} otherwise; ball around x with dyadic grading at the
    // kernel singularity, radius covering supp eta and the decay range.
    double R = x.norm() + std::max(50.0, 2.0 * eta.tail.support_radius);
    QuadratureRule q = make_ball_rule(Dimension(n), 10, 20, R, 45);
    double ex = eta(x), px = psi(x);
    double k2 = integrate_polar(q, x, [&](const Vec& y) {
      double de = std::abs(ex - eta(y));
      if (de == 0.0) return 0.0;
      return de * std::abs(px - psi(y)) *
             std::pow((x - y).norm(), -p);
    });
    rep.k1_values.push_back(k1);
    rep.k2_values.push_back(k2);
  }

  // fit C on the near/mid samples, then require domination on the far ones
  double C = 0.0;
  for (size_t i = 0; i < sample_xs.size(); ++i) {
    double w = 1.0 + std::pow(sample_xs[i].norm(), p);
    if (sample_xs[i].norm() <= 2.0)
      C = std::max({C, rep.k1_values[i] * w, rep.k2_values[i] * w});
  }
  rep.fitted_C = C;
  rep.passed = true;
  for (size_t i = 0; i < sample_xs.size(); ++i) {
    double w = 1.0 + std::pow(sample_xs[i].norm(), p);
    if (rep.k1_values[i] * w > C * (1.0 + 1e-9) ||
        rep.k2_values[i] * w > C * (1.0 + 1e-9))
      rep.passed = false;
  }
  return rep;
}

}  // namespace flk
