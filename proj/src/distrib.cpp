#include "flk/distrib.hpp"

#include "flk/spline.hpp"

#include <map>
#include <mutex>
#include <random>

namespace flk {

namespace {
double hfun(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double hfun_d1(double t) { return t > 0.0 ? hfun(t) / (t * t) : 0.0; }
double hfun_d2(double t) {
  return t > 0.0 ? hfun(t) * (1.0 / (t * t * t * t) - 2.0 / (t * t * t)) : 0.0;
}
}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = hfun(t), b = hfun(1.0 - t);
  return a / (a + b);
}

double smooth_step_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  double a = hfun(t), b = hfun(1.0 - t);
  double ap = hfun_d1(t), bp = -hfun_d1(1.0 - t);
  double den = a + b;
  return (ap * b - a * bp) / (den * den);
}

double smooth_step_d2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  double a = hfun(t), b = hfun(1.0 - t);
  double ap = hfun_d1(t), bp = -hfun_d1(1.0 - t);
  double app = hfun_d2(t), bpp = hfun_d2(1.0 - t);
  double den = a + b;
  double num1 = app * b - a * bpp;  // (a'b - ab')'
  return num1 / (den * den) -
         2.0 * (ap * b - a * bp) * (ap + bp) / (den * den * den);
}

// ---------------------------------------------------------------------------
// Cached radial profile of (-Delta)^s applied to a unit-radius radial bump.

namespace {

struct RadialFracCache {
  CubicSpline spline;  // F(rho) on [0, rho_max]
  double rho_max = 10.0;
  double far_coef = 0.0;  // F(rho) ~ far_coef * rho^{-n-2s} beyond rho_max
  double p = 0.0;         // n + 2s

  RadialFracCache(const std::function<double(double)>& prof, int n, double s,
                  double feature_scale) {
    p = n + 2.0 * s;
    auto profile = [&](double t) { return t < 1.0 ? prof(t) : 0.0; };
    // unit-coordinate mass; the far field of (-Delta)^s phi is
    // -C_{n,s} * mass * rho^{-n-2s}
    double mass = sphere_surface(n) *
                  integrate_gl([&](double t) {
                    return profile(t) * std::pow(t, n - 1.0);
                  }, 0.0, 1.0, 60);
    far_coef = -fraclap_constant(n, s) * mass;

    std::vector<double> xs, ys;
    // value at the center by the direct radial integral.  Below rmin the
    // difference p0 - p(r) ~ -p''(0) r^2 / 2 drowns in cancellation noise
    // amplified by r^{-1-2s}, so that core is added from the Taylor term.
    double p0 = profile(0.0);
    const double rmin = 1e-5;
    // Richardson second derivative at 0 (p is even, so p'(0) = 0)
    double d2p0 =
        (32.0 * (profile(5e-4) - p0) - 2.0 * (profile(1e-3) - p0)) / 3e-6;
    double core = -0.5 * d2p0 * std::pow(rmin, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    double F0 = fraclap_constant(n, s) * sphere_surface(n) *
                (integrate_geometric(
                     [&](double r) {
                       return (p0 - profile(r)) * std::pow(r, -1.0 - 2.0 * s);
                     },
                     rmin, 1.0, 12) +
                 core + p0 / (2.0 * s));
    xs.push_back(0.0);
    ys.push_back(F0);
    int N1 = feature_scale < 0.5 ? 800 : 200;
    for (int i = 1; i <= N1; ++i) {
      double rho = 2.0 * i / N1;
      xs.push_back(rho);
      ys.push_back(radial_fraclap(profile, rho, n, s));
    }
    for (int i = 1; i <= 100; ++i) {
      double rho = 2.0 * std::pow(rho_max / 2.0, i / 100.0);
      xs.push_back(rho);
      ys.push_back(radial_fraclap(profile, rho, n, s));
    }
    spline = CubicSpline(xs, ys);
  }

  double F(double rho) const {
    if (rho >= rho_max) return far_coef * std::pow(rho, -p);
    return spline(rho);
  }
};

std::shared_ptr<RadialFracCache> canonical_cache(int n, double s,
                                                 const TestFunction& tf) {
  static std::mutex mtx;
  static std::map<std::pair<int, long long>, std::shared_ptr<RadialFracCache>>
      cache;
  std::pair<int, long long> key{n, (long long)std::llround(s * 1e12)};
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto c = std::make_shared<RadialFracCache>(tf.prof, n, s, 1.0);
  cache[key] = c;
  return c;
}

}  // namespace

double TestFunction::fraclap(const Vec& x, double s) const {
  std::shared_ptr<RadialFracCache> c;
  if (canonical) {
    c = canonical_cache(dim, s, *this);
  } else {
    if (!cache_ || cache_s_ != s) {
      cache_ = std::make_shared<RadialFracCache>(prof, dim, s, feature_scale);
      cache_s_ = s;
    }
    c = std::static_pointer_cast<RadialFracCache>(cache_);
  }
  double rho = (x - center).norm() / radius;
  return std::pow(radius, -2.0 * s) * c->F(rho);
}

ScalarField TestFunction::as_field() const {
  ScalarField f;
  f.dim = dim;
  TestFunction tf = *this;
  f.eval = [tf](const Vec& x) { return tf(x); };
  f.tail = TailProfile::compact(center.norm() + radius);
  return f;
}

TestFunction make_bump(const Vec& center, double radius) {
  TestFunction tf;
  tf.center = center;
  tf.radius = radius;
  tf.dim = center.dim;
  tf.canonical = true;
  tf.nonnegative = true;
  tf.prof = [](double t) {
    if (t >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
  };
  tf.dprof = [](double t) {
    if (t >= 1.0) return 0.0;
    double q = 1.0 - t * t;
    return std::exp(1.0 - 1.0 / q) * (-2.0 * t / (q * q));
  };
  tf.d2prof = [](double t) {
    if (t >= 1.0) return 0.0;
    double q = 1.0 - t * t, t2 = t * t;
    return std::exp(1.0 - 1.0 / q) *
           (4.0 * t2 / (q * q * q * q) - 8.0 * t2 / (q * q * q) - 2.0 / (q * q));
  };
  return tf;
}

TestFunction make_annulus_bump(double r_in, double r_out, Dimension dim,
                               double w_frac) {
  if (!(r_out > r_in && r_in > 0.0))
    throw std::invalid_argument("make_annulus_bump: need 0 < r_in < r_out");
  double w = w_frac * (r_out - r_in);
  TestFunction tf;
  tf.center = Vec::zero(dim.n);
  tf.radius = r_out;
  tf.dim = dim.n;
  tf.canonical = false;
  tf.nonnegative = true;
  tf.feature_scale = w / r_out;
  // profile in t = r / r_out
  auto up = [=](double r) { return (r - r_in) / w; };
  auto dn = [=](double r) { return (r_out - r) / w; };
  tf.prof = [=](double t) {
    double r = t * r_out;
    return smooth_step(up(r)) * smooth_step(dn(r));
  };
  tf.dprof = [=](double t) {
    double r = t * r_out;
    double A = smooth_step(up(r)), B = smooth_step(dn(r));
    double dA = smooth_step_d1(up(r)) / w, dB = -smooth_step_d1(dn(r)) / w;
    return (dA * B + A * dB) * r_out;  // d/dt = r_out * d/dr
  };
  tf.d2prof = [=](double t) {
    double r = t * r_out;
    double A = smooth_step(up(r)), B = smooth_step(dn(r));
    double dA = smooth_step_d1(up(r)) / w, dB = -smooth_step_d1(dn(r)) / w;
    double d2A = smooth_step_d2(up(r)) / (w * w);
    double d2B = smooth_step_d2(dn(r)) / (w * w);
    return (d2A * B + 2.0 * dA * dB + A * d2B) * r_out * r_out;
  };
  return tf;
}

ScalarField make_smooth_cutoff(double a, double b, Dimension dim) {
  if (!(b > a && a > 0.0))
    throw std::invalid_argument("make_smooth_cutoff: need 0 < a < b");
  ScalarField f;
  f.dim = dim.n;
  f.eval = [a, b](const Vec& x) {
    return smooth_step((b - x.norm()) / (b - a));
  };
  f.tail = TailProfile::compact(b);
  return f;
}

std::vector<TestFunction> make_battery(Dimension dim, int count,
                                       unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<TestFunction> battery;
  for (int i = 0; i < count; ++i) {
    int k = 1 + (i % 6);
    double radius = std::pow(2.0, -k);
    Vec center = Vec::zero(dim.n);
    if (i % 2 == 1) {
      // annulus-centered, keeping the support inside B_1 and clear of the
      // origin by > 3 radii so pairing charts separate cleanly
      double rc = std::max(3.2 * radius, 0.25);
      if (rc + radius > 0.95) rc = 0.0;  // too big to offset: keep at origin
      if (rc > 0.0) {
        if (dim.n == 1) {
          center[0] = (unif(rng) < 0.5 ? -rc : rc);
        } else if (dim.n == 2) {
          double th = 2.0 * M_PI * unif(rng);
          center = Vec(rc * std::cos(th), rc * std::sin(th));
        } else {
          double ct = 2.0 * unif(rng) - 1.0;
          double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
          double ph = 2.0 * M_PI * unif(rng);
          center = Vec(rc * st * std::cos(ph), rc * st * std::sin(ph), rc * ct);
        }
      }
    }
    battery.push_back(make_bump(center, radius));
  }
  return battery;
}

// ---------------------------------------------------------------------------
// Pairing quadrature

namespace {

// Integrates fn over R^n against the geometry of phi: a bump-centered chart
// (uniform panels across the bump support `rad`, geometric continuation to
// R_total), plus a separate origin chart when u-type integrands may be
// singular at the origin and the bump sits away from it.
template <class F>
double integrate_two_chart(F&& fn, const Vec& c, double rad, double R_total,
                           int n, int radial_order, int sphere_order,
                           double feature = 1e300) {
  double d = c.norm();
  if (d < 1e-12) {
    int sp0 = std::min(
        120, std::max(30, (int)std::ceil(6.0 * rad / std::min(rad, feature))));
    QuadratureRule q = make_support_rule(Dimension(n), radial_order,
                                         sphere_order, rad, R_total, 40, sp0);
    return integrate_polar(q, c, fn);
  }
  double r0 = std::min(0.5 * d, 0.25);
  feature = std::min(feature, r0);
  auto w0 = [r0](const Vec& y) {
    return smooth_step(2.0 - 2.0 * y.norm() / r0);  // 1 on B_{r0/2}, 0 out B_{r0}
  };
  QuadratureRule q0 =
      make_support_rule(Dimension(n), radial_order, sphere_order, r0, r0, 40,
                        30);
  double I1 = integrate_polar(q0, Vec::zero(n), [&](const Vec& y) {
    double w = w0(y);
    return w > 0.0 ? w * fn(y) : 0.0;
  });
  // the bump chart must also resolve the cutoff's transition shell, whose
  // width r0/2 may be far below rad/30 when the bump is large
  int sp = std::min(120, std::max(30, (int)std::ceil(6.0 * rad / feature)));
  // ... and the shell subtends a wide angle from the bump center, so the
  // angular rule needs boosting as well
  int so_c = (n == 1) ? sphere_order : std::max(2 * sphere_order + 4, 24);
  QuadratureRule qc = make_support_rule(Dimension(n), radial_order, so_c, rad,
                                        R_total, 40, sp);
  double I2 = integrate_polar(qc, c, [&](const Vec& y) {
    double w = 1.0 - w0(y);
    return w > 0.0 ? w * fn(y) : 0.0;
  });
  return I1 + I2;
}

}  // namespace

PairingResult pair_adjoint(const ScalarField& u, const OperatorSpec& spec,
                           const TestFunction& phi, const EvalBudget& budget_in) {
  EvalBudget budget = budget_in.scaled();
  const int n = phi.dim;
  const int ro = budget.radial_order;
  const int so = (n == 1) ? 2 : budget.sphere_order;

  const CoefficientSet& cs = spec.coeffs;
  auto local_terms = [&](const Vec& y) {
    double ph = phi(y);
    Vec gph = phi.grad(y);
    double divb_phi = cs.div_b(y) * ph + cs.b(y).dot(gph);
    return std::pair<double, double>{-u(y) * divb_phi, u(y) * cs.c(y) * ph};
  };

  PairingResult res;

  // drift + zero-order terms live inside supp phi
  double drift = integrate_two_chart(
      [&](const Vec& y) { return local_terms(y).first; }, phi.center,
      phi.radius, phi.radius, n, ro, so);
  double zero = integrate_two_chart(
      [&](const Vec& y) { return local_terms(y).second; }, phi.center,
      phi.radius, phi.radius, n, ro, so);

  double principal = 0.0, err = 0.0;
  if (spec.kind == OperatorKind::Classical) {
    principal = integrate_two_chart(
        [&](const Vec& y) { return -u(y) * phi.lap(y); }, phi.center,
        phi.radius, phi.radius, n, ro, so);
    double coarse = integrate_two_chart(
        [&](const Vec& y) { return -u(y) * phi.lap(y); }, phi.center,
        phi.radius, phi.radius, n, std::max(4, ro - 3), std::max(2, so - 6));
    err = std::abs(principal - coarse);
  } else {
    double s = spec.s;
    double R2 = 60.0 + phi.center.norm();
    double rad2 = phi.radius;
    double feature = 1e300;
    if (u.tail.kind == TailKind::Compact) {
      // the integrand vanishes outside supp u, so cover that whole region
      // with uniform panels instead of straddling u's edge geometrically
      R2 = std::max(phi.radius,
                    u.tail.support_radius + phi.center.norm() + 1e-9);
      rad2 = R2;
      feature = phi.radius;
    }
    auto fn = [&](const Vec& y) { return u(y) * phi.fraclap(y, s); };
    principal =
        integrate_two_chart(fn, phi.center, rad2, R2, n, ro, so, feature);
    double coarse = integrate_two_chart(fn, phi.center, rad2, R2, n,
                                        std::max(4, ro - 3), std::max(2, so - 6), feature);
    err = std::abs(principal - coarse);
    // unseen tail: |u| near the sphere R2 times the kernel-decay weight
    Vec probe = Vec::zero(n);
    probe[0] = R2;
    double utail = std::abs(u(probe + phi.center));
    double mass_w = std::abs(phi.fraclap(probe + phi.center, s)) *
                    std::pow(R2, n + 2.0 * s);
    err += utail * mass_w * sphere_surface(n) * std::pow(R2, -2.0 * s) /
           (2.0 * s);
  }

  res.principal = principal;
  res.drift = drift;
  res.zero_order = zero;
  res.value = principal + drift + zero;
  res.err = err + budget.target_tol;
  return res;
}

double pair_rhs(const MeasureApprox& rhs, const std::vector<SymbolicAtom>& atoms,
                const TestFunction& phi) {
  double v = 0.0;
  for (const auto& [loc, mass] : rhs.atoms) v += mass * phi(loc);
  for (const auto& a : atoms) v += a.pair(phi);
  if (rhs.has_density) {
    QuadratureRule q = make_support_rule(Dimension(phi.dim), 10,
                                         phi.dim == 1 ? 2 : 24, phi.radius,
                                         phi.radius);
    v += integrate_polar(q, phi.center,
                         [&](const Vec& y) { return rhs.density(y) * phi(y); });
  }
  return v;
}

InequalityReport check_distributional_inequality(
    const ScalarField& u, const OperatorSpec& spec, const MeasureApprox& rhs,
    const std::vector<SymbolicAtom>& atoms,
    const std::vector<TestFunction>& battery, CheckMode mode,
    double extra_tol) {
  InequalityReport rep;
  EvalBudget budget;
  for (size_t i = 0; i < battery.size(); ++i) {
    PairingResult pr = pair_adjoint(u, spec, battery[i], budget);
    double rv = pair_rhs(rhs, atoms, battery[i]);
    double tol = 10.0 * pr.err + extra_tol;
    double margin = pr.value - rv;
    bool pass = false;
    switch (mode) {
      case CheckMode::GreaterEqual: pass = margin >= -tol; break;
      case CheckMode::LessEqual: pass = margin <= tol; break;
      case CheckMode::Equality: pass = std::abs(margin) <= tol; break;
    }
    rep.entries.push_back({(int)i, pr.value, rv, margin, tol, pass});
    rep.passed = rep.passed && pass;
  }
  return rep;
}

InequalityReport compose_max(const ScalarField& u, const ScalarField& v,
                             const ScalarField& f, const ScalarField& g,
                             const OperatorSpec& spec,
                             const std::vector<TestFunction>& battery,
                             bool precheck) {
  EvalBudget budget;
  InequalityReport rep;

  if (precheck) {
    MeasureApprox mf, mg;
    mf.density = f;
    mf.has_density = true;
    mg.density = g;
    mg.has_density = true;
    auto ru = check_distributional_inequality(u, spec, mf, {}, battery,
                                              CheckMode::LessEqual);
    auto rv = check_distributional_inequality(v, spec, mg, {}, battery,
                                              CheckMode::LessEqual);
    if (!ru.passed || !rv.passed)
      throw std::invalid_argument(
          "compose_max: precondition Lu<=f / Lv<=g failed distributionally");
  }

  ScalarField w;
  w.dim = u.dim;
  w.eval = [u, v](const Vec& x) { return std::max(u(x), v(x)); };
  if (u.tail.kind == TailKind::Compact && v.tail.kind == TailKind::Compact)
    w.tail = TailProfile::compact(
        std::max(u.tail.support_radius, v.tail.support_radius));
  else
    w.tail = TailProfile::algebraic(
        u.tail.amplitude + v.tail.amplitude + 1.0,
        std::min(u.tail.kind == TailKind::Algebraic ? u.tail.decay_p : 0.0,
                 v.tail.kind == TailKind::Algebraic ? v.tail.decay_p : 0.0));

  for (size_t i = 0; i < battery.size(); ++i) {
    const TestFunction& phi = battery[i];
    PairingResult lhs = pair_adjoint(w, spec, phi, budget);
    double kappa = 1e-9 * (1.0 + std::abs(u(phi.center)) + std::abs(v(phi.center)));
    QuadratureRule q =
        make_support_rule(Dimension(phi.dim), 10, phi.dim == 1 ? 2 : 24,
                          phi.radius, phi.radius);
    double rhs = integrate_polar(q, phi.center, [&](const Vec& y) {
      double du = u(y) - v(y);
      double fv = f(y), gv = g(y);
      double sel = (du > kappa) ? fv : (du < -kappa ? gv : std::max(fv, gv));
      return sel * phi(y);
    });
    double tol = 10.0 * lhs.err;
    double margin = lhs.value - rhs;
    bool pass = margin <= tol;
    rep.entries.push_back({(int)i, lhs.value, rhs, margin, tol, pass});
    rep.passed = rep.passed && pass;
  }
  return rep;
}

}  // namespace flk
