#include "flk/fraclap.hpp"

#include "flk/distrib.hpp"

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstdlib>
#include <limits>
#include <mutex>

namespace flk {

double fraclap_constant(int n, double s) {
  // |Gamma(-s)| = Gamma(1-s)/s for s in (0,1)
  return std::pow(4.0, s) * std::tgamma(0.5 * n + s) * s /
         (std::pow(M_PI, 0.5 * n) * std::tgamma(1.0 - s));
}

double fundamental_constant(int n, double s) {
  if (n <= 2.0 * s)
    throw std::invalid_argument("fundamental_constant: requires n > 2s");
  return std::tgamma(0.5 * n - s) /
         (std::pow(4.0, s) * std::pow(M_PI, 0.5 * n) * std::tgamma(s));
}

int EvalBudget::global_multiplier() {
  static int mult = [] {
    const char* e = std::getenv("FLK_QUAD_BUDGET");
    if (!e) return 1;
    int m = std::atoi(e);
    return m >= 1 ? m : 1;
  }();
  return mult;
}

EvalBudget EvalBudget::scaled() const {
  EvalBudget b = *this;
  int m = global_multiplier();
  b.radial_order *= m;
  b.sphere_order *= m;
  return b;
}

namespace {

// One full pass of near + annulus quadrature (without the tail or C_{n,s}).
double principal_integral(const ScalarField& u, const Vec& x, double s,
                          double rho, double R, int radial_order,
                          int sphere_order) {
  const int n = x.dim;
  const double ux = u(x);
  const double p = n + 2.0 * s;

  // Symmetrized near field: the second difference is O(|y|^2) for C^2 fields,
  // so the radial integrand behaves like r^{1-2s}; dyadic grading absorbs it.
  // Below rmin the second difference drowns in floating-point cancellation
  // (noise amplified by r^{-n-2s}), so the core is added analytically from the
  // Taylor expansion 2u(x) - u(x+y) - u(x-y) ~ -|y|^2 w^T D^2u(x) w.
  const double rmin = 1e-4 * rho;
  QuadratureRule near = make_polar_rule(Dimension(n), radial_order,
                                        sphere_order, rmin, rho);
  double near_val = 0.0;
  for (const auto& [r, wr] : near.radial) {
    double shell = 0.0;
    for (const auto& [omega, ws] : near.sphere) {
      double d2 = 2.0 * ux - u(x + r * omega) - u(x - r * omega);
      shell += ws * d2;
    }
    double rpow = std::pow(r, n - 1);
    near_val += wr * rpow * shell * 0.5 / std::pow(r, p);
  }
  {
    auto lap_fd = [&](double hh) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        Vec e = Vec::zero(n);
        e[i] = hh;
        acc += (u(x + e) - 2.0 * ux + u(x - e)) / (hh * hh);
      }
      return acc;
    };
    double l1 = lap_fd(0.3 * rho), l2 = lap_fd(0.15 * rho);
    double lap = l2 + (l2 - l1) / 3.0;  // Richardson: h^2 term eliminated
    near_val += -0.5 * lap * (sphere_surface(n) / n) *
                std::pow(rmin, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
  }

  // Poles of u inside the annulus: excise smooth charts around each so the
  // product rule never straddles the blow-up of u(x+y).
  struct PoleChart {
    Vec z;        // pole location in absolute coordinates
    Vec c;        // pole location in y-coordinates
    double rz;    // inner chart radius (cutoff w supported in B_rz)
    double rbig;  // outer chart radius (cutoff W supported in B_rbig)
  };
  std::vector<PoleChart> charts;
  for (const Vec& z : u.poles) {
    Vec cz = z - x;
    double d = cz.norm();
    if (d <= rho || d >= R) continue;
    double avail = std::min(d - rho, R - d);
    charts.push_back({z, cz, 0.25 * avail, avail});
  }
  auto cut = [](double r, double rad) {
    return smooth_step(2.0 - 2.0 * r / rad);  // 1 on [0,rad/2], 0 past rad
  };

  QuadratureRule far = make_polar_rule(Dimension(n), radial_order,
                                       sphere_order, rho, R);
  double far_val = 0.0;
  for (const auto& [r, wr] : far.radial) {
    double shell = 0.0;
    for (const auto& [omega, ws] : far.sphere) {
      Vec y = r * omega;
      double w = 1.0;
      for (const auto& pc : charts) w *= 1.0 - cut((y - pc.c).norm(), pc.rbig);
      if (w > 0.0) shell += ws * w * (ux - u(x + y));
    }
    far_val += wr * std::pow(r, n - 1) * shell / std::pow(r, p);
  }

  for (const auto& pc : charts) {
    // u is sampled at z + r*omega directly: forming x + (c + r*omega) would
    // cancel onto the pole itself for tiny r
    auto f = [&](const Vec& y, double r, const Vec& omega) {
      return (ux - u(pc.z + r * omega)) / std::pow(y.norm(), p);
    };
    // graded inner chart straight onto the pole
    QuadratureRule qa = make_support_rule(Dimension(n), radial_order,
                                          sphere_order, pc.rz, pc.rz, 40, 30);
    far_val += integrate_polar_rw(
        qa, pc.c, [&](const Vec& y, double r, const Vec& omega) {
          double w = cut(r, pc.rz);
          return w > 0.0 ? w * f(y, r, omega) : 0.0;
        });
    // transition shell between the inner chart and the polar background
    QuadratureRule qb =
        make_support_rule(Dimension(n), radial_order, sphere_order, pc.rbig,
                          pc.rbig, 10, 48);
    far_val += integrate_polar_rw(
        qb, pc.c, [&](const Vec& y, double r, const Vec& omega) {
          double w = (1.0 - cut(r, pc.rz)) * cut(r, pc.rbig);
          return w > 0.0 ? w * f(y, r, omega) : 0.0;
        });
  }
  return near_val + far_val;
}

}  // namespace

EvalResult eval_fraclap(const ScalarField& u, const Vec& x, FracOrder s,
                        const EvalBudget& budget_in) {
  EvalBudget budget = budget_in.scaled();
  const int n = x.dim;
  if (n < 1 || n > 3)
    throw std::invalid_argument("eval_fraclap: dim must be in {1,2,3}");

  double rho = budget.near_rho;
  if (u.smooth_distance) {
    double d = u.smooth_distance(x);
    if (!(d > 0.0))
      throw std::invalid_argument("eval_fraclap: field not smooth at x");
    rho = std::min(rho, 0.45 * d);
  }

  // Far radius: for compact support push R past the support so the tail is
  // exactly u(x)*|y|^{-n-2s}; otherwise use the budget default.
  double R = budget.far_R;
  if (u.tail.kind == TailKind::Compact)
    R = std::max(R, u.tail.support_radius + x.norm() + 1.0);

  double base = principal_integral(u, x, s.s, rho, R, budget.radial_order,
                                   budget.sphere_order);
  double fine = principal_integral(u, x, s.s, rho, R, budget.radial_order + 4,
                                   budget.sphere_order + 8);

  // Analytic tail of the u(x) part over |y| > R.
  double tail = u(x) * sphere_surface(n) * std::pow(R, -2.0 * s.s) / (2.0 * s.s);

  // Truncation error from the unseen -u(x+y) part.
  double trunc = 0.0;
  if (u.tail.kind == TailKind::Algebraic) {
    double A = u.tail.amplitude, p = u.tail.decay_p;
    double Reff = std::max(R - x.norm(), 0.5 * R);
    if (p + 2.0 * s.s > 0.0)
      trunc = A * sphere_surface(n) * std::pow(Reff, -(p + 2.0 * s.s)) /
              (p + 2.0 * s.s);
    else
      throw std::invalid_argument("eval_fraclap: tail incompatible with s");
  } else if (u.tail.kind == TailKind::WeightBound) {
    trunc = 2.0 * u.tail.weight_bound;  // weight comparison beyond R
  }

  double C = fraclap_constant(n, s.s);
  EvalResult res;
  res.value = C * (fine + tail);
  res.err = C * (std::abs(fine - base) + trunc) + budget.target_tol;
  return res;
}

double eval_laplacian(const ScalarField& u, const Vec& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("eval_laplacian: h <= 0");
  auto lap = [&](double hh) {
    double s = 0.0, ux = u(x);
    for (int i = 0; i < x.dim; ++i) {
      Vec e = Vec::zero(x.dim);
      e[i] = hh;
      s += (u(x + e) - 2.0 * ux + u(x - e)) / (hh * hh);
    }
    return s;
  };
  double c1 = lap(h), c2 = lap(0.5 * h);
  return -(c2 + (c2 - c1) / 3.0);  // Richardson: h^2 error eliminated
}

Vec eval_gradient(const ScalarField& u, const Vec& x, double h) {
  if (h <= 0.0) h = 1e-4 * (1.0 + x.norm());
  Vec g = Vec::zero(x.dim);
  for (int i = 0; i < x.dim; ++i) {
    auto diff = [&](double hh) {
      Vec e = Vec::zero(x.dim);
      e[i] = hh;
      return (u(x + e) - u(x - e)) / (2.0 * hh);
    };
    double d1 = diff(h), d2 = diff(0.5 * h);
    g[i] = d2 + (d2 - d1) / 3.0;
  }
  return g;
}

double eval_full_operator(const ScalarField& u, const OperatorSpec& spec,
                          const Vec& x, const EvalBudget& budget) {
  double principal;
  if (spec.kind == OperatorKind::Fractional)
    principal = eval_fraclap(u, x, FracOrder(spec.s), budget).value;
  else
    principal = eval_laplacian(u, x, 1e-4 * (1.0 + x.norm()));
  Vec g = eval_gradient(u, x);
  return principal + spec.coeffs.b(x).dot(g) + spec.coeffs.c(x) * u(x);
}

double angular_kernel(int n, double s, double t) {
  const double p = n + 2.0 * s;
  if (n == 1)
    return std::pow(1.0 - t, -p) + std::pow(1.0 + t, -p);
  if (n == 3) {
    // int_{S^2} |e1 - t w|^{-p} dw = 2pi/(t(p-2)) [(1-t)^{2-p} - (1+t)^{2-p}]
    return 2.0 * M_PI / (t * (p - 2.0)) *
           (std::pow(1.0 - t, 2.0 - p) - std::pow(1.0 + t, 2.0 - p));
  }
  if (n == 2) {
    // 2 int_0^pi (1 - 2t cos th + t^2)^{-p/2} dth, graded toward th = 0 where
    // the integrand peaks as t -> 1.  The quadratic is evaluated in the exact
    // nonnegative form (1-t)^2 + 4t sin^2(th/2); the naive expansion rounds
    // negative near (t, th) = (1, 0).
    double h = 1.0 - t;
    return 2.0 * integrate_graded_both(
                     [&](double th) {
                       double sh = std::sin(0.5 * th);
                       double q = h * h + 4.0 * t * sh * sh;
                       return std::pow(q, -0.5 * p);
                     },
                     0.0, M_PI, 10, 48);
  }
  throw std::invalid_argument("angular_kernel: n in {1,2,3}");
}

namespace {

// (t, weight, A(t), t^{n-1}, t^{2s-1}) nodes for the radial reduction on
// (0,1), dyadically graded at both endpoints.  The angular kernel is cached
// per (n, s, order, levels) since it is by far the dominant cost for n = 2.
struct RadialNodes {
  std::vector<std::array<double, 5>> nodes;
  // The node set stops at t = 1 - end_eps: closer to 1 the profile
  // differences drown in floating-point cancellation amplified by
  // A(t) ~ (1-t)^{1-n-2s}.  That end strip is added analytically via
  // bracket ~ -(u' r (n+1-2s) + u'' r^2) (1-t)^2, using
  // end_integral = int_{1-end_eps}^{1} A(t) (1-t)^2 dt.
  double end_eps = 0.0;
  double end_integral = 0.0;
};

const RadialNodes& radial_reduction_nodes(int n, double s, int order,
                                          int levels) {
  static std::mutex mtx;
  static std::vector<std::pair<std::array<double, 4>, RadialNodes>> cache;
  std::array<double, 4> key = {(double)n, s, (double)order, (double)levels};
  {
    std::lock_guard<std::mutex> lock(mtx);
    for (const auto& [k, v] : cache)
      if (k == key) return v;
  }
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);
  RadialNodes rn;
  auto add_panel = [&](double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (size_t i = 0; i < gx.size(); ++i) {
      double t = mid + half * gx[i];
      rn.nodes.push_back({t, half * gw[i], angular_kernel(n, s, t),
                          std::pow(t, n - 1.0), std::pow(t, 2.0 * s - 1.0)});
    }
  };
  // [0, 1/2] graded toward 0: breakpoints 0.5*2^{-k}
  add_panel(0.0, 0.5 * std::pow(0.5, levels));
  for (int k = levels - 1; k >= 0; --k)
    add_panel(0.5 * std::pow(0.5, k + 1), 0.5 * std::pow(0.5, k));
  // [1/2, 1 - end_eps] graded toward 1, with the depth capped so that the
  // cancellation noise 1e-16 * A(t) integrated over the deepest panel stays
  // below ~1e-11
  // A(t) ~ (1-t)^{n-1-p}, so per-level noise grows like 2^{2s k}
  double p = n + 2.0 * s;
  int lev1 = std::max(8, std::min(levels, (int)(16.6 / (2.0 * s))));
  for (int k = 0; k < lev1; ++k)
    add_panel(1.0 - 0.5 * std::pow(0.5, k), 1.0 - 0.5 * std::pow(0.5, k + 1));
  rn.end_eps = 0.5 * std::pow(0.5, lev1);
  // end strip moment int A(t) (1-t)^2 dt: graded quadrature of the exact
  // kernel, which involves no profile evaluations and hence no cancellation.
  // When the depth cap did not bite, the strip is ~2^-41 wide and its moment
  // (~eps^{4-p}) is far below double precision: skip it.
  if (lev1 < levels) {
    double E = 0.0;
    double hi = rn.end_eps;
    // stop the grading before 1 - t hits the resolution of doubles, then add
    // the remainder from the asymptote A(t) ~ c_A (1-t)^{1-p}
    while (hi >= 8e-15) {
      E += integrate_gl(
          [&](double t) {
            double h1 = 1.0 - t;
            return angular_kernel(n, s, t) * h1 * h1;
          },
          1.0 - hi, 1.0 - 0.5 * hi, 10);
      hi *= 0.5;
    }
    double cA = angular_kernel(n, s, 1.0 - hi) * std::pow(hi, p - (n - 1.0));
    E += cA * std::pow(hi, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    rn.end_integral = E;
  }
  std::lock_guard<std::mutex> lock(mtx);
  cache.push_back({key, std::move(rn)});
  return cache.back().second;
}

}  // namespace

double radial_fraclap(const std::function<double(double)>& profile, double r,
                      int n, double s, int order, int levels) {
  if (!(r > 0.0)) throw std::invalid_argument("radial_fraclap: r <= 0");
  const double ur = profile(r);
  const auto& rn = radial_reduction_nodes(n, s, order, levels);
  double I = 0.0;
  for (const auto& nd : rn.nodes) {
    double t = nd[0], w = nd[1], A = nd[2];
    double bracket = (ur - profile(r * t)) * nd[3] +
                     (ur - profile(r / t)) * nd[4];
    I += w * A * bracket;
  }
  // analytic end strip t in (1 - end_eps, 1): Richardson finite differences
  // for u'(r), u''(r)
  {
    auto d1 = [&](double hh) {
      return (profile(r + hh) - profile(r - hh)) / (2.0 * hh);
    };
    auto d2 = [&](double hh) {
      return (profile(r + hh) - 2.0 * ur + profile(r - hh)) / (hh * hh);
    };
    double h = 1e-3 * r;
    double du = (4.0 * d1(0.5 * h) - d1(h)) / 3.0;
    double d2u = (4.0 * d2(0.5 * h) - d2(h)) / 3.0;
    I += -(du * r * (n + 1.0 - 2.0 * s) + d2u * r * r) * rn.end_integral;
  }
  return fraclap_constant(n, s) * std::pow(r, -2.0 * s) * I;
}

double power_fraclap_constant(int n, double s, double alpha) {
  if (!(alpha > 0.0 && alpha < n - 2.0 * s))
    throw std::invalid_argument(
        "power_fraclap_constant: need 0 < alpha < n - 2s");
  return radial_fraclap(
      [alpha](double rr) { return std::pow(rr, -alpha); }, 1.0, n, s);
}

SpectralResult spectral_oracle_full(const ScalarField& u, const Vec& x,
                                    FracOrder s, double L, int N) {
  const int n = x.dim;
  if (n < 1 || n > 2)
    throw std::invalid_argument("spectral_oracle: n in {1,2} only");
  if (N < 8) throw std::invalid_argument("spectral_oracle: too few points");

  const double h = L / N;
  const size_t total = (n == 1) ? (size_t)N : (size_t)N * N;
  std::vector<std::complex<double>> data(total);
  for (int i = 0; i < N; ++i) {
    double xi = -0.5 * L + i * h;
    if (n == 1) {
      data[i] = u(Vec(xi, 1));
    } else {
      for (int j = 0; j < N; ++j) {
        double xj = -0.5 * L + j * h;
        data[(size_t)i * N + j] = u(Vec(xi, xj));
      }
    }
  }

  fftw_plan plan;
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  if (n == 1)
    plan = fftw_plan_dft_1d(N, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE);
  else
    plan = fftw_plan_dft_2d(N, N, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  auto freq = [&](int k) {
    int kk = (k <= N / 2) ? k : k - N;
    return 2.0 * M_PI * kk / L;
  };

  // Multiplier pass + alias estimate (energy in the top quarter of modes).
  double total_energy = 0.0, high_energy = 0.0;
  const double cutoff = 0.75 * M_PI * N / L;  // 3/4 of Nyquist
  for (int i = 0; i < N; ++i) {
    double ki = freq(i);
    if (n == 1) {
      double k2 = std::abs(ki);
      double e = std::norm(data[i]);
      total_energy += e;
      if (k2 > cutoff) high_energy += e;
      data[i] *= std::pow(k2, 2.0 * s.s);
    } else {
      for (int j = 0; j < N; ++j) {
        double kj = freq(j);
        double kn = std::sqrt(ki * ki + kj * kj);
        auto& c = data[(size_t)i * N + j];
        double e = std::norm(c);
        total_energy += e;
        if (kn > cutoff) high_energy += e;
        c *= std::pow(kn, 2.0 * s.s);
      }
    }
  }

  // Direct inverse-DFT at the arbitrary point x (phases relative to -L/2).
  std::complex<double> acc = 0.0;
  if (n == 1) {
    double t = x[0] + 0.5 * L;
    for (int i = 0; i < N; ++i)
      acc += data[i] * std::polar(1.0, freq(i) * t);
  } else {
    double t0 = x[0] + 0.5 * L, t1 = x[1] + 0.5 * L;
    std::vector<std::complex<double>> row(N, 0.0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        row[i] += data[(size_t)i * N + j] * std::polar(1.0, freq(j) * t1);
    for (int i = 0; i < N; ++i) acc += row[i] * std::polar(1.0, freq(i) * t0);
  }

  SpectralResult r;
  r.value = acc.real() / (double)total;
  r.alias_fraction = total_energy > 0 ? high_energy / total_energy : 0.0;
  r.reliable = r.alias_fraction < 1e-8;
  return r;
}

double spectral_oracle(const ScalarField& u, const Vec& x, FracOrder s,
                       double grid_extent, int grid_points) {
  return spectral_oracle_full(u, x, s, grid_extent, grid_points).value;
}

}  // namespace flk
