#include "flk/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "flk/barriers.hpp"
#include "flk/distrib.hpp"
#include "flk/field_core.hpp"
#include "flk/fraclap.hpp"
#include "flk/mollify.hpp"
#include "flk/potentials.hpp"
#include "flk/principles.hpp"

namespace flk {

using json = nlohmann::ordered_json;

namespace {

double pd(const json& p, const std::string& k, double def) {
  return p.contains(k) ? p.at(k).get<double>() : def;
}
int pi(const json& p, const std::string& k, int def) {
  return p.contains(k) ? p.at(k).get<int>() : def;
}
std::string ps(const json& p, const std::string& k, const std::string& def) {
  return p.contains(k) ? p.at(k).get<std::string>() : def;
}
std::vector<double> pv(const json& p, const std::string& k,
                       std::vector<double> def) {
  if (!p.contains(k)) return def;
  return p.at(k).get<std::vector<double>>();
}

void add_margin(Report& r, const std::string& label, double value, double tol,
                bool pass) {
  r.margins.push_back({label, value, tol, pass});
}
// |value - target| <= tol convention
void add_close(Report& r, const std::string& label, double value,
               double target, double tol) {
  add_margin(r, label, value - target, tol, std::abs(value - target) <= tol);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

ScalarField builtin_field(const std::string& name, int n, double s) {
  if (name == "constant") {
    ScalarField f;
    f.dim = n;
    f.eval = [](const Vec&) { return 1.0; };
    f.tail = TailProfile::bounded(1.0);
    return f;
  }
  if (name == "bump") return make_bump(Vec::zero(n), 1.0).as_field();
  if (name == "gaussian") {
    ScalarField f;
    f.dim = n;
    f.eval = [](const Vec& x) { return std::exp(-x.norm2()); };
    f.tail = TailProfile::algebraic(1.0, 30.0);
    return f;
  }
  if (name == "fundamental")
    return fundamental_solution(Dimension(n), FundKind::frac(s));
  throw std::invalid_argument("unknown builtin field: " + name);
}

Vec unit_dir(int n, double angle) {
  if (n == 1) return Vec(std::cos(angle) >= 0.0 ? 1.0 : -1.0, 1);
  if (n == 2) return Vec(std::cos(angle), std::sin(angle));
  double z = std::sin(0.7 * angle);
  double st = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec(st * std::cos(angle), st * std::sin(angle), z);
}

// ------------------------------------------------------------------ verifiers

void run_fraclap_eval(const Scenario& s, Report& rep) {
  const json& p = s.parameters;
  std::string mode = ps(p, "mode", "point");
  EvalBudget budget;

  if (mode == "fundamental") {
    int n = pi(p, "n", 2);
    std::vector<double> s_list = pv(p, "s_list", {0.4, 0.75});
    double tol = pd(p, "tol", 1e-3);
    std::vector<double> radii = pv(
        p, "radii", {0.5, 0.62, 0.75, 0.9, 1.05, 1.2, 1.35, 1.5, 1.65, 1.8,
                     1.9, 2.0});
    for (double sv : s_list) {
      ScalarField Phi = fundamental_solution(Dimension(n), FundKind::frac(sv));
      rep.provenance.emplace_back("C_frac(n," + fmt(sv) + ")",
                                  fraclap_constant(n, sv));
      rep.provenance.emplace_back("C_fund(n," + fmt(sv) + ")",
                                  fundamental_constant(n, sv));
      for (size_t i = 0; i < radii.size(); ++i) {
        Vec x = radii[i] * unit_dir(n, 0.7 * (double)i + 0.3);
        EvalResult e = eval_fraclap(Phi, x, FracOrder(sv), budget);
        add_close(rep, "s=" + fmt(sv) + " |x|=" + fmt(radii[i]), e.value, 0.0,
                  tol);
      }
    }
    return;
  }

  if (mode == "dual") {
    std::vector<double> n_list = pv(p, "n_list", {1, 2});
    std::vector<double> s_list = pv(p, "s_list", {0.3, 0.5, 0.8});
    double rel_tol = pd(p, "rel_tol", 1e-3);
    int bumps = pi(p, "bumps", 5);
    const double radii[5] = {0.8, 1.0, 1.2, 0.9, 1.1};
    const double offs[5] = {0.0, 0.3, -0.2, 0.15, -0.1};
    for (double nd : n_list) {
      int n = (int)nd;
      double L = n == 1 ? pd(p, "grid_extent_1d", 200.0)
                        : pd(p, "grid_extent_2d", 20.0);
      int N = n == 1 ? pi(p, "grid_points_1d", 16384)
                     : pi(p, "grid_points_2d", 2048);
      for (int b = 0; b < bumps && b < 5; ++b) {
        Vec c = Vec::zero(n);
        c[0] = offs[b];
        ScalarField u = make_bump(c, radii[b]).as_field();
        Vec x = c;
        x[0] += 0.25 * radii[b];
        for (double sv : s_list) {
          EvalResult e = eval_fraclap(u, x, FracOrder(sv), budget);
          SpectralResult o = spectral_oracle_full(u, x, FracOrder(sv), L, N);
          double rel = std::abs(e.value - o.value) /
                       std::max(std::abs(o.value), 1e-12);
          add_margin(rep,
                     "n=" + std::to_string(n) + " bump " + std::to_string(b) +
                         " s=" + fmt(sv) +
                         (o.reliable ? "" : " [oracle aliased]"),
                     rel, rel_tol, rel <= rel_tol && o.reliable);
        }
      }
    }
    return;
  }

  // mode == "point": direct evaluation of a builtin field
  int n = pi(p, "n", 2);
  double sv = pd(p, "s", 0.5);
  std::string field = ps(p, "field", "constant");
  std::vector<double> pt = pv(p, "point", std::vector<double>(n, 0.25));
  Vec x = Vec::zero(n);
  for (int i = 0; i < n && i < (int)pt.size(); ++i) x[i] = pt[i];
  ScalarField u = builtin_field(field, n, sv);
  EvalResult e = eval_fraclap(u, x, FracOrder(sv), budget);
  rep.provenance.emplace_back("value", e.value);
  rep.provenance.emplace_back("err", e.err);
  if (field == "constant")
    add_close(rep, "constant field -> 0", e.value, 0.0, pd(p, "tol", 1e-6));
  else
    add_margin(rep, field + " eval err", e.err, pd(p, "tol", 1e-4),
               e.err <= pd(p, "tol", 1e-4));
}

void run_poisson(const Scenario& s, Report& rep) {
  const json& p = s.parameters;
  int n = pi(p, "n", 2);
  double sv = pd(p, "s", 0.75);
  double t = pd(p, "t", 1.0);
  double mass_tol = pd(p, "mass_tol", 1e-4);
  double repr_tol = pd(p, "repr_tol", 1e-3);
  PoissonKernel k(t, FracOrder(sv), Dimension(n));
  rep.provenance.emplace_back("c(n,s)", k.c);

  std::vector<Vec> pts = {Vec::zero(n), 0.3 * unit_dir(n, 0.0),
                          0.45 * unit_dir(n, 2.1)};
  for (size_t i = 0; i < pts.size(); ++i) {
    double mass = poisson_kernel_mass(k, pts[i]);
    add_close(rep, "kernel mass at point " + std::to_string(i), mass, 1.0,
              mass_tol);
  }

  // reproduction of translated fundamental solutions (s-harmonic in B_t)
  std::vector<double> src = pv(p, "source_radii", {4.0, 3.5});
  for (size_t f = 0; f < src.size(); ++f) {
    Vec z = src[f] * unit_dir(n, 0.4 + 1.3 * (double)f);
    ScalarField Phi = fundamental_solution(Dimension(n), FundKind::frac(sv));
    ScalarField u;
    u.dim = n;
    u.eval = [Phi, z](const Vec& y) { return Phi(y - z); };
    u.tail = Phi.tail;
    for (size_t i = 0; i < 2; ++i) {
      Vec x = (0.15 + 0.2 * (double)i) * unit_dir(n, 1.0 + (double)i);
      double ext = poisson_extend(u, k, x);
      add_close(rep,
                "reproduction field " + std::to_string(f) + " point " +
                    std::to_string(i),
                ext, u(x), repr_tol);
    }
  }
}

CoefficientSet rotation_drift(int n, double scale, double M) {
  CoefficientSet cs = CoefficientSet::zero(n);
  if (n >= 2 && scale != 0.0) {
    cs.b = [n, scale](const Vec& x) {
      Vec v = Vec::zero(n);
      v[0] = scale * x[1];
      v[1] = -scale * x[0];
      return v;
    };
    cs.grad_b = [scale](const Vec&) {
      Mat3 g{};
      g[0][1] = scale;
      g[1][0] = -scale;
      return g;
    };
  }
  cs.c = [M](const Vec&) { return M; };
  cs.bound_M = M;
  return cs;
}

void run_barrier(const Scenario& s, Report& rep) {
  const json& p = s.parameters;
  EvalBudget budget;
  std::vector<std::string> families =
      p.contains("families")
          ? p.at("families").get<std::vector<std::string>>()
          : std::vector<std::string>{ps(p, "family", "fractional")};
  std::vector<double> M_list = pv(p, "M_list", {pd(p, "M", 1.0)});
  std::vector<double> eps_list = pv(p, "eps_list", {pd(p, "eps", 1e-2)});
  double r0_threshold = pd(p, "r0_threshold", 1.0 / 16.0);
  double sv = pd(p, "s", 0.75);
  double drift_scale = pd(p, "drift_scale", -1.0);  // default: M

  for (const std::string& fam : families) {
    BarrierFamily family;
    int n;
    double alpha;
    if (fam == "classical-n2-log") {
      family = BarrierFamily::ClassicalN2Log;
      n = 2;
      alpha = pd(p, "alpha", 0.5);
    } else if (fam == "classical-n3-power") {
      family = BarrierFamily::ClassicalN3Power;
      n = 3;
      alpha = pd(p, "alpha", 0.5);
    } else if (fam == "fractional") {
      family = BarrierFamily::FractionalPower;
      n = pi(p, "n", 2);
      alpha = pd(p, "alpha", (n - 2.0 * sv) / 2.0);
    } else {
      throw std::invalid_argument("unknown barrier family: " + fam);
    }
    for (double M : M_list) {
      double scale = drift_scale >= 0.0 ? drift_scale : M;
      CoefficientSet coeffs = rotation_drift(n, scale, M);
      std::vector<double> r0s;
      for (double eps : eps_list) {
        Barrier b = make_barrier(family, eps, alpha, M, Dimension(n), sv);
        BarrierCertification cert =
            certify_barrier_inequality(b, coeffs, {}, budget);
        r0s.push_back(cert.passed ? cert.r0 : 0.0);
        std::string tag = fam + " M=" + fmt(M) + " eps=" + fmt(eps);
        add_margin(rep, tag + " r0", cert.r0, r0_threshold,
                   cert.passed && cert.r0 >= r0_threshold);
        rep.provenance.emplace_back(tag + " r0", cert.r0);

        if (pd(p, "mollified", 0.0) != 0.0 &&
            family == BarrierFamily::FractionalPower) {
          double delta = pd(p, "delta_over_eps", 0.25) * eps;
          MollifierKernel kern(delta, Dimension(n));
          std::vector<Vec> grid;
          std::vector<double> radii = {eps - delta, eps - 0.5 * delta, eps,
                                       eps + delta, eps + 2.0 * delta,
                                       2.0 * eps, 4.0 * eps,
                                       0.5 * cert.r0, cert.r0};
          for (double rr : radii)
            for (int a = 0; a < 8; ++a)
              grid.push_back(rr * unit_dir(n, 0.35 + a * M_PI / 4.0));
          MollifiedBarrierReport mrep =
              certify_mollified_barrier(b, coeffs, kern, grid);
          add_margin(rep, tag + " mollified worst margin", mrep.worst_margin,
                     1e-6, mrep.passed);
        }
      }
      if (r0s.size() >= 2)
        add_close(rep, fam + " M=" + fmt(M) + " r0 agreement across eps",
                  r0s.back(), r0s.front(), 1e-12);
    }
  }
}

void run_mollifier(const Scenario& s, Report& rep) {
  const json& p = s.parameters;
  int n = pi(p, "n", 2);
  // Lipschitz cap, positivity set B_1
  ScalarField u;
  u.dim = n;
  u.eval = [](const Vec& x) { return std::max(0.0, 1.0 - x.norm()); };
  u.tail = TailProfile::compact(1.0);

  // linear drift b = A x with constant Jacobian
  CoefficientSet cs = CoefficientSet::zero(n);
  cs.b = [n](const Vec& x) {
    Vec v = Vec::zero(n);
    v[0] = 0.1 * x[0] + 0.3 * x[1];
    v[1] = -0.3 * x[0] + 0.1 * x[1];
    return v;
  };
  cs.grad_b = [](const Vec&) {
    Mat3 g{};
    g[0][0] = 0.1;
    g[0][1] = 0.3;
    g[1][0] = -0.3;
    g[1][1] = 0.1;
    return g;
  };
  cs.bound_M = 1.0;

  std::vector<Vec> grid;
  int nrad = pi(p, "grid_radii", 10), nang = pi(p, "grid_angles", 10);
  for (int i = 1; i <= nrad; ++i)
    for (int a = 0; a < nang; ++a)
      grid.push_back((0.8 * i / nrad) *
                     unit_dir(n, 2.0 * M_PI * a / nang + 0.13 * i));

  double delta0 = pd(p, "delta", 0.05);
  MollifierKernel kern(delta0, Dimension(n));
  CommutatorReport cr = commutator_report(u, cs, kern, grid);
  rep.provenance.emplace_back("K", cr.K);
  rep.provenance.emplace_back("grad_sup", cr.grad_sup);

  double tol = pd(p, "pointwise_tol", 1e-7);
  int worst_idx = 0;
  double worst = -1e300;
  for (size_t i = 0; i < grid.size(); ++i) {
    double excess = std::abs(cr.n_delta_values[i]) - cr.bound_rhs[i];
    if (excess > worst) {
      worst = excess;
      worst_idx = (int)i;
    }
    add_margin(rep, "lemma-5.8 point " + std::to_string(i), excess, tol,
               excess <= tol);
  }
  rep.provenance.emplace_back("worst pointwise excess", worst);
  rep.provenance.emplace_back("worst point index", worst_idx);

  // Lemma 5.7 decay: L1 norm contraction per delta-halving
  std::vector<double> deltas = pv(p, "delta_sequence",
                                  {0.1, 0.05, 0.025, 0.0125});
  double ratio_bound = pd(p, "ratio_bound", 0.7);
  std::vector<double> l1s;
  for (double d : deltas) {
    MollifierKernel kd(d, Dimension(n));
    l1s.push_back(commutator_report(u, cs, kd, grid).l1_norm);
  }
  for (size_t i = 1; i < l1s.size(); ++i) {
    double ratio = l1s[i] / std::max(l1s[i - 1], 1e-300);
    add_margin(rep,
               "L1 ratio delta=" + fmt(deltas[i]) + "/" + fmt(deltas[i - 1]),
               ratio, ratio_bound, ratio <= ratio_bound);
  }
}

void run_maxprinciple(const Scenario& s, Report& rep) {
  const json& p = s.parameters;
  MollifierKernel kern(1.0, Dimension(2));

  // constants alpha in (0,1) across the (s, M) matrix
  std::vector<double> s_list = pv(p, "s_list", {0.25, 0.5, 0.75});
  std::vector<double> M_list = pv(p, "M_list", {0.0, 1.0});
  for (double sv : s_list)
    for (double M : M_list) {
      PrincipleConstants pc =
          compute_principle_constants(Dimension(2), FracOrder(sv), M, kern);
      std::string tag = "alpha(n=2,s=" + fmt(sv) + ",M=" + fmt(M) + ")";
      add_margin(rep, tag, pc.alpha, 1.0,
                 pc.alpha > 0.0 && pc.alpha < 1.0);
      rep.provenance.emplace_back(tag, pc.alpha);
    }

  double r = pd(p, "r", 0.5);
  double m = pd(p, "m", 1.0);
  std::vector<Vec> grid;
  for (int i = 1; i <= 10; ++i)
    for (int a = 0; a < 8; ++a)
      grid.push_back((r * (0.03 + 0.92 * i / 10.0)) *
                     unit_dir(2, 2.0 * M_PI * a / 8.0 + 0.21 * i));

  auto record = [&](const std::string& tag, const MaxPrincipleReport& mr) {
    bool pass = mr.verdict == "pass";
    add_margin(rep, tag + " (grid min - floor)", mr.grid_min - mr.floor_value,
               1e-3, pass);
    if (mr.verdict == "inconclusive")
      rep.diagnostic += tag + ": preconditions failed; ";
    rep.provenance.emplace_back(tag + " grid_min", mr.grid_min);
    rep.provenance.emplace_back(tag + " floor", mr.floor_value);
  };

  // (a) punctured fractional supersolution, s = 0.75, b = c = 0
  {
    double sv = pd(p, "s", 0.75);
    PrincipleConstants pc =
        compute_principle_constants(Dimension(2), FracOrder(sv), 0.0, kern);
    OperatorSpec spec;
    spec.kind = OperatorKind::Fractional;
    spec.s = sv;
    spec.dim = 2;
    spec.coeffs = CoefficientSet::zero(2);
    double expo = 2.0 * sv - 2.0;  // 2s - n
    ScalarField u;
    u.dim = 2;
    u.eval = [m, r, expo](const Vec& x) {
      double rr = x.norm();
      if (rr <= r) return m;
      return m * std::pow(rr / r, expo);
    };
    u.tail = TailProfile::algebraic(m * std::pow(r, -expo), -expo);
    MaxPrincipleReport mr =
        verify_max_principle(u, spec, m, true, pc, grid, r, s.seed);
    record("punctured fractional", mr);
    rep.provenance.emplace_back("punctured interior min vs m",
                                mr.grid_min - m);
  }

  // (b) constant field, fractional s = 0.5, M = 1 constants
  {
    PrincipleConstants pc =
        compute_principle_constants(Dimension(2), FracOrder(0.5), 1.0, kern);
    OperatorSpec spec;
    spec.kind = OperatorKind::Fractional;
    spec.s = 0.5;
    spec.dim = 2;
    spec.coeffs = CoefficientSet::zero(2);
    ScalarField u;
    u.dim = 2;
    u.eval = [m](const Vec&) { return m; };
    u.tail = TailProfile::bounded(m);
    MaxPrincipleReport mr =
        verify_max_principle(u, spec, m, false, pc, grid, r, s.seed);
    record("constant fractional", mr);
  }

  // (c) classical n=2, M=0, harmonic log profile on the punctured ball
  {
    PrincipleConstants pc;  // alpha unused for the classical M=0 floor
    pc.M = 0.0;
    pc.alpha = 1.0;
    OperatorSpec spec;
    spec.kind = OperatorKind::Classical;
    spec.dim = 2;
    spec.coeffs = CoefficientSet::zero(2);
    ScalarField u;
    u.dim = 2;
    double lr = std::log(1.0 / r);
    u.eval = [m, lr](const Vec& x) {
      return m * std::log(1.0 / x.norm()) / lr;
    };
    u.tail = TailProfile::bounded(m);
    MaxPrincipleReport mr =
        verify_max_principle(u, spec, m, true, pc, grid, r, s.seed);
    record("classical M=0 harmonic", mr);
  }
}

void run_bocher(const Scenario& s, Report& rep) {
  const json& p = s.parameters;
  std::vector<double> a_list = pv(p, "a_list", {0.5, 2.0, 10.0});
  std::vector<double> deltas = pv(p, "delta_sequence",
                                  {0.1, 0.05, 0.025, 0.0125});
  double rel_tol = pd(p, "a_rel_tol", 0.05);

  struct Setting {
    std::string tag;
    OperatorSpec spec;
    ScalarField Phi;
  };
  std::vector<Setting> settings;
  {
    Setting frac;
    frac.tag = "fractional n=2 s=0.75";
    frac.spec.kind = OperatorKind::Fractional;
    frac.spec.s = pd(p, "s", 0.75);
    frac.spec.dim = 2;
    frac.spec.coeffs = CoefficientSet::zero(2);
    frac.Phi = fundamental_solution(Dimension(2), FundKind::frac(frac.spec.s));
    settings.push_back(frac);
    Setting cls;
    cls.tag = "classical n=3";
    cls.spec.kind = OperatorKind::Classical;
    cls.spec.dim = 3;
    cls.spec.coeffs = CoefficientSet::zero(3);
    cls.Phi = fundamental_solution(Dimension(3), FundKind::classic());
    settings.push_back(cls);
  }

  for (const Setting& st : settings) {
    for (double a : a_list) {
      ScalarField u;
      u.dim = st.spec.dim;
      ScalarField Phi = st.Phi;
      u.eval = [Phi, a](const Vec& x) { return a * Phi(x) + 1.0; };
      u.tail = TailProfile::bounded(a * 10.0 + 1.0);
      u.smooth_distance = [](const Vec& x) { return x.norm(); };
      SingularDecomposition dec =
          recover_singular_coefficient(u, st.spec, deltas);
      add_margin(rep, st.tag + " a=" + fmt(a) + " relative error",
                 std::abs(dec.a_hat - a) / a, rel_tol,
                 std::abs(dec.a_hat - a) / a <= rel_tol);
      rep.provenance.emplace_back(st.tag + " a_hat(a=" + fmt(a) + ")",
                                  dec.a_hat);
    }

    // nonnegative supersolution battery: sign constraints of Theorems 1.2/1.3
    std::vector<std::pair<std::string, ScalarField>> fields;
    {
      ScalarField Phi = st.Phi;
      ScalarField u1;
      u1.dim = st.spec.dim;
      u1.eval = [Phi](const Vec& x) { return std::max(Phi(x), 0.0) + 0.5; };
      u1.tail = TailProfile::bounded(10.0);
      u1.smooth_distance = [](const Vec& x) { return x.norm(); };
      fields.emplace_back("Phi+0.5", u1);
      // dilated-pole sum: still a single origin atom, dipole-free
      ScalarField u2;
      u2.dim = st.spec.dim;
      u2.eval = [Phi](const Vec& x) {
        return std::max(Phi(x), 0.0) + std::max(Phi(2.0 * x), 0.0) + 0.2;
      };
      u2.tail = TailProfile::bounded(10.0);
      u2.smooth_distance = [](const Vec& x) { return x.norm(); };
      fields.emplace_back("Phi+Phi(2x)+0.2", u2);
    }
    for (auto& [tag, uf] : fields) {
      SingularDecomposition dec =
          recover_singular_coefficient(uf, st.spec, deltas);
      add_margin(rep, st.tag + " " + tag + " a_hat >= -5e-2", dec.a_hat,
                 5e-2, dec.a_hat >= -5e-2);
      double dnorm = dec.d_hat.norm();
      add_margin(rep, st.tag + " " + tag + " |d_hat| <= 5e-2", dnorm, 5e-2,
                 dnorm <= 5e-2);
      for (size_t i = 0; i < dec.annulus_masses.size(); ++i) {
        auto& [ri, ro, mass] = dec.annulus_masses[i];
        double tol = 10.0 * dec.annulus_errs[i] + 1e-6;
        add_margin(rep,
                   st.tag + " " + tag + " annulus mass [" + fmt(ri) + "," +
                       fmt(ro) + "]",
                   mass, tol, mass >= -tol);
      }
    }
  }
}

void run_compose(const Scenario& s, Report& rep) {
  const json& p = s.parameters;
  int nb = pi(p, "battery", 20);
  EvalBudget budget;
  (void)budget;

  auto add_report = [&](const std::string& tag, const InequalityReport& ir) {
    for (const auto& e : ir.entries)
      add_margin(rep, tag + " phi " + std::to_string(e.phi_index), e.margin,
                 e.tol, e.passed);
  };

  // two shifted concave caps, classical n=2, f = g = -Delta cap = 4
  {
    OperatorSpec spec;
    spec.kind = OperatorKind::Classical;
    spec.dim = 2;
    spec.coeffs = CoefficientSet::zero(2);
    auto cap = [](Vec c) {
      ScalarField u;
      u.dim = 2;
      u.eval = [c](const Vec& x) { return 1.0 - (x - c).norm2(); };
      u.tail = TailProfile::bounded(1.0);
      return u;
    };
    ScalarField u = cap(Vec(0.15, 0.0)), v = cap(Vec(-0.15, 0.0));
    ScalarField f;
    f.dim = 2;
    f.eval = [](const Vec&) { return 4.0; };
    f.tail = TailProfile::bounded(4.0);
    std::vector<TestFunction> battery = make_battery(Dimension(2), nb, s.seed);
    add_report("two caps classical",
               compose_max(u, v, f, f, spec, battery, true));
  }

  // fractional pair of smooth bumps, f = (-Delta)^s u, g = (-Delta)^s v
  {
    double sv = pd(p, "s", 0.6);
    OperatorSpec spec;
    spec.kind = OperatorKind::Fractional;
    spec.s = sv;
    spec.dim = 2;
    spec.coeffs = CoefficientSet::zero(2);
    TestFunction tu = make_bump(Vec(0.2, 0.0), 0.8);
    TestFunction tv = make_bump(Vec(-0.25, 0.1), 0.7);
    ScalarField u = tu.as_field();
    ScalarField v;
    v.dim = 2;
    v.eval = [tv](const Vec& x) { return 0.6 * tv(x); };
    v.tail = TailProfile::compact(tv.center.norm() + tv.radius);
    ScalarField f;
    f.dim = 2;
    f.eval = [tu, sv](const Vec& x) { return tu.fraclap(x, sv); };
    f.tail = TailProfile::algebraic(1.0, 2.0 + 2.0 * sv);
    ScalarField g;
    g.dim = 2;
    g.eval = [tv, sv](const Vec& x) { return 0.6 * tv.fraclap(x, sv); };
    g.tail = TailProfile::algebraic(1.0, 2.0 + 2.0 * sv);
    std::vector<TestFunction> battery =
        make_battery(Dimension(2), nb, s.seed + 1);
    add_report("fractional bumps",
               compose_max(u, v, f, g, spec, battery, true));
  }

  // min composition (Theorem 1.6 device): min{u, m} via max{-u, -m} negated
  {
    double sv = pd(p, "s_min", 0.75);
    OperatorSpec spec;
    spec.kind = OperatorKind::Fractional;
    spec.s = sv;
    spec.dim = 2;
    spec.coeffs = CoefficientSet::zero(2);
    ScalarField Phi = fundamental_solution(Dimension(2), FundKind::frac(sv));
    ScalarField uneg;
    uneg.dim = 2;
    uneg.eval = [Phi](const Vec& x) { return -(Phi(x) + 1.0); };
    uneg.tail = TailProfile::bounded(2.0);
    uneg.smooth_distance = [](const Vec& x) { return x.norm(); };
    ScalarField vneg;
    vneg.dim = 2;
    vneg.eval = [](const Vec&) { return -2.0; };
    vneg.tail = TailProfile::bounded(2.0);
    ScalarField zero;
    zero.dim = 2;
    zero.eval = [](const Vec&) { return 0.0; };
    zero.tail = TailProfile::compact(0.0);
    std::vector<TestFunction> battery =
        make_battery(Dimension(2), pi(p, "battery_min", 12), s.seed + 2);
    add_report("min composition",
               compose_max(uneg, vneg, zero, zero, spec, battery, true));
  }
}

void run_counterexamples(const Scenario&, Report& rep) {
  CounterexampleReport cr = counterexample_suite_n1();
  for (const auto& e : cr.entries)
    add_margin(rep, e.label,
               e.tol > 0.0 ? e.value - e.expected : e.value,
               e.tol > 0.0 ? e.tol : e.expected, e.passed);
}

}  // namespace

const std::vector<std::string>& builtin_verifiers() {
  static const std::vector<std::string> v = {
      "barrier",     "mollifier", "maxprinciple",    "bocher",
      "poisson",     "compose",   "counterexamples", "fraclap-eval"};
  return v;
}

Scenario parse_scenario(const json& doc) {
  Scenario s;
  s.name = doc.contains("name") ? doc.at("name").get<std::string>() : "";
  if (!doc.contains("verifier"))
    throw std::invalid_argument("scenario missing 'verifier'");
  s.verifier = doc.at("verifier").get<std::string>();
  if (doc.contains("parameters")) s.parameters = doc.at("parameters");
  if (doc.contains("seed")) s.seed = doc.at("seed").get<unsigned>();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  json doc = json::parse(in);
  Scenario s = parse_scenario(doc);
  if (s.name.empty()) s.name = path;
  return s;
}

Report run_scenario(const Scenario& s) {
  Report rep;
  rep.scenario = s;
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (s.verifier == "fraclap-eval")
      run_fraclap_eval(s, rep);
    else if (s.verifier == "poisson")
      run_poisson(s, rep);
    else if (s.verifier == "barrier")
      run_barrier(s, rep);
    else if (s.verifier == "mollifier")
      run_mollifier(s, rep);
    else if (s.verifier == "maxprinciple")
      run_maxprinciple(s, rep);
    else if (s.verifier == "bocher")
      run_bocher(s, rep);
    else if (s.verifier == "compose")
      run_compose(s, rep);
    else if (s.verifier == "counterexamples")
      run_counterexamples(s, rep);
    else {
      rep.verdict = "invalid";
      rep.diagnostic = "unknown verifier: " + s.verifier;
      return rep;
    }
  } catch (const std::exception& e) {
    rep.verdict = "invalid";
    rep.diagnostic = e.what();
    return rep;
  }
  bool all_pass = true;
  for (const Margin& m : rep.margins) all_pass = all_pass && m.passed;
  if (rep.diagnostic.find("preconditions failed") != std::string::npos)
    rep.verdict = all_pass ? "inconclusive" : "fail";
  else
    rep.verdict = all_pass ? "pass" : "fail";
  auto t1 = std::chrono::steady_clock::now();
  rep.timings.emplace_back(
      "total",
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() /
          1000.0);
  return rep;
}

namespace {

json report_to_json(const Report& r, bool include_timings) {
  json j;
  j["scenario"] = {{"name", r.scenario.name},
                   {"verifier", r.scenario.verifier},
                   {"seed", r.scenario.seed},
                   {"parameters", r.scenario.parameters}};
  j["verdict"] = r.verdict;
  j["diagnostic"] = r.diagnostic;
  json ms = json::array();
  for (const Margin& m : r.margins)
    ms.push_back({{"label", m.label},
                  {"value", m.value},
                  {"tolerance", m.tolerance},
                  {"pass", m.passed}});
  j["margins"] = ms;
  json prov = json::object();
  for (const auto& [k, v] : r.provenance) prov[k] = v;
  j["provenance"] = prov;
  if (include_timings) {
    json ts = json::object();
    for (const auto& [k, v] : r.timings) ts[k] = v;
    j["timings"] = ts;
  }
  return j;
}

std::string csv_quote(const std::string& s) {
  bool need = s.find_first_of(",\"\n\r") != std::string::npos;
  if (!need) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void csv_rows(const Report& r, std::string& out) {
  for (const Margin& m : r.margins) {
    out += csv_quote(r.scenario.name);
    out += ',';
    out += csv_quote(m.label);
    out += ',';
    out += csv_num(m.value);
    out += ',';
    out += csv_num(m.tolerance);
    out += ',';
    out += m.passed ? "true" : "false";
    out += "\r\n";  // RFC 4180 line ending
  }
}

}  // namespace

std::string report_json(const Report& r, bool include_timings) {
  return report_to_json(r, include_timings).dump(2) + "\n";
}

std::string report_json(const std::vector<Report>& rs, bool include_timings) {
  json arr = json::array();
  for (const Report& r : rs) arr.push_back(report_to_json(r, include_timings));
  return arr.dump(2) + "\n";
}

std::string report_csv(const Report& r) {
  std::string out = "scenario,label,value,tolerance,pass\r\n";
  csv_rows(r, out);
  return out;
}

std::string report_csv(const std::vector<Report>& rs) {
  std::string out = "scenario,label,value,tolerance,pass\r\n";
  for (const Report& r : rs) csv_rows(r, out);
  return out;
}

int report_exit_code(const Report& r) {
  if (r.verdict == "pass") return 0;
  if (r.verdict == "fail") return 1;
  if (r.verdict == "inconclusive") return 2;
  return 3;
}

}  // namespace flk
