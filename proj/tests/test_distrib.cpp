#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "flk/distrib.hpp"
#include "flk/potentials.hpp"

using namespace flk;

TEST_CASE("smooth_step endpoints, symmetry, derivatives") {
  CHECK(smooth_step(-0.5) == 0.0);
  CHECK(smooth_step(1.5) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(smooth_step(0.3) + smooth_step(0.7) ==
        doctest::Approx(1.0).epsilon(1e-14));
  for (double t : {0.2, 0.5, 0.8}) {
    double fd1 = (smooth_step(t + 1e-6) - smooth_step(t - 1e-6)) / 2e-6;
    CHECK(smooth_step_d1(t) == doctest::Approx(fd1).epsilon(1e-6));
    double fd2 =
        (smooth_step_d1(t + 1e-6) - smooth_step_d1(t - 1e-6)) / 2e-6;
    CHECK(smooth_step_d2(t) == doctest::Approx(fd2).epsilon(1e-5));
  }
}

TEST_CASE("bump test function: value, gradient, Laplacian") {
  TestFunction phi = make_bump(Vec(0.5, -0.25), 0.75);
  CHECK(phi(Vec(0.5, -0.25)) == doctest::Approx(1.0));
  CHECK(phi(Vec(1.5, 0.0)) == 0.0);
  CHECK(phi.nonnegative);
  Vec x(0.7, -0.1);
  Vec g = phi.grad(x);
  double h = 1e-6;
  CHECK(g[0] == doctest::Approx((phi(Vec(0.7 + h, -0.1)) -
                                 phi(Vec(0.7 - h, -0.1))) /
                                (2 * h))
                    .epsilon(1e-5));
  double lap_fd = (phi(Vec(0.7 + h, -0.1)) + phi(Vec(0.7 - h, -0.1)) +
                   phi(Vec(0.7, -0.1 + h)) + phi(Vec(0.7, -0.1 - h)) -
                   4.0 * phi(x)) /
                  (h * h);
  CHECK(phi.lap(x) == doctest::Approx(lap_fd).epsilon(1e-3));
}

TEST_CASE("annulus bump is a partition plateau") {
  TestFunction a = make_annulus_bump(0.25, 0.5, Dimension(2));
  CHECK(a(Vec(0.375, 0.0)) == doctest::Approx(1.0));
  CHECK(a(Vec(0.2, 0.0)) == 0.0);
  CHECK(a(Vec(0.6, 0.0)) == 0.0);
  CHECK(a.feature_scale < 0.5);  // fine features request a dense cache
}

TEST_CASE("fraclap cache agrees with the direct radial reduction") {
  TestFunction phi = make_bump(Vec(0.0, 0.0), 1.0);
  double s = 0.6;
  double via_cache = phi.fraclap(Vec(0.4, 0.3), s);
  double direct = radial_fraclap(phi.prof, 0.5, 2, s) *
                  1.0;  // radius 1 bump, |x| = 0.5
  CHECK(via_cache == doctest::Approx(direct).epsilon(1e-4));
  // translation invariance: same profile shifted
  TestFunction psi = make_bump(Vec(2.0, -1.0), 1.0);
  CHECK(psi.fraclap(Vec(2.4, -0.7), s) ==
        doctest::Approx(via_cache).epsilon(1e-10));
}

TEST_CASE("fraclap cache scaling in the radius") {
  double s = 0.5;
  TestFunction big = make_bump(Vec(0.0, 0.0), 1.0);
  TestFunction small = make_bump(Vec(0.0, 0.0), 0.5);
  // phi_r(x) = phi(x/r) so (-Delta)^s phi_r(x) = r^{-2s} (-Delta)^s phi(x/r)
  CHECK(small.fraclap(Vec(0.2, 0.1), s) ==
        doctest::Approx(std::pow(0.5, -2.0 * s) *
                        big.fraclap(Vec(0.4, 0.2), s))
            .epsilon(1e-8));
}

TEST_CASE("battery spans scales and stays inside the unit ball setup") {
  auto battery = make_battery(Dimension(2), 10, 7);
  CHECK(battery.size() == 10);
  for (const auto& phi : battery) {
    CHECK(phi.radius > 0.0);
    CHECK(phi.nonnegative);
    CHECK(phi(phi.center) > 0.0);
  }
  // deterministic in the seed
  auto again = make_battery(Dimension(2), 10, 7);
  for (size_t i = 0; i < battery.size(); ++i) {
    CHECK(battery[i].center[0] == again[i].center[0]);
    CHECK(battery[i].radius == again[i].radius);
  }
}

TEST_CASE("pair_adjoint is symmetric for the pure fractional operator") {
  OperatorSpec spec;
  spec.kind = OperatorKind::Fractional;
  spec.s = 0.6;
  spec.dim = 2;
  spec.coeffs = CoefficientSet::zero(2);
  TestFunction p1 = make_bump(Vec(0.0, 0.0), 0.8);
  TestFunction p2 = make_bump(Vec(0.3, 0.0), 0.6);
  EvalBudget budget;
  double a = pair_adjoint(p1.as_field(), spec, p2, budget).value;
  double b = pair_adjoint(p2.as_field(), spec, p1, budget).value;
  CHECK(a == doctest::Approx(b).epsilon(5e-4));
}

TEST_CASE("pairing the fundamental solution recovers phi(0)") {
  double s = 0.75;
  OperatorSpec spec;
  spec.kind = OperatorKind::Fractional;
  spec.s = s;
  spec.dim = 2;
  spec.coeffs = CoefficientSet::zero(2);
  ScalarField Phi = fundamental_solution(Dimension(2), FundKind::frac(s));
  TestFunction phi = make_bump(Vec(0.1, -0.05), 0.5);
  EvalBudget budget;
  PairingResult pr = pair_adjoint(Phi, spec, phi, budget);
  CHECK(pr.value == doctest::Approx(phi(Vec::zero(2))).epsilon(1e-3));
}

TEST_CASE("classical pairing integrates by parts exactly") {
  // <u, -Delta phi> = int (-Delta u) phi for smooth compact u
  OperatorSpec spec;
  spec.kind = OperatorKind::Classical;
  spec.dim = 2;
  spec.coeffs = CoefficientSet::zero(2);
  TestFunction u = make_bump(Vec(0.0, 0.0), 1.0);
  TestFunction phi = make_bump(Vec(0.2, 0.1), 0.7);
  EvalBudget budget;
  double lhs = pair_adjoint(u.as_field(), spec, phi, budget).value;
  // right side by direct quadrature of (-lap u) * phi over the overlap
  QuadratureRule q = make_support_rule(Dimension(2), 10, 24, 1.0, 1.0);
  double rhs = integrate_polar(q, Vec::zero(2), [&](const Vec& y) {
    return -u.lap(y) * phi(y);
  });
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4));
}

TEST_CASE("symbolic atoms pair exactly") {
  TestFunction phi = make_bump(Vec(0.0, 0.0), 1.0);
  SymbolicAtom d;
  d.kind = SymbolicAtom::Kind::Delta;
  d.p = Vec(0.2, 0.1);
  d.a = -3.0;
  CHECK(d.pair(phi) == doctest::Approx(-3.0 * phi(Vec(0.2, 0.1))));
  SymbolicAtom g;
  g.kind = SymbolicAtom::Kind::DeltaGrad;
  g.p = Vec(0.2, 0.1);
  g.d = Vec(1.0, 2.0);
  Vec gr = phi.grad(Vec(0.2, 0.1));
  CHECK(g.pair(phi) == doctest::Approx(-(gr[0] + 2.0 * gr[1])));
}

TEST_CASE("pair_rhs combines density and atoms") {
  TestFunction phi = make_bump(Vec(0.0, 0.0), 1.0);
  MeasureApprox m;
  m.atoms = {{Vec(0.0, 0.0), 2.0}};
  SymbolicAtom d;
  d.kind = SymbolicAtom::Kind::Delta;
  d.p = Vec(0.5, 0.0);
  d.a = 1.0;
  double v = pair_rhs(m, {d}, phi);
  CHECK(v == doctest::Approx(2.0 * phi(Vec::zero(2)) + phi(Vec(0.5, 0.0)))
                 .epsilon(1e-12));
}

TEST_CASE("distributional inequality detects a sign violation") {
  // u = Phi_s satisfies (-Delta)^s u = delta_0 >= 0; -u fails the same check
  double s = 0.75;
  OperatorSpec spec;
  spec.kind = OperatorKind::Fractional;
  spec.s = s;
  spec.dim = 2;
  spec.coeffs = CoefficientSet::zero(2);
  ScalarField Phi = fundamental_solution(Dimension(2), FundKind::frac(s));
  ScalarField neg = Phi;
  neg.eval = [Phi](const Vec& x) { return -Phi(x); };
  std::vector<TestFunction> battery = {make_bump(Vec(0.0, 0.0), 0.5)};
  MeasureApprox zero_rhs;
  InequalityReport ok = check_distributional_inequality(
      Phi, spec, zero_rhs, {}, battery, CheckMode::GreaterEqual);
  CHECK(ok.passed);
  InequalityReport bad = check_distributional_inequality(
      neg, spec, zero_rhs, {}, battery, CheckMode::GreaterEqual);
  CHECK_FALSE(bad.passed);
}

TEST_CASE("compose_max is symmetric and respects ordering") {
  // u <= v everywhere, Lu <= f, Lv <= g with f = g: max{u,v} = v must pass
  OperatorSpec spec;
  spec.kind = OperatorKind::Classical;
  spec.dim = 2;
  spec.coeffs = CoefficientSet::zero(2);
  TestFunction b1 = make_bump(Vec(0.0, 0.0), 1.0);
  ScalarField u = b1.as_field();
  ScalarField v = b1.as_field();
  v.eval = [b1](const Vec& x) { return 2.0 * b1(x); };
  ScalarField f;
  f.dim = 2;
  f.eval = [](const Vec&) { return 100.0; };
  f.tail = TailProfile::bounded(100.0);
  std::vector<TestFunction> battery = {make_bump(Vec(0.1, 0.0), 0.4)};
  InequalityReport rep = compose_max(u, v, f, f, spec, battery);
  CHECK(rep.passed);
  InequalityReport swapped = compose_max(v, u, f, f, spec, battery);
  CHECK(swapped.passed);
  CHECK(rep.entries[0].lhs ==
        doctest::Approx(swapped.entries[0].lhs).epsilon(1e-9));
}
