#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "flk/distrib.hpp"
#include "flk/mollify.hpp"

using namespace flk;

namespace {

ScalarField constant_field(int n, double v) {
  ScalarField u;
  u.dim = n;
  u.eval = [v](const Vec&) { return v; };
  u.tail = TailProfile::bounded(std::abs(v));
  return u;
}

}  // namespace

TEST_CASE("mollifier kernel has unit mass in every dimension") {
  for (int n : {1, 2, 3}) {
    MollifierKernel k(0.1, Dimension(n));
    ScalarField one = constant_field(n, 1.0);
    CHECK(mollify(one, k, Vec::zero(n)) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("second moment matches an independent radial quadrature, n=2") {
  // m2 = int |z|^2 j(z) dz = (int_0^1 r^3 e^{-1/(1-r^2)} dr) /
  //      (int_0^1 r e^{-1/(1-r^2)} dr)
  MollifierKernel k(0.25, Dimension(2));
  CHECK(k.second_moment() ==
        doctest::Approx(0.26131120342055865).epsilon(1e-8));
}

TEST_CASE("mollifying |x|^2 shifts by delta^2 m2") {
  for (int n : {1, 2, 3}) {
    MollifierKernel k(0.3, Dimension(n));
    ScalarField u;
    u.dim = n;
    u.eval = [](const Vec& x) { return x.norm2(); };
    u.tail = TailProfile::algebraic(1.0, -2.0);
    CHECK(mollify(u, k, Vec::zero(n)) ==
          doctest::Approx(0.09 * k.second_moment()).epsilon(1e-9));
  }
}

TEST_CASE("mollification is exact on affine fields") {
  MollifierKernel k(0.2, Dimension(2));
  ScalarField u;
  u.dim = 2;
  u.eval = [](const Vec& x) { return 3.0 + 2.0 * x[0] - x[1]; };
  u.tail = TailProfile::algebraic(4.0, -1.0);
  Vec x(0.4, -0.7);
  CHECK(mollify(u, k, x) == doctest::Approx(u(x)).epsilon(1e-10));
  Vec g = mollify_gradient(u, k, x);
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(g[1] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("mollified Laplacian of |x|^2 is 2n") {
  for (int n : {2, 3}) {
    MollifierKernel k(0.15, Dimension(n));
    ScalarField u;
    u.dim = n;
    u.eval = [](const Vec& x) { return x.norm2(); };
    u.tail = TailProfile::algebraic(1.0, -2.0);
    CHECK(mollify_laplacian(u, k, Vec(0.2, n)) ==
          doctest::Approx(2.0 * n).epsilon(1e-5));
  }
}

TEST_CASE("mollified halfspace indicator is 1/2 on the interface") {
  MollifierKernel k(0.1, Dimension(2));
  ScalarField u;
  u.dim = 2;
  u.eval = [](const Vec& x) { return x[0]; };
  u.tail = TailProfile::algebraic(1.0, -1.0);
  // indicator integrands are discontinuous across the sphere rule, so the
  // interface value is only O(1/m) accurate
  CHECK(mollified_indicator(u, k, Vec(0.0, 0.3)) ==
        doctest::Approx(0.5).epsilon(0.1));
  CHECK(mollified_indicator(u, k, Vec(0.5, 0.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mollified_indicator(u, k, Vec(-0.5, 0.0)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mollified ball indicator saturates inside and vanishes outside") {
  MollifierKernel k(0.05, Dimension(2));
  double eps = 0.4;
  CHECK(mollified_ball_indicator(eps, k, Vec(0.0, 0.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mollified_ball_indicator(eps, k, Vec(0.6, 0.0)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  double mid = mollified_ball_indicator(eps, k, Vec(eps, 0.0));
  CHECK(mid > 0.05);
  CHECK(mid < 0.95);
}

TEST_CASE("commutator vanishes for constant drift") {
  MollifierKernel k(0.1, Dimension(2));
  TestFunction phi = make_bump(Vec(0.0, 0.0), 1.0);
  ScalarField u = phi.as_field();
  CoefficientSet cs = CoefficientSet::zero(2);
  cs.b = [](const Vec&) { return Vec(0.7, -0.4); };
  CHECK(std::abs(commutator_n_delta(u, cs, k, Vec(0.2, 0.1))) < 1e-10);
}

TEST_CASE("commutator of a linear drift is controlled by the Lemma bound") {
  MollifierKernel k(0.08, Dimension(2));
  TestFunction phi = make_bump(Vec(0.0, 0.0), 1.0);
  ScalarField u = phi.as_field();
  CoefficientSet cs = CoefficientSet::zero(2);
  cs.b = [](const Vec& x) { return Vec(0.1 * x[0] + 0.3 * x[1],
                                       -0.3 * x[0] + 0.1 * x[1]); };
  cs.grad_b = [](const Vec&) {
    Mat3 g{};
    g[0][0] = 0.1;
    g[0][1] = 0.3;
    g[1][0] = -0.3;
    g[1][1] = 0.1;
    return g;
  };
  std::vector<Vec> grid = {Vec(0.0, 0.0), Vec(0.3, 0.2), Vec(-0.5, 0.1)};
  CommutatorReport rep = commutator_report(u, cs, k, grid);
  REQUIRE(rep.n_delta_values.size() == grid.size());
  for (size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(rep.n_delta_values[i]) <= rep.bound_rhs[i] + 1e-12);
  CHECK(rep.l1_norm >= 0.0);
  CHECK(rep.grad_sup > 0.0);
}

TEST_CASE("mollification commutes with the fractional Laplacian") {
  MollifierKernel k(0.1, Dimension(2));
  TestFunction phi = make_bump(Vec(0.0, 0.0), 1.0);
  ScalarField u = phi.as_field();
  auto [a, b] = mollified_fraclap_commutes(u, FracOrder(0.5), k, Vec(0.3, 0.2));
  CHECK(a == doctest::Approx(b).epsilon(1e-4));
}
