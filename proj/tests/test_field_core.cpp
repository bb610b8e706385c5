#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "flk/field_core.hpp"

using namespace flk;

TEST_CASE("Vec arithmetic") {
  Vec a(1.0, 2.0), b(3.0, -1.0);
  CHECK((a + b)[0] == 4.0);
  CHECK((a - b)[1] == 3.0);
  CHECK((2.0 * a).norm2() == doctest::Approx(20.0));
  CHECK(a.dot(b) == doctest::Approx(1.0));
  CHECK(Vec::zero(3).norm() == 0.0);
}

TEST_CASE("Dimension and FracOrder validate") {
  CHECK_THROWS_AS(Dimension(0), std::invalid_argument);
  CHECK_THROWS_AS(FracOrder(0.0), std::invalid_argument);
  CHECK_THROWS_AS(FracOrder(1.0), std::invalid_argument);
  CHECK(FracOrder(0.5).s == 0.5);
}

TEST_CASE("sphere surface and ball volume") {
  CHECK(sphere_surface(1) == doctest::Approx(2.0));
  CHECK(sphere_surface(2) == doctest::Approx(2.0 * M_PI));
  CHECK(sphere_surface(3) == doctest::Approx(4.0 * M_PI));
  CHECK(ball_volume(1) == doctest::Approx(2.0));
  CHECK(ball_volume(2) == doctest::Approx(M_PI));
  CHECK(ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0));
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  // order-k GL is exact through degree 2k-1
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  double m0 = 0, m8 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    m0 += w[i];
    m8 += w[i] * std::pow(x[i], 8);
  }
  CHECK(m0 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(m8 == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("integrate_gl and integrate_geometric") {
  CHECK(integrate_gl([](double t) { return std::cos(t); }, 0.0, 1.0, 12) ==
        doctest::Approx(std::sin(1.0)).epsilon(1e-14));
  CHECK(integrate_geometric([](double t) { return 1.0 / t; }, 1.0,
                            std::exp(1.0), 10) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(integrate_geometric([](double) { return 0.0; }, 0.0, 1.0, 4),
                  std::invalid_argument);
}

TEST_CASE("integrate_graded_both handles endpoint singularities") {
  // int_0^1 x^{-1/2} (1-x)^{-1/2} dx = pi
  double I = integrate_graded_both(
      [](double x) { return 1.0 / std::sqrt(x * (1.0 - x)); }, 0.0, 1.0, 10);
  CHECK(I == doctest::Approx(M_PI).epsilon(1e-5));
}

TEST_CASE("sphere rules have exact measure and quadratic moments") {
  for (int n : {1, 2, 3}) {
    auto sph = make_sphere_rule(n, 20);
    double mass = 0.0, xx = 0.0;
    for (const auto& [omega, w] : sph) {
      mass += w;
      xx += w * omega[0] * omega[0];
    }
    CHECK(mass == doctest::Approx(sphere_surface(n)).epsilon(1e-12));
    // int_{S^{n-1}} omega_1^2 = |S^{n-1}| / n
    CHECK(xx == doctest::Approx(sphere_surface(n) / n).epsilon(1e-12));
  }
}

TEST_CASE("ball rule integrates volume and a singular radial power") {
  for (int n : {2, 3}) {
    QuadratureRule q = make_ball_rule(Dimension(n), 10, 14, 1.5, 40);
    double vol =
        integrate_polar(q, Vec::zero(n), [](const Vec&) { return 1.0; });
    CHECK(vol == doctest::Approx(ball_volume(n) * std::pow(1.5, n))
                     .epsilon(1e-10));
    // int_{B_R} |y|^{-1} dy = |S^{n-1}| R^{n-1} / (n-1)
    double sing = integrate_polar(q, Vec::zero(n),
                                  [](const Vec& y) { return 1.0 / y.norm(); });
    CHECK(sing == doctest::Approx(sphere_surface(n) *
                                  std::pow(1.5, n - 1) / (n - 1))
                      .epsilon(1e-8));
  }
}

TEST_CASE("polar rule integrates over an annulus") {
  QuadratureRule q = make_polar_rule(Dimension(2), 12, 16, 0.5, 2.0);
  // int_{0.5<|y|<2} |y|^{-3} dy = 2 pi (1/0.5 - 1/2)
  double I = integrate_polar(q, Vec::zero(2), [](const Vec& y) {
    return std::pow(y.norm(), -3.0);
  });
  CHECK(I == doctest::Approx(2.0 * M_PI * 1.5).epsilon(1e-10));
}

TEST_CASE("support rule resolves oscillatory profiles with a singular core") {
  // radial part only (dim 1 weight): int_0^1 r^{-1/2} dr = 2, plus a smooth
  // oscillation int_0^1 cos(8 pi r) dr = 0
  QuadratureRule q = make_support_rule(Dimension(1), 10, 2, 1.0, 1.0);
  double s = 0.0, c = 0.0;
  for (const auto& [r, wr] : q.radial) {
    s += wr / std::sqrt(r);
    c += wr * std::cos(8.0 * M_PI * r);
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(c == doctest::Approx(0.0).epsilon(1e-12));
  // geometric extension beyond the support radius
  QuadratureRule q2 = make_support_rule(Dimension(1), 10, 2, 1.0, 4.0);
  double t = 0.0;
  for (const auto& [r, wr] : q2.radial) t += wr * std::exp(-r);
  CHECK(t == doctest::Approx(1.0 - std::exp(-4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(make_support_rule(Dimension(2), 10, 8, 2.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("l2s weight integral of the unit indicator, n=1") {
  // int_{-1}^1 dy / (1 + |y|^2) = 2 atan(1) = pi/2
  ScalarField u;
  u.dim = 1;
  u.eval = [](const Vec& x) { return std::abs(x[0]) < 1.0 ? 1.0 : 0.0; };
  u.tail = TailProfile::compact(1.0);
  double I = l2s_weight_integral(u, FracOrder(0.5), Dimension(1));
  CHECK(I == doctest::Approx(M_PI / 2.0).epsilon(1e-6));
}

TEST_CASE("TailProfile factories") {
  TailProfile a = TailProfile::algebraic(3.0, 2.5);
  CHECK(a.kind == TailKind::Algebraic);
  CHECK(a.amplitude == 3.0);
  CHECK(a.decay_p == 2.5);
  CHECK(TailProfile::compact(2.0).support_radius == 2.0);
  CHECK(TailProfile::weight_bounded(7.0).weight_bound == 7.0);
  CHECK(TailProfile::bounded(1.5).decay_p == 0.0);
}
