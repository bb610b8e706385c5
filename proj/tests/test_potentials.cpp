#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "flk/potentials.hpp"

using namespace flk;

TEST_CASE("fundamental solutions have the right closed forms") {
  ScalarField f2 = fundamental_solution(Dimension(2), FundKind::classic());
  CHECK(f2(Vec(2.0, 0.0)) ==
        doctest::Approx(-std::log(2.0) / (2.0 * M_PI)).epsilon(1e-14));
  ScalarField f3 = fundamental_solution(Dimension(3), FundKind::classic());
  CHECK(f3(Vec(2.0, 0.0, 0.0)) ==
        doctest::Approx(1.0 / (8.0 * M_PI)).epsilon(1e-14));
  ScalarField fs = fundamental_solution(Dimension(2), FundKind::frac(0.5));
  CHECK(fs(Vec(0.5, 0.0)) ==
        doctest::Approx(0.15915494309189534 / 0.5).epsilon(1e-12));
  CHECK(fs.poles.size() == 1);
  CHECK_THROWS_AS(fundamental_solution(Dimension(1), FundKind::frac(0.75)),
                  std::invalid_argument);
  CHECK_THROWS_AS(fundamental_solution(Dimension(1), FundKind::classic()),
                  std::invalid_argument);
  CHECK(fundamental_solution_1d()(Vec(3.0, 1)) == doctest::Approx(-1.5));
}

TEST_CASE("atomic potentials are exact translates of Phi") {
  MeasureApprox m;
  m.atoms = {{Vec(0.5, 0.0), 2.0}, {Vec(-0.5, 0.0), 1.0}};
  Vec x(0.0, 1.0);
  double d = std::sqrt(1.25);
  CHECK(newton_potential(m, Dimension(2), x) ==
        doctest::Approx(-3.0 * std::log(d) / (2.0 * M_PI)).epsilon(1e-12));
  CHECK(riesz_potential(m, FracOrder(0.5), Dimension(2), x) ==
        doctest::Approx(3.0 * 0.15915494309189534 / d).epsilon(1e-12));
  CHECK_THROWS_AS(newton_potential(m, Dimension(2), Vec(0.5, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("Newton shell theorem for a uniform ball density, n=3") {
  MeasureApprox m;
  m.has_density = true;
  m.density_radius = 0.5;
  m.density.dim = 3;
  m.density.eval = [](const Vec& y) { return y.norm() < 0.5 ? 1.0 : 0.0; };
  m.density.tail = TailProfile::compact(0.5);
  double mass = ball_volume(3) * std::pow(0.5, 3);
  Vec x(1.2, 0.0, 0.0);
  // outside the ball the potential equals that of a point mass at the center
  CHECK(newton_potential(m, Dimension(3), x) ==
        doctest::Approx(mass / (4.0 * M_PI * 1.2)).epsilon(2e-3));
}

TEST_CASE("delta-ball averages of a constant") {
  ScalarField one;
  one.dim = 2;
  one.eval = [](const Vec&) { return 1.0; };
  one.tail = TailProfile::bounded(1.0);
  CHECK(delta_ball_average(one, 0.3, 0.0, Dimension(2)) ==
        doctest::Approx(M_PI * 0.09).epsilon(1e-10));
  CHECK(delta_ball_average(one, 0.3, 2.0, Dimension(2)) ==
        doctest::Approx(M_PI).epsilon(1e-10));
  CHECK_THROWS_AS(delta_ball_average(one, 0.0, 1.0, Dimension(2)),
                  std::invalid_argument);
  Vec mom = delta_ball_first_moment(one, 0.3, Dimension(2));
  CHECK(std::abs(mom[0]) < 1e-12);
  CHECK(std::abs(mom[1]) < 1e-12);
}

TEST_CASE("Poisson normalization equals sin(pi s) Gamma(n/2) / pi^{n/2+1}") {
  // the normalization is fixed numerically by unit kernel mass, so the match
  // is limited by the boundary-singularity quadrature (~1e-5 relative)
  CHECK(poisson_normalization(2, 0.5) ==
        doctest::Approx(0.10132118364233777).epsilon(2e-4));
  CHECK(poisson_normalization(3, 0.75) ==
        doctest::Approx(0.035822448015672266).epsilon(2e-4));
  CHECK(poisson_normalization(1, 0.4) ==
        doctest::Approx(0.30273069145626279).epsilon(2e-4));
}

TEST_CASE("Poisson kernel mass is 1 on and off center") {
  PoissonKernel k(1.0, FracOrder(0.5), Dimension(2));
  CHECK(poisson_kernel_mass(k, Vec(0.0, 0.0)) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(poisson_kernel_mass(k, Vec(0.4, 0.2)) ==
        doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(poisson_kernel_mass(k, Vec(1.0, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("Poisson extension reproduces an s-harmonic function") {
  // Phi_s(. - z) with z outside B_t is s-harmonic inside B_t, so its Poisson
  // extension from exterior data must reproduce its interior values
  double s = 0.75;
  PoissonKernel k(1.0, FracOrder(s), Dimension(2));
  Vec z(3.0, 1.0);
  ScalarField Phi = fundamental_solution(Dimension(2), FundKind::frac(s));
  ScalarField data;
  data.dim = 2;
  data.eval = [Phi, z](const Vec& y) { return Phi(y - z); };
  data.tail = TailProfile::algebraic(1.0, 2.0 - 2.0 * s);
  Vec x(0.3, -0.2);
  CHECK(poisson_extend(data, k, x) ==
        doctest::Approx(Phi(x - z)).epsilon(1e-3));
  CHECK_THROWS_AS(poisson_extend(data, k, Vec(1.5, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("averaged kernel agrees with the t-average of extensions") {
  double s = 0.5;
  AveragedKernel g(1.0, 0.2, FracOrder(s), Dimension(2));
  ScalarField one;
  one.dim = 2;
  one.eval = [](const Vec&) { return 1.0; };
  one.tail = TailProfile::bounded(1.0);
  CHECK(averaged_kernel_extend(one, g, Vec(0.2, 0.1)) ==
        doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(AveragedKernel(1.0, 1.5, FracOrder(s), Dimension(2)),
                  std::invalid_argument);
  // pointwise kernel value is nonnegative and vanishes deep inside the ball
  CHECK(g.value(Vec(0.1, 0.0), Vec(0.5, 0.0)) == 0.0);
  CHECK(g.value(Vec(0.1, 0.0), Vec(1.5, 0.0)) > 0.0);
}
