#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "flk/barriers.hpp"

using namespace flk;

namespace {

// central-difference check of an analytic radial derivative
double fd(const std::function<double(double)>& f, double r, double h) {
  return (f(r + h) - f(r - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("classical barrier derivatives are consistent") {
  for (BarrierFamily fam :
       {BarrierFamily::ClassicalN2Log, BarrierFamily::ClassicalN3Power}) {
    int n = fam == BarrierFamily::ClassicalN2Log ? 2 : 3;
    Barrier b = make_barrier(fam, 0.02, 0.5, 1.0, Dimension(n));
    for (double r : {0.05, 0.2, 0.6}) {
      CHECK(b.dphi(r) ==
            doctest::Approx(fd([&](double t) { return b.phi(t); }, r, 1e-6))
                .epsilon(1e-6));
      // Delta phi = phi'' + (n-1)/r phi'
      double lap = fd([&](double t) { return b.dphi(t); }, r, 1e-6) +
                   (n - 1) / r * b.dphi(r);
      CHECK(b.lap_phi(r) == doctest::Approx(lap).epsilon(1e-5));
    }
    CHECK(b.sigma == doctest::Approx((2.0 * b.M + 1.0) / n));
  }
}

TEST_CASE("fractional barrier uses the power multiplier constant") {
  Barrier b = make_barrier(BarrierFamily::FractionalPower, 0.02, 0.25, 1.0,
                           Dimension(2), 0.75);
  CHECK(b.K == doctest::Approx(power_fraclap_constant(2, 0.75, 0.25))
                   .epsilon(1e-12));
  CHECK(std::isfinite(b.fraclap_phi(0.3)));
  CHECK(b.dphi(0.3) ==
        doctest::Approx(fd([&](double t) { return b.phi(t); }, 0.3, 1e-6))
            .epsilon(1e-6));
  // phi vanishes at r = eps, is negative inside, and increases outward;
  // psi is the positive part
  CHECK(b.phi(b.eps) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b.phi(0.5 * b.eps) < 0.0);
  CHECK(b.phi(0.05) < b.phi(0.5));
  CHECK(b.psi(0.5 * b.eps) == 0.0);
  CHECK(b.psi(0.5) == doctest::Approx(b.phi(0.5)));
  CHECK(b.grad_sup_positive() > 0.0);
}

TEST_CASE("make_barrier validates its inputs") {
  CHECK_THROWS_AS(
      make_barrier(BarrierFamily::ClassicalN2Log, 0.02, 0.5, 1.0, Dimension(3)),
      std::invalid_argument);
  CHECK_THROWS_AS(make_barrier(BarrierFamily::FractionalPower, 0.02, 0.6, 1.0,
                               Dimension(2), 0.75),
                  std::invalid_argument);  // alpha >= n - 2s
  CHECK_THROWS_AS(make_barrier(BarrierFamily::ClassicalN3Power, -0.1, 0.5, 1.0,
                               Dimension(3)),
                  std::invalid_argument);
}

TEST_CASE("classical barrier inequality certifies r0 >= 2^-4") {
  Barrier b = make_barrier(BarrierFamily::ClassicalN2Log, 0.01, 0.5, 1.0,
                           Dimension(2));
  CoefficientSet cs = CoefficientSet::zero(2);
  cs.b = [](const Vec& x) { return Vec(0.5 * x[1], -0.5 * x[0]); };
  cs.bound_M = 1.0;
  EvalBudget budget;
  BarrierCertification cert =
      certify_barrier_inequality(b, cs, {Vec(0.02, 0.01)}, budget);
  CHECK(cert.passed);
  CHECK(cert.r0 >= std::pow(2.0, -4));
  CHECK(cert.failing_points.empty());
}

TEST_CASE("fractional barrier inequality certifies on a sample grid") {
  Barrier b = make_barrier(BarrierFamily::FractionalPower, 0.02, 0.25, 1.0,
                           Dimension(2), 0.75);
  CoefficientSet cs = CoefficientSet::zero(2);
  cs.bound_M = 1.0;
  EvalBudget budget;
  BarrierCertification cert = certify_barrier_inequality(b, cs, {}, budget);
  CHECK(cert.passed);
  CHECK(cert.r0 > 0.0);
}

TEST_CASE("mollified fractional barrier inequality holds") {
  double eps = 0.05;
  Barrier b = make_barrier(BarrierFamily::FractionalPower, eps, 0.25, 1.0,
                           Dimension(2), 0.75);
  CoefficientSet cs = CoefficientSet::zero(2);
  cs.bound_M = 1.0;
  MollifierKernel k(eps / 4.0, Dimension(2));
  std::vector<Vec> grid = {Vec(0.08, 0.0), Vec(0.0, 0.2), Vec(0.3, 0.3)};
  MollifiedBarrierReport rep = certify_mollified_barrier(b, cs, k, grid);
  CHECK(rep.passed);
  CHECK(rep.worst_margin <= 1e-6);
  CHECK(rep.margins.size() == grid.size());
}

TEST_CASE("decay bound dominates the commutator kernels far out") {
  double s = 0.6;
  Barrier b = make_barrier(BarrierFamily::FractionalPower, 0.05, 0.25, 0.0,
                           Dimension(2), s);
  ScalarField eta;
  eta.dim = 2;
  eta.eval = [](const Vec& x) {
    double r = x.norm();
    if (r >= 2.0) return 0.0;
    if (r <= 1.0) return 1.0;
    double t = 2.0 - r;
    return t * t * (3.0 - 2.0 * t);
  };
  eta.tail = TailProfile::compact(2.0);
  ScalarField psi;
  psi.dim = 2;
  psi.eval = [b](const Vec& x) { return b.psi(x.norm()); };
  psi.tail = TailProfile::bounded(b.psi(1e-6));
  std::vector<Vec> xs = {Vec(0.5, 0.0), Vec(1.5, 0.5), Vec(4.0, 0.0),
                         Vec(8.0, 2.0)};
  DecayReport rep = decay_bound_report(eta, psi, FracOrder(s), xs);
  CHECK(rep.passed);
  CHECK(rep.fitted_C > 0.0);
  CHECK(rep.k1_values.size() == xs.size());
}
