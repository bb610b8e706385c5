#ifndef FLK_BARRIERS_HPP
#define FLK_BARRIERS_HPP

#include "flk/field_core.hpp"
#include "flk/fraclap.hpp"
#include "flk/mollify.hpp"

// Explicit barrier families and numerical certification of the differential
// inequalities and decay bounds behind the Bocher decompositions.

namespace flk {

enum class BarrierFamily { ClassicalN2Log, ClassicalN3Power, FractionalPower };

struct Barrier {
  BarrierFamily family = BarrierFamily::FractionalPower;
  double eps = 0.01;
  double alpha = 0.5;
  double sigma = 0.0;  // classical families: (2M+1)/n
  double M = 0.0;
  int dim = 2;
  double s = 0.75;           // fractional family only
  double K = 0.0;            // fractional: (-Delta)^s |x|^{-alpha} constant
  double certified_r0 = 0.0;

  double phi(double r) const;
  double dphi(double r) const;      // radial derivative
  double lap_phi(double r) const;   // classical families: Delta phi
  double fraclap_phi(double r) const;  // fractional family
  double psi(double r) const { return std::max(phi(r), 0.0); }
  Vec grad_phi(const Vec& x) const {
    double r = x.norm();
    return (dphi(r) / r) * x;
  }
  // sup |grad phi| over the relevant positivity set, sampled on a log grid
  double grad_sup_positive() const;
};

Barrier make_barrier(BarrierFamily family, double eps, double alpha, double M,
                     Dimension dim, double s = 0.5);

struct BarrierCertification {
  double r0 = 0.0;
  bool passed = false;
  // (radius candidate, worst margin over its sample ball); margin <= 0 passes
  std::vector<std::pair<double, double>> sweep;
  std::vector<Vec> failing_points;
};

// Classical: -Delta phi - b.grad phi + (2M+1) phi <= 0; fractional:
// (-Delta)^s phi - b.grad phi + 2M phi <= 2M.  Dyadic sweep for the largest
// passing radius; extra user grid points with |x| <= r0 are also checked.
BarrierCertification certify_barrier_inequality(const Barrier& b,
                                                const CoefficientSet& coeffs,
                                                const std::vector<Vec>& grid,
                                                const EvalBudget& budget);

struct MollifiedBarrierReport {
  bool passed = false;
  double worst_margin = 0.0;  // max over grid of LHS - RHS (<= tol passes)
  std::vector<std::pair<Vec, double>> margins;
};

MollifiedBarrierReport certify_mollified_barrier(const Barrier& b,
                                                 const CoefficientSet& coeffs,
                                                 const MollifierKernel& k,
                                                 const std::vector<Vec>& grid);

struct DecayReport {
  std::vector<Vec> sample_xs;
  std::vector<double> k1_values;
  std::vector<double> k2_values;
  double fitted_C = 0.0;
  bool passed = false;
};

// K1(x) = |psi(x) (-Delta)^s eta(x)|,
// K2(x) = int |eta(x)-eta(y)| |psi(x)-psi(y)| / |x-y|^{n+2s} dy.
// eta must declare a compact tail (its support radius bounds the kernel
// integral's active region).  C is fitted on samples with |x| <= 2 and
// domination is then checked on the far samples.
DecayReport decay_bound_report(const ScalarField& eta, const ScalarField& psi,
                               FracOrder s, const std::vector<Vec>& sample_xs);

}  // namespace flk

#endif  // FLK_BARRIERS_HPP
