#ifndef FLK_DISTRIB_HPP
#define FLK_DISTRIB_HPP

#include <memory>

#include "flk/field_core.hpp"
#include "flk/fraclap.hpp"
#include "flk/potentials.hpp"

// Test functions, distributional pairings <u, L*phi>, inequality checking,
// and the max/min composition verifications.

namespace flk {

// C^inf step: 0 for t <= 0, 1 for t >= 1, with analytic derivatives.
double smooth_step(double t);
double smooth_step_d1(double t);
double smooth_step_d2(double t);

// Radial C_0^inf test function: phi(x) = prof(|x-center|/radius), support in
// the closed ball.  prof and its derivatives are in the scaled variable t.
struct TestFunction {
  Vec center;
  double radius = 1.0;
  int dim = 2;
  std::function<double(double)> prof, dprof, d2prof;
  bool canonical = false;  // canonical bump profile (shares the fraclap cache)
  bool nonnegative = true;
  // smallest radial feature of the profile in t units; the fraclap cache
  // densifies its sample grid below 0.5
  double feature_scale = 1.0;

  double operator()(const Vec& x) const {
    double t = (x - center).norm() / radius;
    return t < 1.0 ? prof(t) : 0.0;
  }
  Vec grad(const Vec& x) const {
    Vec d = x - center;
    double r = d.norm();
    double t = r / radius;
    if (t >= 1.0 || r == 0.0) return Vec::zero(dim);
    return (dprof(t) / (radius * r)) * d;
  }
  double lap(const Vec& x) const {
    double t = (x - center).norm() / radius;
    if (t >= 1.0) return 0.0;
    if (t < 1e-12) return dim * d2prof(0.0) / (radius * radius);
    return (d2prof(t) + (dim - 1) / t * dprof(t)) / (radius * radius);
  }
  // (-Delta)^s phi via the cached radial reduction profile
  double fraclap(const Vec& x, double s) const;

  ScalarField as_field() const;

 private:
  mutable std::shared_ptr<void> cache_;
  mutable double cache_s_ = -1.0;
};

// Canonical bump prof(t) = exp(1 - 1/(1-t^2)), value 1 at the center.
TestFunction make_bump(const Vec& center, double radius);

// Radial annulus bump about the origin: smooth, 1 on [r_in+w, r_out-w],
// 0 outside [r_in, r_out].
TestFunction make_annulus_bump(double r_in, double r_out, Dimension dim,
                               double w_frac = 0.25);

// Smooth radial cutoff field: 1 on B_a, 0 outside B_b.
ScalarField make_smooth_cutoff(double a, double b, Dimension dim);

// Battery spanning scales 2^{-k}, k = 1..6, origin- and annulus-centered;
// seeded placement of the off-center angles.
std::vector<TestFunction> make_battery(Dimension dim, int count,
                                       unsigned seed);

struct PairingResult {
  double value = 0.0;
  double err = 0.0;
  double principal = 0.0;   // int u * (-Delta)^s phi (or -Delta phi)
  double drift = 0.0;       // int u * (-div(b phi))
  double zero_order = 0.0;  // int u * (c phi)
};

// <u, L* phi> where L* phi = (-Delta)^s phi - div(b phi) + c phi (fractional)
// or -Delta phi - div(b phi) + c phi (classical).
PairingResult pair_adjoint(const ScalarField& u, const OperatorSpec& spec,
                           const TestFunction& phi, const EvalBudget& budget);

struct SymbolicAtom {
  enum class Kind { Delta, DeltaGrad } kind = Kind::Delta;
  Vec p;
  double a = 0.0;  // Delta weight
  Vec d;           // DeltaGrad vector
  // <a delta_p, phi> = a phi(p); <(d.grad) delta_p, phi> = -d.grad phi(p)
  double pair(const TestFunction& phi) const {
    if (kind == Kind::Delta) return a * phi(p);
    return -d.dot(phi.grad(p));
  }
};

struct InequalityReport {
  struct Entry {
    int phi_index;
    double lhs, rhs, margin, tol;
    bool passed;
  };
  std::vector<Entry> entries;
  bool passed = true;
};

enum class CheckMode { GreaterEqual, LessEqual, Equality };

// For each phi: pair_adjoint(u) vs <rhs_measure + atoms, phi>.
InequalityReport check_distributional_inequality(
    const ScalarField& u, const OperatorSpec& spec, const MeasureApprox& rhs,
    const std::vector<SymbolicAtom>& atoms,
    const std::vector<TestFunction>& battery,
    CheckMode mode = CheckMode::GreaterEqual, double extra_tol = 0.0);

// <rhs measure + atoms, phi> by quadrature + exact atom pairing.
double pair_rhs(const MeasureApprox& rhs, const std::vector<SymbolicAtom>& atoms,
                const TestFunction& phi);

// w = max{u,v} with Lu <= f, Lv <= g: checks
// <w, L*phi> <= int (f chi_{u>v} + g chi_{u<v} + max{f,g} chi_{u=v}) phi + tol.
InequalityReport compose_max(const ScalarField& u, const ScalarField& v,
                             const ScalarField& f, const ScalarField& g,
                             const OperatorSpec& spec,
                             const std::vector<TestFunction>& battery,
                             bool precheck = true);

}  // namespace flk

#endif  // FLK_DISTRIB_HPP
