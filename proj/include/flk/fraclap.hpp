#ifndef FLK_FRACLAP_HPP
#define FLK_FRACLAP_HPP

#include "flk/field_core.hpp"

// Pointwise evaluation of (-Delta)^s, the classical Laplacian, and the full
// drift operator L = (-Delta)^s + b.grad + c, plus an independent spectral
// (Fourier multiplier) oracle.

namespace flk {

// Normalization constant C_{n,s} = 4^s Gamma(n/2+s) / (pi^{n/2} |Gamma(-s)|),
// which makes the Fourier symbol |xi|^{2s}.
double fraclap_constant(int n, double s);

// Fundamental-solution constant C'_{n,s} = Gamma(n/2-s)/(4^s pi^{n/2} Gamma(s));
// Phi_s(x) = C'_{n,s} |x|^{2s-n} solves (-Delta)^s Phi_s = delta_0 (n > 2s).
double fundamental_constant(int n, double s);

enum class OperatorKind { Classical, Fractional };

struct OperatorSpec {
  OperatorKind kind = OperatorKind::Fractional;
  double s = 0.5;  // used when kind == Fractional
  CoefficientSet coeffs;
  int dim = 2;
  double normalization() const {
    return kind == OperatorKind::Fractional ? fraclap_constant(dim, s) : 1.0;
  }
};

struct EvalBudget {
  int radial_order = 10;
  int sphere_order = 20;
  double near_rho = 0.1;
  double far_R = 50.0;
  double target_tol = 1e-8;

  // Global multiplier from FLK_QUAD_BUDGET (>=1); applied to the orders.
  static int global_multiplier();
  EvalBudget scaled() const;
};

struct EvalResult {
  double value = 0.0;
  double err = 0.0;
};

// (-Delta)^s u(x) via symmetrized near field + annulus + analytic tail.
EvalResult eval_fraclap(const ScalarField& u, const Vec& x, FracOrder s,
                        const EvalBudget& budget);

// -Delta u(x) by central second differences with one Richardson level.
double eval_laplacian(const ScalarField& u, const Vec& x, double h);

// grad u(x) by central differences with one Richardson level.
Vec eval_gradient(const ScalarField& u, const Vec& x, double h = 0.0);

// Principal part + b.grad u + c u.
double eval_full_operator(const ScalarField& u, const OperatorSpec& spec,
                          const Vec& x, const EvalBudget& budget);

// Angular kernel A(t) = int_{S^{n-1}} |e_1 - t omega|^{-n-2s} d omega for
// t in (0,1); closed forms for n = 1, 3, quadrature for n = 2.
double angular_kernel(int n, double s, double t);

// (-Delta)^s of a radial field u(|x|) at radius r > 0 via the 1-D reduction
//   C_{n,s} r^{-2s} int_0^1 A(t) [(u(r)-u(rt)) t^{n-1} + (u(r)-u(r/t)) t^{2s-1}] dt,
// valid when the full integral converges (profile in L_2s with u C^2 near r).
double radial_fraclap(const std::function<double(double)>& profile, double r,
                      int n, double s, int order = 12, int levels = 40);

// Constant K(n,s,alpha) with (-Delta)^s |x|^{-alpha} = K |x|^{-alpha-2s},
// for 0 < alpha < n - 2s (positive there, zero at alpha = n-2s).
double power_fraclap_constant(int n, double s, double alpha);

struct SpectralResult {
  double value = 0.0;
  double alias_fraction = 0.0;  // high-frequency energy fraction
  bool reliable = true;
};

// Independent oracle: periodize u on [-L/2, L/2]^n, apply the multiplier
// |xi|^{2s} in Fourier space, evaluate at x by direct mode summation.
SpectralResult spectral_oracle_full(const ScalarField& u, const Vec& x,
                                    FracOrder s, double grid_extent,
                                    int grid_points);
double spectral_oracle(const ScalarField& u, const Vec& x, FracOrder s,
                       double grid_extent, int grid_points);

}  // namespace flk

#endif  // FLK_FRACLAP_HPP
