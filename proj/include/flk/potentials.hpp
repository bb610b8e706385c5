#ifndef FLK_POTENTIALS_HPP
#define FLK_POTENTIALS_HPP

#include "flk/field_core.hpp"
#include "flk/fraclap.hpp"

// Fundamental solutions, Riesz/Newtonian potentials of discrete-plus-density
// measures, and the fractional Poisson kernel machinery.

namespace flk {

struct FundKind {
  bool classical = false;
  double s = 0.5;  // ignored when classical
  static FundKind frac(double s_) { return {false, s_}; }
  static FundKind classic() { return {true, 0.0}; }
};

// Phi for -Delta (n >= 2) or (-Delta)^s (n > 2s).  Classical n>=3:
// |x|^{2-n}/(n(n-2)omega_n); n=2: -(1/2pi) log|x|; fractional: C'_{n,s}|x|^{2s-n}.
ScalarField fundamental_solution(Dimension dim, FundKind kind);

// 1-D classical fundamental solution -|x|/2 (so that -Phi'' = delta_0);
// internal helper for the n=1 counterexample suite.
ScalarField fundamental_solution_1d();

struct MeasureApprox {
  std::vector<std::pair<Vec, double>> atoms;  // (location, mass)
  ScalarField density;                        // optional, compact support
  bool has_density = false;
  double density_radius = 0.0;  // support radius of the density
};

// Potential of the measure against the chosen fundamental solution.
double riesz_potential(const MeasureApprox& m, FracOrder s, Dimension dim,
                       const Vec& x);
double newton_potential(const MeasureApprox& m, Dimension dim, const Vec& x);
double potential_against(const MeasureApprox& m, const ScalarField& Phi,
                         const Vec& x);

// (1/delta^{s_exponent}) int_{B_delta} u dx.
double delta_ball_average(const ScalarField& u, double delta,
                          double s_exponent, Dimension dim);
// First moment int_{B_delta} u(x) x dx (used for dipole detection).
Vec delta_ball_first_moment(const ScalarField& u, double delta, Dimension dim);

// P_t(x,y) = c(n,s) [(t^2-|x|^2)/(|y|^2-t^2)]^s |x-y|^{-n}, |x| < t < |y|.
struct PoissonKernel {
  double t = 1.0;
  double s = 0.5;
  int dim = 2;
  double c = 0.0;  // normalization, fixed numerically by unit kernel mass

  PoissonKernel(double t_, FracOrder s_, Dimension d);
  double value(const Vec& x, const Vec& y) const;
};

// Normalization c(n,s): computed by enforcing int_{B_t^c} P_t(0,y) dy = 1.
double poisson_normalization(int n, double s);

// int_{B_t^c} P_t(x,y) data(y) dy, exterior radial integral via |y| = t/zeta.
double poisson_extend(const ScalarField& exterior_data, const PoissonKernel& k,
                      const Vec& x);

// Total kernel mass int_{B_t^c} P_t(x,y) dy (should be 1).
double poisson_kernel_mass(const PoissonKernel& k, const Vec& x);

struct AveragedKernel {
  double r = 1.0;
  double delta0 = 0.1;
  double s = 0.5;
  int dim = 2;
  AveragedKernel(double r_, double delta0_, FracOrder s_, Dimension d);
  // G_{r,delta0}(x,y) = (1/delta0) int_{r-delta0}^{min(|y|,r)} P_t(x,y) dt
  double value(const Vec& x, const Vec& y) const;
};

// int_{|y| >= r-delta0} G_{r,delta0}(x,y) data(y) dy, computed as the t-average
// of poisson_extend (equivalent by Fubini).
double averaged_kernel_extend(const ScalarField& exterior_data,
                              const AveragedKernel& g, const Vec& x);

}  // namespace flk

#endif  // FLK_POTENTIALS_HPP
