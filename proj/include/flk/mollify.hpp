#ifndef FLK_MOLLIFY_HPP
#define FLK_MOLLIFY_HPP

#include "flk/field_core.hpp"
#include "flk/fraclap.hpp"

// Mollification J_delta and the commutator machinery of the smoothing lemmas.

namespace flk {

// Canonical radial bump j(y) = Z^{-1} exp(-1/(1-|y|^2)) on |y| < 1.
struct MollifierKernel {
  double delta = 0.1;
  int dim = 2;
  double Z = 0.0;  // normalization so that the n-dim mass is 1

  MollifierKernel(double delta_, Dimension d);

  // unnormalized profile and its radial derivative, as functions of |y|
  static double profile(double r) {
    if (r >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r * r));
  }

  double j(const Vec& y) const {
    return profile(y.norm()) / Z;
  }
  // grad j(y) = j(y) * (-2 y / (1-|y|^2)^2)
  Vec grad_j(const Vec& y) const {
    double r2 = y.norm2();
    if (r2 >= 1.0) return Vec::zero(y.dim);
    double q = 1.0 - r2;
    return (-2.0 / (q * q)) * (j(y)) * y;
  }
  // Delta j(y) = j(y) [4r^2/q^4 - 8r^2/q^3 - 2n/q^2], q = 1-|y|^2
  double lap_j(const Vec& y) const {
    double r2 = y.norm2();
    if (r2 >= 1.0) return 0.0;
    double q = 1.0 - r2;
    return j(y) * (4.0 * r2 / (q * q * q * q) - 8.0 * r2 / (q * q * q) -
                   2.0 * dim / (q * q));
  }
  double j_delta(const Vec& y) const {
    return j((1.0 / delta) * y) / std::pow(delta, dim);
  }
  // second radial moment m2 = int |z|^2 j(z) dz, by fine radial quadrature
  double second_moment() const;
};

// J_delta u(x) = int_{B_1} j(z) u(x - delta z) dz.
double mollify(const ScalarField& u, const MollifierKernel& k, const Vec& x);

// grad J_delta u(x) via the kernel gradient (never finite differences).
Vec mollify_gradient(const ScalarField& u, const MollifierKernel& k,
                     const Vec& x);

// The mollified field as a ScalarField (tail inflated by delta).
ScalarField mollified_field(const ScalarField& u, const MollifierKernel& k);

// Delta J_delta u(x) via the kernel Laplacian (no finite differences).
double mollify_laplacian(const ScalarField& u, const MollifierKernel& k,
                         const Vec& x);

// Mollified indicator chi^delta_{u>0}(x) = J_delta(chi_{u>0})(x).
double mollified_indicator(const ScalarField& u, const MollifierKernel& k,
                           const Vec& x);

// Mollified ball indicator chi^delta_{B_eps}(x) = J_delta(chi_{B_eps})(x).
double mollified_ball_indicator(double eps, const MollifierKernel& k,
                                const Vec& x);

struct CommutatorReport {
  std::vector<Vec> grid;
  std::vector<double> n_delta_values;
  std::vector<double> bound_rhs;  // Lemma 5.8 right side per grid point
  double l1_norm = 0.0;           // mean |N_delta| over the grid
  double grad_sup = 0.0;          // ||grad u||_{L^inf({u>0})} estimate
  double K = 0.0;                 // C^1 bound on b used in the rhs
};

// N_delta(x) = b(x).grad J_delta u(x) - J_delta(b.grad u)(x), evaluated via
// the identity N_delta(x) = int_{B_delta(x)} u(y) div_y[(b(y)-b(x)) j^delta(x-y)] dy.
double commutator_n_delta(const ScalarField& u, const CoefficientSet& coeffs,
                          const MollifierKernel& k, const Vec& x);

CommutatorReport commutator_report(const ScalarField& u,
                                   const CoefficientSet& coeffs,
                                   const MollifierKernel& k,
                                   const std::vector<Vec>& grid);

// Returns ((-Delta)^s J_delta u(x), J_delta[(-Delta)^s u](x)).
std::pair<double, double> mollified_fraclap_commutes(const ScalarField& u,
                                                     FracOrder s,
                                                     const MollifierKernel& k,
                                                     const Vec& x);

}  // namespace flk

#endif  // FLK_MOLLIFY_HPP
