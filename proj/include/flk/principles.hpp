#ifndef FLK_PRINCIPLES_HPP
#define FLK_PRINCIPLES_HPP

#include <string>
#include <tuple>

#include "flk/distrib.hpp"
#include "flk/field_core.hpp"
#include "flk/fraclap.hpp"
#include "flk/mollify.hpp"
#include "flk/potentials.hpp"

// End-to-end verification drivers: explicit maximum-principle constants,
// punctured-ball maximum principles, singular-coefficient recovery (Bocher
// decomposition), and the n=1 counterexample suite.

namespace flk {

struct PrincipleConstants {
  double M1 = 0.0;
  double M2 = 0.0;
  double sigma_moll = 1.0;  // in (0,1]; := 1 convention when M = 0
  double M3 = 0.0;
  double alpha = 0.0;  // M2 / (2 (M1 + M2 + 2M + M*M3)), in (0,1)
  double m = 1.0;
  double M = 0.0;
};

PrincipleConstants compute_principle_constants(Dimension dim, FracOrder s,
                                               double M,
                                               const MollifierKernel& k);

struct MaxPrincipleReport {
  std::string verdict;  // "pass" | "fail" | "inconclusive"
  double alpha = 0.0;
  double floor_value = 0.0;  // alpha*m (or m for classical M=0)
  double grid_min = 0.0;
  Vec witness;  // interior grid point attaining the minimum
  bool annulus_ok = false;
  bool nonneg_ok = false;
  bool alpha_empirical = false;  // classical M>0: alpha reported, not asserted
  InequalityReport supersolution_check;
};

// Re-verifies the supersolution and annulus-floor hypotheses, then checks the
// interior grid minimum of u against the constants' floor.  A principle
// failure with failed preconditions is reported as "inconclusive".
MaxPrincipleReport verify_max_principle(const ScalarField& u,
                                        const OperatorSpec& spec, double m,
                                        bool punctured,
                                        const PrincipleConstants& consts,
                                        const std::vector<Vec>& interior_grid,
                                        double r_annulus = 0.5,
                                        unsigned seed = 1);

struct SingularDecomposition {
  double a_hat = 0.0;
  Vec d_hat;
  // (r_inner, r_outer, mass estimate of mu on the annulus)
  std::vector<std::tuple<double, double, double>> annulus_masses;
  std::vector<double> annulus_errs;  // pairing error estimates, same order
  std::vector<double> ratio_sequence;  // delta-ball average ratios vs Phi
};

// Step-3 delta-ball detection of the atom/dipole at the origin plus annulus
// partition-of-unity mass estimates; Richardson extrapolation on the last two
// entries of the decreasing delta_sequence.  Throws when the averages diverge
// faster than Phi's (singularity stronger than an atom).
SingularDecomposition recover_singular_coefficient(
    const ScalarField& u, const OperatorSpec& spec,
    const std::vector<double>& delta_sequence);

struct CounterexampleReport {
  struct Entry {
    std::string label;
    double value = 0.0;
    double expected = 0.0;  // target value or threshold
    double tol = 0.0;
    bool passed = false;
  };
  std::vector<Entry> entries;
  bool passed = true;
};

// Remark-1 suite for n=1, -u'': (i) u=|x| gives -2 delta_0; (ii) the step
// gives the pure dipole delta_0'; (iii) u=|x|^{1/2} gives unbounded annulus
// masses toward the origin.
CounterexampleReport counterexample_suite_n1();

}  // namespace flk

#endif  // FLK_PRINCIPLES_HPP
