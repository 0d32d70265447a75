#pragma once

#include <cstdint>

#include "divmin/distribution.hpp"

namespace divmin {

/// Deduplicated union of P's atoms and the 2^K cube corners (K <= 10).
std::vector<Vector> restricted_support(const FiniteDistribution& p);

struct PrimalResult {
  double value = 0.0;
  FiniteDistribution minimizer;
  /// Final Euclidean distance to the constraint polytope, for diagnostics.
  double constraint_residual = 0.0;
};

/// Minimizes sum p_i log(p_i/q_i) over {q >= 0, sum q = 1, sum q x = mu}
/// on the restricted support, by projected gradient descent with Dykstra
/// projections. Entirely independent of the dual formulas.
PrimalResult primal_klinf_finite(const FiniteDistribution& p, const Vector& mu,
                                 double tol = 1e-9);

/// Same polytope, f-divergence objective
/// sum_{x in supp(P)} p_x f~(q_x/p_x) + f(0) * sum_{x off supp} q_x.
PrimalResult primal_fdiv_finite(const FiniteDistribution& p, const Vector& mu,
                                const FDivergenceSpec& spec, double tol = 1e-9);

struct ConvergenceRow {
  int level;
  double value;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double undiscretized_value = 0.0;
};

/// klinf of pushforward(P, k) across a range of levels, plus the
/// undiscretized value.
ConvergenceTable convergence_probe(const FiniteDistribution& p,
                                   const Vector& mu, int k_min, int k_max);

}  // namespace divmin
