#pragma once

#include <optional>

#include "divmin/distribution.hpp"

namespace divmin {

/// Dual vector for the mean-constrained problem, with its cached
/// feasibility margin sup_x lambda^T (x - mu) over the unit cube.
struct MeanDualVector {
  Vector lambda;
  double gap = 0.0;

  bool feasible(double eps = 0.0) const { return gap <= 1.0 - eps; }
};

struct KlinfResult {
  double value = 0.0;
  MeanDualVector argmax;
  int iterations = 0;
  bool converged = false;
};

/// sup_{x in [0,1]^K} lambda^T (x - mu), evaluated componentwise.
double support_gap(const Vector& lambda, const Vector& mu);

/// Euclidean projection onto {lambda: support_gap(lambda, mu) <= cap}.
/// The set is an asymmetric weighted l1 ball, so the projection is a
/// componentwise soft-threshold with the multiplier found by bisection.
Vector project_dual_ball(const Vector& lambda, const Vector& mu, double cap);

/// E_P[log(1 - lambda^T (X - mu))]; -infinity when an atom makes the
/// argument nonpositive.
double dual_objective(const FiniteDistribution& p, const Vector& mu,
                      const Vector& lambda);

Vector dual_gradient(const FiniteDistribution& p, const Vector& mu,
                     const Vector& lambda);

struct KlinfOptions {
  double tol = 1e-7;
  /// Shrink levels for the epsilon-interior retraction schedule.
  std::vector<double> eps_schedule = {1e-2, 1e-4, 1e-6, 1e-9};
  int max_iters_per_stage = 2000;
  double grad_tol = 1e-9;
  std::optional<Vector> warm_start;
};

/// Mean-constrained KLinf via the concave dual over L_mu.
KlinfResult klinf(const FiniteDistribution& p, const Vector& mu,
                  const KlinfOptions& opts = {});

inline KlinfResult klinf(const FiniteDistribution& p, const Vector& mu,
                         double tol) {
  KlinfOptions opts;
  opts.tol = tol;
  return klinf(p, mu, opts);
}

}  // namespace divmin
