#pragma once

#include "divmin/klinf.hpp"

namespace divmin {

/// Dual point (lambda, gamma) of the general f-divergence dual.
struct FDualPoint {
  Vector lambda;
  double gamma = 0.0;
};

struct FDualResult {
  double value = 0.0;
  FDualPoint argmax;
  int iterations = 0;
  bool converged = false;
};

/// Both feasibility conditions evaluate in closed form on the box:
/// sup_rho lambda^T rho = sum_j max(lambda_j, 0) and the minimum of
/// gamma - lambda^T x equals gamma minus that same sum.
bool fdual_feasible(const FDualPoint& theta, const FDivergenceSpec& spec);

/// E_P[Phi(gamma - lambda^T X)] - (gamma - lambda^T mu); -infinity when
/// an atom leaves U_f.
double fdiv_dual_objective(const FiniteDistribution& p, const Vector& mu,
                           const FDualPoint& theta,
                           const FDivergenceSpec& spec);

/// Mean-constrained f-divergence via the (lambda, gamma) dual. gamma is
/// eliminated by an inner one-dimensional concave solve; the outer
/// lambda maximization reuses the gradient-ascent engine.
FDualResult dinf(const FiniteDistribution& p, const Vector& mu,
                 const FDivergenceSpec& spec, double tol = 1e-7);

/// Reduced single-vector Hellinger dual over L_mu.
KlinfResult hellinger_inf(const FiniteDistribution& p, const Vector& mu,
                          double tol = 1e-7);

/// Reduced single-vector chi-squared dual over L_mu.
KlinfResult chisq_inf(const FiniteDistribution& p, const Vector& mu,
                      double tol = 1e-7);

}  // namespace divmin
