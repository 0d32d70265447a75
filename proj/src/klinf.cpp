#include "divmin/klinf.hpp"

#include <cmath>

#include "divmin/ascent.hpp"

namespace divmin {

double support_gap(const Vector& lambda, const Vector& mu) {
  check_interior(mu);
  if (lambda.size() != mu.size())
    throw DimensionMismatch("support_gap: lambda/mu dimension mismatch");
  // A linear function on a box maximizes componentwise.
  double s = 0.0;
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    s += lambda[j] > 0.0 ? lambda[j] * (1.0 - mu[j]) : -lambda[j] * mu[j];
  }
  return s;
}

Vector project_dual_ball(const Vector& lambda, const Vector& mu, double cap) {
  if (support_gap(lambda, mu) <= cap) return lambda;
  // Soft-threshold with weight (1-mu_j) on the positive side and mu_j on
  // the negative side; bisect the KKT multiplier until the constraint is
  // active.
  auto shrink = [&](double nu, Vector& out) {
    double gap = 0.0;
    for (std::size_t j = 0; j < lambda.size(); ++j) {
      double wp = 1.0 - mu[j], wn = mu[j];
      double z;
      if (lambda[j] > nu * wp) {
        z = lambda[j] - nu * wp;
        gap += wp * z;
      } else if (lambda[j] < -nu * wn) {
        z = lambda[j] + nu * wn;
        gap += wn * (-z);
      } else {
        z = 0.0;
      }
      out[j] = z;
    }
    return gap;
  };
  Vector out(lambda.size());
  double lo = 0.0, hi = 1.0;
  while (shrink(hi, out) > cap) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (shrink(mid, out) > cap ? lo : hi) = mid;
  }
  shrink(hi, out);  // feasible side
  return out;
}

double dual_objective(const FiniteDistribution& p, const Vector& mu,
                      const Vector& lambda) {
  check_interior(mu);
  if (p.dim() != static_cast<int>(mu.size()))
    throw DimensionMismatch("dual_objective: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j)
      z += lambda[j] * (p.atoms()[i][j] - mu[j]);
    double arg = 1.0 - z;
    if (arg <= 0.0) return -kInfinity;
    total += p.weights()[i] * std::log(arg);
  }
  return total;
}

Vector dual_gradient(const FiniteDistribution& p, const Vector& mu,
                     const Vector& lambda) {
  Vector g(mu.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j)
      z += lambda[j] * (p.atoms()[i][j] - mu[j]);
    double arg = 1.0 - z;
    if (arg <= 0.0) throw DomainError("dual_gradient: objective not finite");
    double c = p.weights()[i] / arg;
    for (std::size_t j = 0; j < mu.size(); ++j)
      g[j] -= c * (p.atoms()[i][j] - mu[j]);
  }
  return g;
}

namespace {

// K=1: the dual is a concave function of a scalar lambda on
// L_mu = [-1/mu, 1/(1-mu)], solved exactly by bisection on the
// derivative. Orders of magnitude faster than the ascent engine, which
// matters for the sequential procedures.
KlinfResult klinf_1d(const FiniteDistribution& p, double mu) {
  auto deriv = [&](double lam) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double d = p.atoms()[i][0] - mu;
      s += p.weights()[i] * (-d) / (1.0 - lam * d);
    }
    return s;
  };

  KlinfResult out;
  out.converged = true;
  double mean = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    mean += p.weights()[i] * p.atoms()[i][0];

  double lo, hi;
  if (mean == mu) {
    out.argmax.lambda = {0.0};
    return out;
  } else if (mean < mu) {
    lo = 0.0;
    hi = (1.0 - 1e-15) / (1.0 - mu);
    if (deriv(hi) >= 0.0) lo = hi;  // boundary optimum
  } else {
    hi = 0.0;
    lo = -(1.0 - 1e-15) / mu;
    if (deriv(lo) <= 0.0) hi = lo;
  }
  int iters = 0;
  while (hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)) &&
         iters < 200) {
    double mid = 0.5 * (lo + hi);
    (deriv(mid) > 0.0 ? lo : hi) = mid;
    ++iters;
  }
  double lam = 0.5 * (lo + hi);
  double value = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double arg = 1.0 - lam * (p.atoms()[i][0] - mu);
    value += p.weights()[i] * std::log(std::max(arg, 1e-300));
  }
  out.value = std::max(value, 0.0);
  out.argmax.lambda = {lam};
  out.iterations = iters;
  return out;
}

}  // namespace

KlinfResult klinf(const FiniteDistribution& p, const Vector& mu,
                  const KlinfOptions& opts) {
  check_interior(mu);
  if (p.dim() != static_cast<int>(mu.size()))
    throw DimensionMismatch("klinf: dimension mismatch");
  if (mu.size() == 1) {
    KlinfResult r = klinf_1d(p, mu[0]);
    r.argmax.gap = support_gap(r.argmax.lambda, mu);
    return r;
  }

  Objective f = [&](const Vector& lam) { return dual_objective(p, mu, lam); };
  Gradient grad = [&](const Vector& lam) { return dual_gradient(p, mu, lam); };

  KlinfResult best;
  best.argmax.lambda = Vector(mu.size(), 0.0);
  best.value = 0.0;  // lambda = 0 is always feasible with objective 0

  Vector start = opts.warm_start.value_or(Vector(mu.size(), 0.0));
  int total_iters = 0;
  bool all_converged = true;
  for (double eps : opts.eps_schedule) {
    const double cap = 1.0 - eps;
    Retraction retract = [&, cap](const Vector& lam) {
      return project_dual_ball(lam, mu, cap);
    };
    AscentOptions aopts;
    aopts.grad_tol = opts.grad_tol;
    aopts.max_iters = opts.max_iters_per_stage;
    AscentResult r = maximize(f, grad, retract, start, aopts);
    total_iters += r.iterations;
    all_converged = all_converged && r.converged;
    if (r.value > best.value) {
      best.value = r.value;
      best.argmax.lambda = r.x;
    }
    start = r.x;  // warm-start the next shrink level
  }
  best.argmax.gap = support_gap(best.argmax.lambda, mu);
  best.iterations = total_iters;
  best.converged = all_converged;
  best.value = std::max(best.value, 0.0);
  return best;
}

}  // namespace divmin
