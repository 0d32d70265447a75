#include "divmin/fdiv_dual.hpp"

#include <cmath>

#include "divmin/ascent.hpp"

namespace divmin {

namespace {

double positive_part_sum(const Vector& lambda) {
  double s = 0.0;
  for (double v : lambda) s += std::max(v, 0.0);
  return s;
}

struct InnerSolution {
  double gamma = 0.0;
  double value = -kInfinity;
  bool boundary_active = false;
};

// For fixed lambda the dual objective is concave in gamma with
// derivative sum_i p_i Phi'(gamma - lambda^T x_i) - 1, decreasing in
// gamma. Solve the stationarity equation by bisection over
// [gamma_lb, inf), gamma_lb = sup_x lambda^T x + u_min.
InnerSolution solve_gamma(const FiniteDistribution& p, const Vector& mu,
                          const Vector& lambda, const FDivergenceSpec& spec) {
  const std::size_t m = p.size();
  Vector lx(m);
  for (std::size_t i = 0; i < m; ++i) lx[i] = dot(lambda, p.atoms()[i]);

  auto deriv = [&](double gamma) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      s += p.weights()[i] * spec.phi_prime(gamma - lx[i]);
    return s - 1.0;
  };
  auto objective = [&](double gamma) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double ph = spec.phi(gamma - lx[i]);
      if (!std::isfinite(ph)) return -kInfinity;
      s += p.weights()[i] * ph;
    }
    return s - gamma + dot(lambda, mu);
  };

  const double gamma_lb = positive_part_sum(lambda) + spec.u_min;
  const double tiny = 1e-12 * (1.0 + std::abs(gamma_lb));

  InnerSolution sol;
  double lo = gamma_lb + tiny;
  if (deriv(lo) <= 0.0) {
    sol.gamma = spec.u_open ? lo : gamma_lb;
    sol.boundary_active = true;
    sol.value = objective(spec.u_open ? lo : gamma_lb);
    return sol;
  }
  double hi = lo + 1.0;
  while (deriv(hi) > 0.0) {
    hi = gamma_lb + 2.0 * (hi - gamma_lb);
    if (hi > 1e12) break;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi));
       ++it) {
    double mid = 0.5 * (lo + hi);
    (deriv(mid) > 0.0 ? lo : hi) = mid;
  }
  sol.gamma = 0.5 * (lo + hi);
  sol.value = objective(sol.gamma);
  return sol;
}

}  // namespace

bool fdual_feasible(const FDualPoint& theta, const FDivergenceSpec& spec) {
  const double pos = positive_part_sum(theta.lambda);
  if (theta.gamma + spec.f_at_zero < pos) return false;
  const double worst = theta.gamma - pos;  // min over the box
  return spec.in_domain(worst);
}

double fdiv_dual_objective(const FiniteDistribution& p, const Vector& mu,
                           const FDualPoint& theta,
                           const FDivergenceSpec& spec) {
  check_interior(mu);
  if (p.dim() != static_cast<int>(mu.size()) ||
      theta.lambda.size() != mu.size())
    throw DimensionMismatch("fdiv_dual_objective: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double r = theta.gamma - dot(theta.lambda, p.atoms()[i]);
    double ph = spec.phi(r);
    if (!std::isfinite(ph)) return -kInfinity;
    total += p.weights()[i] * ph;
  }
  return total - (theta.gamma - dot(theta.lambda, mu));
}

FDualResult dinf(const FiniteDistribution& p, const Vector& mu,
                 const FDivergenceSpec& spec, double tol) {
  check_interior(mu);
  if (p.dim() != static_cast<int>(mu.size()))
    throw DimensionMismatch("dinf: dimension mismatch");
  (void)tol;

  Objective value_fn = [&](const Vector& lam) {
    return solve_gamma(p, mu, lam, spec).value;
  };
  Gradient grad_fn = [&](const Vector& lam) {
    InnerSolution sol = solve_gamma(p, mu, lam, spec);
    Vector g(mu.size(), 0.0);
    double phi_sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double r = sol.gamma - dot(lam, p.atoms()[i]);
      double c = p.weights()[i] * spec.phi_prime(r);
      phi_sum += c;
      for (std::size_t j = 0; j < mu.size(); ++j)
        g[j] -= c * p.atoms()[i][j];
    }
    for (std::size_t j = 0; j < mu.size(); ++j) g[j] += mu[j];
    if (sol.boundary_active) {
      // gamma pinned at sup_x lambda^T x + u_min; chain through its
      // subgradient 1{lambda_j > 0}.
      double h_prime = phi_sum - 1.0;
      for (std::size_t j = 0; j < mu.size(); ++j)
        if (lam[j] > 0.0) g[j] += h_prime;
    }
    return g;
  };
  Retraction identity = [](const Vector& lam) { return lam; };

  AscentOptions aopts;
  aopts.grad_tol = 1e-10;
  aopts.max_iters = 4000;
  AscentResult r =
      maximize(value_fn, grad_fn, identity, Vector(mu.size(), 0.0), aopts);

  // Second start seeded from the matching single-vector dual: its argmax
  // fixes the right direction, and the objective is concave along the
  // ray, so a ternary search pins the scale before the local ascent.
  Vector seed;
  switch (spec.name) {
    case Divergence::KL: seed = klinf(p, mu).argmax.lambda; break;
    case Divergence::Hellinger: seed = hellinger_inf(p, mu).argmax.lambda; break;
    case Divergence::ChiSquared: seed = chisq_inf(p, mu).argmax.lambda; break;
  }
  if (norm_2(seed) > 0.0) {
    auto ray = [&](double t) {
      Vector lam(seed);
      for (double& v : lam) v *= t;
      return value_fn(lam);
    };
    double lo = 0.0, hi = 1.0;
    while (ray(2.0 * hi) > ray(hi) && hi < 1e6) hi *= 2.0;
    hi *= 2.0;
    for (int it = 0; it < 100 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
      double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      (ray(m1) < ray(m2) ? lo = m1 : hi = m2);
    }
    Vector start(seed);
    for (double& v : start) v *= 0.5 * (lo + hi);
    AscentResult r2 = maximize(value_fn, grad_fn, identity, start, aopts);
    if (r2.value > r.value) r = r2;
  }

  FDualResult out;
  out.value = std::max(r.value, 0.0);
  out.argmax.lambda = r.x;
  out.argmax.gamma = solve_gamma(p, mu, r.x, spec).gamma;
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

namespace {

// Shared driver for the reduced single-vector duals over L_mu.
KlinfResult reduced_dual(const FiniteDistribution& p, const Vector& mu,
                         const Objective& f, const Gradient& grad) {
  check_interior(mu);
  if (p.dim() != static_cast<int>(mu.size()))
    throw DimensionMismatch("reduced dual: dimension mismatch");
  KlinfResult best;
  best.argmax.lambda = Vector(mu.size(), 0.0);
  best.value = 0.0;
  Vector start(mu.size(), 0.0);
  int total_iters = 0;
  bool all_converged = true;
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-9}) {
    const double cap = 1.0 - eps;
    Retraction retract = [&, cap](const Vector& lam) {
      return project_dual_ball(lam, mu, cap);
    };
    AscentOptions aopts;
    aopts.grad_tol = 1e-10;
    AscentResult r = maximize(f, grad, retract, start, aopts);
    total_iters += r.iterations;
    all_converged = all_converged && r.converged;
    if (r.value > best.value) {
      best.value = r.value;
      best.argmax.lambda = r.x;
    }
    start = r.x;
  }
  best.argmax.gap = support_gap(best.argmax.lambda, mu);
  best.iterations = total_iters;
  best.converged = all_converged;
  best.value = std::max(best.value, 0.0);
  return best;
}

}  // namespace

KlinfResult hellinger_inf(const FiniteDistribution& p, const Vector& mu,
                          double tol) {
  (void)tol;
  Objective f = [&](const Vector& lam) {
    double a = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double arg = 1.0;
      for (std::size_t j = 0; j < mu.size(); ++j)
        arg -= lam[j] * (p.atoms()[i][j] - mu[j]);
      if (arg <= 0.0) return -kInfinity;
      a += p.weights()[i] / arg;
    }
    return 2.0 - 2.0 * std::sqrt(a);
  };
  Gradient grad = [&](const Vector& lam) {
    double a = 0.0;
    Vector da(mu.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      double arg = 1.0;
      for (std::size_t j = 0; j < mu.size(); ++j)
        arg -= lam[j] * (p.atoms()[i][j] - mu[j]);
      a += p.weights()[i] / arg;
      double c = p.weights()[i] / (arg * arg);
      for (std::size_t j = 0; j < mu.size(); ++j)
        da[j] += c * (p.atoms()[i][j] - mu[j]);
    }
    double scale = -1.0 / std::sqrt(a);
    for (double& v : da) v *= scale;
    return da;
  };
  return reduced_dual(p, mu, f, grad);
}

KlinfResult chisq_inf(const FiniteDistribution& p, const Vector& mu,
                      double tol) {
  (void)tol;
  Objective f = [&](const Vector& lam) {
    double b = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double arg = 1.0;
      for (std::size_t j = 0; j < mu.size(); ++j)
        arg -= lam[j] * (p.atoms()[i][j] - mu[j]);
      if (arg < 0.0) return -kInfinity;
      b += p.weights()[i] * std::sqrt(arg);
    }
    return b * b - 1.0;
  };
  Gradient grad = [&](const Vector& lam) {
    double b = 0.0;
    Vector db(mu.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      double arg = 1.0;
      for (std::size_t j = 0; j < mu.size(); ++j)
        arg -= lam[j] * (p.atoms()[i][j] - mu[j]);
      double root = std::sqrt(std::max(arg, 1e-300));
      b += p.weights()[i] * root;
      double c = -p.weights()[i] / (2.0 * root);
      for (std::size_t j = 0; j < mu.size(); ++j)
        db[j] += c * (p.atoms()[i][j] - mu[j]);
    }
    for (double& v : db) v *= 2.0 * b;
    return db;
  };
  return reduced_dual(p, mu, f, grad);
}

}  // namespace divmin
