#include "divmin/primal.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "divmin/channel.hpp"
#include "divmin/klinf.hpp"

namespace divmin {

namespace {

constexpr double kBarrierFloor = 1e-12;

using LVector = std::vector<long double>;

// Extended precision: the Schur complement of the barrier Newton system
// can have condition number ~1/t, so the extra mantissa bits are what
// keep the computed step on the affine constraint.
LVector gauss_solve(std::vector<LVector> a, LVector rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      long double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  LVector x(n, 0.0L);
  for (std::size_t r = n; r-- > 0;) {
    long double s = rhs[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

// The affine constraint {sum q = 1, sum q x = mu} as a (K+1) x m matrix:
// all-ones row, then one row per coordinate.
struct AffineConstraint {
  std::vector<Vector> rows;
  Vector b;

  AffineConstraint(const std::vector<Vector>& support, const Vector& mu) {
    const std::size_t m = support.size(), k = mu.size();
    rows.assign(k + 1, Vector(m, 1.0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < k; ++j) rows[j + 1][i] = support[i][j];
    b.assign(k + 1, 1.0);
    for (std::size_t j = 0; j < k; ++j) b[j + 1] = mu[j];
  }

  double residual(const Vector& q) const {
    double s = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double d = dot(rows[r], q) - b[r];
      s += d * d;
    }
    return std::sqrt(s);
  }
};

struct PrimalObjective {
  const FiniteDistribution* p;
  const FDivergenceSpec* spec;
  std::size_t n_support;  // first n_support entries are P's atoms

  double eval(const Vector& q, double floor) const {
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double qi = std::max(q[i], i < n_support ? floor : 0.0);
      if (i < n_support) {
        double pi = p->weights()[i];
        double term = pi * spec->f_tilde(qi / pi);
        if (!std::isfinite(term)) return kInfinity;
        total += term;
      } else {
        total += spec->f_at_zero * qi;
      }
    }
    return total;
  }

  Vector gradient(const Vector& q) const {
    Vector g(q.size(), spec->f_at_zero);
    for (std::size_t i = 0; i < n_support; ++i) {
      double pi = p->weights()[i];
      double qi = std::max(q[i], kBarrierFloor);
      double w = qi / pi;
      switch (spec->name) {
        case Divergence::KL:
          g[i] = -pi / qi;
          break;
        case Divergence::Hellinger:
          g[i] = 1.0 - 1.0 / std::sqrt(w);
          break;
        case Divergence::ChiSquared:
          g[i] = 1.0 - 1.0 / (w * w);
          break;
      }
    }
    return g;
  }

  // q_i^2 * (objective Hessian diagonal); zero on the linear
  // off-support part. The q^2 scaling cancels the blow-up as q_i -> 0,
  // which keeps the Newton systems well conditioned near the boundary.
  Vector hessian_qq(const Vector& q) const {
    Vector s(q.size(), 0.0);
    for (std::size_t i = 0; i < n_support; ++i) {
      double pi = p->weights()[i];
      double qi = std::max(q[i], kBarrierFloor);
      switch (spec->name) {
        case Divergence::KL:
          s[i] = pi;
          break;
        case Divergence::Hellinger:
          s[i] = 0.5 * std::sqrt(pi * qi);
          break;
        case Divergence::ChiSquared:
          s[i] = 2.0 * pi * pi / qi;
          break;
      }
    }
    return s;
  }
};

// Strictly feasible interior start: mix the uniform measure on the
// support with a product-Bernoulli measure on the cube corners whose
// parameter is chosen so the mixture mean is exactly mu.
Vector interior_start(const std::vector<Vector>& support, const Vector& mu) {
  const std::size_t m = support.size(), k = mu.size();
  Vector bar(k, 0.0);
  for (const Vector& s : support)
    for (std::size_t j = 0; j < k; ++j) bar[j] += s[j] / double(m);
  double margin = 1.0;
  for (double v : mu) margin = std::min({margin, v, 1.0 - v});
  const double delta = 0.5 * margin;
  Vector theta(k);
  for (std::size_t j = 0; j < k; ++j)
    theta[j] = (mu[j] - delta * bar[j]) / (1.0 - delta);

  Vector q(m, delta / double(m));
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << k); ++c) {
    Vector corner(k);
    double w = 1.0 - delta;
    for (std::size_t j = 0; j < k; ++j) {
      corner[j] = (c >> j) & 1 ? 1.0 : 0.0;
      w *= (c >> j) & 1 ? theta[j] : 1.0 - theta[j];
    }
    for (std::size_t i = 0; i < m; ++i)
      if (support[i] == corner) {
        q[i] += w;
        break;
      }
  }
  return q;
}

PrimalResult solve_primal(const FiniteDistribution& p, const Vector& mu,
                          const FDivergenceSpec& spec, double tol) {
  check_interior(mu);
  if (p.dim() != static_cast<int>(mu.size()))
    throw DimensionMismatch("primal solver: dimension mismatch");
  (void)tol;

  std::vector<Vector> support = restricted_support(p);
  // Reorder so P's atoms come first; restricted_support dedups, so look
  // each atom up by value.
  std::vector<Vector> ordered;
  ordered.reserve(support.size());
  for (const Vector& a : p.atoms()) ordered.push_back(a);
  for (const Vector& s : support) {
    bool is_atom = false;
    for (const Vector& a : p.atoms())
      if (a == s) { is_atom = true; break; }
    if (!is_atom) ordered.push_back(s);
  }
  const std::size_t m = ordered.size();
  const std::size_t kc = mu.size() + 1;

  AffineConstraint affine(ordered, mu);
  PrimalObjective obj{&p, &spec, p.size()};

  // Log-barrier interior-point method: minimize t*F(q) - sum log q_i on
  // {Aq = b} by equality-constrained Newton, then sharpen t. The
  // Hessian is diagonal, so each Newton step reduces to a (K+1)x(K+1)
  // Schur-complement solve.
  Vector q = interior_start(ordered, mu);
  auto barrier_value = [&](const Vector& v, double t) {
    double s = 0.0;
    for (double x : v) {
      if (x <= 0.0) return kInfinity;
      s -= std::log(x);
    }
    double f = obj.eval(v, 0.0);
    return std::isfinite(f) ? t * f + s : kInfinity;
  };

  // Stop when the barrier duality gap m/t is below the target accuracy.
  for (double t = 1.0; t < 2.0 * double(m) / 1e-10; t *= 10.0) {
    for (int newton = 0; newton < 80; ++newton) {
      Vector gobj = obj.gradient(q);
      Vector sqq = obj.hessian_qq(q);
      // With H = t*f'' + q^-2 (barrier included), 1/H = q^2/(1+t*q^2 f'')
      // and (g/H)_i = q_i (t g_i q_i - 1)/(1 + t q_i^2 f''_i); both stay
      // well scaled as q_i -> 0.
      LVector invh(m), gih(m), g(m);
      for (std::size_t i = 0; i < m; ++i) {
        long double qi = q[i];
        long double denom = 1.0L + (long double)t * sqq[i];
        invh[i] = qi * qi / denom;
        gih[i] = qi * ((long double)t * gobj[i] * qi - 1.0L) / denom;
        g[i] = (long double)t * gobj[i] - 1.0L / qi;
      }
      // Infeasible-start Schur system (A H^-1 A^T) nu = r - A H^-1 g
      // with r = Aq - b; then dq = -H^-1 (g + A^T nu), which also
      // corrects roundoff drift in Aq = b.
      std::vector<LVector> schur(kc, LVector(kc, 0.0L));
      LVector rhs(kc, 0.0L);
      for (std::size_t r = 0; r < kc; ++r) {
        for (std::size_t c = r; c < kc; ++c) {
          long double s = 0.0L;
          for (std::size_t i = 0; i < m; ++i)
            s += (long double)affine.rows[r][i] * affine.rows[c][i] * invh[i];
          schur[r][c] = schur[c][r] = s;
        }
        long double s = (long double)dot(affine.rows[r], q) - affine.b[r];
        for (std::size_t i = 0; i < m; ++i)
          s -= (long double)affine.rows[r][i] * gih[i];
        rhs[r] = s;
      }
      LVector nu = gauss_solve(schur, rhs);
      Vector dq(m);
      double decrement = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        long double corr = 0.0L;
        for (std::size_t r = 0; r < kc; ++r) corr += nu[r] * affine.rows[r][i];
        dq[i] = (double)(-gih[i] - corr * invh[i]);
        decrement -= (double)g[i] * dq[i];
      }
      if (decrement < 1e-13) break;

      double step = 1.0;
      for (std::size_t i = 0; i < m; ++i)
        if (dq[i] < 0.0) step = std::min(step, -0.99 * q[i] / dq[i]);
      double base = barrier_value(q, t);
      Vector cand(m);
      int bt = 0;
      for (; bt < 60; ++bt, step *= 0.5) {
        for (std::size_t i = 0; i < m; ++i) cand[i] = q[i] + step * dq[i];
        if (barrier_value(cand, t) <= base - 0.25 * step * decrement) break;
      }
      if (bt == 60) break;
      q = cand;
    }
    if (std::getenv("DIVMIN_PRIMAL_DEBUG")) {
      double qmin = kInfinity;
      for (double v : q) qmin = std::min(qmin, v);
      std::fprintf(stderr, "t=%.3e resid=%.3e qmin=%.3e val=%.12f\n", t,
                   affine.residual(q), qmin, obj.eval(q, 0.0));
    }
  }

  double mass = 0.0;
  for (double v : q) mass += v;
  for (double& v : q) v /= mass;
  PrimalResult out{obj.eval(q, 0.0), FiniteDistribution(ordered, q),
                   affine.residual(q)};
  out.value = std::max(out.value, 0.0);
  return out;
}

}  // namespace

std::vector<Vector> restricted_support(const FiniteDistribution& p) {
  const int k = p.dim();
  if (k > 10)
    throw DomainError("restricted_support: corner enumeration capped at K=10");
  std::vector<Vector> support(p.atoms());
  const std::uint64_t corners = std::uint64_t{1} << k;
  for (std::uint64_t c = 0; c < corners; ++c) {
    Vector v(k);
    for (int j = 0; j < k; ++j) v[j] = (c >> j) & 1 ? 1.0 : 0.0;
    bool present = false;
    for (const Vector& a : support)
      if (a == v) { present = true; break; }
    if (!present) support.push_back(std::move(v));
  }
  return support;
}

PrimalResult primal_klinf_finite(const FiniteDistribution& p, const Vector& mu,
                                 double tol) {
  return solve_primal(p, mu, FDivergenceSpec::kl(), tol);
}

PrimalResult primal_fdiv_finite(const FiniteDistribution& p, const Vector& mu,
                                const FDivergenceSpec& spec, double tol) {
  return solve_primal(p, mu, spec, tol);
}

ConvergenceTable convergence_probe(const FiniteDistribution& p,
                                   const Vector& mu, int k_min, int k_max) {
  ConvergenceTable table;
  for (int k = k_min; k <= k_max; ++k) {
    DyadicGrid grid(k, p.dim());
    table.rows.push_back({k, klinf(pushforward(p, grid), mu).value});
  }
  table.undiscretized_value = klinf(p, mu).value;
  return table;
}

}  // namespace divmin
