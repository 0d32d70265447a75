#include "divmin/general.hpp"

#include <cmath>
#include <random>

#include "divmin/ascent.hpp"

namespace divmin {

namespace {

// argmax of a scalar function on [lo, hi] by repeated scan refinement;
// enough accuracy (about mesh^4) for the low-degree polynomials that
// arise per coordinate in the builtin constraint functions.
double argmax_1d(const std::function<double(double)>& f, double lo,
                 double hi) {
  double best_x = lo, best_v = f(lo);
  for (int pass = 0; pass < 4; ++pass) {
    const int n = 512;
    double step = (hi - lo) / n;
    for (int t = 0; t <= n; ++t) {
      double x = lo + step * t;
      double v = f(x);
      if (v > best_v) {
        best_v = v;
        best_x = x;
      }
    }
    lo = std::max(lo, best_x - step);
    hi = std::min(hi, best_x + step);
  }
  return best_x;
}

}  // namespace

ConstraintFunction ConstraintFunction::builtin(const std::string& name,
                                               int dim_in) {
  if (dim_in < 1) throw DomainError("constraint function needs dim >= 1");
  ConstraintFunction g;
  g.name = name;
  g.dim_in = dim_in;
  if (name == "identity") {
    g.dim_out = dim_in;
    g.eval = [](const Vector& x) { return x; };
    g.lipschitz = 1.0;
    g.bound = 1.0;
    g.support_argmax = [dim_in](const Vector& lam) {
      Vector x(dim_in);
      for (int j = 0; j < dim_in; ++j) x[j] = lam[j] > 0.0 ? 1.0 : 0.0;
      return x;
    };
    return g;
  }
  if (name.rfind("powers:", 0) == 0) {
    int degree = 0;
    try {
      degree = std::stoi(name.substr(7));
    } catch (...) {
      throw DomainError("bad powers spec '" + name + "'");
    }
    if (degree < 1 || degree > 8)
      throw DomainError("powers degree must be in [1,8]");
    g.dim_out = dim_in * degree;
    g.eval = [dim_in, degree](const Vector& x) {
      Vector out;
      out.reserve(std::size_t(dim_in) * degree);
      for (int p = 1; p <= degree; ++p)
        for (int j = 0; j < dim_in; ++j) out.push_back(std::pow(x[j], p));
      return out;
    };
    g.lipschitz = double(degree);  // |x^p - y^p| <= p |x - y| on [0,1]
    g.bound = 1.0;
    // <lambda, g(x)> separates across coordinates into low-degree
    // polynomials of one variable each.
    g.support_argmax = [dim_in, degree](const Vector& lam) {
      Vector x(dim_in);
      for (int j = 0; j < dim_in; ++j) {
        auto fj = [&](double t) {
          double s = 0.0, tp = 1.0;
          for (int p = 1; p <= degree; ++p) {
            tp *= t;
            s += lam[std::size_t(p - 1) * dim_in + j] * tp;
          }
          return s;
        };
        x[j] = argmax_1d(fj, 0.0, 1.0);
      }
      return x;
    };
    return g;
  }
  if (name == "norms") {
    g.dim_out = 2;
    g.eval = [](const Vector& x) {
      double l1 = 0.0, sq = 0.0;
      for (double v : x) {
        l1 += std::abs(v);
        sq += v * v;
      }
      return Vector{l1, sq};
    };
    g.lipschitz = 2.0 * dim_in;
    g.bound = double(dim_in);
    // Per coordinate: maximize a t + b t^2 on [0,1]; the optimum is an
    // endpoint or the interior vertex of the parabola.
    g.support_argmax = [dim_in](const Vector& lam) {
      const double a = lam[0], b = lam[1];
      double best_t = 0.0, best_v = 0.0;
      for (double t : {1.0, b < 0.0 ? std::clamp(-a / (2.0 * b), 0.0, 1.0)
                                    : 0.0}) {
        double v = a * t + b * t * t;
        if (v > best_v) {
          best_v = v;
          best_t = t;
        }
      }
      return Vector(dim_in, best_t);
    };
    return g;
  }
  throw DomainError("unknown constraint function '" + name +
                    "' (expected identity | powers:j | norms)");
}

ConstraintSet::ConstraintSet(SingletonSet s)
    : set_(std::move(s)), dim_(int(std::get<SingletonSet>(set_).c.size())) {
  if (dim_ < 1) throw DomainError("empty singleton constraint");
}

ConstraintSet::ConstraintSet(BoxSet b) : set_(std::move(b)) {
  const auto& box = std::get<BoxSet>(set_);
  dim_ = int(box.lo.size());
  if (dim_ < 1 || box.hi.size() != box.lo.size())
    throw DomainError("bad box constraint");
  for (int j = 0; j < dim_; ++j)
    if (box.lo[j] > box.hi[j]) throw DomainError("empty box constraint");
}

ConstraintSet::ConstraintSet(PolytopeSet p) : set_(std::move(p)) {
  const auto& poly = std::get<PolytopeSet>(set_);
  if (poly.vertices.empty()) throw DomainError("empty polytope constraint");
  dim_ = int(poly.vertices.front().size());
  for (const Vector& v : poly.vertices)
    if (int(v.size()) != dim_)
      throw DimensionMismatch("polytope vertices have mixed dimensions");
}

double ConstraintSet::support_min(const Vector& lambda) const {
  return dot(support_argmin(lambda), lambda);
}

Vector ConstraintSet::support_argmin(const Vector& lambda) const {
  if (int(lambda.size()) != dim_)
    throw DimensionMismatch("support_min: dimension mismatch");
  if (auto* s = std::get_if<SingletonSet>(&set_)) return s->c;
  if (auto* b = std::get_if<BoxSet>(&set_)) {
    Vector c(dim_);
    for (int j = 0; j < dim_; ++j)
      c[j] = lambda[j] > 0.0 ? b->lo[j] : b->hi[j];
    return c;
  }
  const auto& poly = std::get<PolytopeSet>(set_);
  const Vector* best = &poly.vertices.front();
  double best_val = dot(*best, lambda);
  for (const Vector& v : poly.vertices) {
    double val = dot(v, lambda);
    if (val < best_val) {
      best_val = val;
      best = &v;
    }
  }
  return *best;
}

bool ConstraintSet::contains(const Vector& point, double slack) const {
  if (int(point.size()) != dim_)
    throw DimensionMismatch("contains: dimension mismatch");
  if (auto* s = std::get_if<SingletonSet>(&set_)) {
    for (int j = 0; j < dim_; ++j)
      if (std::abs(point[j] - s->c[j]) > slack) return false;
    return true;
  }
  if (auto* b = std::get_if<BoxSet>(&set_)) {
    for (int j = 0; j < dim_; ++j)
      if (point[j] < b->lo[j] - slack || point[j] > b->hi[j] + slack)
        return false;
    return true;
  }
  // Polytope membership: distance from the hull via projected gradient
  // on mixture weights (small vertex counts only).
  const auto& poly = std::get<PolytopeSet>(set_);
  const std::size_t n = poly.vertices.size();
  Vector w(n, 1.0 / double(n));
  for (int it = 0; it < 2000; ++it) {
    Vector diff(dim_, 0.0);
    for (int j = 0; j < dim_; ++j) {
      for (std::size_t i = 0; i < n; ++i)
        diff[j] += w[i] * poly.vertices[i][j];
      diff[j] -= point[j];
    }
    // Frank-Wolfe step toward the vertex most aligned with -diff.
    std::size_t best = 0;
    double best_val = dot(poly.vertices[0], diff);
    for (std::size_t i = 1; i < n; ++i) {
      double val = dot(poly.vertices[i], diff);
      if (val < best_val) {
        best_val = val;
        best = i;
      }
    }
    double eta = 2.0 / (it + 2.0);
    for (std::size_t i = 0; i < n; ++i)
      w[i] = (1.0 - eta) * w[i] + (i == best ? eta : 0.0);
  }
  double dist = 0.0;
  for (int j = 0; j < dim_; ++j) {
    double pj = 0.0;
    for (std::size_t i = 0; i < n; ++i) pj += w[i] * poly.vertices[i][j];
    dist = std::max(dist, std::abs(pj - point[j]));
  }
  return dist <= slack + 1e-6;
}

ConstraintSet ConstraintSet::inflated(double eta) const {
  if (auto* s = std::get_if<SingletonSet>(&set_)) {
    BoxSet b{s->c, s->c};
    for (int j = 0; j < dim_; ++j) {
      b.lo[j] -= eta;
      b.hi[j] += eta;
    }
    return ConstraintSet(std::move(b));
  }
  if (auto* b = std::get_if<BoxSet>(&set_)) {
    BoxSet out = *b;
    for (int j = 0; j < dim_; ++j) {
      out.lo[j] -= eta;
      out.hi[j] += eta;
    }
    return ConstraintSet(std::move(out));
  }
  const auto& poly = std::get<PolytopeSet>(set_);
  PolytopeSet out;
  const std::uint64_t corners = std::uint64_t{1} << dim_;
  for (const Vector& v : poly.vertices) {
    for (std::uint64_t c = 0; c < corners; ++c) {
      Vector shifted(v);
      for (int j = 0; j < dim_; ++j)
        shifted[j] += ((c >> j) & 1) ? eta : -eta;
      out.vertices.push_back(std::move(shifted));
    }
  }
  return ConstraintSet(std::move(out));
}

namespace {

// Values of g on the level-m vertex grid, enumerated once and reused.
std::vector<Vector> grid_values(const ConstraintFunction& g, int level) {
  const std::int64_t per_axis = (std::int64_t{1} << level) + 1;
  const double mesh = std::ldexp(1.0, -level);
  std::vector<Vector> values;
  std::vector<std::int64_t> idx(g.dim_in, 0);
  while (true) {
    Vector x(g.dim_in);
    for (int j = 0; j < g.dim_in; ++j)
      x[j] = std::min(double(idx[j]) * mesh, 1.0);
    values.push_back(g.eval(x));
    int j = 0;
    for (; j < g.dim_in; ++j) {
      if (++idx[j] < per_axis) break;
      idx[j] = 0;
    }
    if (j == g.dim_in) break;
  }
  return values;
}

struct GridMax {
  double value = -kInfinity;
  std::size_t index = 0;
};

GridMax grid_max(const std::vector<Vector>& values, const Vector& lambda) {
  GridMax out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = dot(values[i], lambda);
    if (v > out.value) {
      out.value = v;
      out.index = i;
    }
  }
  return out;
}

}  // namespace

CertifyResult certify_feasible(const FDualPoint& theta,
                               const ConstraintFunction& g, int grid_level) {
  DyadicGrid grid(grid_level, g.dim_in);  // validates the level cap
  auto values = grid_values(g, grid_level);
  double min_slack = kInfinity;
  for (const Vector& gv : values)
    min_slack = std::min(min_slack, theta.gamma - dot(theta.lambda, gv));
  const double required = g.lipschitz * norm_1(theta.lambda) * grid.mesh();
  return {min_slack >= required, min_slack - required};
}

double general_dual_objective(const FiniteDistribution& p,
                              const ConstraintFunction& g,
                              const ConstraintSet& c, const FDualPoint& theta) {
  if (p.dim() != g.dim_in || int(theta.lambda.size()) != g.dim_out ||
      c.dim() != g.dim_out)
    throw DimensionMismatch("general_dual_objective: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double arg = theta.gamma - dot(theta.lambda, g.eval(p.atoms()[i]));
    if (arg <= 0.0) return -kInfinity;
    total += p.weights()[i] * std::log(arg);
  }
  return total + 1.0 - theta.gamma + c.support_min(theta.lambda);
}

GeneralDualResult klinf_general(const FiniteDistribution& p,
                                const ConstraintFunction& g,
                                const ConstraintSet& c,
                                const GeneralOptions& opts) {
  if (p.dim() != g.dim_in || c.dim() != g.dim_out)
    throw DimensionMismatch("klinf_general: dimension mismatch");

  // Precompute g on P's atoms.
  std::vector<Vector> gx(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) gx[i] = g.eval(p.atoms()[i]);

  std::map<int, std::vector<Vector>> grid_cache;
  auto grid_for = [&](int level) -> const std::vector<Vector>& {
    auto it = grid_cache.find(level);
    if (it == grid_cache.end())
      it = grid_cache.emplace(level, grid_values(g, level)).first;
    return it->second;
  };
  const int level_cap = DyadicGrid::max_level(g.dim_in);
  auto level_for = [&](double lambda_l1, double eps) {
    // L_g |lambda|_1 Delta_m <= eps/2
    double target = g.lipschitz * std::max(lambda_l1, 1.0);
    int m = 1;
    while (m < level_cap && target * std::ldexp(1.0, -m) > eps / 2.0) ++m;
    return m;
  };

  struct Inner {
    double gamma = 0.0;
    double value = -kInfinity;
    bool boundary = false;
    double gamma_lb_grad_scale = 0.0;  // h'(gamma) when boundary active
    Vector gamma_lb_grad;              // d(gamma_lb)/d(lambda)
  };

  // Lower bound on feasible gamma at this lambda, with its lambda
  // gradient (envelope theorem at the maximizing point). The exact
  // support oracle carries no Lipschitz slack; the grid certificate
  // needs the conservative margin.
  auto gamma_bound = [&](const Vector& lam, const std::vector<Vector>& gverts,
                         double mesh) {
    std::pair<double, Vector> out;
    if (g.support_argmax) {
      Vector gstar = g.eval(g.support_argmax(lam));
      out.first = dot(lam, gstar);
      out.second = std::move(gstar);
      return out;
    }
    GridMax gm = grid_max(gverts, lam);
    out.first = gm.value + g.lipschitz * norm_1(lam) * mesh;
    out.second = gverts[gm.index];
    for (int j = 0; j < g.dim_out; ++j) {
      if (lam[j] > 0.0) out.second[j] += g.lipschitz * mesh;
      else if (lam[j] < 0.0) out.second[j] -= g.lipschitz * mesh;
    }
    return out;
  };

  // Certified dual value at lambda: eliminate gamma by bisection on the
  // concave inner problem over [gamma_lb, inf).
  auto inner_value = [&](const Vector& lam, const std::vector<Vector>& gverts,
                         double mesh) {
    Inner sol;
    auto [gamma_lb, glb_grad] = gamma_bound(lam, gverts, mesh);
    sol.gamma_lb_grad = std::move(glb_grad);
    const double tiny = 1e-12 * (1.0 + std::abs(gamma_lb));
    auto deriv = [&](double gamma) {
      double s = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i)
        s += p.weights()[i] / (gamma - dot(lam, gx[i]));
      return s - 1.0;
    };
    auto objective = [&](double gamma) {
      double s = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        double arg = gamma - dot(lam, gx[i]);
        if (arg <= 0.0) return -kInfinity;
        s += p.weights()[i] * std::log(arg);
      }
      return s + 1.0 - gamma + c.support_min(lam);
    };
    double lo = gamma_lb + tiny;
    double d_lo = deriv(lo);
    if (d_lo <= 0.0) {
      sol.gamma = lo;
      sol.boundary = true;
      sol.gamma_lb_grad_scale = d_lo;
      sol.value = objective(lo);
      return sol;
    }
    double hi = lo + 1.0;
    while (deriv(hi) > 0.0 && hi < 1e12)
      hi = gamma_lb + 2.0 * (hi - gamma_lb);
    for (int it = 0;
         it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
      double mid = 0.5 * (lo + hi);
      (deriv(mid) > 0.0 ? lo : hi) = mid;
    }
    sol.gamma = 0.5 * (lo + hi);
    sol.value = objective(sol.gamma);
    return sol;
  };

  // Supergradient of the eliminated objective (a piece gradient where
  // the support argmax is unique; any active piece otherwise).
  auto inner_gradient = [&](const Vector& lam,
                            const std::vector<Vector>& gverts, double mesh) {
    Inner sol = inner_value(lam, gverts, mesh);
    Vector grad = c.support_argmin(lam);
    for (std::size_t i = 0; i < p.size(); ++i) {
      double ci = sol.gamma - dot(lam, gx[i]);
      double w = p.weights()[i] / ci;
      for (int j = 0; j < g.dim_out; ++j) grad[j] -= w * gx[i][j];
    }
    if (sol.boundary) {
      for (int j = 0; j < g.dim_out; ++j)
        grad[j] += sol.gamma_lb_grad_scale * sol.gamma_lb_grad[j];
    }
    return grad;
  };

  GeneralDualResult out;
  double radius = opts.initial_radius;
  Vector start(g.dim_out, 0.0);

  while (true) {
    int total_iters = 0;
    bool all_converged = true;
    Vector best_lambda = start;
    double best_value = -kInfinity;

    for (double eps : {1e-2, 1e-4, 1e-6}) {
      const int level =
          g.support_argmax ? 1 : level_for(norm_1(start) + 1.0, eps);
      const auto& gverts = grid_for(level);
      const double mesh = std::ldexp(1.0, -level);

      auto inner_solve = [&](const Vector& lam) {
        return inner_value(lam, gverts, mesh);
      };

      Objective value_fn = [&](const Vector& lam) {
        return inner_solve(lam).value;
      };
      Gradient grad_fn = [&](const Vector& lam) {
        return inner_gradient(lam, gverts, mesh);
      };
      Retraction ball = [&, radius](const Vector& lam) {
        double n2 = norm_2(lam);
        if (n2 <= radius) return lam;
        Vector scaled(lam);
        for (double& v : scaled) v *= radius / n2;
        return scaled;
      };

      AscentOptions aopts;
      aopts.grad_tol = 1e-10;
      aopts.max_iters = 4000;
      AscentResult r = maximize(value_fn, grad_fn, ball, start, aopts);
      total_iters += r.iterations;
      all_converged = all_converged && r.converged;
      if (r.value > best_value) {
        best_value = r.value;
        best_lambda = r.x;
      }
      start = r.x;
    }

    // Gradient-sampling polish. When the optimal gamma sits on the
    // feasibility boundary the eliminated objective has kinks where the
    // support argmax switches, and Armijo gradient ascent can stall on
    // the ridge between pieces. Sampling piece gradients around the
    // iterate and stepping along the minimum-norm element of their
    // convex hull follows such ridges (Burke-Lewis-Overton gradient
    // sampling).
    {
      const int level =
          g.support_argmax ? 1 : level_for(norm_1(best_lambda) + 1.0, 1e-6);
      const auto& gverts = grid_for(level);
      const double mesh = std::ldexp(1.0, -level);
      auto val = [&](const Vector& lam) {
        return inner_value(lam, gverts, mesh).value;
      };
      std::mt19937_64 samp_rng(0x5851f42d4c957f2dull);
      std::normal_distribution<double> gauss;

      // Min-norm point of conv{bundle} by Gilbert's algorithm.
      auto min_norm = [&](const std::vector<Vector>& bundle) {
        Vector v = bundle.front();
        for (int it = 0; it < 200; ++it) {
          double best_ip = kInfinity;
          const Vector* pick = nullptr;
          for (const Vector& b : bundle) {
            double ip = dot(v, b);
            if (ip < best_ip) {
              best_ip = ip;
              pick = &b;
            }
          }
          double vv = dot(v, v);
          if (best_ip >= vv - 1e-18) break;
          Vector diff(*pick);
          for (int j = 0; j < g.dim_out; ++j) diff[j] -= v[j];
          double dd = dot(diff, diff);
          if (dd == 0.0) break;
          double tstar = std::clamp(-dot(v, diff) / dd, 0.0, 1.0);
          for (int j = 0; j < g.dim_out; ++j) v[j] += tstar * diff[j];
        }
        return v;
      };

      Vector x = best_lambda;
      double fx = best_value;
      for (double r = 1e-2; r >= 1e-9; r *= 0.3) {
        for (int iter = 0; iter < 60; ++iter) {
          std::vector<Vector> bundle{inner_gradient(x, gverts, mesh)};
          for (int s = 0; s < 2 * g.dim_out + 6; ++s) {
            Vector pt(x);
            for (int j = 0; j < g.dim_out; ++j) pt[j] += r * gauss(samp_rng);
            if (val(pt) == -kInfinity) continue;
            bundle.push_back(inner_gradient(pt, gverts, mesh));
          }
          Vector v = min_norm(bundle);
          double nv = norm_2(v);
          if (nv < 1e-12) break;
          bool moved = false;
          double t = 8.0 * r;
          for (int bt = 0; bt < 30; ++bt, t *= 0.5) {
            Vector cand(x);
            for (int j = 0; j < g.dim_out; ++j) cand[j] += t * v[j] / nv;
            double n2 = norm_2(cand);
            if (n2 > radius)
              for (double& w : cand) w *= radius / n2;
            double fc = val(cand);
            if (fc > fx + 1e-4 * t * nv) {
              x = std::move(cand);
              fx = fc;
              moved = true;
              break;
            }
          }
          if (!moved) break;
        }
      }
      if (fx > best_value) {
        best_value = fx;
        best_lambda = x;
      }
    }

    out.iterations += total_iters;
    out.converged = all_converged;
    out.truncation_radius = radius;
    if (norm_2(best_lambda) > 0.9 * radius && radius < opts.max_radius) {
      radius = std::min(radius * 2.0, opts.max_radius);
      start = best_lambda;
      continue;
    }
    out.unbounded_suspected =
        norm_2(best_lambda) > 0.9 * radius && radius >= opts.max_radius;
    out.argmax.lambda = best_lambda;
    // Recover the inner gamma at the final lambda with the finest grid used.
    {
      const int level =
          g.support_argmax ? 1 : level_for(norm_1(best_lambda) + 1.0, 1e-6);
      const auto& gverts = grid_for(level);
      const double mesh = std::ldexp(1.0, -level);
      out.argmax.gamma = inner_value(best_lambda, gverts, mesh).gamma;
    }
    out.value = std::max(best_value, 0.0);
    break;
  }
  return out;
}

}  // namespace divmin
