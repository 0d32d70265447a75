#pragma once

#include <functional>
#include <map>
#include <variant>

#include "divmin/channel.hpp"
#include "divmin/fdiv_dual.hpp"

namespace divmin {

/// Constraint function g: [0,1]^K -> R^J with a user-declared sup-norm
/// Lipschitz modulus and uniform bound.
struct ConstraintFunction {
  std::string name;
  int dim_in = 0;
  int dim_out = 0;
  std::function<Vector(const Vector&)> eval;
  double lipschitz = 0.0;
  double bound = 0.0;
  /// Optional exact oracle: x maximizing <lambda, g(x)> over [0,1]^K.
  /// When present, feasibility of gamma - <lambda, g(x)> >= 0 is checked
  /// exactly instead of through the Lipschitz grid certificate, which
  /// removes the mesh-limited slack from the computed value. All
  /// builtins provide it (they are coordinate-separable).
  std::function<Vector(const Vector&)> support_argmax;

  /// Named builtins: "identity", "powers:j", "norms".
  static ConstraintFunction builtin(const std::string& name, int dim_in);
};

struct SingletonSet { Vector c; };
struct BoxSet { Vector lo, hi; };
struct PolytopeSet { std::vector<Vector> vertices; };

/// Closed convex target set with an exact linear-minimization oracle.
class ConstraintSet {
 public:
  explicit ConstraintSet(SingletonSet s);
  explicit ConstraintSet(BoxSet b);
  explicit ConstraintSet(PolytopeSet p);

  int dim() const { return dim_; }
  /// inf_{c in C} <c, lambda>.
  double support_min(const Vector& lambda) const;
  /// A minimizing point for the linear functional (a supergradient of
  /// the support term).
  Vector support_argmin(const Vector& lambda) const;
  bool contains(const Vector& point, double slack = 0.0) const;
  /// The same set inflated by eta in the sup norm (for discretized runs).
  ConstraintSet inflated(double eta) const;

 private:
  std::variant<SingletonSet, BoxSet, PolytopeSet> set_;
  int dim_ = 0;
};

struct CertifyResult {
  bool certified = false;
  double margin = 0.0;
};

/// Sound feasibility certificate: min over the level-m vertex grid of
/// gamma - <lambda, g(v)> must clear the Lipschitz slack L_g |lambda|_1 mesh.
CertifyResult certify_feasible(const FDualPoint& theta,
                               const ConstraintFunction& g, int grid_level);

/// E_P[log(gamma - <lambda, g(X)>)] + 1 - gamma + inf_C <c, lambda>.
double general_dual_objective(const FiniteDistribution& p,
                              const ConstraintFunction& g,
                              const ConstraintSet& c, const FDualPoint& theta);

struct GeneralDualResult {
  double value = 0.0;
  FDualPoint argmax;
  int iterations = 0;
  bool converged = false;
  bool unbounded_suspected = false;
  double truncation_radius = 0.0;
};

struct GeneralOptions {
  double tol = 1e-7;
  double initial_radius = 10.0;
  double max_radius = 1e4;
};

/// KLinf under the integral constraint E_Q[g(X)] in C, via the
/// (lambda, gamma) dual with certified feasibility and adaptive
/// dual-domain truncation.
GeneralDualResult klinf_general(const FiniteDistribution& p,
                                const ConstraintFunction& g,
                                const ConstraintSet& c,
                                const GeneralOptions& opts = {});

}  // namespace divmin
