#pragma once

#include <limits>

#include "divmin/common.hpp"

namespace divmin {

/// Weighted atoms on [0,1]^K, kept in canonical form: atoms sorted
/// lexicographically, exact duplicates merged, zero weights dropped,
/// weights summing to one. All divergence computations treat two
/// distributions as equal iff their canonical forms coincide.
class FiniteDistribution {
 public:
  FiniteDistribution(std::vector<Vector> atoms, Vector weights);

  const std::vector<Vector>& atoms() const { return atoms_; }
  const Vector& weights() const { return weights_; }
  int dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  Vector mean() const;

  bool operator==(const FiniteDistribution& other) const {
    return dim_ == other.dim_ && atoms_ == other.atoms_ &&
           weights_ == other.weights_;
  }

 private:
  std::vector<Vector> atoms_;
  Vector weights_;
  int dim_ = 0;
};

Vector mean(const FiniteDistribution& p);

/// KL(P,Q) = sum_{p_x>0} p_x log(p_x/q_x); +infinity when P is not
/// absolutely continuous w.r.t. Q.
double kl_divergence(const FiniteDistribution& p, const FiniteDistribution& q);

enum class Divergence { KL, Hellinger, ChiSquared };

/// Bundle of the functions attached to one divergence: f(0), the
/// perspective f~, the concave conjugate transform Phi, and the
/// half-line U_f on which Phi is finite.
struct FDivergenceSpec {
  Divergence name;
  double f_at_zero;
  double u_min;   // left endpoint of U_f
  bool u_open;    // true when U_f = (u_min, inf), false for [u_min, inf)

  double f_tilde(double w) const;
  double phi(double r) const;
  double phi_prime(double r) const;

  bool in_domain(double r) const {
    return u_open ? r > u_min : r >= u_min;
  }

  static FDivergenceSpec kl();
  static FDivergenceSpec hellinger();
  static FDivergenceSpec chi_squared();
  static FDivergenceSpec from_name(const std::string& name);
  std::string display_name() const;
};

/// D_f(P||Q) = E_P[f~(W)] + f(0) * (mass of Q off supp(P)), W = dQ_ac/dP.
double f_divergence(const FiniteDistribution& p, const FiniteDistribution& q,
                    const FDivergenceSpec& spec);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace divmin
