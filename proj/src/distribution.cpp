#include "divmin/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace divmin {

namespace {
constexpr double kWeightSumTol = 1e-12;
constexpr double kRenormalizeTol = 1e-9;
}  // namespace

FiniteDistribution::FiniteDistribution(std::vector<Vector> atoms,
                                       Vector weights) {
  if (atoms.empty()) throw DomainError("distribution needs at least one atom");
  if (atoms.size() != weights.size())
    throw DomainError("atom/weight count mismatch");
  dim_ = static_cast<int>(atoms.front().size());
  if (dim_ < 1) throw DomainError("distribution dimension must be >= 1");

  double sum = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (static_cast<int>(atoms[i].size()) != dim_)
      throw DimensionMismatch("atoms have inconsistent dimensions");
    check_unit_cube(atoms[i]);
    if (!(weights[i] >= 0.0))
      throw DomainError("negative or NaN weight");
    sum += weights[i];
  }
  if (std::abs(sum - 1.0) > kRenormalizeTol)
    throw DomainError("weights sum to " + std::to_string(sum) +
                      ", beyond renormalization tolerance");
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    for (double& w : weights) w /= sum;
  }

  // Canonical form: merge duplicates through an ordered map, drop zeros.
  std::map<Vector, double> merged;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (weights[i] > 0.0) merged[atoms[i]] += weights[i];
  }
  if (merged.empty()) throw DomainError("all weights are zero");
  atoms_.reserve(merged.size());
  weights_.reserve(merged.size());
  for (auto& [atom, w] : merged) {
    atoms_.push_back(atom);
    weights_.push_back(w);
  }
}

Vector FiniteDistribution::mean() const {
  Vector m(dim_, 0.0);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    for (int j = 0; j < dim_; ++j) m[j] += weights_[i] * atoms_[i][j];
  }
  return m;
}

Vector mean(const FiniteDistribution& p) { return p.mean(); }

double kl_divergence(const FiniteDistribution& p, const FiniteDistribution& q) {
  if (p.dim() != q.dim())
    throw DimensionMismatch("kl_divergence: dimension mismatch");
  // Both canonical and sorted, so walk them in lockstep.
  double total = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vector& x = p.atoms()[i];
    while (j < q.size() && q.atoms()[j] < x) ++j;
    if (j >= q.size() || q.atoms()[j] != x) return kInfinity;
    total += p.weights()[i] * std::log(p.weights()[i] / q.weights()[j]);
  }
  return std::max(total, 0.0);
}

double FDivergenceSpec::f_tilde(double w) const {
  switch (name) {
    case Divergence::KL:
      if (w == 0.0) return kInfinity;
      return -std::log(w);
    case Divergence::Hellinger: {
      double d = std::sqrt(w) - 1.0;
      return d * d;
    }
    case Divergence::ChiSquared:
      if (w == 0.0) return kInfinity;
      return w + 1.0 / w - 2.0;
  }
  return 0.0;
}

double FDivergenceSpec::phi(double r) const {
  if (!in_domain(r)) return -kInfinity;
  switch (name) {
    case Divergence::KL:
      return 1.0 + std::log(r);
    case Divergence::Hellinger:
      return r / (r + 1.0);
    case Divergence::ChiSquared:
      return 2.0 * (std::sqrt(1.0 + r) - 1.0);
  }
  return 0.0;
}

double FDivergenceSpec::phi_prime(double r) const {
  switch (name) {
    case Divergence::KL:
      return 1.0 / r;
    case Divergence::Hellinger: {
      double d = r + 1.0;
      return 1.0 / (d * d);
    }
    case Divergence::ChiSquared:
      return 1.0 / std::sqrt(1.0 + r);
  }
  return 0.0;
}

FDivergenceSpec FDivergenceSpec::kl() {
  return {Divergence::KL, 0.0, 0.0, true};
}

FDivergenceSpec FDivergenceSpec::hellinger() {
  return {Divergence::Hellinger, 1.0, -1.0, true};
}

FDivergenceSpec FDivergenceSpec::chi_squared() {
  return {Divergence::ChiSquared, 1.0, -1.0, false};
}

FDivergenceSpec FDivergenceSpec::from_name(const std::string& name) {
  if (name == "kl") return kl();
  if (name == "hellinger") return hellinger();
  if (name == "chi2") return chi_squared();
  throw DomainError("unknown divergence spec '" + name +
                    "' (expected kl | hellinger | chi2)");
}

std::string FDivergenceSpec::display_name() const {
  switch (name) {
    case Divergence::KL: return "kl";
    case Divergence::Hellinger: return "hellinger";
    case Divergence::ChiSquared: return "chi2";
  }
  return "?";
}

double f_divergence(const FiniteDistribution& p, const FiniteDistribution& q,
                    const FDivergenceSpec& spec) {
  if (p.dim() != q.dim())
    throw DimensionMismatch("f_divergence: dimension mismatch");
  double total = 0.0;
  double q_on_support = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vector& x = p.atoms()[i];
    while (j < q.size() && q.atoms()[j] < x) ++j;
    double qx = (j < q.size() && q.atoms()[j] == x) ? q.weights()[j] : 0.0;
    q_on_support += qx;
    double term = p.weights()[i] * spec.f_tilde(qx / p.weights()[i]);
    if (term == kInfinity) return kInfinity;
    total += term;
  }
  total += spec.f_at_zero * std::max(0.0, 1.0 - q_on_support);
  return std::max(total, 0.0);
}

}  // namespace divmin
