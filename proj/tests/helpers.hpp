#pragma once

#include <cmath>
#include <random>

#include "divmin/distribution.hpp"

namespace testutil {

using divmin::FiniteDistribution;
using divmin::Vector;

inline FiniteDistribution bern(double p) {
  return FiniteDistribution({{0.0}, {1.0}}, {1.0 - p, p});
}

inline double binary_kl(double p, double mu) {
  auto term = [](double a, double b) {
    return a == 0.0 ? 0.0 : a * std::log(a / b);
  };
  return term(p, mu) + term(1.0 - p, 1.0 - mu);
}

inline double binary_hellinger(double p, double mu) {
  return 2.0 - 2.0 * (std::sqrt(p * mu) +
                      std::sqrt((1.0 - p) * (1.0 - mu)));
}

inline double binary_chisq(double p, double mu) {
  return p * p / mu + (1.0 - p) * (1.0 - p) / (1.0 - mu) - 1.0;
}

inline FiniteDistribution random_distribution(std::mt19937_64& rng, int dim,
                                              int max_atoms = 10) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> natoms(2, max_atoms);
  int m = natoms(rng);
  std::vector<Vector> atoms(m, Vector(dim));
  Vector w(m);
  double ws = 0.0;
  for (int a = 0; a < m; ++a) {
    for (int j = 0; j < dim; ++j) atoms[a][j] = unif(rng);
    w[a] = unif(rng) + 1e-3;
    ws += w[a];
  }
  for (double& v : w) v /= ws;
  return FiniteDistribution(atoms, w);
}

inline Vector random_interior_mean(std::mt19937_64& rng, int dim,
                                   double lo = 0.1, double hi = 0.9) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Vector mu(dim);
  for (double& v : mu) v = unif(rng);
  return mu;
}

}  // namespace testutil
