#pragma once

#include <cstdint>
#include <random>

#include "divmin/distribution.hpp"

namespace divmin {

/// Dyadic grid of mesh 2^-k on [0,1]^K. Vertex counts grow as
/// (2^k+1)^K, so levels are capped per dimension (k<=20 for K=1,
/// k<=10 for K=2, k<=6 for K=3, k<=4 beyond).
struct DyadicGrid {
  DyadicGrid(int level, int dim);

  int level;
  int dim;

  double mesh() const { return std::ldexp(1.0, -level); }
  std::int64_t cells_per_axis() const { return std::int64_t{1} << level; }

  static int max_level(int dim);
};

/// Integer grid coordinates of the minimal vertex of the cell containing x;
/// x_j = 1 belongs to the closed last cell.
std::vector<std::int64_t> cell_index(const Vector& x, const DyadicGrid& grid);

Vector cell_min_vertex(const Vector& x, const DyadicGrid& grid);

/// Stochastic-rounding kernel row K_k(.|x): product-Bernoulli distribution
/// over the 2^K vertices of the cell containing x, with mean exactly x.
FiniteDistribution kernel_distribution(const Vector& x, const DyadicGrid& grid);

/// Pushforward P K_k: mixture of kernel rows over the atoms of P.
FiniteDistribution pushforward(const FiniteDistribution& p,
                               const DyadicGrid& grid);

/// One draw from K_k(.|x) via K independent Bernoulli coordinates.
Vector sample_channel(const Vector& x, const DyadicGrid& grid,
                      std::mt19937_64& rng);

}  // namespace divmin
