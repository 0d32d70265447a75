#include "divmin/channel.hpp"

#include <cmath>
#include <map>

namespace divmin {

int DyadicGrid::max_level(int dim) {
  switch (dim) {
    case 1: return 20;
    case 2: return 10;
    case 3: return 6;
    default: return 4;
  }
}

DyadicGrid::DyadicGrid(int level, int dim) : level(level), dim(dim) {
  if (dim < 1) throw DomainError("grid dimension must be >= 1");
  if (level < 1) throw DomainError("grid level must be >= 1");
  if (level > max_level(dim))
    throw DomainError("grid level " + std::to_string(level) +
                      " exceeds cap " + std::to_string(max_level(dim)) +
                      " for dimension " + std::to_string(dim));
}

std::vector<std::int64_t> cell_index(const Vector& x, const DyadicGrid& grid) {
  check_unit_cube(x);
  if (static_cast<int>(x.size()) != grid.dim)
    throw DimensionMismatch("cell_index: point/grid dimension mismatch");
  const std::int64_t cells = grid.cells_per_axis();
  std::vector<std::int64_t> idx(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    auto i = static_cast<std::int64_t>(std::floor(x[j] * double(cells)));
    idx[j] = std::min(i, cells - 1);
  }
  return idx;
}

Vector cell_min_vertex(const Vector& x, const DyadicGrid& grid) {
  auto idx = cell_index(x, grid);
  Vector a(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    a[j] = std::ldexp(double(idx[j]), -grid.level);
  return a;
}

FiniteDistribution kernel_distribution(const Vector& x,
                                       const DyadicGrid& grid) {
  const Vector a = cell_min_vertex(x, grid);
  const double mesh = grid.mesh();
  const int k_dim = grid.dim;
  Vector t(k_dim);
  for (int j = 0; j < k_dim; ++j) t[j] = (x[j] - a[j]) / mesh;

  std::vector<Vector> atoms;
  Vector weights;
  const unsigned combos = 1u << k_dim;
  for (unsigned s = 0; s < combos; ++s) {
    double w = 1.0;
    Vector v(a);
    for (int j = 0; j < k_dim; ++j) {
      if (s & (1u << j)) {
        w *= t[j];
        v[j] = std::min(a[j] + mesh, 1.0);
      } else {
        w *= 1.0 - t[j];
      }
    }
    if (w > 0.0) {
      atoms.push_back(std::move(v));
      weights.push_back(w);
    }
  }
  return FiniteDistribution(std::move(atoms), std::move(weights));
}

FiniteDistribution pushforward(const FiniteDistribution& p,
                               const DyadicGrid& grid) {
  if (p.dim() != grid.dim)
    throw DimensionMismatch("pushforward: distribution/grid dimension mismatch");
  // Accumulate by integer vertex coordinates so dedup is exact.
  std::map<std::vector<std::int64_t>, double> mass;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vector& x = p.atoms()[i];
    const double wi = p.weights()[i];
    auto idx = cell_index(x, grid);
    const double cells = double(grid.cells_per_axis());
    Vector t(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      t[j] = x[j] * cells - double(idx[j]);
    const unsigned combos = 1u << grid.dim;
    std::vector<std::int64_t> v(idx);
    for (unsigned s = 0; s < combos; ++s) {
      double w = wi;
      for (int j = 0; j < grid.dim; ++j) {
        if (s & (1u << j)) {
          w *= t[j];
          v[j] = idx[j] + 1;
        } else {
          w *= 1.0 - t[j];
          v[j] = idx[j];
        }
      }
      if (w > 0.0) mass[v] += w;
    }
  }
  std::vector<Vector> atoms;
  Vector weights;
  atoms.reserve(mass.size());
  for (auto& [v, w] : mass) {
    Vector pt(v.size());
    for (std::size_t j = 0; j < v.size(); ++j)
      pt[j] = std::ldexp(double(v[j]), -grid.level);
    atoms.push_back(std::move(pt));
    weights.push_back(w);
  }
  return FiniteDistribution(std::move(atoms), std::move(weights));
}

Vector sample_channel(const Vector& x, const DyadicGrid& grid,
                      std::mt19937_64& rng) {
  const Vector a = cell_min_vertex(x, grid);
  const double mesh = grid.mesh();
  Vector y(x.size());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    double t = (x[j] - a[j]) / mesh;
    y[j] = (unif(rng) < t) ? std::min(a[j] + mesh, 1.0) : a[j];
  }
  return y;
}

}  // namespace divmin
