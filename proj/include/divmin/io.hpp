#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "divmin/distribution.hpp"

namespace divmin {

/// {"dim": K, "atoms": [[...], ...], "weights": [...]}
FiniteDistribution load_distribution(const std::string& path);
FiniteDistribution parse_distribution(const std::string& json_text);
std::string distribution_to_json(const FiniteDistribution& p);

struct Scenario {
  FiniteDistribution null_dist;
  std::optional<FiniteDistribution> alt_dist;
  std::optional<int> change_at;
  double alpha = 0.05;
  int n_max = 1000;
  int replicates = 100;
  std::uint64_t seed = 0;
};

Scenario load_scenario(const std::string& path);

/// Deterministic per-replicate stream: replicate r of master seed s is
/// seeded by splitmix64 applied to (s, r), so replicates are
/// order-independent and parallel-safe.
std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t replicate);

/// One draw from a finite distribution (inverse CDF on the atom list).
Vector sample_atom(const FiniteDistribution& p, std::mt19937_64& rng);

/// Comma-separated reals, e.g. "0.5,0.25".
Vector parse_csv_vector(const std::string& text);

}  // namespace divmin
