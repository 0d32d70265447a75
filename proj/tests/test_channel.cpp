#include <doctest.h>

#include <cmath>

#include "divmin/channel.hpp"
#include "helpers.hpp"

using namespace divmin;
using namespace testutil;

TEST_CASE("cell_min_vertex: floors, boundary, componentwise") {
  DyadicGrid g1(1, 1);
  CHECK(cell_min_vertex({0.3}, g1)[0] == 0.0);
  DyadicGrid g2(2, 1);
  CHECK(cell_min_vertex({1.0}, g2)[0] == 0.75);  // closed last cell
  DyadicGrid g3(1, 2);
  Vector v = cell_min_vertex({0.6, 0.1}, g3);
  CHECK(v[0] == 0.5);
  CHECK(v[1] == 0.0);
}

TEST_CASE("kernel_distribution: product-Bernoulli rows") {
  DyadicGrid g(1, 1);
  FiniteDistribution k = kernel_distribution({0.3}, g);
  REQUIRE(k.size() == 2);
  CHECK(k.atoms()[0][0] == 0.0);
  CHECK(k.atoms()[1][0] == 0.5);
  CHECK(k.weights()[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(k.weights()[1] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(k.mean()[0] == doctest::Approx(0.3).epsilon(1e-15));

  // Vertex input -> point mass.
  FiniteDistribution at = kernel_distribution({0.5}, g);
  CHECK(at.size() == 1);
  CHECK(at.atoms()[0][0] == 0.5);

  DyadicGrid g2(1, 2);
  FiniteDistribution quarter = kernel_distribution({0.25, 0.25}, g2);
  REQUIRE(quarter.size() == 4);
  for (double w : quarter.weights())
    CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("pushforward: exactness, mean preservation, contraction") {
  DyadicGrid g(1, 1);
  FiniteDistribution unif({{0.25}, {0.75}}, {0.5, 0.5});
  FiniteDistribution pk = pushforward(unif, g);
  REQUIRE(pk.size() == 3);
  CHECK(pk.weights()[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(pk.weights()[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pk.weights()[2] == doctest::Approx(0.25).epsilon(1e-15));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    int dim = 1 + int(i % 3);
    FiniteDistribution p = random_distribution(rng, dim);
    int cap = DyadicGrid::max_level(dim);
    int k = 1 + int(i % cap);
    DyadicGrid grid(k, dim);
    FiniteDistribution q = pushforward(p, grid);
    Vector mp = p.mean(), mq = q.mean();
    for (int j = 0; j < dim; ++j)
      CHECK(std::abs(mp[j] - mq[j]) <= 1e-12);
    // Every output atom is within the mesh of some input atom.
    for (const Vector& a : q.atoms()) {
      double best = kInfinity;
      for (const Vector& x : p.atoms()) {
        double d = 0.0;
        for (int j = 0; j < dim; ++j)
          d = std::max(d, std::abs(a[j] - x[j]));
        best = std::min(best, d);
      }
      CHECK(best <= grid.mesh() + 1e-15);
    }
  }
}

TEST_CASE("pushforward fixes vertex-supported distributions") {
  DyadicGrid g(2, 1);
  FiniteDistribution p({{0.0}, {0.25}, {1.0}}, {0.25, 0.5, 0.25});
  CHECK(pushforward(p, g) == p);
}

TEST_CASE("composition: coarsening a finer rounding (dyadic rationals)") {
  // Exact on dyadic-rational atoms and weights.
  FiniteDistribution p({{0.125}, {0.375}, {0.8125}}, {0.25, 0.25, 0.5});
  for (int k = 1; k <= 3; ++k) {
    DyadicGrid coarse(k, 1), fine(k + 1, 1);
    FiniteDistribution direct = pushforward(p, coarse);
    FiniteDistribution composed = pushforward(pushforward(p, fine), coarse);
    REQUIRE(direct.size() == composed.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
      CHECK(direct.atoms()[i] == composed.atoms()[i]);
      CHECK(direct.weights()[i] ==
            doctest::Approx(composed.weights()[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("weak-convergence proxy for Lipschitz test functions") {
  std::mt19937_64 rng(5);
  auto h = [](const Vector& x) { return std::abs(x[0] - 0.3); };  // Lip 1
  for (int i = 0; i < 20; ++i) {
    FiniteDistribution p = random_distribution(rng, 1);
    for (int k = 1; k <= 6; ++k) {
      DyadicGrid grid(k, 1);
      FiniteDistribution q = pushforward(p, grid);
      double ep = 0.0, eq = 0.0;
      for (std::size_t j = 0; j < p.size(); ++j)
        ep += p.weights()[j] * h(p.atoms()[j]);
      for (std::size_t j = 0; j < q.size(); ++j)
        eq += q.weights()[j] * h(q.atoms()[j]);
      CHECK(std::abs(ep - eq) <= grid.mesh() + 1e-12);
    }
  }
}

TEST_CASE("sample_channel: support, unbiasedness, determinism") {
  DyadicGrid g(1, 1);
  std::mt19937_64 rng(42);
  CHECK(sample_channel({0.5}, g, rng)[0] == 0.5);  // vertex is fixed

  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    Vector y = sample_channel({0.3}, g, rng);
    CHECK((y[0] == 0.0 || y[0] == 0.5));
    CHECK(std::abs(y[0] - 0.3) <= g.mesh());
    sum += y[0];
  }
  double se = std::sqrt(0.24) * 0.5 / std::sqrt(double(n));
  CHECK(std::abs(sum / n - 0.3) <= 3.0 * se);
}

TEST_CASE("level caps enforced") {
  CHECK_NOTHROW(DyadicGrid(20, 1));
  CHECK_THROWS_AS(DyadicGrid(21, 1), DomainError);
  CHECK_THROWS_AS(DyadicGrid(11, 2), DomainError);
  CHECK_THROWS_AS(DyadicGrid(7, 3), DomainError);
}
