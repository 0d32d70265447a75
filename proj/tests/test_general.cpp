#include <doctest.h>

#include <cmath>

#include "divmin/channel.hpp"
#include "divmin/general.hpp"
#include "helpers.hpp"

using namespace divmin;
using namespace testutil;

TEST_CASE("builtin constraint functions and Lipschitz spot-check") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const char* name : {"identity", "powers:3", "norms"}) {
    ConstraintFunction g = ConstraintFunction::builtin(name, 2);
    for (int i = 0; i < 10000; ++i) {
      Vector x{unif(rng), unif(rng)}, y{unif(rng), unif(rng)};
      Vector gx = g.eval(x), gy = g.eval(y);
      double dx = std::max(std::abs(x[0] - y[0]), std::abs(x[1] - y[1]));
      double dg = 0.0;
      for (std::size_t j = 0; j < gx.size(); ++j) {
        dg = std::max(dg, std::abs(gx[j] - gy[j]));
        CHECK(std::abs(gx[j]) <= g.bound + 1e-12);
      }
      CHECK(dg <= g.lipschitz * dx + 1e-12);
    }
  }
  CHECK(ConstraintFunction::builtin("powers:2", 3).dim_out == 6);
  CHECK(ConstraintFunction::builtin("norms", 3).dim_out == 2);
  CHECK_THROWS_AS(ConstraintFunction::builtin("cubes", 1), DomainError);
}

TEST_CASE("constraint sets: support minimization oracles") {
  ConstraintSet s(SingletonSet{{0.3, 0.7}});
  CHECK(s.support_min({1.0, -1.0}) == doctest::Approx(-0.4));

  ConstraintSet b(BoxSet{{0.0, 0.2}, {0.5, 0.8}});
  CHECK(b.support_min({1.0, -1.0}) == doctest::Approx(-0.8));
  CHECK(b.support_min({-2.0, 3.0}) == doctest::Approx(-1.0 + 0.6));

  ConstraintSet poly(PolytopeSet{{{0.0, 0.0}, {1.0, 0.0}, {0.5, 1.0}}});
  CHECK(poly.support_min({0.0, 1.0}) == doctest::Approx(0.0));
  CHECK(poly.support_min({-1.0, 0.0}) == doctest::Approx(-1.0));

  CHECK(s.contains({0.3, 0.7}));
  CHECK_FALSE(s.contains({0.3, 0.8}));
  CHECK(b.contains({0.25, 0.5}));
  CHECK(poly.contains({0.5, 0.5}, 1e-3));
  CHECK_FALSE(poly.contains({0.0, 1.0}, 1e-3));
}

TEST_CASE("certify_feasible: sound certificates, refinement flips tight cases") {
  ConstraintFunction g = ConstraintFunction::builtin("identity", 1);
  CHECK(certify_feasible({{0.0}, 1.0}, g, 2).certified);
  CHECK(certify_feasible({{0.0}, 1.0}, g, 2).margin ==
        doctest::Approx(1.0));
  // gamma - lambda x < 0 somewhere on the grid.
  CHECK_FALSE(certify_feasible({{2.0}, 1.0}, g, 4).certified);
  // Feasible with slack below the coarse Lipschitz margin: certification
  // appears only once the grid is fine enough.
  FDualPoint tight{{1.0}, 1.0 + 0.1};  // true slack 0.1, margin 2^-m
  CHECK_FALSE(certify_feasible(tight, g, 3).certified);
  CHECK(certify_feasible(tight, g, 5).certified);
}

TEST_CASE("general_dual_objective hand values") {
  FiniteDistribution p = bern(0.5);
  ConstraintFunction g = ConstraintFunction::builtin("identity", 1);
  ConstraintSet c(SingletonSet{{0.25}});
  CHECK(general_dual_objective(p, g, c, {{0.0}, 1.0}) ==
        doctest::Approx(0.0).epsilon(1e-15));
  // Atom violating positivity.
  CHECK(general_dual_objective(p, g, c, {{2.0}, 1.0}) == -kInfinity);
}

TEST_CASE("klinf_general: identity with singleton mean matches klinf") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 15; ++i) {
    int dim = 1 + i % 2;
    FiniteDistribution p = random_distribution(rng, dim, 6);
    Vector mu = random_interior_mean(rng, dim, 0.2, 0.8);
    ConstraintFunction g = ConstraintFunction::builtin("identity", dim);
    GeneralDualResult r = klinf_general(p, g, ConstraintSet(SingletonSet{mu}));
    CHECK(std::abs(r.value - klinf(p, mu).value) <= 2e-6);
    CHECK_FALSE(r.unbounded_suspected);
  }
}

TEST_CASE("klinf_general: inactive constraint gives zero") {
  std::mt19937_64 rng(3);
  FiniteDistribution p = random_distribution(rng, 2, 6);
  ConstraintFunction g = ConstraintFunction::builtin("identity", 2);
  ConstraintSet whole(BoxSet{{0.0, 0.0}, {1.0, 1.0}});
  CHECK(klinf_general(p, g, whole).value <= 1e-8);
  // Box around the distribution's own moment vector.
  Vector m = p.mean();
  ConstraintSet near(BoxSet{{m[0] - 0.01, m[1] - 0.01},
                            {m[0] + 0.01, m[1] + 0.01}});
  CHECK(klinf_general(p, g, near).value <= 1e-8);
}

TEST_CASE("klinf_general: invertible affine g matches transformed mean") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    // Random well-conditioned 2x2 A and shift b.
    double a11 = 0.5 + unif(rng), a12 = 0.3 * unif(rng);
    double a21 = 0.3 * unif(rng), a22 = 0.5 + unif(rng);
    Vector b{unif(rng), unif(rng)};
    ConstraintFunction g;
    g.name = "affine";
    g.dim_in = 2;
    g.dim_out = 2;
    g.eval = [=](const Vector& x) {
      return Vector{a11 * x[0] + a12 * x[1] + b[0],
                    a21 * x[0] + a22 * x[1] + b[1]};
    };
    g.lipschitz = std::max(std::abs(a11) + std::abs(a12),
                           std::abs(a21) + std::abs(a22));
    g.bound = g.lipschitz + std::abs(b[0]) + std::abs(b[1]);
    // <lambda, Ax + b> is linear in x: each coordinate maximizes at 0/1
    // by the sign of (A^T lambda)_j.
    g.support_argmax = [=](const Vector& lam) {
      return Vector{a11 * lam[0] + a21 * lam[1] > 0.0 ? 1.0 : 0.0,
                    a12 * lam[0] + a22 * lam[1] > 0.0 ? 1.0 : 0.0};
    };

    FiniteDistribution p = random_distribution(rng, 2, 5);
    Vector mu = random_interior_mean(rng, 2, 0.25, 0.75);
    Vector target{a11 * mu[0] + a12 * mu[1] + b[0],
                  a21 * mu[0] + a22 * mu[1] + b[1]};
    GeneralDualResult r =
        klinf_general(p, g, ConstraintSet(SingletonSet{target}));
    CHECK(std::abs(r.value - klinf(p, mu).value) <= 2e-6);
  }
}

TEST_CASE("klinf_general: monotone in the constraint set") {
  std::mt19937_64 rng(5);
  FiniteDistribution p = random_distribution(rng, 1, 6);
  ConstraintFunction g = ConstraintFunction::builtin("identity", 1);
  double singleton =
      klinf_general(p, g, ConstraintSet(SingletonSet{{0.2}})).value;
  double box =
      klinf_general(p, g, ConstraintSet(BoxSet{{0.15}, {0.25}})).value;
  double wide = klinf_general(p, g, ConstraintSet(BoxSet{{0.1}, {0.9}})).value;
  CHECK(box <= singleton + 2e-6);
  CHECK(wide <= box + 2e-6);
}

TEST_CASE("klinf_general: truncation stability") {
  std::mt19937_64 rng(6);
  FiniteDistribution p = random_distribution(rng, 1, 6);
  ConstraintFunction g = ConstraintFunction::builtin("identity", 1);
  ConstraintSet c(SingletonSet{{0.35}});
  GeneralOptions small, big;
  GeneralDualResult r = klinf_general(p, g, c, small);
  big.initial_radius = 2.0 * std::max(r.truncation_radius, small.initial_radius);
  GeneralDualResult r2 = klinf_general(p, g, c, big);
  CHECK(std::abs(r.value - r2.value) <= 1e-6);
}

TEST_CASE("klinf_general: weak duality against constructed feasible Q") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  FiniteDistribution p = random_distribution(rng, 1, 5);
  ConstraintFunction g = ConstraintFunction::builtin("powers:2", 1);
  ConstraintSet c(BoxSet{{0.3, 0.15}, {0.5, 0.4}});
  GeneralDualResult r = klinf_general(p, g, c);
  int accepted = 0;
  for (int rep = 0; rep < 2000 && accepted < 20; ++rep) {
    // Rejection-sample mixtures of P with corner mass until E_Q[g] lands
    // in C.
    Vector support_w(p.size() + 2);
    double ws = 0.0;
    for (double& v : support_w) { v = unif(rng); ws += v; }
    for (double& v : support_w) v /= ws;
    std::vector<Vector> atoms(p.atoms());
    atoms.push_back({0.0});
    atoms.push_back({1.0});
    FiniteDistribution q(atoms, support_w);
    Vector eg(2, 0.0);
    for (std::size_t j = 0; j < q.size(); ++j) {
      Vector gj = g.eval(q.atoms()[j]);
      eg[0] += q.weights()[j] * gj[0];
      eg[1] += q.weights()[j] * gj[1];
    }
    if (!c.contains(eg, 0.0)) continue;
    ++accepted;
    CHECK(r.value <= kl_divergence(p, q) + 1e-6);
  }
  CHECK(accepted > 0);
}

TEST_CASE("klinf_general: discretization consistency with inflated C") {
  std::mt19937_64 rng(8);
  FiniteDistribution p = random_distribution(rng, 1, 8);
  ConstraintFunction g = ConstraintFunction::builtin("identity", 1);
  ConstraintSet c(SingletonSet{{0.3}});
  double exact = klinf_general(p, g, c).value;
  double prev = -kInfinity;
  for (int k = 2; k <= 10; k += 2) {
    DyadicGrid grid(k, 1);
    double eta = g.lipschitz * grid.mesh();
    double vk = klinf_general(pushforward(p, grid), g, c.inflated(eta)).value;
    CHECK(vk >= prev - 1e-6);
    prev = vk;
  }
  CHECK(std::abs(prev - exact) <= 1e-2);
}

TEST_CASE("dimension mismatches rejected") {
  FiniteDistribution p = bern(0.5);
  ConstraintFunction g = ConstraintFunction::builtin("identity", 1);
  CHECK_THROWS_AS(
      klinf_general(p, g, ConstraintSet(SingletonSet{{0.3, 0.4}})),
      DimensionMismatch);
}
