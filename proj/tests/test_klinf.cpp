#include <doctest.h>

#include <cmath>

#include "divmin/channel.hpp"
#include "divmin/klinf.hpp"
#include "helpers.hpp"

using namespace divmin;
using namespace testutil;

TEST_CASE("support_gap closed forms and homogeneity") {
  CHECK(support_gap({0.0}, {0.5}) == 0.0);
  CHECK(support_gap({2.0}, {0.25}) == doctest::Approx(1.5));
  CHECK(support_gap({1.0, -1.0}, {0.5, 0.5}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(support_gap({1.0}, {1.0}), InteriorMeanRequired);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    Vector lam{unif(rng), unif(rng)};
    Vector mu{0.3, 0.6};
    double g = support_gap(lam, mu);
    Vector lam2{3.0 * lam[0], 3.0 * lam[1]};
    CHECK(support_gap(lam2, mu) == doctest::Approx(3.0 * g).epsilon(1e-12));
    // Brute-force the sup over corners.
    double brute = -kInfinity;
    for (int c = 0; c < 4; ++c) {
      double v = lam[0] * ((c & 1) - mu[0]) + lam[1] * (((c >> 1) & 1) - mu[1]);
      brute = std::max(brute, v);
    }
    CHECK(g == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("dual_objective hand values") {
  FiniteDistribution p = bern(0.5);
  CHECK(dual_objective(p, {0.25}, {0.0}) == 0.0);
  CHECK(dual_objective(p, {0.25}, {-2.0}) ==
        doctest::Approx(0.5 * (std::log(2.5) + std::log(0.5)))
            .epsilon(1e-12));
  // gap > 1 and an atom at the violating corner.
  CHECK(dual_objective(p, {0.25}, {2.0}) == -kInfinity);
}

TEST_CASE("dual_gradient: finite-difference oracle") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    int dim = 1 + i % 3;
    FiniteDistribution p = random_distribution(rng, dim);
    Vector mu = random_interior_mean(rng, dim);
    // Draw a strictly feasible lambda by shrinking a random direction.
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vector lam(dim);
    for (double& v : lam) v = unif(rng);
    double g = support_gap(lam, mu);
    if (g > 0.5) for (double& v : lam) v *= 0.5 / g;
    Vector grad = dual_gradient(p, mu, lam);
    for (int j = 0; j < dim; ++j) {
      Vector hi(lam), lo(lam);
      hi[j] += 1e-6;
      lo[j] -= 1e-6;
      double fd =
          (dual_objective(p, mu, hi) - dual_objective(p, mu, lo)) / 2e-6;
      CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
  // At lambda=0 with mean-matched P the gradient vanishes.
  FiniteDistribution p = bern(0.5);
  Vector grad = dual_gradient(p, {0.5}, {0.0});
  CHECK(grad[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(dual_gradient(p, {0.25}, {0.0})[0] == doctest::Approx(-0.25));
}

TEST_CASE("klinf: binary closed form") {
  CHECK(klinf(bern(0.5), {0.25}).value ==
        doctest::Approx(binary_kl(0.5, 0.25)).epsilon(1e-7));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int i = 0; i < 50; ++i) {
    double p = unif(rng), mu = unif(rng);
    CHECK(klinf(bern(p), Vector{mu}).value ==
          doctest::Approx(binary_kl(p, mu)).epsilon(1e-7));
  }
}

TEST_CASE("klinf: mean-match gives zero, boundary mean rejected") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    int dim = 1 + i % 3;
    FiniteDistribution p = random_distribution(rng, dim);
    KlinfResult r = klinf(p, p.mean());
    CHECK(r.value <= 1e-10);
  }
  CHECK_THROWS_AS(klinf(bern(0.5), Vector{1.0}), InteriorMeanRequired);
  CHECK_THROWS_AS(klinf(bern(0.5), Vector{0.0}), InteriorMeanRequired);
}

TEST_CASE("klinf: argmax is feasible and attains the value") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    int dim = 1 + i % 3;
    FiniteDistribution p = random_distribution(rng, dim);
    Vector mu = random_interior_mean(rng, dim);
    KlinfResult r = klinf(p, mu);
    CHECK(r.argmax.gap <= 1.0 + 1e-12);
    CHECK(dual_objective(p, mu, r.argmax.lambda) ==
          doctest::Approx(r.value).epsilon(1e-6));
  }
}

TEST_CASE("klinf: concavity along sampled segments") {
  std::mt19937_64 rng(6);
  FiniteDistribution p = random_distribution(rng, 2);
  Vector mu{0.4, 0.6};
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    Vector a{unif(rng), unif(rng)}, b{unif(rng), unif(rng)};
    for (Vector* v : {&a, &b}) {
      double g = support_gap(*v, mu);
      if (g > 0.8) for (double& c : *v) c *= 0.8 / g;
    }
    double fa = dual_objective(p, mu, a);
    double fb = dual_objective(p, mu, b);
    if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
    double t = 0.3;
    Vector m{t * a[0] + (1 - t) * b[0], t * a[1] + (1 - t) * b[1]};
    CHECK(dual_objective(p, mu, m) >= t * fa + (1 - t) * fb - 1e-10);
  }
}

TEST_CASE("klinf: DPI monotonicity under the channel") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10; ++i) {
    FiniteDistribution p = random_distribution(rng, 1);
    Vector mu = random_interior_mean(rng, 1);
    double full = klinf(p, mu).value;
    for (int k = 1; k <= 8; k += 3) {
      DyadicGrid grid(k, 1);
      CHECK(klinf(pushforward(p, grid), mu).value <= full + 1e-7);
    }
  }
}

TEST_CASE("klinf: 1-D fast path agrees with the generic ascent") {
  // Embed the same instance as K=1 (fast path) and compare against a
  // dense scan of the scalar dual.
  std::mt19937_64 rng(8);
  for (int i = 0; i < 10; ++i) {
    FiniteDistribution p = random_distribution(rng, 1);
    Vector mu = random_interior_mean(rng, 1);
    double fast = klinf(p, mu).value;
    // Dense scan, refined three times around the best grid point: the
    // dual has a log singularity at the endpoints, so a single uniform
    // grid is too coarse there.
    double lo = -1.0 / mu[0], hi = 1.0 / (1.0 - mu[0]);
    double scan = 0.0, best = 0.0;
    for (int pass = 0; pass < 4; ++pass) {
      double step = (hi - lo) / 4000.0;
      for (int t = 1; t < 4000; ++t) {
        double lam = lo + step * t;
        double v = dual_objective(p, mu, {lam});
        if (std::isfinite(v) && v > scan) {
          scan = v;
          best = lam;
        }
      }
      lo = best - step;
      hi = best + step;
    }
    CHECK(fast >= scan - 1e-8);
    CHECK(fast <= scan + 1e-7);
  }
}

TEST_CASE("klinf: warm start changes nothing but the path") {
  std::mt19937_64 rng(9);
  FiniteDistribution p = random_distribution(rng, 2);
  Vector mu{0.3, 0.7};
  KlinfResult cold = klinf(p, mu);
  KlinfOptions opts;
  opts.warm_start = cold.argmax.lambda;
  KlinfResult warm = klinf(p, mu, opts);
  CHECK(warm.value == doctest::Approx(cold.value).epsilon(1e-8));
  CHECK(warm.iterations <= cold.iterations);
}
