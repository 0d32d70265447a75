#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "divmin/klinf.hpp"

namespace divmin {

enum class ThresholdVariant { TestPlusOne, Inversion };

struct TestConfig {
  Vector mu0;
  double alpha = 0.05;
  ThresholdVariant variant = ThresholdVariant::Inversion;
};

/// Empirical distribution accumulated one observation at a time, with a
/// warm-started dual vector carried across steps.
class StreamState {
 public:
  explicit StreamState(int dim) : dim_(dim) {}

  void push(const Vector& x);
  int n() const { return n_; }
  int dim() const { return dim_; }
  FiniteDistribution empirical() const;

  /// n * KLinf(empirical, mu), warm-starting from the previous argmax.
  double scaled_klinf(const Vector& mu);

 private:
  int dim_;
  int n_ = 0;
  std::vector<Vector> atoms_;
  std::vector<double> counts_;
  std::optional<Vector> warm_;
};

struct TestStepResult {
  int n = 0;            // index of the observation just consumed
  double statistic = 0.0;  // (n-1) * KLinf over observations 1..n-1
  double threshold = 0.0;
  bool fired = false;
};

double test_threshold(int n, int dim, double alpha, ThresholdVariant variant);

/// Sequential test for H0: E[X] = mu0. At step n the statistic uses the
/// first n-1 observations only, so the decision is predictable.
class SequentialTest {
 public:
  SequentialTest(TestConfig cfg);

  TestStepResult step(const Vector& x);
  bool has_fired() const { return fired_at_.has_value(); }
  std::optional<int> fired_at() const { return fired_at_; }

 private:
  TestConfig cfg_;
  StreamState state_;
  std::optional<int> fired_at_;
};

/// Whether mu belongs to the confidence set built from the first m
/// observations (the set C_{m+1} in the time-uniform sequence).
bool cs_membership(const StreamState& state, const Vector& mu, double alpha);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// K=1 confidence interval by outward bisection from the empirical mean.
Interval cs_interval_1d(const StreamState& state, double alpha,
                        double grid_tol = 1e-4);

struct DetectorStepResult {
  int n = 0;
  double log_e_detector = 0.0;  // log M_n
  bool fired = false;
  std::optional<int> fired_suffix;  // start index k of the firing suffix
};

/// Change detector: a suffix test per candidate changepoint k, declared
/// when any suffix statistic clears log(m^K / alpha) with m = n-k+1.
/// Suffix starts are pruned to a sliding window of size `window`.
class ChangeDetector {
 public:
  ChangeDetector(Vector mu0, double alpha, int window = 500);

  DetectorStepResult step(const Vector& x);
  std::optional<int> fired_at() const { return fired_at_; }

 private:
  Vector mu0_;
  double alpha_;
  int window_;
  int n_ = 0;
  std::deque<StreamState> suffixes_;  // suffixes_[i] holds obs (n_-i)..n_
  std::deque<int> suffix_start_;
  int fired_count_ = 0;  // suffixes whose test has ever fired
  std::optional<int> fired_at_;
};

}  // namespace divmin
