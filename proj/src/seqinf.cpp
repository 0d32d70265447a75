#include "divmin/seqinf.hpp"

#include <cmath>
#include <map>

namespace divmin {

void StreamState::push(const Vector& x) {
  if (int(x.size()) != dim_)
    throw DimensionMismatch("StreamState: observation dimension mismatch");
  check_unit_cube(x);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i] == x) {
      counts_[i] += 1.0;
      ++n_;
      return;
    }
  }
  atoms_.push_back(x);
  counts_.push_back(1.0);
  ++n_;
}

FiniteDistribution StreamState::empirical() const {
  if (n_ == 0) throw DomainError("StreamState: empirical of empty stream");
  Vector w(counts_);
  for (double& v : w) v /= double(n_);
  return FiniteDistribution(atoms_, w);
}

double StreamState::scaled_klinf(const Vector& mu) {
  if (n_ == 0) return 0.0;
  KlinfOptions opts;
  opts.warm_start = warm_;
  KlinfResult r = klinf(empirical(), mu, opts);
  warm_ = r.argmax.lambda;
  return double(n_) * r.value;
}

double test_threshold(int n, int dim, double alpha, ThresholdVariant variant) {
  double base = dim * std::log(double(n)) + std::log(1.0 / alpha);
  return variant == ThresholdVariant::TestPlusOne ? base + 1.0 : base;
}

SequentialTest::SequentialTest(TestConfig cfg)
    : cfg_(std::move(cfg)), state_(int(cfg_.mu0.size())) {
  check_interior(cfg_.mu0);
  if (cfg_.alpha <= 0.0 || cfg_.alpha >= 1.0)
    throw DomainError("alpha must lie in (0,1)");
}

TestStepResult SequentialTest::step(const Vector& x) {
  TestStepResult out;
  out.n = state_.n() + 1;
  // The statistic at step n uses observations 1..n-1 only.
  if (out.n >= 2) {
    out.statistic = state_.scaled_klinf(cfg_.mu0);
    out.threshold =
        test_threshold(out.n, state_.dim(), cfg_.alpha, cfg_.variant);
    out.fired = out.statistic >= out.threshold;
    if (out.fired && !fired_at_) fired_at_ = out.n;
  }
  state_.push(x);
  return out;
}

bool cs_membership(const StreamState& state, const Vector& mu, double alpha) {
  for (double v : mu)
    if (v <= 0.0 || v >= 1.0) return false;  // C_n sits in the open interior
  if (state.n() == 0) return true;
  StreamState copy = state;
  double stat = copy.scaled_klinf(mu);
  double thr = test_threshold(state.n() + 1, state.dim(), alpha,
                              ThresholdVariant::Inversion);
  return stat < thr;
}

Interval cs_interval_1d(const StreamState& state, double alpha,
                        double grid_tol) {
  if (state.dim() != 1)
    throw DomainError("cs_interval_1d requires K = 1");
  if (state.n() == 0) return {0.0, 1.0};
  double center = state.empirical().mean()[0];
  center = std::min(std::max(center, grid_tol), 1.0 - grid_tol);

  // Membership is assumed one-sided monotone away from the empirical
  // mean; bisect each boundary between a member and a non-member.
  auto member = [&](double mu) {
    return cs_membership(state, Vector{mu}, alpha);
  };
  Interval out;
  if (member(grid_tol)) {
    out.lo = 0.0;
  } else {
    double lo = grid_tol, hi = center;
    while (hi - lo > grid_tol) {
      double mid = 0.5 * (lo + hi);
      (member(mid) ? hi : lo) = mid;
    }
    out.lo = lo;
  }
  if (member(1.0 - grid_tol)) {
    out.hi = 1.0;
  } else {
    double lo = center, hi = 1.0 - grid_tol;
    while (hi - lo > grid_tol) {
      double mid = 0.5 * (lo + hi);
      (member(mid) ? lo : hi) = mid;
    }
    out.hi = hi;
  }
  return out;
}

ChangeDetector::ChangeDetector(Vector mu0, double alpha, int window)
    : mu0_(std::move(mu0)), alpha_(alpha), window_(window) {
  check_interior(mu0_);
  if (alpha_ <= 0.0 || alpha_ >= 1.0)
    throw DomainError("alpha must lie in (0,1)");
  if (window_ < 1) throw DomainError("window must be >= 1");
}

DetectorStepResult ChangeDetector::step(const Vector& x) {
  ++n_;
  suffixes_.emplace_back(int(mu0_.size()));
  suffix_start_.push_back(n_);
  while (int(suffixes_.size()) > window_) {
    suffixes_.pop_front();
    suffix_start_.pop_front();
  }

  DetectorStepResult out;
  out.n = n_;
  for (std::size_t i = 0; i < suffixes_.size(); ++i) {
    StreamState& s = suffixes_[i];
    s.push(x);
    const int m = s.n();  // = n - k + 1, observations k..n
    double stat = s.scaled_klinf(mu0_);
    double thr = double(int(mu0_.size())) * std::log(double(m)) +
                 std::log(1.0 / alpha_);
    if (stat >= thr) {
      ++fired_count_;
      if (!out.fired_suffix) out.fired_suffix = suffix_start_[i];
      if (!fired_at_) fired_at_ = n_;
      // A fired suffix stays fired; drop it so it is not re-counted.
      suffixes_.erase(suffixes_.begin() + std::ptrdiff_t(i));
      suffix_start_.erase(suffix_start_.begin() + std::ptrdiff_t(i));
      --i;
    }
  }
  out.fired = fired_count_ > 0;
  out.log_e_detector = fired_count_ > 0
                           ? std::log(double(fired_count_) / alpha_)
                           : -kInfinity;
  return out;
}

}  // namespace divmin
