#pragma once

#include <functional>

#include "divmin/common.hpp"

namespace divmin {

/// Shared engine: projected/retracted gradient ascent with Armijo
/// backtracking for concave objectives. The objective may return
/// -infinity outside its effective domain; the line search treats that
/// as a failed step and backtracks.
struct AscentOptions {
  double grad_tol = 1e-9;
  int max_iters = 2000;
  double armijo = 1e-4;
  double initial_step = 1.0;
};

struct AscentResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(const Vector&)>;
using Gradient = std::function<Vector(const Vector&)>;
/// Maps an arbitrary point back into the (shrunken) feasible set.
using Retraction = std::function<Vector(const Vector&)>;

AscentResult maximize(const Objective& f, const Gradient& grad,
                      const Retraction& retract, Vector x0,
                      const AscentOptions& opts = {});

}  // namespace divmin
