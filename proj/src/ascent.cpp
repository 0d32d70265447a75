#include "divmin/ascent.hpp"

#include <cmath>
#include <limits>

namespace divmin {

AscentResult maximize(const Objective& f, const Gradient& grad,
                      const Retraction& retract, Vector x0,
                      const AscentOptions& opts) {
  AscentResult res;
  res.x = retract(std::move(x0));
  res.value = f(res.x);
  double step = opts.initial_step;

  for (int it = 0; it < opts.max_iters; ++it) {
    res.iterations = it + 1;
    Vector g = grad(res.x);

    bool accepted = false;
    double t = step;
    Vector cand;
    double cand_val = 0.0;
    for (int bt = 0; bt < 60 && !accepted; ++bt, t *= 0.5) {
      cand = res.x;
      for (std::size_t j = 0; j < cand.size(); ++j) cand[j] += t * g[j];
      cand = retract(cand);
      cand_val = f(cand);
      if (!std::isfinite(cand_val)) continue;
      double gain = 0.0;
      for (std::size_t j = 0; j < cand.size(); ++j)
        gain += g[j] * (cand[j] - res.x[j]);
      if (gain > 0.0 && cand_val >= res.value + opts.armijo * gain)
        accepted = true;
    }

    if (!accepted) {
      // Stationary at line-search resolution (possibly on the boundary).
      res.converged = true;
      break;
    }
    t *= 2.0;  // undo the trailing halving of the for-loop update

    double disp = 0.0;
    for (std::size_t j = 0; j < cand.size(); ++j) {
      double d = cand[j] - res.x[j];
      disp += d * d;
    }
    disp = std::sqrt(disp) / t;

    res.x = std::move(cand);
    res.value = cand_val;
    step = std::min(t * 2.0, 1e6);

    if (disp <= opts.grad_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace divmin
