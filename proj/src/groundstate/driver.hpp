#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nlslab/groundstate.hpp"

namespace nlslab::detail {

struct IterationStep {
  double stabilizer;
  double change;
};

struct IterationOutcome {
  bool converged = false;
  int iterations = 0;
  double stabilizer = 1.0;
  double damping = 1.0;
  std::string message;
};

// Runs the stabilized fixed-point iteration. Undamped Petviashvili steps
// oscillate for systems whose linearization has eigenvalues below -1 (the
// quadratic two-wave system is one), so a stalled or diverged attempt is
// restarted from the initial guess with stronger under-relaxation.
//
// step(theta) performs one iteration and reports the factor M and the sup-norm
// change; reset() restores the initial guess; accept() decides whether a
// small-change iterate is converged (a residual check, for instance).
template <class Step, class Reset, class Accept>
IterationOutcome run_stabilized_iteration(Step&& step, Reset&& reset, Accept&& accept,
                                          const SolverOptions& options) {
  const std::vector<double> schedule =
      options.damping > 0.0 ? std::vector<double>{options.damping} : std::vector<double>{1.0, 0.7, 0.4};
  constexpr int kStallWindow = 100;
  IterationOutcome out;
  for (std::size_t attempt = 0; attempt < schedule.size(); ++attempt) {
    const double theta = schedule[attempt];
    if (attempt > 0) reset();
    out.damping = theta;
    double best = std::numeric_limits<double>::infinity();
    int best_iter = 0;
    for (int iter = 1; iter <= options.max_iter; ++iter) {
      const IterationStep s = step(theta);
      ++out.iterations;
      out.stabilizer = s.stabilizer;
      if (!std::isfinite(s.stabilizer) || s.stabilizer < 1e-8 || s.stabilizer > 1e8 || !std::isfinite(s.change)) {
        out.message = "diverged: stabilizing factor left [1e-8, 1e8]";
        break;
      }
      if (s.change < best) {
        best = s.change;
        best_iter = iter;
      }
      if (s.change < options.tol && accept()) {
        out.converged = true;
        out.message.clear();
        return out;
      }
      if (iter - best_iter > kStallWindow) {
        out.message = "stalled: no progress in " + std::to_string(kStallWindow) + " iterations";
        break;
      }
      if (iter == options.max_iter) out.message = "not converged after " + std::to_string(iter) + " iterations";
    }
  }
  return out;
}

}  // namespace nlslab::detail
