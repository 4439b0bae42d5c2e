#pragma once

#include <span>
#include <string>

namespace klsc {

struct TaskBound {
  double value = 0.0;     // sup_eta { eta r - log E[e^{eta f}] }, >= 0
  double eta_star = 0.0;
  double ess = 0.0;       // ESS of the weights e^{eta* f}
  std::string warning;
};

/// Lower bound on the extra KL cost of demanding E_q[f_c] >= r on top of the
/// intrinsic KLSC baseline, from samples of f_c under that baseline.
/// Golden-section search over eta in [0, eta_max] of the concave dual.
TaskBound task_distortion_lower_bound(std::span<const double> task_values, double r, double eta_max,
                                      double ess_floor = 200.0);

}  // namespace klsc
