#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "klsc/analytic/score.hpp"
#include "klsc/constraints/calibration.hpp"

namespace klsc {

struct OptRunConfig {
  double lambda = 0.0;
  std::size_t restarts = 256;
  std::size_t steps = 400;
  double step_size = 0.05;
  double box_lo = -5.0;  // init box and clamp region [box_lo, box_hi]^2
  double box_hi = 5.0;

  void validate() const;
};

/// Final iterates of fixed-step gradient ascent on the Gibbs objective, one per
/// restart. Restart r uses substream r of `seed`, so runs at different lambda
/// share their initial points.
std::vector<Point> opt_reg_run(const ScoreField& objective, const OptRunConfig& cfg, std::uint64_t seed);

struct OptRegResult {
  std::vector<Point> samples;
  double lambda_used = 0.0;
  double achieved = 0.0;
  CalibrationResult calibration;
};

/// Calibrates lambda so the restart ensemble's mean base score matches
/// target_m. `objective` must be a Gibbs field; its lambda is overridden.
OptRegResult opt_reg_map(const ScoreField& objective, OptRunConfig cfg, double target_m, std::uint64_t seed,
                         double tol = 0.05, Bracket lambda_bracket = {0.0, 20.0}, std::size_t budget = 60);

}  // namespace klsc
