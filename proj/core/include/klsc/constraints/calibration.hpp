#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "klsc/constraints/score_sample.hpp"

namespace klsc {

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct CalibrationResult {
  double knob = 0.0;            // m', beta, lambda or guidance gamma
  double achieved_mean = 0.0;
  std::size_t iterations = 0;
  bool tolerance_met = false;   // |achieved_mean - target| <= tol
  bool constraint_inactive = false;  // target already met at the bracket end with no constraint
  double ess = 0.0;             // 0 when not applicable
  std::string warning;
};

enum class Monotonicity { increasing, decreasing };

/// Bisection of mean_of(knob) = target over a bracket with a known monotone
/// direction. Stops when |mean - target| <= tol or after `budget` iterations,
/// returning the midpoint of the final bracket in the latter case. Throws
/// CalibrationInfeasibleError if the bracket ends do not straddle target.
/// When the target is already met at the inactive end (lo for increasing
/// maps) the inactive end is returned with constraint_inactive set.
CalibrationResult bisect_to_target(const std::function<double(double)>& mean_of, double target,
                                   double tol, Bracket bracket, std::size_t budget,
                                   Monotonicity direction = Monotonicity::increasing);

/// Solves E[s | s > m'] = target on a fixed pool (reused across iterates).
CalibrationResult calibrate_hard_threshold(const ScoreSample& pool, double target, double tol,
                                           Bracket bracket = {0.0, 7.99}, std::size_t budget = 200);

/// Solves the self-normalized tilted mean mu(beta) = target on a fixed pool.
/// Attaches a warning when the ESS at the solution is below ess_floor.
CalibrationResult calibrate_tilt_beta(const ScoreSample& pool, double target, double tol,
                                      Bracket bracket = {0.0, 64.0}, std::size_t budget = 200,
                                      double ess_floor = 200.0);

}  // namespace klsc
