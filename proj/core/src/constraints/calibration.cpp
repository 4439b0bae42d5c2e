#include "klsc/constraints/calibration.hpp"

#include <cmath>
#include <sstream>

#include "klsc/error.hpp"

namespace klsc {

CalibrationResult bisect_to_target(const std::function<double(double)>& mean_of, double target,
                                   double tol, Bracket bracket, std::size_t budget,
                                   Monotonicity direction) {
  if (!(bracket.hi > bracket.lo)) throw InvalidArgumentError("bisect_to_target: empty bracket");
  const double sign = direction == Monotonicity::increasing ? 1.0 : -1.0;
  // lo is the knob's inactive end in both directions.
  const double at_lo = mean_of(bracket.lo);
  const double at_hi = mean_of(bracket.hi);
  CalibrationResult r;
  r.iterations = 2;

  const double excess_lo = sign * (at_lo - target);  // >= 0 means target already met at lo
  const double excess_hi = sign * (at_hi - target);
  if (std::abs(at_lo - target) <= tol || excess_lo >= 0.0) {
    r.knob = bracket.lo;
    r.achieved_mean = at_lo;
    r.tolerance_met = std::abs(at_lo - target) <= tol;
    r.constraint_inactive = excess_lo >= 0.0;
    if (!r.tolerance_met) r.warning = "target below the unconstrained mean; knob left at its inactive end";
    return r;
  }
  if (std::abs(at_hi - target) <= tol) {
    r.knob = bracket.hi;
    r.achieved_mean = at_hi;
    r.tolerance_met = true;
    return r;
  }
  if (excess_hi < 0.0) {
    std::ostringstream os;
    os << "calibration bracket [" << bracket.lo << ", " << bracket.hi << "] does not reach target " << target
       << " (attainable means " << at_lo << " .. " << at_hi << ")";
    throw CalibrationInfeasibleError(os.str(), at_lo, at_hi);
  }

  double lo = bracket.lo, hi = bracket.hi;
  for (std::size_t it = 0; it < budget; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = mean_of(mid);
    ++r.iterations;
    if (std::abs(v - target) <= tol) {
      r.knob = mid;
      r.achieved_mean = v;
      r.tolerance_met = true;
      return r;
    }
    if (sign * (v - target) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.knob = 0.5 * (lo + hi);
  r.achieved_mean = mean_of(r.knob);
  ++r.iterations;
  r.tolerance_met = std::abs(r.achieved_mean - target) <= tol;
  if (!r.tolerance_met) r.warning = "bisection budget exhausted";
  return r;
}

CalibrationResult calibrate_hard_threshold(const ScoreSample& pool, double target, double tol, Bracket bracket,
                                           std::size_t budget) {
  if (!(pool.mass_above(bracket.hi) > 0.0)) {
    std::ostringstream os;
    os << "hard calibration: no pool mass above the bracket end " << bracket.hi;
    throw CalibrationInfeasibleError(os.str(), pool.mean(), pool.max());
  }
  auto r = bisect_to_target([&](double m) { return pool.mean_above(m); }, target, tol, bracket, budget);
  r.ess = pool.mass_above(r.knob) * static_cast<double>(pool.size());
  return r;
}

CalibrationResult calibrate_tilt_beta(const ScoreSample& pool, double target, double tol, Bracket bracket,
                                      std::size_t budget, double ess_floor) {
  if (bracket.lo < 0.0) throw InvalidArgumentError("tilt calibration: beta bracket must be nonnegative");
  auto r = bisect_to_target([&](double b) { return pool.tilt_moments(b).mean; }, target, tol, bracket, budget);
  r.ess = pool.tilt_moments(r.knob).ess;
  if (r.ess < ess_floor) {
    std::ostringstream os;
    os << "unreliable calibration: ESS " << r.ess << " below floor " << ess_floor;
    r.warning = r.warning.empty() ? os.str() : r.warning + "; " + os.str();
  }
  return r;
}

}  // namespace klsc
