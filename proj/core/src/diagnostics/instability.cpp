#include "klsc/diagnostics/instability.hpp"

#include "klsc/constraints/induced.hpp"
#include "klsc/diagnostics/divergence.hpp"
#include "klsc/error.hpp"

namespace klsc {

std::string_view to_string(Family f) { return f == Family::hard ? "hard" : "klsc"; }

MatchedMomentContext::MatchedMomentContext(GridDensity prior, std::vector<double> score_on_grid, ScoreSample pool,
                                           CalibrationSettings settings)
    : prior_(std::move(prior)),
      score_on_grid_(std::move(score_on_grid)),
      pool_(std::move(pool)),
      settings_(settings) {
  if (score_on_grid_.size() != prior_.values().size()) {
    throw GridMismatchError("MatchedMomentContext: score field does not match the grid");
  }
}

MatchedMomentContext::Member MatchedMomentContext::member(Family family, double target) const {
  if (family == Family::hard) {
    auto cal = calibrate_hard_threshold(pool_, target, settings_.tol, settings_.hard_bracket, settings_.budget);
    return {family, target, cal, truncation_on_grid(prior_, score_on_grid_, cal.knob)};
  }
  auto cal = calibrate_tilt_beta(pool_, target, settings_.tol, settings_.beta_bracket, settings_.budget,
                                 settings_.ess_floor);
  return {family, target, cal, tilt_on_grid(prior_, score_on_grid_, cal.knob)};
}

double tv_instability(Family family, double m, double eps, const MatchedMomentContext& ctx) {
  if (eps == 0.0) return 0.0;
  const auto a = ctx.member(family, m);
  const auto b = ctx.member(family, m + eps);
  return grid_tv(a.density, b.density);
}

double mean_tv_instability(std::span<const double> levels, double eps, Family family,
                           const MatchedMomentContext& ctx) {
  if (levels.empty()) throw InvalidArgumentError("mean_tv_instability: no levels");
  double s = 0.0;
  for (double m : levels) s += tv_instability(family, m, eps, ctx);
  return s / static_cast<double>(levels.size());
}

}  // namespace klsc
