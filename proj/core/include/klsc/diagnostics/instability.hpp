#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "klsc/constraints/calibration.hpp"
#include "klsc/constraints/score_sample.hpp"
#include "klsc/diagnostics/grid.hpp"

namespace klsc {

enum class Family { hard, klsc };
std::string_view to_string(Family f);

struct CalibrationSettings {
  double tol = 1e-3;
  Bracket hard_bracket{0.0, 7.99};
  Bracket beta_bracket{0.0, 64.0};
  std::size_t budget = 200;
  double ess_floor = 200.0;
};

/// Calibrates matched-moment members of either constraint family on a fixed
/// pool and renders them on the evaluation grid.
class MatchedMomentContext {
 public:
  struct Member {
    Family family;
    double target;
    CalibrationResult calibration;
    GridDensity density;
  };

  MatchedMomentContext(GridDensity prior, std::vector<double> score_on_grid, ScoreSample pool,
                       CalibrationSettings settings = {});

  Member member(Family family, double target) const;

  const GridDensity& prior() const noexcept { return prior_; }
  const std::vector<double>& score_on_grid() const noexcept { return score_on_grid_; }
  const ScoreSample& pool() const noexcept { return pool_; }
  const CalibrationSettings& settings() const noexcept { return settings_; }

 private:
  GridDensity prior_;
  std::vector<double> score_on_grid_;
  ScoreSample pool_;
  CalibrationSettings settings_;
};

/// TV(q_m, q_{m+eps}) between two re-calibrated members of one family.
double tv_instability(Family family, double m, double eps, const MatchedMomentContext& ctx);

/// (1/K) sum_k TV(q_{m_k}, q_{m_k + eps})
double mean_tv_instability(std::span<const double> levels, double eps, Family family,
                           const MatchedMomentContext& ctx);

}  // namespace klsc
