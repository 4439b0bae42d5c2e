#pragma once

#include <cstddef>
#include <vector>

#include "klsc/analytic/gmm.hpp"
#include "klsc/analytic/score.hpp"
#include "klsc/diagnostics/grid.hpp"

namespace klsc {

/// Tilted moments of s under w_i e^{beta s_i}.
struct TiltMoments {
  double log_partition = 0.0;  // log (sum w e^{beta s} / sum w)
  double mean = 0.0;
  double variance = 0.0;
  double ess = 0.0;            // (sum w')^2 / sum w'^2
};

/// Score values with base weights: uniform for Monte Carlo pools drawn from
/// the prior, p * cell_area for grid quadrature. Stored sorted by score so
/// hard-threshold queries are O(log n).
class ScoreSample {
 public:
  static ScoreSample from_values(std::vector<double> scores);
  static ScoreSample from_weighted(std::vector<double> scores, std::vector<double> weights);
  static ScoreSample from_grid(const GridDensity& prior, const std::vector<double>& score_on_grid);
  static ScoreSample draw(const IsotropicGmm& prior, const ScoreField& score, std::size_t n, Rng& rng);

  std::size_t size() const noexcept { return scores_.size(); }
  const std::vector<double>& scores() const noexcept { return scores_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double min() const { return scores_.front(); }
  double max() const { return scores_.back(); }
  double mean() const;

  /// Base-weight mass with s > threshold (normalized to total).
  double mass_above(double threshold) const;
  /// E[s | s > threshold]; throws InfeasibleThresholdError on an empty event.
  double mean_above(double threshold) const;
  TiltMoments tilt_moments(double beta) const;

 private:
  ScoreSample(std::vector<double> scores, std::vector<double> weights);
  std::size_t first_above(double threshold) const;

  std::vector<double> scores_;   // ascending
  std::vector<double> weights_;
  std::vector<double> tail_w_;   // tail_w_[i] = sum_{j >= i} w_j
  std::vector<double> tail_ws_;  // tail_ws_[i] = sum_{j >= i} w_j s_j
};

}  // namespace klsc
