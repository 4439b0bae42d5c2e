#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "klsc/analytic/gmm.hpp"
#include "klsc/analytic/score.hpp"

namespace klsc {

/// A finite dataset with its scores and the descending-score order.
struct CandidatePool {
  std::vector<Point> points;
  std::vector<double> scores;
  std::vector<std::size_t> sorted_index;  // scores[sorted_index[0]] is the largest

  static CandidatePool build(std::vector<Point> points, const ScoreField& score);
  static CandidatePool draw(const IsotropicGmm& prior, const ScoreField& score, std::size_t n, Rng& rng);
  std::size_t size() const noexcept { return points.size(); }
  /// Throws InvalidArgumentError if the order is broken.
  void verify() const;
};

struct WeightedSampleSet {
  std::vector<Point> points;
  std::vector<double> scores;
  std::vector<double> weights;  // sums to one
  double ess = 0.0;

  double mean_score() const;
  double max_weight() const;
};

struct RejectionResult {
  std::vector<Point> points;
  std::size_t proposals = 0;
  double acceptance_rate() const {
    return proposals ? static_cast<double>(points.size()) / static_cast<double>(proposals) : 0.0;
  }
};

/// Draws from p and keeps s > m_prime until n_out are accepted. Throws
/// PartialResultError once `budget` proposals are spent.
RejectionResult rejection_sample_truncation(const IsotropicGmm& prior, const ScoreField& score, double m_prime,
                                            std::size_t n_out, std::size_t budget, Rng& rng);

struct SnisResult {
  std::vector<Point> points;
  double ess = 0.0;
  std::string warning;
};

/// Multinomial resampling of n_proposals prior draws with weights e^{beta s}.
SnisResult snis_resample_tilt(const IsotropicGmm& prior, const ScoreField& score, double beta,
                              std::size_t n_proposals, std::size_t n_out, Rng& rng, double ess_floor = 200.0);

struct RetrievalResult {
  std::size_t k = 0;
  std::vector<Point> selected;
  std::vector<double> selected_scores;
  double achieved = 0.0;
  double implied_threshold = 0.0;  // smallest selected score
};

/// Top-k prefix whose mean score is closest to target_m; the smallest k wins
/// ties. Throws CalibrationInfeasibleError when target_m exceeds the top score.
RetrievalResult retrieval_topk_match(const CandidatePool& pool, double target_m);

/// Softmax weights e^{beta s_i} / sum_j e^{beta s_j} on the pool.
WeightedSampleSet empirical_tilt(const CandidatePool& pool, double beta);

/// P(t < s < t + delta | s > t) under the given weights (uniform if empty).
double empirical_boundary_mass(const std::vector<double>& scores, const std::vector<double>& weights, double t,
                               double delta);

}  // namespace klsc
