#include "klsc/constraints/score_sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "klsc/error.hpp"

namespace klsc {

ScoreSample::ScoreSample(std::vector<double> scores, std::vector<double> weights) {
  if (scores.empty()) throw EmptySampleError("ScoreSample: no scores");
  if (scores.size() != weights.size()) throw InvalidArgumentError("ScoreSample: weight count mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  scores_.resize(order.size());
  weights_.resize(order.size());
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgumentError("ScoreSample: bad weight");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgumentError("ScoreSample: zero total weight");
  for (std::size_t i = 0; i < order.size(); ++i) {
    scores_[i] = scores[order[i]];
    weights_[i] = weights[order[i]] / total;
  }
  tail_w_.assign(scores_.size() + 1, 0.0);
  tail_ws_.assign(scores_.size() + 1, 0.0);
  for (std::size_t i = scores_.size(); i-- > 0;) {
    tail_w_[i] = tail_w_[i + 1] + weights_[i];
    tail_ws_[i] = tail_ws_[i + 1] + weights_[i] * scores_[i];
  }
}

ScoreSample ScoreSample::from_values(std::vector<double> scores) {
  std::vector<double> w(scores.size(), 1.0);
  return ScoreSample(std::move(scores), std::move(w));
}

ScoreSample ScoreSample::from_weighted(std::vector<double> scores, std::vector<double> weights) {
  return ScoreSample(std::move(scores), std::move(weights));
}

ScoreSample ScoreSample::from_grid(const GridDensity& prior, const std::vector<double>& score_on_grid) {
  if (score_on_grid.size() != prior.values().size()) {
    throw GridMismatchError("ScoreSample::from_grid: field size mismatch");
  }
  return ScoreSample(score_on_grid, prior.values());
}

ScoreSample ScoreSample::draw(const IsotropicGmm& prior, const ScoreField& score, std::size_t n, Rng& rng) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = score.value(prior.sample(rng));
  return from_values(std::move(s));
}

double ScoreSample::mean() const { return tail_ws_[0] / tail_w_[0]; }

std::size_t ScoreSample::first_above(double threshold) const {
  return static_cast<std::size_t>(std::upper_bound(scores_.begin(), scores_.end(), threshold) - scores_.begin());
}

double ScoreSample::mass_above(double threshold) const { return tail_w_[first_above(threshold)] / tail_w_[0]; }

double ScoreSample::mean_above(double threshold) const {
  const std::size_t i = first_above(threshold);
  if (!(tail_w_[i] > 0.0)) throw InfeasibleThresholdError("ScoreSample: no mass above threshold");
  return tail_ws_[i] / tail_w_[i];
}

TiltMoments ScoreSample::tilt_moments(double beta) const {
  // Shift by the largest exponent among positive-weight entries.
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (weights_[i] > 0.0) shift = std::max(shift, beta * scores_[i]);
  }
  double sw = 0.0, sws = 0.0, sws2 = 0.0, sww = 0.0;
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    const double w = weights_[i] * std::exp(beta * scores_[i] - shift);
    sw += w;
    sws += w * scores_[i];
    sww += w * w;
  }
  TiltMoments m;
  m.mean = sws / sw;
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    const double w = weights_[i] * std::exp(beta * scores_[i] - shift);
    const double d = scores_[i] - m.mean;
    sws2 += w * d * d;
  }
  m.variance = sws2 / sw;
  m.log_partition = shift + std::log(sw);  // weights already sum to one
  m.ess = sw * sw / sww;
  return m;
}

}  // namespace klsc
