#include "klsc/samplers/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "klsc/error.hpp"

namespace klsc {

CandidatePool CandidatePool::build(std::vector<Point> points, const ScoreField& score) {
  CandidatePool pool;
  pool.scores.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) pool.scores[i] = score(points[i]);
  pool.points = std::move(points);
  pool.sorted_index.resize(pool.points.size());
  std::iota(pool.sorted_index.begin(), pool.sorted_index.end(), std::size_t{0});
  std::stable_sort(pool.sorted_index.begin(), pool.sorted_index.end(),
                   [&](std::size_t a, std::size_t b) { return pool.scores[a] > pool.scores[b]; });
  return pool;
}

CandidatePool CandidatePool::draw(const IsotropicGmm& prior, const ScoreField& score, std::size_t n, Rng& rng) {
  return build(prior.sample(n, rng), score);
}

void CandidatePool::verify() const {
  if (scores.size() != points.size() || sorted_index.size() != points.size()) {
    throw InvalidArgumentError("CandidatePool: inconsistent sizes");
  }
  for (std::size_t i = 1; i < sorted_index.size(); ++i) {
    if (scores[sorted_index[i - 1]] < scores[sorted_index[i]]) {
      throw InvalidArgumentError("CandidatePool: sorted_index is not descending");
    }
  }
}

double WeightedSampleSet::mean_score() const {
  double s = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) s += weights[i] * scores[i];
  return s;
}

double WeightedSampleSet::max_weight() const {
  return weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end());
}

RejectionResult rejection_sample_truncation(const IsotropicGmm& prior, const ScoreField& score, double m_prime,
                                            std::size_t n_out, std::size_t budget, Rng& rng) {
  RejectionResult r;
  r.points.reserve(n_out);
  while (r.points.size() < n_out) {
    if (r.proposals >= budget) {
      std::ostringstream os;
      os << "rejection sampler: budget of " << budget << " proposals exhausted after " << r.points.size()
         << " of " << n_out << " acceptances";
      throw PartialResultError(os.str(), r.points.size());
    }
    const Point x = prior.sample(rng);
    ++r.proposals;
    if (score(x) > m_prime) r.points.push_back(x);
  }
  return r;
}

namespace {

// Normalized softmax weights of beta * s, and their ESS.
double softmax_weights(const std::vector<double>& scores, double beta, std::vector<double>& w) {
  w.resize(scores.size());
  double shift = -std::numeric_limits<double>::infinity();
  for (double s : scores) shift = std::max(shift, beta * s);
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::exp(beta * scores[i] - shift);
    total += w[i];
  }
  double sq = 0.0;
  for (double& v : w) {
    v /= total;
    sq += v * v;
  }
  return 1.0 / sq;
}

}  // namespace

SnisResult snis_resample_tilt(const IsotropicGmm& prior, const ScoreField& score, double beta,
                              std::size_t n_proposals, std::size_t n_out, Rng& rng, double ess_floor) {
  if (n_proposals < n_out || n_proposals == 0) {
    throw InvalidArgumentError("snis_resample_tilt: need n_proposals >= n_out >= 1");
  }
  const auto proposals = prior.sample(n_proposals, rng);
  std::vector<double> scores(n_proposals);
  for (std::size_t i = 0; i < n_proposals; ++i) scores[i] = score(proposals[i]);
  std::vector<double> w;
  SnisResult r;
  r.ess = softmax_weights(scores, beta, w);
  if (r.ess < ess_floor) {
    std::ostringstream os;
    os << "SNIS effective sample size " << r.ess << " below floor " << ess_floor;
    r.warning = os.str();
  }
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  r.points.reserve(n_out);
  for (std::size_t i = 0; i < n_out; ++i) r.points.push_back(proposals[pick(rng)]);
  return r;
}

RetrievalResult retrieval_topk_match(const CandidatePool& pool, double target_m) {
  if (pool.size() == 0) throw EmptySampleError("retrieval_topk_match: empty pool");
  const double top = pool.scores[pool.sorted_index.front()];
  if (target_m > top) {
    std::ostringstream os;
    os << "retrieval: target " << target_m << " exceeds the largest prefix mean " << top;
    throw CalibrationInfeasibleError(os.str(), top, top);
  }
  double running = 0.0;
  double best_gap = std::numeric_limits<double>::infinity();
  std::size_t best_k = 1;
  double best_mean = top;
  for (std::size_t k = 1; k <= pool.size(); ++k) {
    running += pool.scores[pool.sorted_index[k - 1]];
    const double mean = running / static_cast<double>(k);
    const double gap = std::abs(mean - target_m);
    if (gap < best_gap) {
      best_gap = gap;
      best_k = k;
      best_mean = mean;
    }
  }
  RetrievalResult r;
  r.k = best_k;
  r.achieved = best_mean;
  r.selected.reserve(best_k);
  r.selected_scores.reserve(best_k);
  for (std::size_t i = 0; i < best_k; ++i) {
    r.selected.push_back(pool.points[pool.sorted_index[i]]);
    r.selected_scores.push_back(pool.scores[pool.sorted_index[i]]);
  }
  r.implied_threshold = r.selected_scores.back();
  return r;
}

WeightedSampleSet empirical_tilt(const CandidatePool& pool, double beta) {
  if (pool.size() == 0) throw EmptySampleError("empirical_tilt: empty pool");
  WeightedSampleSet set;
  set.points = pool.points;
  set.scores = pool.scores;
  set.ess = softmax_weights(set.scores, beta, set.weights);
  return set;
}

double empirical_boundary_mass(const std::vector<double>& scores, const std::vector<double>& weights, double t,
                               double delta) {
  double above = 0.0, shell = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (scores[i] > t) {
      above += w;
      if (scores[i] < t + delta) shell += w;
    }
  }
  if (!(above > 0.0)) throw InfeasibleThresholdError("empirical_boundary_mass: no mass above threshold");
  return shell / above;
}

}  // namespace klsc
