#include "klsc/constraints/induced.hpp"

#include <cmath>
#include <limits>

#include "klsc/error.hpp"

namespace klsc {

namespace {

std::vector<double> prior_log_on_grid(const IsotropicGmm& prior, const Grid2D& grid) {
  return evaluate_on_grid(grid, [&](Point x) { return prior.log_pdf(x); });
}

}  // namespace

GridDensity prior_on_grid(const IsotropicGmm& prior, const Grid2D& grid) {
  return GridDensity::from_log_values(grid, prior_log_on_grid(prior, grid));
}

ScoreSample score_sample(const ScoreField& score, const IsotropicGmm& prior, const EstimationMethod& method) {
  return std::visit(
      [&](const auto& m) -> ScoreSample {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, GridQuadrature>) {
          const GridDensity p = prior_on_grid(prior, m.grid);
          return ScoreSample::from_grid(p, evaluate_on_grid(m.grid, [&](Point x) { return score.value(x); }));
        } else {
          Rng rng(m.seed);
          return ScoreSample::draw(prior, score, m.n, rng);
        }
      },
      method);
}

double estimate_event_mass(const ScoreField& score, const IsotropicGmm& prior, double threshold,
                           const EstimationMethod& method) {
  return score_sample(score, prior, method).mass_above(threshold);
}

double estimate_log_partition(const ScoreField& score, const IsotropicGmm& prior, double beta,
                              const EstimationMethod& method) {
  if (beta == 0.0) return 0.0;
  return score_sample(score, prior, method).tilt_moments(beta).log_partition;
}

double estimate_log_partition(const ScoreField& score, const ScoreField& task, const IsotropicGmm& prior,
                              double beta, double eta, const EstimationMethod& method) {
  if (beta == 0.0 && eta == 0.0) return 0.0;
  ScoreField combined(CustomScore{"combined", [&](Point x) { return beta * score.value(x) + eta * task.value(x); }, {}});
  return estimate_log_partition(combined, prior, 1.0, method);
}

TiltMoments tilt_mean_variance(const ScoreField& score, const IsotropicGmm& prior, double beta,
                               const EstimationMethod& method) {
  return score_sample(score, prior, method).tilt_moments(beta);
}

HardTruncation make_truncation(const ScoreField& score, const IsotropicGmm& prior, double threshold,
                               const EstimationMethod& method) {
  return {score, threshold, estimate_event_mass(score, prior, threshold, method)};
}

ExponentialTilt make_tilt(const ScoreField& score, const IsotropicGmm& prior, double beta,
                          const EstimationMethod& method) {
  if (!(beta >= 0.0)) throw InvalidArgumentError("make_tilt: beta must be >= 0");
  return {score, beta, estimate_log_partition(score, prior, beta, method)};
}

TaskTilt make_task_tilt(const ScoreField& score, const ScoreField& task, const IsotropicGmm& prior,
                        double beta, double eta, const EstimationMethod& method) {
  if (!(beta >= 0.0) || !(eta >= 0.0)) throw InvalidArgumentError("make_task_tilt: beta, eta must be >= 0");
  return {score, task, beta, eta, estimate_log_partition(score, task, prior, beta, eta, method)};
}

double truncated_log_density(const HardTruncation& trunc, const IsotropicGmm& prior, Point x) {
  if (!(trunc.event_mass > 0.0)) {
    throw InfeasibleThresholdError("truncated_log_density: threshold has zero event mass");
  }
  if (!(trunc.score.value(x) > trunc.threshold)) return -std::numeric_limits<double>::infinity();
  return prior.log_pdf(x) - std::log(trunc.event_mass);
}

double tilt_log_density(const ExponentialTilt& tilt, const IsotropicGmm& prior, Point x) {
  return prior.log_pdf(x) + tilt.beta * tilt.score.value(x) - tilt.log_z;
}

double task_tilt_log_density(const TaskTilt& tt, const IsotropicGmm& prior, Point x) {
  return prior.log_pdf(x) + tt.beta * tt.score.value(x) + tt.eta * tt.task.value(x) - tt.log_z;
}

GridDensity truncation_on_grid(const GridDensity& prior, const std::vector<double>& score_on_grid,
                               double threshold) {
  if (score_on_grid.size() != prior.values().size()) throw GridMismatchError("truncation_on_grid: size mismatch");
  std::vector<double> v(prior.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = score_on_grid[i] > threshold ? prior[i] : 0.0;
  GridDensity q(prior.grid(), std::move(v));
  if (!(q.mass() > 0.0)) throw InfeasibleThresholdError("truncation_on_grid: empty event on grid");
  q.normalize();
  return q;
}

GridDensity tilt_on_grid(const GridDensity& prior, const std::vector<double>& score_on_grid, double beta) {
  return task_tilt_on_grid(prior, score_on_grid, score_on_grid, beta, 0.0);
}

GridDensity task_tilt_on_grid(const GridDensity& prior, const std::vector<double>& score_on_grid,
                              const std::vector<double>& task_on_grid, double beta, double eta) {
  if (score_on_grid.size() != prior.values().size() || task_on_grid.size() != prior.values().size()) {
    throw GridMismatchError("task_tilt_on_grid: size mismatch");
  }
  std::vector<double> logv(prior.values().size());
  for (std::size_t i = 0; i < logv.size(); ++i) {
    logv[i] = prior[i] > 0.0 ? std::log(prior[i]) + beta * score_on_grid[i] + eta * task_on_grid[i]
                             : -std::numeric_limits<double>::infinity();
  }
  return GridDensity::from_log_values(prior.grid(), logv);
}

}  // namespace klsc
