#pragma once

#include <cstdint>
#include <variant>

#include "klsc/analytic/gmm.hpp"
#include "klsc/analytic/score.hpp"
#include "klsc/constraints/score_sample.hpp"
#include "klsc/diagnostics/grid.hpp"

namespace klsc {

/// Estimate by midpoint quadrature on a grid.
struct GridQuadrature {
  Grid2D grid;
};
/// Estimate from n fresh prior draws.
struct MonteCarlo {
  std::size_t n = 2'000'000;
  std::uint64_t seed = 0;
};
using EstimationMethod = std::variant<GridQuadrature, MonteCarlo>;

/// q(x) = p(x) 1{s(x) > threshold} / p(E).
struct HardTruncation {
  ScoreField score;
  double threshold = 0.0;
  double event_mass = 0.0;
};

/// q(x) = p(x) e^{beta s(x)} / Z(beta).
struct ExponentialTilt {
  ScoreField score;
  double beta = 0.0;
  double log_z = 0.0;
};

/// q(x) = p(x) e^{beta s(x) + eta f(x)} / Z(beta, eta).
struct TaskTilt {
  ScoreField score;
  ScoreField task;
  double beta = 0.0;
  double eta = 0.0;
  double log_z = 0.0;
};

ScoreSample score_sample(const ScoreField& score, const IsotropicGmm& prior, const EstimationMethod& method);

double estimate_event_mass(const ScoreField& score, const IsotropicGmm& prior, double threshold,
                           const EstimationMethod& method);
/// log E_p[e^{beta s}], log-sum-exp stabilized.
double estimate_log_partition(const ScoreField& score, const IsotropicGmm& prior, double beta,
                              const EstimationMethod& method);
/// log E_p[e^{beta s + eta f}]
double estimate_log_partition(const ScoreField& score, const ScoreField& task, const IsotropicGmm& prior,
                              double beta, double eta, const EstimationMethod& method);
TiltMoments tilt_mean_variance(const ScoreField& score, const IsotropicGmm& prior, double beta,
                               const EstimationMethod& method);

HardTruncation make_truncation(const ScoreField& score, const IsotropicGmm& prior, double threshold,
                               const EstimationMethod& method);
ExponentialTilt make_tilt(const ScoreField& score, const IsotropicGmm& prior, double beta,
                          const EstimationMethod& method);
TaskTilt make_task_tilt(const ScoreField& score, const ScoreField& task, const IsotropicGmm& prior,
                        double beta, double eta, const EstimationMethod& method);

/// log p(x) - log p(E) when s(x) > threshold, otherwise -inf.
/// Throws InfeasibleThresholdError when event_mass is zero.
double truncated_log_density(const HardTruncation& trunc, const IsotropicGmm& prior, Point x);
double tilt_log_density(const ExponentialTilt& tilt, const IsotropicGmm& prior, Point x);
double task_tilt_log_density(const TaskTilt& tt, const IsotropicGmm& prior, Point x);

/// Grid renderings. prior is the normalized prior grid density and the
/// field arguments are the score evaluated at the same cell centres.
GridDensity prior_on_grid(const IsotropicGmm& prior, const Grid2D& grid);
GridDensity truncation_on_grid(const GridDensity& prior, const std::vector<double>& score_on_grid,
                               double threshold);
GridDensity tilt_on_grid(const GridDensity& prior, const std::vector<double>& score_on_grid, double beta);
GridDensity task_tilt_on_grid(const GridDensity& prior, const std::vector<double>& score_on_grid,
                              const std::vector<double>& task_on_grid, double beta, double eta);

}  // namespace klsc
