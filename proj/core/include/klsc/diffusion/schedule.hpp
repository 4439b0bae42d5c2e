#pragma once

#include <cstddef>
#include <vector>

#include "klsc/analytic/gmm.hpp"

namespace klsc {

/// Forward noising coefficients indexed 0..N; index 0 is the clean state
/// (beta = 0, alpha_bar = 1, sigma_tilde = 0).
struct DdpmSchedule {
  std::size_t N = 0;
  std::vector<double> beta_ddpm;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;
  std::vector<double> sigma_tilde;
};

/// Linear beta ramp from beta_min (step 1) to beta_max (step N).
DdpmSchedule build_linear_schedule(std::size_t N, double beta_min = 1e-4, double beta_max = 0.02);

/// Marginal of the forward process at step i started from the prior.
struct NoisedGmm {
  std::size_t step = 0;
  IsotropicGmm gmm;
  double variance = 0.0;  // alpha_bar sigma^2 + 1 - alpha_bar
};

NoisedGmm noised_gmm_at(const IsotropicGmm& prior, const DdpmSchedule& sched, std::size_t i);

/// Exact grad log p_i(x) from the noised mixture.
Point oracle_score(const IsotropicGmm& prior, const DdpmSchedule& sched, std::size_t i, Point x);

/// Score and its 2x2 Jacobian (symmetric: xx, xy, yy).
struct ScoreWithJacobian {
  Point score;
  double jxx = 0.0, jxy = 0.0, jyy = 0.0;
};
ScoreWithJacobian oracle_score_jacobian(const NoisedGmm& noised, Point x);

}  // namespace klsc
