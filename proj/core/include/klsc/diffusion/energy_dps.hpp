#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "klsc/analytic/score.hpp"
#include "klsc/constraints/calibration.hpp"
#include "klsc/diffusion/schedule.hpp"

namespace klsc {

enum class ZetaSchedule { constant, ddpm_beta };
enum class GuidanceJacobian { exact, detached };

/// zeta_i = zeta_bar (constant) or zeta_bar * beta_i / sqrt(alpha_i) (ddpm_beta).
std::vector<double> make_zeta(const DdpmSchedule& sched, ZetaSchedule kind, double zeta_bar);

struct GuidanceConfig {
  std::vector<double> zeta;  // indexed like the schedule
  double strength = 0.0;     // beta of the tilt
  double gamma = 1.0;        // global scale, the calibrated knob
  std::optional<double> cap;
  GuidanceJacobian jacobian = GuidanceJacobian::exact;

  void validate(const DdpmSchedule& sched) const;
  double step_weight(std::size_t i) const { return gamma * zeta[i] * strength; }
};

struct ReverseState {
  Point x;
  std::size_t step = 0;
  Point x0_hat;
  double guidance_norm = 0.0;
};

/// One ancestral step i -> i-1 with the given standard-normal draw z.
/// `noised` must be the step-i marginal.
ReverseState reverse_step(const ReverseState& state, const DdpmSchedule& sched, const NoisedGmm& noised,
                          const GuidanceConfig& guidance, const ScoreField& score, Point z);
ReverseState reverse_step(const ReverseState& state, const DdpmSchedule& sched, const IsotropicGmm& prior,
                          const GuidanceConfig& guidance, const ScoreField& score, Point z);
ReverseState reverse_step(const ReverseState& state, const DdpmSchedule& sched, const IsotropicGmm& prior,
                          const GuidanceConfig& guidance, const ScoreField& score, Rng& rng);

struct DpsOptions {
  /// Stop once this step is reached (0 runs the full chain).
  std::size_t stop_step = 0;
  /// Called after every step of every trajectory when set.
  std::function<void(std::size_t trajectory, const ReverseState&)> observer;
};

struct DpsResult {
  std::vector<Point> points;
  double achieved_mean = 0.0;
  double score_sd = 0.0;
};

/// n trajectories from x_N ~ N(0, I); trajectory t uses substream t of seed.
/// Throws TrajectoryAbortError when a state is non-finite or ||x|| > 1e6.
DpsResult energydps_sample(const IsotropicGmm& prior, const DdpmSchedule& sched, const GuidanceConfig& guidance,
                           const ScoreField& score, std::size_t n, std::uint64_t seed,
                           const DpsOptions& options = {});

/// Bisection on guidance.gamma with common random numbers across iterates.
CalibrationResult calibrate_guidance(const IsotropicGmm& prior, const DdpmSchedule& sched,
                                     const GuidanceConfig& guidance, const ScoreField& score, double target_m,
                                     double tol, Bracket bracket, std::size_t n_cal, std::uint64_t seed,
                                     std::size_t budget = 40);

}  // namespace klsc
