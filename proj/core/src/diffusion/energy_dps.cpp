#include "klsc/diffusion/energy_dps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "klsc/analytic/seed.hpp"
#include "klsc/error.hpp"

namespace klsc {

namespace {

constexpr double kAbortNorm = 1e6;
constexpr std::string_view kTrajectoryStream = "energydps";

}  // namespace

std::vector<double> make_zeta(const DdpmSchedule& sched, ZetaSchedule kind, double zeta_bar) {
  if (!(zeta_bar >= 0.0)) throw InvalidArgumentError("make_zeta: zeta_bar must be >= 0");
  std::vector<double> z(sched.N + 1, 0.0);
  for (std::size_t i = 1; i <= sched.N; ++i) {
    z[i] = kind == ZetaSchedule::constant ? zeta_bar : zeta_bar * sched.beta_ddpm[i] / std::sqrt(sched.alpha[i]);
  }
  return z;
}

void GuidanceConfig::validate(const DdpmSchedule& sched) const {
  if (zeta.size() != sched.N + 1) throw InvalidArgumentError("GuidanceConfig: zeta length must be N + 1");
  for (double z : zeta) {
    if (!(z >= 0.0)) throw InvalidArgumentError("GuidanceConfig: zeta must be >= 0");
  }
  if (!(strength >= 0.0) || !(gamma >= 0.0)) throw InvalidArgumentError("GuidanceConfig: negative strength");
}

ReverseState reverse_step(const ReverseState& state, const DdpmSchedule& sched, const NoisedGmm& noised,
                          const GuidanceConfig& guidance, const ScoreField& score, Point z) {
  const std::size_t i = state.step;
  if (i < 1 || i > sched.N) throw InvalidArgumentError("reverse_step: step must be in [1, N]");
  if (noised.step != i) throw InvalidArgumentError("reverse_step: noised marginal is for a different step");
  const double ab = sched.alpha_bar[i];
  const double ab_prev = sched.alpha_bar[i - 1];
  const double sab = std::sqrt(ab);
  const ScoreWithJacobian u = oracle_score_jacobian(noised, state.x);

  ReverseState next;
  next.step = i - 1;
  next.x0_hat = (1.0 / sab) * (state.x + (1.0 - ab) * u.score);
  const double c_x = std::sqrt(sched.alpha[i]) * (1.0 - ab_prev) / (1.0 - ab);
  const double c_0 = std::sqrt(ab_prev) * sched.beta_ddpm[i] / (1.0 - ab);
  next.x = c_x * state.x + c_0 * next.x0_hat + sched.sigma_tilde[i] * z;

  const double w = guidance.step_weight(i);
  const bool capped = guidance.cap && score(next.x0_hat) >= *guidance.cap;
  if (w > 0.0 && !capped && norm(next.x0_hat) > 1e-12) {
    const Point g = score.gradient(next.x0_hat);
    Point gx;
    if (guidance.jacobian == GuidanceJacobian::detached) {
      gx = (1.0 / sab) * g;
    } else {
      // d x0_hat / d x = (I + (1 - ab) du/dx) / sqrt(ab), symmetric
      const double a = 1.0 - ab;
      const double jxx = (1.0 + a * u.jxx) / sab, jxy = a * u.jxy / sab, jyy = (1.0 + a * u.jyy) / sab;
      gx = {jxx * g.x + jxy * g.y, jxy * g.x + jyy * g.y};
    }
    next.x += w * gx;
    next.guidance_norm = w * norm(gx);
  }
  return next;
}

ReverseState reverse_step(const ReverseState& state, const DdpmSchedule& sched, const IsotropicGmm& prior,
                          const GuidanceConfig& guidance, const ScoreField& score, Point z) {
  const std::size_t i = state.step;
  if (i < 1 || i > sched.N) throw InvalidArgumentError("reverse_step: step must be in [1, N]");
  return reverse_step(state, sched, noised_gmm_at(prior, sched, i), guidance, score, z);
}

ReverseState reverse_step(const ReverseState& state, const DdpmSchedule& sched, const IsotropicGmm& prior,
                          const GuidanceConfig& guidance, const ScoreField& score, Rng& rng) {
  const Point z{rng.normal(), rng.normal()};
  return reverse_step(state, sched, prior, guidance, score, z);
}

DpsResult energydps_sample(const IsotropicGmm& prior, const DdpmSchedule& sched, const GuidanceConfig& guidance,
                           const ScoreField& score, std::size_t n, std::uint64_t seed, const DpsOptions& options) {
  if (n < 1) throw InvalidArgumentError("energydps_sample: n must be >= 1");
  if (options.stop_step > sched.N) throw InvalidArgumentError("energydps_sample: stop_step beyond N");
  guidance.validate(sched);
  std::vector<NoisedGmm> marginals;
  marginals.reserve(sched.N + 1);
  for (std::size_t i = 0; i <= sched.N; ++i) marginals.push_back(noised_gmm_at(prior, sched, i));
  const SeedTree tree(seed);
  DpsResult out;
  out.points.reserve(n);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    Rng rng = tree.stream(kTrajectoryStream, t);
    ReverseState st;
    st.step = sched.N;
    st.x = {rng.normal(), rng.normal()};
    while (st.step > options.stop_step) {
      const Point z{rng.normal(), rng.normal()};
      st = reverse_step(st, sched, marginals[st.step], guidance, score, z);
      if (!is_finite(st.x) || norm(st.x) > kAbortNorm) {
        std::ostringstream os;
        os << "EnergyDPS trajectory " << t << " diverged at step " << st.step;
        throw TrajectoryAbortError(os.str(), t, st.step);
      }
      if (options.observer) options.observer(t, st);
    }
    const double s = score(st.x);
    sum += s;
    sum2 += s * s;
    out.points.push_back(st.x);
  }
  const double nn = static_cast<double>(n);
  out.achieved_mean = sum / nn;
  out.score_sd = n > 1 ? std::sqrt(std::max(0.0, (sum2 - nn * out.achieved_mean * out.achieved_mean) / (nn - 1.0)))
                       : 0.0;
  return out;
}

CalibrationResult calibrate_guidance(const IsotropicGmm& prior, const DdpmSchedule& sched,
                                     const GuidanceConfig& guidance, const ScoreField& score, double target_m,
                                     double tol, Bracket bracket, std::size_t n_cal, std::uint64_t seed,
                                     std::size_t budget) {
  GuidanceConfig g = guidance;
  auto mean_at = [&](double gamma) {
    g.gamma = gamma;
    return energydps_sample(prior, sched, g, score, n_cal, seed).achieved_mean;
  };
  return bisect_to_target(mean_at, target_m, tol, bracket, budget, Monotonicity::increasing);
}

}  // namespace klsc
