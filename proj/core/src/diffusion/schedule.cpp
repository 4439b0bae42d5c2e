#include "klsc/diffusion/schedule.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "klsc/error.hpp"

namespace klsc {

DdpmSchedule build_linear_schedule(std::size_t N, double beta_min, double beta_max) {
  if (N < 1) throw InvalidArgumentError("build_linear_schedule: N must be >= 1");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
    throw InvalidArgumentError("build_linear_schedule: need 0 < beta_min <= beta_max < 1");
  }
  DdpmSchedule s;
  s.N = N;
  s.beta_ddpm.assign(N + 1, 0.0);
  s.alpha.assign(N + 1, 1.0);
  s.alpha_bar.assign(N + 1, 1.0);
  s.sigma_tilde.assign(N + 1, 0.0);
  double log_ab = 0.0;
  for (std::size_t i = 1; i <= N; ++i) {
    const double t = N == 1 ? 0.0 : static_cast<double>(i - 1) / static_cast<double>(N - 1);
    const double b = beta_min + (beta_max - beta_min) * t;
    s.beta_ddpm[i] = b;
    s.alpha[i] = 1.0 - b;
    log_ab += std::log1p(-b);
    s.alpha_bar[i] = std::exp(log_ab);
    s.sigma_tilde[i] = std::sqrt(b * (1.0 - s.alpha_bar[i - 1]) / (1.0 - s.alpha_bar[i]));
  }
  return s;
}

NoisedGmm noised_gmm_at(const IsotropicGmm& prior, const DdpmSchedule& sched, std::size_t i) {
  if (i > sched.N) throw InvalidArgumentError("noised_gmm_at: step beyond N");
  const double ab = sched.alpha_bar[i];
  const double r = std::sqrt(ab);
  std::vector<Point> means;
  means.reserve(prior.size());
  for (const Point& m : prior.means()) means.push_back(r * m);
  const double var = ab * prior.sigma() * prior.sigma() + (1.0 - ab);
  return {i, IsotropicGmm(std::move(means), std::sqrt(var)), var};
}

Point oracle_score(const IsotropicGmm& prior, const DdpmSchedule& sched, std::size_t i, Point x) {
  if (i < 1 || i > sched.N) throw InvalidArgumentError("oracle_score: step must be in [1, N]");
  return noised_gmm_at(prior, sched, i).gmm.grad_log_pdf(x);
}

ScoreWithJacobian oracle_score_jacobian(const NoisedGmm& noised, Point x) {
  const auto& c = noised.gmm.means();
  const double v = noised.variance;
  // Responsibilities by log-sum-exp; small mixtures avoid the heap.
  double lmax = -std::numeric_limits<double>::infinity();
  std::array<double, 16> small{};
  std::vector<double> large;
  if (c.size() > small.size()) large.resize(c.size());
  double* l = large.empty() ? small.data() : large.data();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Point d = x - c[k];
    l[k] = -0.5 * dot(d, d) / v;
    lmax = std::max(lmax, l[k]);
  }
  double z = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    l[k] = std::exp(l[k] - lmax);
    z += l[k];
  }
  double mx = 0.0, my = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double w = l[k] / z;
    mx += w * c[k].x;
    my += w * c[k].y;
    sxx += w * c[k].x * c[k].x;
    sxy += w * c[k].x * c[k].y;
    syy += w * c[k].y * c[k].y;
  }
  ScoreWithJacobian out;
  out.score = {(mx - x.x) / v, (my - x.y) / v};
  // d/dx of (sum w c - x) / v = (Cov_w(c) / v - I) / v
  const double cxx = sxx - mx * mx, cxy = sxy - mx * my, cyy = syy - my * my;
  out.jxx = (cxx / v - 1.0) / v;
  out.jxy = cxy / (v * v);
  out.jyy = (cyy / v - 1.0) / v;
  return out;
}

}  // namespace klsc
