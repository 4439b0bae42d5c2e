#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "klsc/constraints/calibration.hpp"
#include "klsc/constraints/induced.hpp"
#include "klsc/diagnostics/divergence.hpp"
#include "klsc/error.hpp"
#include "klsc/samplers/opt_reg.hpp"
#include "klsc/samplers/samplers.hpp"
#include "oracles.hpp"

using namespace klsc;

namespace {

struct Setup {
  IsotropicGmm prior = IsotropicGmm::four_mode();
  ScoreField score = ScoreField::angular();
  Grid2D grid{};
  GridDensity p = prior_on_grid(prior, grid);
  std::vector<double> s = evaluate_on_grid(grid, [](Point x) { return oracle::angular(x); });
  ScoreSample grid_pool = ScoreSample::from_grid(p, s);
};

const Setup& setup() {
  static const Setup st;
  return st;
}

CandidatePool pool_from_scores(const std::vector<double>& scores) {
  CandidatePool pool;
  for (std::size_t i = 0; i < scores.size(); ++i) pool.points.push_back({static_cast<double>(i), 0.0});
  pool.scores = scores;
  pool.sorted_index.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) pool.sorted_index[i] = i;
  std::stable_sort(pool.sorted_index.begin(), pool.sorted_index.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return pool;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::vector<double> scores_of(const std::vector<Point>& pts) {
  std::vector<double> out;
  out.reserve(pts.size());
  for (Point x : pts) out.push_back(oracle::angular(x));
  return out;
}

}  // namespace

TEST_CASE("rejection below the score minimum accepts everything") {
  const auto& S = setup();
  Rng rng(1);
  const auto r = rejection_sample_truncation(S.prior, S.score, -1.0, 1000, 10'000, rng);
  CHECK(r.points.size() == 1000);
  CHECK(r.acceptance_rate() == 1.0);
}

TEST_CASE("rejection sampling matches the truncated grid density") {
  const auto& S = setup();
  const double m_prime = calibrate_hard_threshold(S.grid_pool, 5.0, 1e-4).knob;
  Rng rng(2);
  const std::size_t n = 200'000;
  const auto r = rejection_sample_truncation(S.prior, S.score, m_prime, n, 10 * n, rng);
  REQUIRE(r.points.size() == n);
  const auto sc = scores_of(r.points);
  for (double v : sc) REQUIRE(v > m_prime);

  const auto q = truncation_on_grid(S.p, S.s, m_prime);
  const double mu = q.expectation(S.s);
  double var = 0.0;
  for (std::size_t k = 0; k < S.grid.size(); ++k) var += q[k] * (S.s[k] - mu) * (S.s[k] - mu) * S.grid.cell_area();
  CHECK(std::abs(mean_of(sc) - mu) < 3.0 * std::sqrt(var / static_cast<double>(n)));
  CHECK(grid_tv(kde_to_grid(r.points, {}, S.grid), q) < 0.06);
}

TEST_CASE("rejection budget exhaustion is a partial result") {
  const auto& S = setup();
  Rng rng(3);
  CHECK_THROWS_AS(rejection_sample_truncation(S.prior, S.score, 7.99, 1000, 2000, rng), PartialResultError);
}

TEST_CASE("SNIS at beta = 0 resamples the prior") {
  const auto& S = setup();
  Rng rng(4);
  const auto r = snis_resample_tilt(S.prior, S.score, 0.0, 10'000, 10'000, rng);
  CHECK(r.ess == doctest::Approx(10'000.0).epsilon(1e-9));
  CHECK(r.warning.empty());
  CHECK(std::abs(mean_of(scores_of(r.points)) - 4.0) < 0.1);
}

TEST_CASE("SNIS matches the tilted grid density") {
  const auto& S = setup();
  const double beta = calibrate_tilt_beta(S.grid_pool, 5.0, 1e-4).knob;
  Rng rng(5);
  const std::size_t n = 200'000;
  const auto r = snis_resample_tilt(S.prior, S.score, beta, 5 * n, n, rng);
  const auto m = tilt_mean_variance(S.score, S.prior, beta, GridQuadrature{S.grid});
  const double sigma = std::sqrt(m.variance * (1.0 / static_cast<double>(n) + 1.0 / r.ess));
  CHECK(std::abs(mean_of(scores_of(r.points)) - m.mean) < 3.0 * sigma);
  CHECK(grid_tv(kde_to_grid(r.points, {}, S.grid), tilt_on_grid(S.p, S.s, beta)) < 0.06);
}

TEST_CASE("retrieval prefix scan") {
  const auto pool = pool_from_scores({2.0, 8.0, 4.0, 6.0});
  pool.verify();
  const auto r = retrieval_topk_match(pool, 7.0);
  CHECK(r.k == 2);
  CHECK(r.achieved == 7.0);
  CHECK(r.implied_threshold == 6.0);
  CHECK(r.selected_scores == std::vector<double>{8.0, 6.0});

  const auto all = retrieval_topk_match(pool, 5.0);
  CHECK(all.k == 4);
  CHECK(all.achieved == 5.0);
  CHECK_THROWS_AS(retrieval_topk_match(pool, 8.5), CalibrationInfeasibleError);

  // Equidistant prefixes resolve to the smaller k.
  const auto tie = retrieval_topk_match(pool_from_scores({8.0, 6.0, 4.0, 2.0}), 7.5);
  CHECK(tie.k == 1);
}

TEST_CASE("retrieval on a prior pool hits the target") {
  const auto& S = setup();
  Rng rng(6);
  const auto pool = CandidatePool::draw(S.prior, S.score, 1'000'000, rng);
  pool.verify();
  for (double m : {5.0, 6.0, 7.0}) {
    const auto r = retrieval_topk_match(pool, m);
    CHECK(std::abs(r.achieved - m) < 0.05);
    CHECK(r.selected.size() == r.k);
  }
}

TEST_CASE("empirical tilt limits") {
  const auto pool = pool_from_scores({1.0, 3.0, 2.5, 0.5});
  const auto u = empirical_tilt(pool, 0.0);
  for (double w : u.weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(u.ess == doctest::Approx(4.0));
  const auto sharp = empirical_tilt(pool, 50.0);
  CHECK(sharp.max_weight() > 0.999);
  const auto ties = empirical_tilt(pool_from_scores({2.0, 2.0, 2.0}), 50.0);
  for (double w : ties.weights) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("max weight grows with beta and matches the pool estimator") {
  const auto& S = setup();
  Rng rng(7);
  const auto pool = CandidatePool::draw(S.prior, S.score, 50'000, rng);
  const auto sample = ScoreSample::from_values(pool.scores);
  double prev = 0.0;
  for (double beta = 0.0; beta <= 20.0; beta += 0.5) {
    const auto t = empirical_tilt(pool, beta);
    CHECK(t.max_weight() >= prev);
    prev = t.max_weight();
    CHECK(std::abs(t.mean_score() - sample.tilt_moments(beta).mean) < 1e-9);
  }
}

TEST_CASE("retrieval concentrates near its selection boundary") {
  const auto& S = setup();
  Rng rng(8);
  const auto pool = CandidatePool::draw(S.prior, S.score, 1'000'000, rng);
  const auto r = retrieval_topk_match(pool, 6.0);
  const auto cal = calibrate_tilt_beta(ScoreSample::from_values(pool.scores), r.achieved, 1e-6);
  const auto t = empirical_tilt(pool, cal.knob);
  const double delta = 0.05;
  const double bm_retrieval = empirical_boundary_mass(r.selected_scores, {}, r.implied_threshold, delta);
  const double bm_tilt = empirical_boundary_mass(t.scores, t.weights, r.implied_threshold, delta);
  CHECK(bm_retrieval > bm_tilt);
}

TEST_CASE("unregularized optimization reaches the score maximum") {
  const auto& S = setup();
  // Far from the origin the angular gradient is weak, so run well past the default step count.
  OptRunConfig cfg;
  cfg.restarts = 64;
  cfg.steps = 5000;
  const auto pts = opt_reg_run(ScoreField::gibbs(S.score, Regularizer::neg_second_coord(), 0.0), cfg, 11);
  REQUIRE(pts.size() == 64);
  const auto sc = scores_of(pts);
  for (double v : sc) CHECK(v > 7.99);
  CHECK(mean_of(sc) == doctest::Approx(8.0).epsilon(1e-3));
}

TEST_CASE("a single restart finds the Gibbs mode") {
  const Point center{-1.0, -2.5};
  const double lambda = 1.0;
  const auto objective = ScoreField::gibbs(ScoreField::angular(), Regularizer::quadratic(center), lambda);
  OptRunConfig cfg;
  cfg.lambda = lambda;
  cfg.restarts = 1;
  const Point x = opt_reg_run(objective, cfg, 12).front();

  const Grid2D box{-5.0, 5.0, -5.0, 5.0, 1000, 1000};
  std::size_t best = 0;
  double best_v = -1e300;
  for (std::size_t k = 0; k < box.size(); ++k) {
    const Point c = box.center(k);
    const Point d = c - center;
    const double v = oracle::angular(c) - 0.5 * lambda * dot(d, d);
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  CHECK(std::abs(x.x - box.center(best).x) <= box.dx());
  CHECK(std::abs(x.y - box.center(best).y) <= box.dy());
}

TEST_CASE("samplers are deterministic in the seed") {
  const auto& S = setup();
  OptRunConfig cfg;
  cfg.restarts = 16;
  const auto obj = ScoreField::gibbs(S.score, Regularizer::neg_second_coord(), 1.0);
  CHECK(opt_reg_run(obj, cfg, 5) == opt_reg_run(obj, cfg, 5));
  Rng a(9), b(9);
  CHECK(snis_resample_tilt(S.prior, S.score, 0.3, 5000, 1000, a).points ==
        snis_resample_tilt(S.prior, S.score, 0.3, 5000, 1000, b).points);
  Rng c(10), d(10);
  CHECK(rejection_sample_truncation(S.prior, S.score, 3.0, 1000, 100'000, c).points ==
        rejection_sample_truncation(S.prior, S.score, 3.0, 1000, 100'000, d).points);
}

TEST_CASE("optimization-with-regularization is further from the prior than SNIS") {
  const auto& S = setup();
  const auto obj = ScoreField::gibbs(S.score, Regularizer::neg_second_coord(), 0.0);
  for (double m : {5.0, 6.0, 7.0}) {
    const auto orr = opt_reg_map(obj, OptRunConfig{}, m, 13);
    CHECK(std::abs(orr.achieved - m) < 0.05);
    const double beta = calibrate_tilt_beta(S.grid_pool, orr.achieved, 1e-4).knob;
    Rng rng(14);
    const auto snis = snis_resample_tilt(S.prior, S.score, beta, 100'000, 20'000, rng);
    const auto kl_or = grid_kl(kde_to_grid(orr.samples, {}, S.grid), S.p);
    const auto kl_snis = grid_kl(kde_to_grid(snis.points, {}, S.grid), S.p);
    CHECK((kl_or.infinite || kl_or.value > kl_snis.value));
  }
}

TEST_CASE("invalid optimizer settings") {
  OptRunConfig cfg;
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgumentError);
  cfg = {};
  cfg.box_lo = 1.0;
  cfg.box_hi = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgumentError);
}
