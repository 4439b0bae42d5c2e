#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "klsc/constraints/calibration.hpp"
#include "klsc/constraints/induced.hpp"
#include "klsc/diagnostics/closed_forms.hpp"
#include "klsc/diagnostics/divergence.hpp"
#include "klsc/diagnostics/instability.hpp"
#include "klsc/diagnostics/score_law.hpp"
#include "klsc/error.hpp"
#include "oracles.hpp"

using namespace klsc;

namespace {

const Grid2D kSmall{-3.0, 3.0, -3.0, 3.0, 40, 40};
const Grid2D kWide{-10.0, 10.0, -10.0, 10.0, 400, 400};

GridDensity random_density(const Grid2D& g, Rng& rng) {
  std::vector<double> v(g.size());
  for (double& x : v) x = rng.uniform();
  return GridDensity(g, std::move(v)).normalize();
}

GridDensity gaussian_on(const Grid2D& g, Point mu) {
  return GridDensity::from_log_values(g, evaluate_on_grid(g, [mu](Point x) {
    const Point d = x - mu;
    return -0.5 * dot(d, d);
  }));
}

struct PaperGrid {
  IsotropicGmm prior = IsotropicGmm::four_mode();
  ScoreField score = ScoreField::angular();
  Grid2D grid{};
  GridDensity p = prior_on_grid(prior, grid);
  std::vector<double> s = evaluate_on_grid(grid, [](Point x) { return oracle::angular(x); });
};

const PaperGrid& paper() {
  static const PaperGrid g;
  return g;
}

// Sum of absolute differences between horizontally and vertically adjacent cells.
double roughness(const GridDensity& d) {
  const auto& g = d.grid();
  double r = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i + 1 < g.nx; ++i) r += std::abs(d[j * g.nx + i + 1] - d[j * g.nx + i]);
  }
  for (std::size_t j = 0; j + 1 < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) r += std::abs(d[(j + 1) * g.nx + i] - d[j * g.nx + i]);
  }
  return r;
}

}  // namespace

TEST_CASE("grid TV basics") {
  Rng rng(1);
  const auto a = random_density(kSmall, rng);
  CHECK(grid_tv(a, a) == 0.0);

  std::vector<double> left(kSmall.size(), 0.0), right(kSmall.size(), 0.0);
  for (std::size_t k = 0; k < kSmall.size(); ++k) (kSmall.center(k).x < 0 ? left : right)[k] = 1.0;
  const GridDensity l = GridDensity(kSmall, left).normalize(), r = GridDensity(kSmall, right).normalize();
  CHECK(std::abs(grid_tv(l, r) - 1.0) < 1e-6);

  const Grid2D other{-3.0, 3.0, -3.0, 3.0, 40, 41};
  CHECK_THROWS_AS(grid_tv(a, GridDensity(other, std::vector<double>(other.size(), 1.0))), GridMismatchError);
}

TEST_CASE("TV is symmetric and satisfies the triangle inequality") {
  Rng rng(2);
  for (int t = 0; t < 25; ++t) {
    const auto a = random_density(kSmall, rng), b = random_density(kSmall, rng), c = random_density(kSmall, rng);
    const double ab = grid_tv(a, b);
    CHECK(ab == doctest::Approx(grid_tv(b, a)).epsilon(1e-14));
    CHECK(ab <= grid_tv(a, c) + grid_tv(c, b) + 1e-14);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("KL of shifted unit Gaussians") {
  const auto p = gaussian_on(kWide, {0, 0});
  const auto q = gaussian_on(kWide, {1, 0});
  const auto kl = grid_kl(q, p);
  CHECK_FALSE(kl.infinite);
  CHECK(std::abs(kl.value - 0.5) < 1e-3);
  CHECK(grid_kl(p, p).value == 0.0);
}

TEST_CASE("nested hard truncations give an infinite KL flag") {
  const auto& P = paper();
  const auto q1 = truncation_on_grid(P.p, P.s, 2.0);
  const auto q2 = truncation_on_grid(P.p, P.s, 4.0);
  const auto kl = grid_kl(q1, q2);
  CHECK(kl.infinite);
  CHECK(kl.to_string() == "inf");
  CHECK_FALSE(grid_kl(q2, q1).infinite);
}

TEST_CASE("KL nonnegativity, zero only at equality, and Pinsker") {
  Rng rng(3);
  const auto p0 = random_density(kSmall, rng);
  CHECK(grid_kl(p0, p0).value == 0.0);
  for (int t = 0; t < 25; ++t) {
    const auto q = random_density(kSmall, rng), p = random_density(kSmall, rng);
    const auto kl = grid_kl(q, p);
    CHECK(kl.value > 0.0);
    CHECK(grid_tv(q, p) <= std::sqrt(kl.value / 2.0) + 1e-9);
  }
  const auto& P = paper();
  for (double beta : {0.1, 0.5259, 2.0}) {
    const auto q = tilt_on_grid(P.p, P.s, beta);
    CHECK(grid_tv(q, P.p) <= std::sqrt(grid_kl(q, P.p).value / 2.0) + 1e-9);
  }
  for (double t : {0.2848, 3.5229, 4.7265}) {
    const auto q = truncation_on_grid(P.p, P.s, t);
    CHECK(grid_tv(q, P.p) <= std::sqrt(grid_kl(q, P.p).value / 2.0) + 1e-9);
  }
}

TEST_CASE("KDE of a repeated point") {
  const Grid2D g{};
  const std::vector<Point> pts(50, Point{1.01, -0.49});
  const auto d = kde_to_grid(pts, {}, g);
  CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-12));
  std::size_t best = 0;
  for (std::size_t k = 1; k < g.size(); ++k) {
    if (d[k] > d[best]) best = k;
  }
  CHECK(std::abs(g.center(best).x - 1.01) <= g.dx());
  CHECK(std::abs(g.center(best).y + 0.49) <= g.dy());
  // All mass within the cutoff radius.
  const double inside = d.mass_where(evaluate_on_grid(g, [](Point x) { return norm(x - Point{1.01, -0.49}); }),
                                     [](double r) { return r < 6.0 * 0.15 * std::numbers::sqrt2 + 0.03; });
  CHECK(inside == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("KDE of prior samples is close to the prior") {
  const auto& P = paper();
  Rng rng(4);
  const auto pts = P.prior.sample(100'000, rng);
  const auto kde = kde_to_grid(pts, {}, P.grid);
  const auto kl = grid_kl(kde, P.p);
  CHECK_FALSE(kl.infinite);
  CHECK(kl.value < 0.02);
}

TEST_CASE("smaller bandwidth gives a rougher KDE") {
  const auto& P = paper();
  Rng rng(5);
  const auto pts = P.prior.sample(20'000, rng);
  double prev = 1e300;
  for (double h : {0.08, 0.15, 0.3}) {
    const double r = roughness(kde_to_grid(pts, {h, 6.0}, P.grid));
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("KDE with no samples is an error") {
  CHECK_THROWS_AS(kde_to_grid(std::vector<Point>{}, {}, Grid2D{}), EmptySampleError);
}

TEST_CASE("boundary mass examples") {
  const auto uniform = ScalarScoreLaw::from_density([](double) { return 1.0; }, 0.0, 1.0);
  CHECK(boundary_mass(uniform, 0.5, 0.1) == doctest::Approx(0.2).epsilon(1e-9));
  const auto high = ScalarScoreLaw::from_density([](double) { return 1.0; }, 2.0, 3.0);
  CHECK(boundary_mass(high, 0.5, 0.1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(boundary_mass(uniform, 1.5, 0.1), InfeasibleThresholdError);

  const auto samples = ScalarScoreLaw::from_samples({0.1, 0.3, 0.52, 0.7, 0.9});
  CHECK(boundary_mass(samples, 0.5, 0.1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("angular score law integrates to one") {
  const auto law = ScalarScoreLaw::angular_under_gmm(IsotropicGmm::four_mode(), AngularScore{});
  CHECK(std::abs(law.total_mass() - 1.0) < 1e-3);
  for (double m : {0.0, 2.0, 4.0, 6.0, 7.9}) {
    const double sv = law.survival(m);
    CHECK(sv >= 0.0);
    CHECK(sv <= 1.0);
  }
  // Agrees with the grid event mass.
  const auto& P = paper();
  for (double m : {1.0, 3.3, 7.0}) {
    CHECK(std::abs(law.survival(m) - P.p.mass_where(P.s, [m](double s) { return s > m; })) < 1e-3);
  }
}

TEST_CASE("hazard rates") {
  const auto n01 = ScalarScoreLaw::standard_normal();
  CHECK(hazard_hard(n01, 0.0) == doctest::Approx(2.0 * oracle::normal_pdf(0.0)).epsilon(1e-6));
  CHECK(hazard_hard(n01, 0.0) == doctest::Approx(0.797885).epsilon(1e-6));
  CHECK(hazard_klsc(n01, 0.0, 0.0) == hazard_hard(n01, 0.0));
  CHECK(hazard_klsc(n01, 0.0, 0.7) < hazard_hard(n01, 0.0));

  const auto law = ScalarScoreLaw::angular_under_gmm(IsotropicGmm::four_mode(), AngularScore{});
  for (double m : {1.0, 3.0, 5.0, 6.0, 7.0}) {
    CHECK(hazard_klsc(law, m, 0.0) == hazard_hard(law, m));
    for (double beta : {0.1, 0.5, 1.0, 3.0}) CHECK(hazard_klsc(law, m, beta) <= hazard_hard(law, m));
  }
  const auto empty = ScalarScoreLaw::from_density([](double) { return 1.0; }, 0.0, 1.0);
  CHECK_THROWS_AS(hazard_hard(empty, 2.0), InfeasibleThresholdError);
}

TEST_CASE("boundary mass per unit width approaches the hazard") {
  const auto n01 = ScalarScoreLaw::standard_normal();
  for (double m : {-1.0, 0.0, 1.0, 2.0}) {
    const double h = hazard_hard(n01, m);
    CHECK(std::abs(boundary_mass(n01, m, 1e-3) / 1e-3 - h) < 0.05 * h);
    CHECK(h == doctest::Approx(oracle::normal_pdf(m) / oracle::normal_survival(m)).epsilon(1e-6));
  }
}

TEST_CASE("tilt KL closed form") {
  auto quad = [](double b) { return 0.5 * b * b; };
  CHECK(tilt_kl_closed_form(quad, 1.0, 1.0) == doctest::Approx(0.0));
  CHECK(tilt_kl_closed_form(quad, 1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-8));

  const auto& P = paper();
  auto psi = [&](double b) { return estimate_log_partition(P.score, P.prior, b, GridQuadrature{P.grid}); };
  const std::vector<std::pair<double, double>> pairs = {{0.1, 0.0}, {0.2815, 0.1284}, {0.5259, 0.2815},
                                                        {0.1284, 0.5259}, {1.0, 0.5}};
  for (auto [b, bp] : pairs) {
    const double cf = tilt_kl_closed_form(psi, b, bp);
    const auto kl = grid_kl(tilt_on_grid(P.p, P.s, b), tilt_on_grid(P.p, P.s, bp));
    CHECK(std::abs(cf - kl.value) < 1e-3);
  }
  for (double b : {0.1284, 0.2815, 0.5259}) {
    const double bp = b - 0.01;
    const auto mid = tilt_mean_variance(P.score, P.prior, 0.5 * (b + bp), GridQuadrature{P.grid});
    const double quadratic = 0.5 * mid.variance * 0.01 * 0.01;
    CHECK(std::abs(tilt_kl_closed_form(psi, b, bp) - quadratic) < 0.05 * quadratic);
  }
}

TEST_CASE("instability with zero step and a single level") {
  const auto& P = paper();
  Rng rng(7);
  const MatchedMomentContext ctx(P.p, P.s, ScoreSample::draw(P.prior, P.score, 200'000, rng));
  CHECK(tv_instability(Family::hard, 6.0, 0.0, ctx) == 0.0);
  CHECK(tv_instability(Family::klsc, 6.0, 0.0, ctx) == 0.0);
  const std::vector<double> one{6.0};
  for (Family f : {Family::hard, Family::klsc}) {
    CHECK(mean_tv_instability(one, 0.08, f, ctx) == tv_instability(f, 6.0, 0.08, ctx));
  }
  CHECK(tv_instability(Family::klsc, 6.0, 0.08, ctx) < tv_instability(Family::hard, 6.0, 0.08, ctx));
  const auto member = ctx.member(Family::klsc, 6.0);
  CHECK(member.density.mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(member.calibration.achieved_mean - 6.0) < 1e-3);
}

TEST_CASE("Gaussian closed forms") {
  const auto g0 = gaussian_closed_forms(0.0);
  CHECK(std::abs(g0.lambda_mills - std::sqrt(2.0 / std::numbers::pi)) < 1e-9);
  CHECK(std::abs(g0.mean_residual - std::sqrt(2.0 / std::numbers::pi)) < 1e-9);
  CHECK(std::abs(g0.v_hard - std::sqrt(std::numbers::pi / 2.0)) < 1e-9);
  CHECK(std::abs(g0.v_klsc - 1.0 / std::sqrt(2.0 * std::numbers::pi)) < 1e-9);
  for (double m : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    const auto g = gaussian_closed_forms(m);
    CHECK(g.v_hard > g.v_klsc);
    CHECK(g.lambda_mills == doctest::Approx(oracle::normal_pdf(m) / oracle::normal_survival(m)).epsilon(1e-12));
  }
  CHECK(std::abs(gaussian_closed_forms(20.0).v_hard / 20.0 - 1.0) < 0.01);
}

TEST_CASE("KL chain-rule decomposition closes on the grid") {
  const auto& P = paper();
  const double beta = 0.2815;
  const auto qb = tilt_on_grid(P.p, P.s, beta);
  const auto self = kl_decomposition(qb, P.p, P.s, beta);
  CHECK(self.residual < 1e-6);
  CHECK(self.kl_q_tilt.value < 1e-12);
  CHECK(kl_decomposition_residual(P.p, P.p, P.s, beta) < 1e-6);

  // Hard truncation matched to the mean of q_beta: the excess KL is KL(q_hard || q_beta).
  const double mu = qb.expectation(P.s);
  Rng rng(8);
  const auto pool = ScoreSample::from_grid(P.p, P.s);
  const auto hard = calibrate_hard_threshold(pool, mu, 1e-9);
  const auto qh = truncation_on_grid(P.p, P.s, hard.knob);
  const auto d = kl_decomposition(qh, P.p, P.s, beta);
  CHECK(d.residual < 1e-6);
  const double gap = d.kl_q_prior.value - grid_kl(qb, P.p).value;
  CHECK(std::abs(gap - d.kl_q_tilt.value) < 1e-3);
  CHECK(d.kl_q_tilt.value > 0.0);

  CHECK_THROWS_AS(kl_decomposition(P.p, truncation_on_grid(P.p, P.s, 4.0), P.s, beta), InvalidArgumentError);
}

TEST_CASE("chi-square lower tail") {
  Rng rng(9);
  const auto c = chi_square_tail_check(64, 0.5, 20'000, rng);
  CHECK(c.bound == doctest::Approx(std::exp(-9.0)).epsilon(1e-12));
  CHECK(c.bound == doctest::Approx(1.2341e-4).epsilon(1e-4));
  CHECK(c.analytic_cdf <= c.bound);
  CHECK(c.mc_estimate <= c.bound);
  CHECK(c.bound_holds);

  const auto c2 = chi_square_tail_check(2, 0.5, 200'000, rng);
  CHECK(c2.analytic_cdf == doctest::Approx(1.0 - std::exp(-0.25)).epsilon(1e-12));
  CHECK(c2.analytic_cdf <= std::exp(-0.75 * 0.75 * 2.0 / 4.0));
  CHECK(std::abs(c2.mc_estimate - c2.analytic_cdf) < 5e-3);

  const auto near_one = chi_square_tail_check(16, 0.999, 1000, rng);
  CHECK(near_one.bound > 0.99);
  CHECK(near_one.bound_holds);
}

TEST_CASE("noisy MAP TV lower bound") {
  CHECK(noisy_map_tv_lower(0.0, 0.0) == 1.0);
  CHECK(noisy_map_tv_lower(0.0, 1.0) == 0.0);
  CHECK(noisy_map_tv_lower(0.2, 0.1) == doctest::Approx(0.7));
  CHECK(noisy_map_tv_lower(0.5, 0.9) == 0.0);
  CHECK_THROWS_AS(noisy_map_tv_lower(1.0, 0.0), InvalidArgumentError);
  CHECK_THROWS_AS(noisy_map_tv_lower(0.1, 1.5), InvalidArgumentError);
}
