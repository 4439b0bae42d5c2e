#include "klsc/samplers/opt_reg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "klsc/analytic/seed.hpp"
#include "klsc/error.hpp"

namespace klsc {

namespace {

constexpr double kOriginRadius = 1e-6;
constexpr double kOriginKick = 1e-3;

Point guard_origin(Point x, Rng& rng) {
  if (norm(x) >= kOriginRadius) return x;
  const double a = 2.0 * std::numbers::pi * rng.uniform();
  return {x.x + kOriginKick * std::cos(a), x.y + kOriginKick * std::sin(a)};
}

const GibbsScore& as_gibbs(const ScoreField& f) {
  const auto* g = std::get_if<GibbsScore>(&f.kind());
  if (!g || !g->base) throw InvalidArgumentError("opt_reg: objective must be a Gibbs score field");
  return *g;
}

}  // namespace

void OptRunConfig::validate() const {
  if (!(lambda >= 0.0)) throw InvalidArgumentError("OptRunConfig: lambda must be >= 0");
  if (restarts < 1 || steps < 1) throw InvalidArgumentError("OptRunConfig: restarts and steps must be >= 1");
  if (!(step_size > 0.0)) throw InvalidArgumentError("OptRunConfig: step_size must be > 0");
  if (!(box_hi > box_lo)) throw InvalidArgumentError("OptRunConfig: empty init box");
}

std::vector<Point> opt_reg_run(const ScoreField& objective, const OptRunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const SeedTree tree(seed);
  std::vector<Point> out;
  out.reserve(cfg.restarts);
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    Rng rng = tree.stream("opt_reg", r);
    Point x{cfg.box_lo + (cfg.box_hi - cfg.box_lo) * rng.uniform(),
            cfg.box_lo + (cfg.box_hi - cfg.box_lo) * rng.uniform()};
    for (std::size_t t = 0; t < cfg.steps; ++t) {
      x = guard_origin(x, rng);
      x += cfg.step_size * objective.gradient(x);
      x.x = std::clamp(x.x, cfg.box_lo, cfg.box_hi);
      x.y = std::clamp(x.y, cfg.box_lo, cfg.box_hi);
    }
    out.push_back(guard_origin(x, rng));
  }
  return out;
}

OptRegResult opt_reg_map(const ScoreField& objective, OptRunConfig cfg, double target_m, std::uint64_t seed,
                         double tol, Bracket lambda_bracket, std::size_t budget) {
  const GibbsScore& g = as_gibbs(objective);
  const ScoreField& base = *g.base;
  auto run_at = [&](double lambda, std::vector<Point>* keep) {
    cfg.lambda = lambda;
    auto pts = opt_reg_run(ScoreField::gibbs(base, g.regularizer, lambda), cfg, seed);
    double s = 0.0;
    for (const Point& p : pts) s += base(p);
    if (keep) *keep = std::move(pts);
    return s / static_cast<double>(cfg.restarts);
  };
  OptRegResult r;
  r.calibration = bisect_to_target([&](double l) { return run_at(l, nullptr); }, target_m, tol, lambda_bracket,
                                   budget, Monotonicity::decreasing);
  r.lambda_used = r.calibration.knob;
  r.achieved = run_at(r.lambda_used, &r.samples);
  return r;
}

}  // namespace klsc
