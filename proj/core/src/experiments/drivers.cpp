#include "klsc/experiments/drivers.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "klsc/analytic/seed.hpp"
#include "klsc/constraints/induced.hpp"
#include "klsc/constraints/task.hpp"
#include "klsc/diagnostics/closed_forms.hpp"
#include "klsc/diffusion/energy_dps.hpp"
#include "klsc/error.hpp"
#include "klsc/experiments/heatmap.hpp"
#include "klsc/experiments/report.hpp"
#include "klsc/samplers/opt_reg.hpp"
#include "klsc/samplers/samplers.hpp"

namespace klsc {

namespace fs = std::filesystem;

namespace {

void say(const RunOptions& opt, const std::string& line) {
  if (opt.log) *opt.log << line << std::endl;
}

constexpr std::size_t kSyntheticQuantiles = 1'000'000;

bool writing(const RunOptions& opt) { return !opt.out_dir.empty(); }

std::string out_path(const RunOptions& opt, const std::string& name) {
  fs::create_directories(opt.out_dir);
  return (fs::path(opt.out_dir) / name).string();
}

// "m5" for integral targets, "m5p25" otherwise.
std::string level_tag(double m) {
  std::string s = format_double(m);
  std::replace(s.begin(), s.end(), '.', 'p');
  return "m" + s;
}

std::vector<double> scores_of(const ScoreField& score, const std::vector<Point>& pts) {
  std::vector<double> s(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) s[i] = score(pts[i]);
  return s;
}

// Evenly strided subset of at most `cap` points.
std::vector<Point> thin(const std::vector<Point>& pts, std::size_t cap) {
  if (pts.size() <= cap) return pts;
  std::vector<Point> out;
  out.reserve(cap);
  for (std::size_t i = 0; i < cap; ++i) out.push_back(pts[i * pts.size() / cap]);
  return out;
}

GridDensity kde(const ExperimentConfig& cfg, const std::vector<Point>& pts) {
  const auto used = thin(pts, cfg.kde.max_samples);
  return kde_to_grid(used, cfg.kde.kernel, cfg.grid);
}

bool kl_less(const Divergence& a, const Divergence& b) {
  if (a.infinite) return false;
  if (b.infinite) return true;
  return a.value < b.value;
}

void fail(RunStatus& st, const std::string& what) {
  st.orderings_hold = false;
  st.failures.push_back(what);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

const Table1Row* Table1Result::find(Family family, double target) const {
  for (const auto& r : rows) {
    if (r.family == family && r.target == target) return &r;
  }
  return nullptr;
}

const SamplerRow* SamplerResult::find(const std::string& method, double target) const {
  for (const auto& r : rows) {
    if (r.method == method && r.target == target) return &r;
  }
  return nullptr;
}

Table1Result run_table1(const ExperimentConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  const auto prior = cfg.prior.build();
  const auto score = cfg.score.build();
  const SeedTree tree(cfg.seed);
  const GridDensity p = prior_on_grid(prior, cfg.grid);
  auto s_grid = evaluate_on_grid(cfg.grid, [&](Point x) { return score(x); });
  Rng rng = tree.stream("table1_pool");
  say(opt, "table1: drawing calibration pool of " + std::to_string(cfg.table1.pool));
  const MatchedMomentContext ctx(p, s_grid, ScoreSample::draw(prior, score, cfg.table1.pool, rng),
                                 cfg.table1.calibration);
  const double delta = cfg.table1.delta;
  const double eps = cfg.table1.eps;

  Table1Result out;
  std::vector<CalibrationRecord> cal_records;
  if (writing(opt)) {
    emit_grid_panel(out_path(opt, "table1_prior"), cfg.grid, p.values());
    emit_grid_panel(out_path(opt, "table1_score"), cfg.grid, s_grid);
  }
  for (double m : cfg.table1.targets) {
    double hard_threshold = std::numeric_limits<double>::quiet_NaN();
    for (Family fam : {Family::hard, Family::klsc}) {
      Table1Row row;
      row.target = m;
      row.family = fam;
      try {
        const auto mem = ctx.member(fam, m);
        row.calibration = mem.calibration;
        if (fam == Family::hard) hard_threshold = mem.calibration.knob;
        // Both families are measured at the hard family's threshold for this level.
        const double t = std::isnan(hard_threshold) ? m : hard_threshold;
        const double above = mem.density.mass_where(s_grid, [t](double s) { return s > t; });
        const double shell =
            mem.density.mass_where(s_grid, [t, delta](double s) { return s > t && s < t + delta; });
        if (!(above > 0.0)) throw InfeasibleThresholdError("no grid mass above the threshold");
        row.boundary_mass = shell / above;
        row.tv_prior = grid_tv(mem.density, p);
        row.kl_prior = grid_kl(mem.density, p);
        row.instability = eps == 0.0 ? 0.0 : grid_tv(mem.density, ctx.member(fam, m + eps).density);
        if (writing(opt)) {
          emit_grid_panel(out_path(opt, "table1_" + std::string(to_string(fam)) + "_" + level_tag(m)), cfg.grid,
                          mem.density.values());
        }
        say(opt, "table1: " + std::string(to_string(fam)) + " m=" + fmt(m) + " knob=" + fmt(row.calibration.knob) +
                     " BM=" + fmt(row.boundary_mass) + " TV=" + fmt(row.tv_prior) +
                     " inst=" + fmt(row.instability));
      } catch (const CalibrationInfeasibleError& e) {
        row.error = e.what();
        out.status.calibration_infeasible = true;
      } catch (const Error& e) {
        row.error = e.what();
      }
      if (row.error.empty()) {
        cal_records.push_back({std::string(to_string(fam)), m, row.calibration.knob, row.calibration.achieved_mean,
                               row.calibration.iterations, row.calibration.ess, row.calibration.tolerance_met,
                               row.calibration.warning});
      }
      out.rows.push_back(std::move(row));
    }
  }

  for (double m : cfg.table1.targets) {
    const auto* h = out.find(Family::hard, m);
    const auto* k = out.find(Family::klsc, m);
    if (!h->error.empty() || !k->error.empty()) {
      fail(out.status, "table1 m=" + fmt(m) + ": a family failed to calibrate");
      continue;
    }
    if (!(k->boundary_mass < h->boundary_mass)) fail(out.status, "table1 m=" + fmt(m) + ": boundary mass ordering");
    if (!(k->tv_prior < h->tv_prior)) fail(out.status, "table1 m=" + fmt(m) + ": TV(q,p) ordering");
    if (eps > 0.0 && !(k->instability < h->instability)) {
      fail(out.status, "table1 m=" + fmt(m) + ": instability ordering");
    }
    if (kl_less(h->kl_prior, k->kl_prior)) fail(out.status, "table1 m=" + fmt(m) + ": KL gap ordering");
  }

  if (writing(opt)) {
    Report rep("table1", cfg);
    for (const auto& r : out.rows) {
      const std::string fam(to_string(r.family));
      if (!r.error.empty()) {
        rep.add_text(fam, r.target, "error", r.error);
        continue;
      }
      rep.add(fam, r.target, "knob", r.calibration.knob, cfg.table1.pool);
      rep.add(fam, r.target, "achieved_mean", r.calibration.achieved_mean, cfg.table1.pool);
      rep.add(fam, r.target, "boundary_mass", r.boundary_mass);
      rep.add(fam, r.target, "tv_prior", r.tv_prior);
      rep.add(fam, r.target, "tv_instability", r.instability);
      rep.add(fam, r.target, "kl_prior", r.kl_prior);
    }
    rep.write(out_path(opt, "table1.csv"));
    write_calibration_csv(out_path(opt, "table1_calibration.csv"), cal_records);
  }
  return out;
}

SamplerResult run_sampler_comparison(const ExperimentConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  const auto prior = cfg.prior.build();
  const auto score = cfg.score.build();
  const SeedTree tree(cfg.seed);
  const GridDensity p = prior_on_grid(prior, cfg.grid);
  const double delta = cfg.table1.delta;

  Rng pool_rng = tree.stream("retrieval_pool");
  say(opt, "samplers: drawing retrieval pool of " + std::to_string(cfg.samplers.retrieval_pool));
  const CandidatePool pool = CandidatePool::draw(prior, score, cfg.samplers.retrieval_pool, pool_rng);
  const ScoreSample pool_scores = ScoreSample::from_values(pool.scores);

  const auto sched = build_linear_schedule(cfg.ddpm.steps, cfg.ddpm.beta_min, cfg.ddpm.beta_max);
  GuidanceConfig guidance;
  guidance.zeta = make_zeta(sched, cfg.guidance.zeta, cfg.guidance.zeta_bar);
  guidance.strength = cfg.guidance.strength;
  guidance.cap = cfg.guidance.cap;
  guidance.jacobian = cfg.guidance.jacobian;

  Regularizer reg;
  reg.kind = cfg.opt_reg.regularizer;
  const ScoreField gibbs = ScoreField::gibbs(score, reg, 0.0);

  SamplerResult out;
  std::vector<CalibrationRecord> cal_records;
  if (writing(opt)) {
    emit_grid_panel(out_path(opt, "samplers_prior"), cfg.grid, p.values());
    emit_grid_panel(out_path(opt, "samplers_score"), cfg.grid,
                    evaluate_on_grid(cfg.grid, [&](Point x) { return score(x); }));
    emit_grid_panel(out_path(opt, "samplers_regularizer"), cfg.grid,
                    evaluate_on_grid(cfg.grid, [&](Point x) { return reg.value(x); }));
  }

  auto finish = [&](SamplerRow& row, const std::vector<Point>& pts, const std::vector<double>& weights) {
    const GridDensity q = kde(cfg, pts);
    row.kl_prior = grid_kl(q, p);
    row.tv_prior = grid_tv(q, p);
    row.n = pts.size();
    row.matched = std::abs(row.achieved - row.target) <= cfg.samplers.match_tol;
    say(opt, "samplers: " + row.method + " m=" + fmt(row.target) + " achieved=" + fmt(row.achieved) +
                 " knob=" + fmt(row.knob) + " KL=" + row.kl_prior.to_string());
    if (writing(opt)) {
      const std::string stem = "samplers_" + row.method + "_" + level_tag(row.target);
      emit_grid_panel(out_path(opt, stem), cfg.grid, q.values());
      write_samples_csv(out_path(opt, stem + "_samples.csv"), pts, scores_of(score, pts), weights);
    }
  };

  std::uint64_t unit = 0;
  for (double m : cfg.samplers.targets) {
    ++unit;
    double retrieval_threshold = m;
    {
      SamplerRow row;
      row.target = m;
      row.method = "retrieval";
      try {
        const auto r = retrieval_topk_match(pool, m);
        row.achieved = r.achieved;
        row.knob = static_cast<double>(r.k);
        retrieval_threshold = r.implied_threshold;
        row.boundary_mass = empirical_boundary_mass(r.selected_scores, {}, retrieval_threshold, delta);
        finish(row, r.selected, {});
      } catch (const CalibrationInfeasibleError& e) {
        row.error = e.what();
        out.status.calibration_infeasible = true;
      } catch (const Error& e) {
        row.error = e.what();
      }
      out.rows.push_back(std::move(row));
    }
    {
      SamplerRow row;
      row.target = m;
      row.method = "snis";
      try {
        const auto cal = calibrate_tilt_beta(pool_scores, m, cfg.table1.calibration.tol,
                                             cfg.table1.calibration.beta_bracket, cfg.table1.calibration.budget,
                                             cfg.samplers.ess_floor);
        Rng rng = tree.stream("snis", unit);
        const auto r = snis_resample_tilt(prior, score, cal.knob, cfg.samplers.retrieval_pool, cfg.samplers.n, rng,
                                          cfg.samplers.ess_floor);
        const auto s = scores_of(score, r.points);
        row.knob = cal.knob;
        row.achieved = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
        row.boundary_mass = empirical_boundary_mass(s, {}, retrieval_threshold, delta);
        cal_records.push_back({"snis", m, cal.knob, cal.achieved_mean, cal.iterations, r.ess, cal.tolerance_met,
                               r.warning});
        finish(row, r.points, {});
      } catch (const CalibrationInfeasibleError& e) {
        row.error = e.what();
        out.status.calibration_infeasible = true;
      } catch (const Error& e) {
        row.error = e.what();
      }
      out.rows.push_back(std::move(row));
    }
    {
      SamplerRow row;
      row.target = m;
      row.method = "opt_reg";
      try {
        const auto r = opt_reg_map(gibbs, cfg.opt_reg.run, m, tree.derive("opt_reg", unit), cfg.opt_reg.tol,
                                   cfg.opt_reg.lambda_bracket, cfg.opt_reg.budget);
        row.knob = r.lambda_used;
        row.achieved = r.achieved;
        cal_records.push_back({"opt_reg", m, r.lambda_used, r.calibration.achieved_mean, r.calibration.iterations,
                               0.0, r.calibration.tolerance_met, r.calibration.warning});
        finish(row, r.samples, {});
      } catch (const CalibrationInfeasibleError& e) {
        row.error = e.what();
        out.status.calibration_infeasible = true;
      } catch (const Error& e) {
        row.error = e.what();
      }
      out.rows.push_back(std::move(row));
    }
    {
      SamplerRow row;
      row.target = m;
      row.method = "energydps";
      try {
        say(opt, "samplers: calibrating guidance for m=" + fmt(m));
        const auto cal = calibrate_guidance(prior, sched, guidance, score, m, cfg.guidance.tol,
                                            cfg.guidance.gamma_bracket, cfg.guidance.n_cal,
                                            tree.derive("energydps_cal", unit), cfg.guidance.budget);
        GuidanceConfig g = guidance;
        g.gamma = cal.knob;
        const auto r = energydps_sample(prior, sched, g, score, cfg.samplers.n, tree.derive("energydps", unit));
        row.knob = cal.knob;
        row.achieved = r.achieved_mean;
        cal_records.push_back({"energydps", m, cal.knob, cal.achieved_mean, cal.iterations, 0.0, cal.tolerance_met,
                               cal.warning});
        finish(row, r.points, {});
      } catch (const CalibrationInfeasibleError& e) {
        row.error = e.what();
        out.status.calibration_infeasible = true;
      } catch (const Error& e) {
        row.error = e.what();
      }
      out.rows.push_back(std::move(row));
    }
  }

  for (double m : cfg.samplers.targets) {
    const auto* dps = out.find("energydps", m);
    const auto* ret = out.find("retrieval", m);
    const auto* orr = out.find("opt_reg", m);
    if (!dps->error.empty() || !ret->error.empty() || !orr->error.empty()) {
      fail(out.status, "samplers m=" + fmt(m) + ": a sampler failed");
      continue;
    }
    if (!kl_less(dps->kl_prior, ret->kl_prior)) fail(out.status, "samplers m=" + fmt(m) + ": EnergyDPS vs retrieval");
    if (!kl_less(dps->kl_prior, orr->kl_prior)) fail(out.status, "samplers m=" + fmt(m) + ": EnergyDPS vs OR");
  }

  if (writing(opt)) {
    Report rep("samplers", cfg);
    for (const auto& r : out.rows) {
      if (!r.error.empty()) {
        rep.add_text(r.method, r.target, "error", r.error);
        continue;
      }
      rep.add(r.method, r.target, "achieved_mean", r.achieved, r.n);
      rep.add(r.method, r.target, "knob", r.knob, r.n);
      rep.add(r.method, r.target, "kl_prior", r.kl_prior, r.n);
      rep.add(r.method, r.target, "tv_prior", r.tv_prior, r.n);
      rep.add_text(r.method, r.target, "matched", r.matched ? "true" : "false", r.n);
      if (r.method == "retrieval" || r.method == "snis") {
        rep.add(r.method, r.target, "boundary_mass_at_retrieval_threshold", r.boundary_mass, r.n);
      }
    }
    rep.write(out_path(opt, "samplers.csv"));
    write_calibration_csv(out_path(opt, "samplers_calibration.csv"), cal_records);
  }
  return out;
}

GaussianFormsResult run_gaussian_forms(const ExperimentConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  GaussianFormsResult out;
  for (double m : cfg.gaussian_forms.m) {
    const auto g = gaussian_closed_forms(m);
    GaussianFormsRow row{m, g.lambda_mills, g.mean_residual, g.v_hard, g.v_klsc, g.v_hard > g.v_klsc};
    if (m >= 0.0 && !row.hard_less_stable) fail(out.status, "gaussian-forms m=" + fmt(m) + ": v_hard <= v_klsc");
    out.rows.push_back(row);
  }
  out.asymptote_m = cfg.gaussian_forms.asymptote_m;
  out.asymptote_ratio = gaussian_closed_forms(out.asymptote_m).v_hard / out.asymptote_m;
  if (writing(opt)) {
    Report rep("gaussian_forms", cfg);
    for (const auto& r : out.rows) {
      rep.add("gaussian", r.m, "lambda_mills", r.lambda_mills);
      rep.add("gaussian", r.m, "mean_residual", r.mean_residual);
      rep.add("gaussian", r.m, "v_hard", r.v_hard);
      rep.add("gaussian", r.m, "v_klsc", r.v_klsc);
      rep.add_text("gaussian", r.m, "hard_less_stable", r.hard_less_stable ? "true" : "false");
    }
    rep.add("gaussian", out.asymptote_m, "v_hard_over_m", out.asymptote_ratio);
    rep.write(out_path(opt, "gaussian_forms.csv"));
  }
  return out;
}

TaskInjectionResult run_task_injection(const ExperimentConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  const auto prior = cfg.prior.build();
  const auto score = cfg.score.build();
  const auto task = ScoreField::coordinate(cfg.task.axis);
  const SeedTree tree(cfg.seed);
  TaskInjectionResult out;

  Rng pool_rng = tree.stream("task_pool");
  const auto pool = ScoreSample::draw(prior, score, cfg.table1.pool, pool_rng);
  const auto& cs = cfg.table1.calibration;
  try {
    const auto cal = calibrate_tilt_beta(pool, cfg.task.base_target, cs.tol, cs.beta_bracket, cs.budget, cs.ess_floor);
    out.baseline_beta = cal.knob;
  } catch (const CalibrationInfeasibleError& e) {
    out.status.calibration_infeasible = true;
    out.status.failures.push_back(e.what());
    return out;
  }
  Rng rng = tree.stream("task_snis");
  const auto draws = snis_resample_tilt(prior, score, out.baseline_beta, 5 * cfg.task.n, cfg.task.n, rng);
  std::vector<double> f = scores_of(task, draws.points);
  out.baseline_mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());

  for (double off : cfg.task.r_offsets) {
    const double r = out.baseline_mean + off;
    const auto b = task_distortion_lower_bound(f, r, cfg.task.eta_max);
    out.rows.push_back({r, b.value, b.eta_star, b.ess, b.warning});
  }
  out.zero_at_baseline = true;
  out.monotone = true;
  out.positive_beyond = true;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& row = out.rows[i];
    if (row.r <= out.baseline_mean && std::abs(row.bound) > 1e-3) out.zero_at_baseline = false;
    if (row.r > out.baseline_mean + 0.1 && !(row.bound > 0.0)) out.positive_beyond = false;
    for (std::size_t j = 0; j < out.rows.size(); ++j) {
      if (out.rows[j].r > row.r && out.rows[j].bound < row.bound) out.monotone = false;
    }
  }
  if (!out.zero_at_baseline) fail(out.status, "task-injection: bound nonzero at baseline demand");
  if (!out.monotone) fail(out.status, "task-injection: bound not monotone in r");
  if (!out.positive_beyond) fail(out.status, "task-injection: bound not positive beyond baseline");

  // Midpoint quantiles of N(mu, sigma^2), a deterministic stand-in for Gaussian f_c.
  const double mu = 0.0, sigma = 1.0;
  const boost::math::normal_distribution<double> nd(mu, sigma);
  std::vector<double> g(kSyntheticQuantiles);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = boost::math::quantile(nd, (static_cast<double>(i) + 0.5) / static_cast<double>(g.size()));
  }
  for (double r : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const auto b = task_distortion_lower_bound(g, r, cfg.task.eta_max);
    out.synthetic.push_back({r, b.value, (r - mu) * (r - mu) / (2.0 * sigma * sigma)});
  }

  if (writing(opt)) {
    Report rep("task_injection", cfg);
    rep.add("baseline", cfg.task.base_target, "beta", out.baseline_beta, cfg.table1.pool);
    rep.add("baseline", cfg.task.base_target, "mean_task", out.baseline_mean, f.size());
    for (const auto& row : out.rows) {
      rep.add("dual_bound", row.r, "bound", row.bound, f.size());
      rep.add("dual_bound", row.r, "eta_star", row.eta_star, f.size());
      rep.add("dual_bound", row.r, "ess", row.ess, f.size());
      if (!row.warning.empty()) rep.add_text("dual_bound", row.r, "warning", row.warning, f.size());
    }
    for (const auto& row : out.synthetic) {
      rep.add("synthetic_gaussian", row.r, "bound", row.bound, g.size());
      rep.add("synthetic_gaussian", row.r, "closed_form", row.closed_form, g.size());
    }
    rep.add_text("checks", cfg.task.base_target, "zero_at_baseline", out.zero_at_baseline ? "true" : "false");
    rep.add_text("checks", cfg.task.base_target, "monotone", out.monotone ? "true" : "false");
    rep.add_text("checks", cfg.task.base_target, "positive_beyond", out.positive_beyond ? "true" : "false");
    rep.write(out_path(opt, "task_injection.csv"));
  }
  return out;
}

TypicalSetResult run_typical_set(const ExperimentConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  const SeedTree tree(cfg.seed);
  TypicalSetResult out;
  std::uint64_t unit = 0;
  for (std::size_t d : cfg.typical_set.dims) {
    for (double a : cfg.typical_set.alphas) {
      Rng rng = tree.stream("typical_set", unit++);
      const auto c = chi_square_tail_check(d, a, cfg.typical_set.n_mc, rng);
      out.rows.push_back({d, a, c.mc_estimate, c.analytic_cdf, c.bound, c.bound_holds});
      if (!c.bound_holds) fail(out.status, "typical-set d=" + std::to_string(d) + " alpha=" + fmt(a));
    }
  }
  for (auto [eta, shell] : cfg.typical_set.tv_pairs) {
    out.tv_rows.push_back({eta, shell, noisy_map_tv_lower(eta, shell)});
  }
  if (writing(opt)) {
    Report rep("typical_set", cfg);
    for (const auto& r : out.rows) {
      const std::string method = "d=" + std::to_string(r.d);
      rep.add(method, r.alpha, "mc_estimate", r.mc_estimate, cfg.typical_set.n_mc);
      rep.add(method, r.alpha, "analytic_cdf", r.analytic_cdf);
      rep.add(method, r.alpha, "bound", r.bound);
      rep.add_text(method, r.alpha, "bound_holds", r.bound_holds ? "true" : "false");
    }
    for (const auto& r : out.tv_rows) {
      rep.add("tv_lower", r.eta, "shell_" + format_double(r.shell_mass), r.tv_lower);
    }
    rep.write(out_path(opt, "typical_set.csv"));
  }
  return out;
}

DiffusionResult run_diffusion_diagnostics(const ExperimentConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  const auto prior = cfg.prior.build();
  const auto score = cfg.score.build();
  const SeedTree tree(cfg.seed);
  const auto sched = build_linear_schedule(cfg.ddpm.steps, cfg.ddpm.beta_min, cfg.ddpm.beta_max);
  const std::size_t N = sched.N;
  DiffusionResult out;

  // Oracle score against central differences of the noised log density.
  Rng rng = tree.stream("oracle_fd");
  const double h = 1e-5;
  for (std::size_t k = 0; k < cfg.diffusion_check.fd_points; ++k) {
    const std::size_t i = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(N)) % N;
    const Point x{2.0 * rng.normal(), 2.0 * rng.normal()};
    const auto noised = noised_gmm_at(prior, sched, i);
    const Point u = oracle_score(prior, sched, i, x);
    const Point fd{(noised.gmm.log_pdf({x.x + h, x.y}) - noised.gmm.log_pdf({x.x - h, x.y})) / (2 * h),
                   (noised.gmm.log_pdf({x.x, x.y + h}) - noised.gmm.log_pdf({x.x, x.y - h})) / (2 * h)};
    out.oracle_max_rel_error = std::max(out.oracle_max_rel_error, norm(u - fd) / std::max(norm(fd), 1e-3));
  }
  if (!(out.oracle_max_rel_error < 1e-4)) fail(out.status, "diffusion: oracle score disagrees with finite differences");

  GuidanceConfig unguided;
  unguided.zeta = make_zeta(sched, cfg.guidance.zeta, cfg.guidance.zeta_bar);
  unguided.jacobian = cfg.guidance.jacobian;
  const std::uint64_t seed = tree.derive("diffusion_marginals");
  for (std::size_t stop : {N, N / 2, N / 4, std::size_t{0}}) {
    DpsOptions o;
    o.stop_step = stop;
    const auto r = energydps_sample(prior, sched, unguided, score, cfg.diffusion_check.n, seed, o);
    const GridDensity target = prior_on_grid(noised_gmm_at(prior, sched, stop).gmm, cfg.grid);
    const GridDensity q = kde(cfg, r.points);
    out.marginals.push_back({stop, grid_tv(q, target)});
    say(opt, "diffusion: marginal at step " + std::to_string(stop) + " TV=" + fmt(out.marginals.back().tv));
    if (writing(opt)) emit_grid_panel(out_path(opt, "diffusion_marginal_i" + std::to_string(stop)), cfg.grid, q.values());
  }
  for (const auto& mrow : out.marginals) {
    const double limit = mrow.step == 0 ? 0.05 : 0.06;
    if (!(mrow.tv < limit)) fail(out.status, "diffusion: marginal TV at step " + std::to_string(mrow.step));
  }

  GuidanceConfig g = unguided;
  g.cap = cfg.guidance.cap;
  const std::uint64_t sweep_seed = tree.derive("diffusion_sweep");
  for (double strength : cfg.diffusion_check.sweep) {
    g.strength = strength;
    const auto r = energydps_sample(prior, sched, g, score, cfg.diffusion_check.sweep_n, sweep_seed);
    out.sweep.push_back({strength, r.achieved_mean});
    say(opt, "diffusion: strength " + fmt(strength) + " mean score " + fmt(r.achieved_mean));
  }
  std::vector<SweepRow> by_strength = out.sweep;
  std::sort(by_strength.begin(), by_strength.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.strength < b.strength; });
  out.sweep_monotone = true;
  for (std::size_t i = 1; i < by_strength.size(); ++i) {
    if (by_strength[i].mean_score < by_strength[i - 1].mean_score) out.sweep_monotone = false;
  }
  if (!out.sweep_monotone) fail(out.status, "diffusion: mean score not monotone in guidance strength");

  if (writing(opt)) {
    Report rep("diffusion_check", cfg);
    rep.add("oracle", 0.0, "max_rel_error", out.oracle_max_rel_error, cfg.diffusion_check.fd_points);
    for (const auto& r : out.marginals) {
      rep.add("unguided", 0.0, "tv_step_" + std::to_string(r.step), r.tv, cfg.diffusion_check.n);
    }
    for (const auto& r : out.sweep) {
      rep.add("sweep", 0.0, "mean_score_strength_" + format_double(r.strength), r.mean_score,
              cfg.diffusion_check.sweep_n);
    }
    rep.add_text("sweep", 0.0, "monotone", out.sweep_monotone ? "true" : "false");
    rep.write(out_path(opt, "diffusion_check.csv"));
  }
  return out;
}

int exit_code(const std::vector<const RunStatus*>& statuses) {
  bool infeasible = false, ordering = true;
  for (const auto* s : statuses) {
    infeasible = infeasible || s->calibration_infeasible;
    ordering = ordering && s->orderings_hold;
  }
  if (infeasible) return 3;
  return ordering ? 0 : 2;
}

}  // namespace klsc
