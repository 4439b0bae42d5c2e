#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "klsc/constraints/calibration.hpp"
#include "klsc/diagnostics/divergence.hpp"
#include "klsc/diagnostics/instability.hpp"
#include "klsc/experiments/config.hpp"

namespace klsc {

struct RunOptions {
  /// Output directory; nothing is written when empty.
  std::string out_dir;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
};

/// Outcome flags shared by every driver; they map onto the CLI exit code.
struct RunStatus {
  bool orderings_hold = true;
  bool calibration_infeasible = false;
  std::vector<std::string> failures;
};

struct Table1Row {
  double target = 0.0;
  Family family = Family::hard;
  CalibrationResult calibration;
  double boundary_mass = 0.0;
  double tv_prior = 0.0;
  double instability = 0.0;
  Divergence kl_prior;
  std::string error;
};

struct Table1Result {
  std::vector<Table1Row> rows;
  RunStatus status;
  const Table1Row* find(Family family, double target) const;
};

/// Matched-moment hard vs. KLSC comparison: boundary mass at the hard
/// threshold, TV to the prior and TV instability under a target shift of eps.
Table1Result run_table1(const ExperimentConfig& cfg, const RunOptions& opt = {});

struct SamplerRow {
  double target = 0.0;
  std::string method;  // retrieval, snis, opt_reg, energydps
  double achieved = 0.0;
  double knob = 0.0;   // k, beta, lambda or gamma
  std::size_t n = 0;
  Divergence kl_prior;
  double tv_prior = 0.0;
  double boundary_mass = 0.0;  // at the retrieval threshold, retrieval and snis only
  bool matched = false;
  std::string error;
};

struct SamplerResult {
  std::vector<SamplerRow> rows;
  RunStatus status;
  const SamplerRow* find(const std::string& method, double target) const;
};

SamplerResult run_sampler_comparison(const ExperimentConfig& cfg, const RunOptions& opt = {});

struct GaussianFormsRow {
  double m = 0.0;
  double lambda_mills = 0.0;
  double mean_residual = 0.0;
  double v_hard = 0.0;
  double v_klsc = 0.0;
  bool hard_less_stable = false;
};

struct GaussianFormsResult {
  std::vector<GaussianFormsRow> rows;
  double asymptote_m = 0.0;
  double asymptote_ratio = 0.0;  // v_hard(m) / m
  RunStatus status;
};

GaussianFormsResult run_gaussian_forms(const ExperimentConfig& cfg, const RunOptions& opt = {});

struct TaskRow {
  double r = 0.0;
  double bound = 0.0;
  double eta_star = 0.0;
  double ess = 0.0;
  std::string warning;
};

/// Bound on quantile samples of N(mu, sigma^2) against (r - mu)^2 / (2 sigma^2).
struct SyntheticTaskRow {
  double r = 0.0;
  double bound = 0.0;
  double closed_form = 0.0;
};

struct TaskInjectionResult {
  double baseline_beta = 0.0;
  double baseline_mean = 0.0;  // E[f_c] under the KLSC baseline
  std::vector<TaskRow> rows;
  bool zero_at_baseline = false;
  bool monotone = false;
  bool positive_beyond = false;  // bound > 0 whenever r > baseline + 0.1
  std::vector<SyntheticTaskRow> synthetic;
  RunStatus status;
};

TaskInjectionResult run_task_injection(const ExperimentConfig& cfg, const RunOptions& opt = {});

struct TypicalSetRow {
  std::size_t d = 0;
  double alpha = 0.0;
  double mc_estimate = 0.0;
  double analytic_cdf = 0.0;
  double bound = 0.0;
  bool bound_holds = false;
};

struct TvLowerRow {
  double eta = 0.0;
  double shell_mass = 0.0;
  double tv_lower = 0.0;
};

struct TypicalSetResult {
  std::vector<TypicalSetRow> rows;
  std::vector<TvLowerRow> tv_rows;
  RunStatus status;
};

TypicalSetResult run_typical_set(const ExperimentConfig& cfg, const RunOptions& opt = {});

struct MarginalRow {
  std::size_t step = 0;
  double tv = 0.0;
};

struct SweepRow {
  double strength = 0.0;
  double mean_score = 0.0;
};

struct DiffusionResult {
  double oracle_max_rel_error = 0.0;
  std::vector<MarginalRow> marginals;  // step 0 is the final output vs. the prior
  std::vector<SweepRow> sweep;
  bool sweep_monotone = false;
  RunStatus status;
};

DiffusionResult run_diffusion_diagnostics(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// 0 when everything passes, 3 on calibration infeasibility, 2 on a failed ordering.
int exit_code(const std::vector<const RunStatus*>& statuses);

}  // namespace klsc
