#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "klsc/analytic/gmm.hpp"
#include "klsc/analytic/score.hpp"
#include "klsc/constraints/calibration.hpp"
#include "klsc/diagnostics/divergence.hpp"
#include "klsc/diagnostics/grid.hpp"
#include "klsc/diagnostics/instability.hpp"
#include "klsc/diffusion/energy_dps.hpp"
#include "klsc/samplers/opt_reg.hpp"

namespace klsc {

struct PriorSpec {
  std::vector<Point> means{{2.0, 2.0}, {2.0, -2.0}, {-2.0, 2.0}, {-2.0, -2.0}};
  double sigma = 0.8;
  IsotropicGmm build() const { return IsotropicGmm(means, sigma); }
};

struct ScoreSpec {
  double theta0 = std::numbers::pi / 4.0;
  double scale = 4.0;
  ScoreField build() const { return ScoreField::angular(theta0, scale); }
};

struct Table1Spec {
  std::vector<double> targets{5.0, 6.0, 7.0};
  double delta = 0.05;
  double eps = 0.08;
  std::size_t pool = 2'000'000;
  CalibrationSettings calibration{};
};

struct KdeSpec {
  KdeConfig kernel{};
  /// Sample sets larger than this are thinned to their first max_samples points.
  std::size_t max_samples = 200'000;
};

struct SamplerSpec {
  std::vector<double> targets{5.0, 6.0, 7.0};
  std::size_t n = 200'000;  // EnergyDPS and SNIS output size
  double match_tol = 0.1;
  std::size_t retrieval_pool = 1'000'000;
  double ess_floor = 200.0;
};

struct DdpmSpec {
  std::size_t steps = 1000;
  double beta_min = 1e-4;
  double beta_max = 0.02;
};

struct GuidanceSpec {
  ZetaSchedule zeta = ZetaSchedule::ddpm_beta;
  double zeta_bar = 1.0;
  double strength = 1.0;
  GuidanceJacobian jacobian = GuidanceJacobian::exact;
  std::optional<double> cap;
  Bracket gamma_bracket{0.0, 1.0};
  double tol = 0.01;
  std::size_t n_cal = 50'000;
  std::size_t budget = 40;
};

struct OptRegSpec {
  OptRunConfig run{};
  Bracket lambda_bracket{0.0, 20.0};
  double tol = 0.05;
  std::size_t budget = 60;
  Regularizer::Kind regularizer = Regularizer::Kind::neg_second_coord;
};

struct TaskSpec {
  int axis = 0;               // f_c(x) = x_axis
  double base_target = 5.0;   // E[s] of the KLSC baseline
  std::vector<double> r_offsets{0.0, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0};
  double eta_max = 20.0;
  std::size_t n = 200'000;
};

struct TypicalSetSpec {
  std::vector<std::size_t> dims{2, 8, 16, 64, 256};
  std::vector<double> alphas{0.25, 0.5, 0.75};
  std::size_t n_mc = 20'000;
  std::vector<std::pair<double, double>> tv_pairs{{0.0, 0.0}, {0.0, 1.0}, {0.5, 0.2}, {0.9, 0.05}, {0.2, 0.9}};
};

struct DiffusionCheckSpec {
  std::size_t n = 50'000;
  std::size_t fd_points = 1000;
  std::vector<double> sweep{0.0, 0.5, 1.0, 2.0};
  std::size_t sweep_n = 10'000;
};

struct GaussianFormsSpec {
  std::vector<double> m{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
  double asymptote_m = 20.0;
};

struct ExperimentConfig {
  std::uint64_t seed = 20240601;
  PriorSpec prior;
  ScoreSpec score;
  Grid2D grid;
  KdeSpec kde;
  Table1Spec table1;
  SamplerSpec samplers;
  DdpmSpec ddpm;
  GuidanceSpec guidance;
  OptRegSpec opt_reg;
  TaskSpec task;
  TypicalSetSpec typical_set;
  DiffusionCheckSpec diffusion_check;
  GaussianFormsSpec gaussian_forms;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// JSON text with one object per module; every field is written.
std::string to_text(const ExperimentConfig& cfg);
/// Missing keys take defaults; unknown keys and bad values throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace klsc
