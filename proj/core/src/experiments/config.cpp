#include "klsc/experiments/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "klsc/analytic/seed.hpp"
#include "klsc/error.hpp"

namespace klsc {

using nlohmann::json;

namespace {

json bracket_json(Bracket b) { return json::array({b.lo, b.hi}); }

Bracket bracket_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(std::string(key) + ": expected [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

const char* zeta_name(ZetaSchedule z) { return z == ZetaSchedule::constant ? "constant" : "ddpm_beta"; }
const char* jacobian_name(GuidanceJacobian g) { return g == GuidanceJacobian::exact ? "exact" : "detached"; }
const char* regularizer_name(Regularizer::Kind k) {
  return k == Regularizer::Kind::quadratic ? "quadratic" : "neg_second_coord";
}

json to_json(const ExperimentConfig& c) {
  json means = json::array();
  for (const Point& m : c.prior.means) means.push_back({m.x, m.y});
  json tv_pairs = json::array();
  for (auto [eta, shell] : c.typical_set.tv_pairs) tv_pairs.push_back({eta, shell});
  const auto& cal = c.table1.calibration;
  return json{
      {"seed", c.seed},
      {"prior", {{"means", means}, {"sigma", c.prior.sigma}}},
      {"score", {{"theta0", c.score.theta0}, {"scale", c.score.scale}}},
      {"grid",
       {{"xmin", c.grid.xmin}, {"xmax", c.grid.xmax}, {"ymin", c.grid.ymin}, {"ymax", c.grid.ymax},
        {"nx", c.grid.nx}, {"ny", c.grid.ny}}},
      {"kde",
       {{"bandwidth", c.kde.kernel.bandwidth}, {"cutoff", c.kde.kernel.cutoff}, {"max_samples", c.kde.max_samples}}},
      {"table1",
       {{"targets", c.table1.targets},
        {"delta", c.table1.delta},
        {"eps", c.table1.eps},
        {"pool", c.table1.pool},
        {"tol", cal.tol},
        {"threshold_bracket", bracket_json(cal.hard_bracket)},
        {"beta_bracket", bracket_json(cal.beta_bracket)},
        {"budget", cal.budget},
        {"ess_floor", cal.ess_floor}}},
      {"samplers",
       {{"targets", c.samplers.targets},
        {"n", c.samplers.n},
        {"match_tol", c.samplers.match_tol},
        {"retrieval_pool", c.samplers.retrieval_pool},
        {"ess_floor", c.samplers.ess_floor}}},
      {"ddpm", {{"steps", c.ddpm.steps}, {"beta_min", c.ddpm.beta_min}, {"beta_max", c.ddpm.beta_max}}},
      {"guidance",
       {{"zeta", zeta_name(c.guidance.zeta)},
        {"zeta_bar", c.guidance.zeta_bar},
        {"strength", c.guidance.strength},
        {"jacobian", jacobian_name(c.guidance.jacobian)},
        {"cap", c.guidance.cap ? json(*c.guidance.cap) : json(nullptr)},
        {"gamma_bracket", bracket_json(c.guidance.gamma_bracket)},
        {"tol", c.guidance.tol},
        {"n_cal", c.guidance.n_cal},
        {"budget", c.guidance.budget}}},
      {"opt_reg",
       {{"restarts", c.opt_reg.run.restarts},
        {"steps", c.opt_reg.run.steps},
        {"step_size", c.opt_reg.run.step_size},
        {"box", {c.opt_reg.run.box_lo, c.opt_reg.run.box_hi}},
        {"lambda_bracket", bracket_json(c.opt_reg.lambda_bracket)},
        {"tol", c.opt_reg.tol},
        {"budget", c.opt_reg.budget},
        {"regularizer", regularizer_name(c.opt_reg.regularizer)}}},
      {"task",
       {{"axis", c.task.axis},
        {"base_target", c.task.base_target},
        {"r_offsets", c.task.r_offsets},
        {"eta_max", c.task.eta_max},
        {"n", c.task.n}}},
      {"typical_set",
       {{"dims", c.typical_set.dims},
        {"alphas", c.typical_set.alphas},
        {"n_mc", c.typical_set.n_mc},
        {"tv_pairs", tv_pairs}}},
      {"diffusion_check",
       {{"n", c.diffusion_check.n},
        {"fd_points", c.diffusion_check.fd_points},
        {"sweep", c.diffusion_check.sweep},
        {"sweep_n", c.diffusion_check.sweep_n}}},
      {"gaussian_forms", {{"m", c.gaussian_forms.m}, {"asymptote_m", c.gaussian_forms.asymptote_m}}},
  };
}

// Overlays `in` onto the defaults in `base`, rejecting keys the defaults lack.
void overlay(json& base, const json& in, const std::string& path) {
  for (auto it = in.begin(); it != in.end(); ++it) {
    const std::string where = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key: " + where);
    json& slot = base[it.key()];
    if (slot.is_object() && it->is_object()) {
      overlay(slot, *it, where);
    } else {
      slot = *it;
    }
  }
}

ExperimentConfig from_json(const json& j) {
  ExperimentConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.prior.means.clear();
  for (const auto& m : j.at("prior").at("means")) {
    if (!m.is_array() || m.size() != 2) throw ConfigError("prior.means: expected [x, y] pairs");
    c.prior.means.push_back({m[0].get<double>(), m[1].get<double>()});
  }
  c.prior.sigma = j["prior"].at("sigma").get<double>();
  c.score.theta0 = j.at("score").at("theta0").get<double>();
  c.score.scale = j["score"].at("scale").get<double>();
  const auto& g = j.at("grid");
  c.grid = {g.at("xmin").get<double>(), g.at("xmax").get<double>(), g.at("ymin").get<double>(),
            g.at("ymax").get<double>(), g.at("nx").get<std::size_t>(), g.at("ny").get<std::size_t>()};
  const auto& k = j.at("kde");
  c.kde.kernel = {k.at("bandwidth").get<double>(), k.at("cutoff").get<double>()};
  c.kde.max_samples = k.at("max_samples").get<std::size_t>();
  const auto& t = j.at("table1");
  c.table1.targets = t.at("targets").get<std::vector<double>>();
  c.table1.delta = t.at("delta").get<double>();
  c.table1.eps = t.at("eps").get<double>();
  c.table1.pool = t.at("pool").get<std::size_t>();
  c.table1.calibration.tol = t.at("tol").get<double>();
  c.table1.calibration.hard_bracket = bracket_from(t.at("threshold_bracket"), "table1.threshold_bracket");
  c.table1.calibration.beta_bracket = bracket_from(t.at("beta_bracket"), "table1.beta_bracket");
  c.table1.calibration.budget = t.at("budget").get<std::size_t>();
  c.table1.calibration.ess_floor = t.at("ess_floor").get<double>();
  const auto& s = j.at("samplers");
  c.samplers.targets = s.at("targets").get<std::vector<double>>();
  c.samplers.n = s.at("n").get<std::size_t>();
  c.samplers.match_tol = s.at("match_tol").get<double>();
  c.samplers.retrieval_pool = s.at("retrieval_pool").get<std::size_t>();
  c.samplers.ess_floor = s.at("ess_floor").get<double>();
  const auto& d = j.at("ddpm");
  c.ddpm = {d.at("steps").get<std::size_t>(), d.at("beta_min").get<double>(), d.at("beta_max").get<double>()};
  const auto& gu = j.at("guidance");
  const auto zeta = gu.at("zeta").get<std::string>();
  if (zeta == "constant") {
    c.guidance.zeta = ZetaSchedule::constant;
  } else if (zeta == "ddpm_beta") {
    c.guidance.zeta = ZetaSchedule::ddpm_beta;
  } else {
    throw ConfigError("guidance.zeta: expected constant or ddpm_beta");
  }
  c.guidance.zeta_bar = gu.at("zeta_bar").get<double>();
  c.guidance.strength = gu.at("strength").get<double>();
  const auto jac = gu.at("jacobian").get<std::string>();
  if (jac == "exact") {
    c.guidance.jacobian = GuidanceJacobian::exact;
  } else if (jac == "detached") {
    c.guidance.jacobian = GuidanceJacobian::detached;
  } else {
    throw ConfigError("guidance.jacobian: expected exact or detached");
  }
  if (gu.at("cap").is_null()) {
    c.guidance.cap.reset();
  } else {
    c.guidance.cap = gu["cap"].get<double>();
  }
  c.guidance.gamma_bracket = bracket_from(gu.at("gamma_bracket"), "guidance.gamma_bracket");
  c.guidance.tol = gu.at("tol").get<double>();
  c.guidance.n_cal = gu.at("n_cal").get<std::size_t>();
  c.guidance.budget = gu.at("budget").get<std::size_t>();
  const auto& o = j.at("opt_reg");
  c.opt_reg.run.restarts = o.at("restarts").get<std::size_t>();
  c.opt_reg.run.steps = o.at("steps").get<std::size_t>();
  c.opt_reg.run.step_size = o.at("step_size").get<double>();
  const auto box = bracket_from(o.at("box"), "opt_reg.box");
  c.opt_reg.run.box_lo = box.lo;
  c.opt_reg.run.box_hi = box.hi;
  c.opt_reg.lambda_bracket = bracket_from(o.at("lambda_bracket"), "opt_reg.lambda_bracket");
  c.opt_reg.tol = o.at("tol").get<double>();
  c.opt_reg.budget = o.at("budget").get<std::size_t>();
  const auto reg = o.at("regularizer").get<std::string>();
  if (reg == "neg_second_coord") {
    c.opt_reg.regularizer = Regularizer::Kind::neg_second_coord;
  } else if (reg == "quadratic") {
    c.opt_reg.regularizer = Regularizer::Kind::quadratic;
  } else {
    throw ConfigError("opt_reg.regularizer: expected neg_second_coord or quadratic");
  }
  const auto& ta = j.at("task");
  c.task.axis = ta.at("axis").get<int>();
  c.task.base_target = ta.at("base_target").get<double>();
  c.task.r_offsets = ta.at("r_offsets").get<std::vector<double>>();
  c.task.eta_max = ta.at("eta_max").get<double>();
  c.task.n = ta.at("n").get<std::size_t>();
  const auto& ty = j.at("typical_set");
  c.typical_set.dims = ty.at("dims").get<std::vector<std::size_t>>();
  c.typical_set.alphas = ty.at("alphas").get<std::vector<double>>();
  c.typical_set.n_mc = ty.at("n_mc").get<std::size_t>();
  c.typical_set.tv_pairs.clear();
  for (const auto& p : ty.at("tv_pairs")) {
    if (!p.is_array() || p.size() != 2) throw ConfigError("typical_set.tv_pairs: expected [eta, shell] pairs");
    c.typical_set.tv_pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  const auto& dc = j.at("diffusion_check");
  c.diffusion_check.n = dc.at("n").get<std::size_t>();
  c.diffusion_check.fd_points = dc.at("fd_points").get<std::size_t>();
  c.diffusion_check.sweep = dc.at("sweep").get<std::vector<double>>();
  c.diffusion_check.sweep_n = dc.at("sweep_n").get<std::size_t>();
  const auto& gf = j.at("gaussian_forms");
  c.gaussian_forms.m = gf.at("m").get<std::vector<double>>();
  c.gaussian_forms.asymptote_m = gf.at("asymptote_m").get<double>();
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(!prior.means.empty() && prior.sigma > 0.0, "prior: need at least one mean and sigma > 0");
  require(score.scale > 0.0, "score.scale must be > 0");
  require(grid.nx >= 2 && grid.ny >= 2 && grid.xmax > grid.xmin && grid.ymax > grid.ymin, "grid: bad extent");
  require(kde.kernel.bandwidth > 0.0 && kde.kernel.cutoff > 0.0 && kde.max_samples >= 1, "kde: bad settings");
  require(!table1.targets.empty(), "table1.targets must be non-empty");
  require(table1.delta > 0.0, "table1.delta must be > 0");
  require(table1.eps >= 0.0, "table1.eps must be >= 0");
  require(table1.pool >= 1 && table1.calibration.budget >= 1, "table1: counts must be >= 1");
  require(table1.calibration.tol > 0.0, "table1.tol must be > 0");
  require(!samplers.targets.empty(), "samplers.targets must be non-empty");
  require(samplers.n >= 1 && samplers.retrieval_pool >= 1, "samplers: counts must be >= 1");
  require(ddpm.steps >= 1 && ddpm.beta_min > 0.0 && ddpm.beta_min <= ddpm.beta_max && ddpm.beta_max < 1.0,
          "ddpm: need steps >= 1 and 0 < beta_min <= beta_max < 1");
  require(guidance.zeta_bar >= 0.0 && guidance.strength >= 0.0, "guidance: zeta_bar and strength must be >= 0");
  require(guidance.n_cal >= 1 && guidance.budget >= 1 && guidance.tol > 0.0, "guidance: bad calibration settings");
  require(opt_reg.run.restarts >= 1 && opt_reg.run.steps >= 1 && opt_reg.run.step_size > 0.0 &&
              opt_reg.run.box_hi > opt_reg.run.box_lo,
          "opt_reg: bad run settings");
  require(task.axis == 0 || task.axis == 1, "task.axis must be 0 or 1");
  require(task.n >= 1 && task.eta_max > 0.0, "task: bad settings");
  require(typical_set.n_mc >= 1, "typical_set.n_mc must be >= 1");
  require(diffusion_check.n >= 1 && diffusion_check.fd_points >= 1 && diffusion_check.sweep_n >= 1,
          "diffusion_check: counts must be >= 1");
}

std::string to_text(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

ExperimentConfig parse_config(const std::string& text) {
  json in;
  try {
    in = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!in.is_object()) throw ConfigError("config must be a JSON object");
  json merged = to_json(ExperimentConfig{});
  overlay(merged, in, "");
  ExperimentConfig cfg;
  try {
    cfg = from_json(merged);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_text(cfg))));
  return buf;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return to_json(a) == to_json(b); }

}  // namespace klsc
