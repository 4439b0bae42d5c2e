#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "doctest.h"
#include "klsc/error.hpp"
#include "klsc/experiments/config.hpp"
#include "klsc/experiments/drivers.hpp"
#include "klsc/experiments/heatmap.hpp"
#include "klsc/experiments/report.hpp"

using namespace klsc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("klsc_experiments_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Small enough to run the table driver in about a second.
ExperimentConfig small_table_config() {
  ExperimentConfig cfg;
  cfg.grid = {-6.0, 6.0, -6.0, 6.0, 150, 150};
  cfg.table1.pool = 200'000;
  return cfg;
}

}  // namespace

TEST_CASE("config text round-trips") {
  const ExperimentConfig def;
  CHECK(parse_config(to_text(def)) == def);
  CHECK(to_text(parse_config(to_text(def))) == to_text(def));

  ExperimentConfig cfg;
  cfg.seed = 7;
  cfg.table1.targets = {5.5};
  cfg.guidance.cap = 7.5;
  cfg.guidance.jacobian = GuidanceJacobian::detached;
  cfg.opt_reg.regularizer = Regularizer::Kind::quadratic;
  cfg.typical_set.tv_pairs = {{0.1, 0.2}};
  cfg.kde.kernel.bandwidth = 0.1 + 0.2;
  const auto back = parse_config(to_text(cfg));
  CHECK(back == cfg);
  CHECK(back.kde.kernel.bandwidth == cfg.kde.kernel.bandwidth);
  CHECK(back.guidance.cap.value() == 7.5);
}

TEST_CASE("partial configs overlay the defaults") {
  const auto cfg = parse_config(R"({"seed": 11, "table1": {"eps": 0.1}})");
  CHECK(cfg.seed == 11);
  CHECK(cfg.table1.eps == 0.1);
  CHECK(cfg.table1.delta == ExperimentConfig{}.table1.delta);
  CHECK(cfg.grid == Grid2D{});
}

TEST_CASE("bad configs are rejected") {
  CHECK_THROWS_AS(parse_config(R"({"sead": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"table1": {"epsilon": 0.1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"table1": {"delta": -1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"samplers": {"n": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"guidance": {"zeta": "linear"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/klsc.json"), ConfigError);
  CHECK_NOTHROW(parse_config(R"({"table1": {"eps": 0}})"));
}

TEST_CASE("config hash") {
  const ExperimentConfig a;
  CHECK(config_hash(a) == config_hash(ExperimentConfig{}));
  CHECK(config_hash(a).size() == 16);
  ExperimentConfig b;
  b.seed += 1;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.15) == "0.15");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(format_double(NAN) == "nan");
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-7}) CHECK(std::stod(format_double(v)) == v);
  CHECK(Divergence::infinity().to_string() == "inf");
}

TEST_CASE("report rows echo the run settings") {
  ExperimentConfig cfg;
  cfg.seed = 99;
  Report rep("unit", cfg);
  rep.add("hard", 5.0, "tv_prior", 0.25, 10);
  rep.add("klsc", 5.0, "kl_prior", Divergence::infinity());
  rep.add_text("klsc", 5.0, "warning", "low ess, check");
  const std::string csv = rep.csv();
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == Report::header());
  CHECK(line == "schema_version,experiment,method,target_m,metric,value,seed,config_hash,n,bandwidth,grid");
  std::getline(in, line);
  CHECK(line == "1,unit,hard,5,tv_prior,0.25,99," + config_hash(cfg) + ",10,0.15,600x600[-6:6]x[-6:6]");
  std::getline(in, line);
  CHECK(line.find(",inf,") != std::string::npos);
  std::getline(in, line);
  CHECK(line.find("\"low ess, check\"") != std::string::npos);
  CHECK(rep.rows() == 3);
}

TEST_CASE("grid dumps round-trip and render") {
  const auto dir = scratch("heatmap");
  const Grid2D g{-1.0, 2.0, -3.0, 4.0, 7, 5};
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::sin(static_cast<double>(k));
  write_grid_dump((dir / "a.grid").string(), g, v);
  const auto back = read_grid_dump((dir / "a.grid").string());
  CHECK(back.grid == g);
  CHECK(back.values == v);
  CHECK(slurp(dir / "a.grid").substr(0, 8) == "KLSCGRD1");

  emit_grid_panel((dir / "b").string(), g, v);
  const std::string png = slurp(dir / "b.png");
  REQUIRE(png.size() > 24);
  CHECK(png.substr(1, 3) == "PNG");
  auto be32 = [&](std::size_t off) {
    return (static_cast<unsigned>(static_cast<unsigned char>(png[off])) << 24) |
           (static_cast<unsigned>(static_cast<unsigned char>(png[off + 1])) << 16) |
           (static_cast<unsigned>(static_cast<unsigned char>(png[off + 2])) << 8) |
           static_cast<unsigned>(static_cast<unsigned char>(png[off + 3]));
  };
  CHECK(be32(16) == static_cast<unsigned>(kHeatmapSize));
  CHECK(be32(20) == static_cast<unsigned>(kHeatmapSize));

  regenerate_heatmap((dir / "b.grid").string(), (dir / "c.png").string());
  CHECK(slurp(dir / "c.png") == png);

  std::ofstream(dir / "bad.grid") << "NOTAGRID";
  CHECK_THROWS_AS(read_grid_dump((dir / "bad.grid").string()), Error);
}

TEST_CASE("viridis endpoints") {
  using C = std::array<std::uint8_t, 3>;
  CHECK(viridis(0.0) == C{68, 1, 84});
  CHECK(viridis(1.0) == C{253, 231, 37});
  CHECK(viridis(-1.0) == viridis(0.0));
  CHECK(viridis(2.0) == viridis(1.0));
}

TEST_CASE("exit code precedence") {
  RunStatus ok, ordering, infeasible;
  ordering.orderings_hold = false;
  infeasible.calibration_infeasible = true;
  CHECK(exit_code({&ok}) == 0);
  CHECK(exit_code({&ok, &ordering}) == 2);
  CHECK(exit_code({&ordering, &infeasible}) == 3);
  CHECK(exit_code({}) == 0);
}

TEST_CASE("small table run") {
  auto cfg = small_table_config();
  const auto r = run_table1(cfg);
  CHECK(r.rows.size() == 6);
  CHECK(r.status.orderings_hold);
  for (const auto& row : r.rows) CHECK(row.error.empty());

  cfg.table1.eps = 0.0;
  const auto z = run_table1(cfg);
  for (const auto& row : z.rows) CHECK(row.instability == 0.0);
  CHECK(z.status.orderings_hold);
}

TEST_CASE("table values are stable across master seeds") {
  auto a_cfg = small_table_config();
  auto b_cfg = a_cfg;
  b_cfg.seed = a_cfg.seed + 12345;
  const auto a = run_table1(a_cfg), b = run_table1(b_cfg);
  for (const auto& ra : a.rows) {
    const auto* rb = b.find(ra.family, ra.target);
    REQUIRE(rb != nullptr);
    CHECK(std::abs(ra.tv_prior - rb->tv_prior) < 0.15 * ra.tv_prior);
  }
}

TEST_CASE("reruns write byte-identical CSVs") {
  auto cfg = small_table_config();
  cfg.typical_set.n_mc = 2000;
  const auto d1 = scratch("rerun1"), d2 = scratch("rerun2");
  for (const auto& d : {d1, d2}) {
    RunOptions opt;
    opt.out_dir = d.string();
    run_table1(cfg, opt);
    run_gaussian_forms(cfg, opt);
    run_typical_set(cfg, opt);
  }
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    const auto name = e.path().filename();
    REQUIRE(fs::exists(d2 / name));
    CHECK_MESSAGE(slurp(e.path()) == slurp(d2 / name), name.string());
    ++compared;
  }
  CHECK(compared > 5);
  CHECK(fs::exists(d1 / "table1.csv"));
  CHECK(fs::exists(d1 / "table1_prior.png"));
  CHECK(fs::exists(d1 / "table1_prior.grid"));
}

TEST_CASE("Gaussian forms and typical-set drivers") {
  ExperimentConfig cfg;
  const auto g = run_gaussian_forms(cfg);
  CHECK(g.status.orderings_hold);
  CHECK(g.rows.size() == cfg.gaussian_forms.m.size());
  for (const auto& row : g.rows) CHECK(row.hard_less_stable);
  CHECK(std::abs(g.asymptote_ratio - 1.0) < 0.01);

  cfg.typical_set.n_mc = 5000;
  const auto t = run_typical_set(cfg);
  CHECK(t.status.orderings_hold);
  CHECK(t.rows.size() == cfg.typical_set.dims.size() * cfg.typical_set.alphas.size());
  for (const auto& row : t.rows) CHECK(row.bound_holds);
  CHECK(t.tv_rows.size() == cfg.typical_set.tv_pairs.size());
  CHECK(t.tv_rows.front().tv_lower == 1.0);
}
