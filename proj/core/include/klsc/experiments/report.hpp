#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "klsc/diagnostics/divergence.hpp"
#include "klsc/experiments/config.hpp"

namespace klsc {

inline constexpr int kCsvSchemaVersion = 1;

/// Shortest round-trip decimal form; non-finite values become "inf", "-inf" or "nan".
std::string format_double(double v);

/// Metric rows for one experiment. Every row echoes the run's seed, config
/// hash, sample count, bandwidth and grid.
class Report {
 public:
  Report(std::string experiment, const ExperimentConfig& cfg);

  void add(const std::string& method, double target_m, const std::string& metric, double value, std::size_t n = 0);
  void add(const std::string& method, double target_m, const std::string& metric, const Divergence& value,
           std::size_t n = 0);
  void add_text(const std::string& method, double target_m, const std::string& metric, const std::string& value,
                std::size_t n = 0);

  std::string csv() const;
  void write(const std::string& path) const;
  std::size_t rows() const noexcept { return rows_.size(); }

  static std::string header();

 private:
  struct Row {
    std::string method;
    double target;
    std::string metric;
    std::string value;
    std::size_t n;
  };
  std::string experiment_;
  std::uint64_t seed_;
  std::string hash_;
  double bandwidth_;
  std::string grid_;
  std::vector<Row> rows_;
};

struct CalibrationRecord {
  std::string family;
  double target_m = 0.0;
  double knob = 0.0;
  double achieved_mean = 0.0;
  std::size_t iterations = 0;
  double ess = 0.0;
  bool tolerance_met = false;
  std::string warning;
};

void write_calibration_csv(const std::string& path, const std::vector<CalibrationRecord>& records);

/// x, y, score, weight per point; uniform weights when `weights` is empty.
void write_samples_csv(const std::string& path, const std::vector<Point>& points, const std::vector<double>& scores,
                       const std::vector<double>& weights = {});

void write_text_file(const std::string& path, const std::string& text);

}  // namespace klsc
