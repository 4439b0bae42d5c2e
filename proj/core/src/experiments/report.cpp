#include "klsc/experiments/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "klsc/error.hpp"

namespace klsc {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

// Quotes a CSV field when it holds a comma, quote or newline.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Report::Report(std::string experiment, const ExperimentConfig& cfg)
    : experiment_(std::move(experiment)),
      seed_(cfg.seed),
      hash_(config_hash(cfg)),
      bandwidth_(cfg.kde.kernel.bandwidth) {
  std::ostringstream g;
  g << cfg.grid.nx << "x" << cfg.grid.ny << "[" << format_double(cfg.grid.xmin) << ":" << format_double(cfg.grid.xmax)
    << "]x[" << format_double(cfg.grid.ymin) << ":" << format_double(cfg.grid.ymax) << "]";
  grid_ = g.str();
}

void Report::add(const std::string& method, double target_m, const std::string& metric, double value,
                 std::size_t n) {
  rows_.push_back({method, target_m, metric, format_double(value), n});
}

void Report::add(const std::string& method, double target_m, const std::string& metric, const Divergence& value,
                 std::size_t n) {
  rows_.push_back({method, target_m, metric, value.to_string(), n});
}

void Report::add_text(const std::string& method, double target_m, const std::string& metric,
                      const std::string& value, std::size_t n) {
  rows_.push_back({method, target_m, metric, value, n});
}

std::string Report::header() {
  return "schema_version,experiment,method,target_m,metric,value,seed,config_hash,n,bandwidth,grid";
}

std::string Report::csv() const {
  std::ostringstream os;
  os << header() << "\n";
  for (const auto& r : rows_) {
    os << kCsvSchemaVersion << ',' << experiment_ << ',' << csv_field(r.method) << ',' << format_double(r.target)
       << ',' << csv_field(r.metric) << ',' << csv_field(r.value) << ',' << seed_ << ',' << hash_ << ',' << r.n
       << ',' << format_double(bandwidth_) << ',' << grid_ << "\n";
  }
  return os.str();
}

void Report::write(const std::string& path) const { write_text_file(path, csv()); }

void write_calibration_csv(const std::string& path, const std::vector<CalibrationRecord>& records) {
  std::ostringstream os;
  os << "schema_version,family,target_m,knob,achieved_mean,iterations,ess,tolerance_met,warning\n";
  for (const auto& r : records) {
    os << kCsvSchemaVersion << ',' << r.family << ',' << format_double(r.target_m) << ',' << format_double(r.knob)
       << ',' << format_double(r.achieved_mean) << ',' << r.iterations << ',' << format_double(r.ess) << ','
       << (r.tolerance_met ? "true" : "false") << ',' << csv_field(r.warning) << "\n";
  }
  write_text_file(path, os.str());
}

void write_samples_csv(const std::string& path, const std::vector<Point>& points, const std::vector<double>& scores,
                       const std::vector<double>& weights) {
  if (scores.size() != points.size() || (!weights.empty() && weights.size() != points.size())) {
    throw InvalidArgumentError("write_samples_csv: column length mismatch");
  }
  std::ostringstream os;
  os << "x,y,score,weight\n";
  const double uniform = points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    os << format_double(points[i].x) << ',' << format_double(points[i].y) << ',' << format_double(scores[i]) << ','
       << format_double(weights.empty() ? uniform : weights[i]) << "\n";
  }
  write_text_file(path, os.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgumentError("cannot write " + path);
  out << text;
  if (!out) throw InvalidArgumentError("write failed for " + path);
}

}  // namespace klsc
