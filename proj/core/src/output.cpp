#include "cclab/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cclab {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "cclab 0.1.0";

std::string version_comment(const std::string& config_hash) {
  return "# " + std::string(kVersion) + " config=" + config_hash;
}

json series_json(const CorrelationSeries& series) {
  json j;
  j["kind"] = series.descriptor.kind == CumulantKind::classical ? "classical" : "free";
  j["n"] = series.descriptor.n;
  j["translated"] = series.descriptor.translated;
  j["beta"] = series.descriptor.beta;
  j["velocity"] = series.descriptor.velocity;
  json samples = json::array();
  for (const auto& s : series.samples)
    samples.push_back({{"z", s.z}, {"t", s.time}, {"re", s.value.real()}, {"im", s.value.imag()}});
  j["samples"] = std::move(samples);
  return j;
}

std::string wrap(const char* name, json data, const std::string& config_hash) {
  json doc;
  doc["tool"] = kVersion;
  doc["config"] = config_hash;
  doc["experiment"] = name;
  doc["data"] = std::move(data);
  return doc.dump(2) + "\n";
}

}  // namespace

std::string fmt17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const std::string& text) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out.flush()) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, target);
}

std::string render_csv(const Csv& csv, const std::string& config_hash) {
  std::ostringstream out;
  for (std::size_t i = 0; i < csv.columns.size(); ++i)
    out << (i ? "," : "") << csv.columns[i];
  out << "\n" << version_comment(config_hash) << "\n";
  for (const auto& row : csv.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

void write_csv(const std::string& path, const Csv& csv, const std::string& config_hash) {
  write_text_atomic(path, render_csv(csv, config_hash));
}

Csv to_csv(const CorrelationSeries& series) {
  Csv csv;
  csv.columns = {"z", "t", "re", "im", "abs"};
  for (const auto& s : series.samples)
    csv.rows.push_back({fmt17(s.z), fmt17(s.time), fmt17(s.value.real()), fmt17(s.value.imag()),
                        fmt17(std::abs(s.value))});
  return csv;
}

Csv to_csv(const RateReport& report) {
  Csv csv;
  csv.columns = {"n", "lambda", "residual", "degenerate", "pass"};
  for (const auto& e : report.entries)
    csv.rows.push_back({std::to_string(e.n), fmt17(e.lambda), fmt17(e.residual),
                        e.degenerate ? "1" : "0", e.pass ? "1" : "0"});
  return csv;
}

Csv to_csv(const LightconeMap& map) {
  Csv csv;
  csv.columns = {"t", "x", "norm"};
  for (std::size_t i = 0; i < map.ts.size(); ++i)
    for (std::size_t j = 0; j < map.xs.size(); ++j)
      csv.rows.push_back(
          {fmt17(map.ts[i]), std::to_string(map.xs[j]),
           fmt17(map.norms(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))});
  return csv;
}

Csv to_csv(const RayAverageSeries& series) {
  Csv csv;
  csv.columns = {"T", "re", "im", "abs"};
  for (std::size_t k = 0; k < series.horizons.size(); ++k)
    csv.rows.push_back({fmt17(series.horizons[k]), fmt17(series.averages[k].real()),
                        fmt17(series.averages[k].imag()), fmt17(std::abs(series.averages[k]))});
  return csv;
}

Csv to_csv(const MaxMinReport& report) {
  Csv csv;
  csv.columns = {"z", "re", "im", "abs", "argmax", "min_dist", "lemma_residual"};
  for (const auto& s : report.samples)
    csv.rows.push_back({fmt17(s.z), fmt17(s.value.real()), fmt17(s.value.imag()),
                        fmt17(std::abs(s.value)), std::to_string(s.argmax), fmt17(s.min_dist),
                        fmt17(s.lemma_residual)});
  return csv;
}

Csv to_csv(const std::vector<ThreePointSample>& samples) {
  Csv csv;
  csv.columns = {"x", "t", "three_re", "three_im", "reordered_re", "reordered_im",
                 "bound", "holds"};
  for (const auto& s : samples)
    csv.rows.push_back({std::to_string(s.x), fmt17(s.t), fmt17(s.three_point.real()),
                        fmt17(s.three_point.imag()), fmt17(s.reordered.real()),
                        fmt17(s.reordered.imag()), fmt17(s.commutator_bound),
                        s.holds ? "1" : "0"});
  return csv;
}

std::string to_json_text(const CorrelationSeries& series, const std::string& config_hash) {
  return wrap("series", series_json(series), config_hash);
}

std::string to_json_text(const RateReport& report, const std::string& config_hash) {
  json j;
  j["kind"] = report.kind == CumulantKind::classical ? "classical" : "free";
  j["tol"] = report.tol;
  j["lambda2"] = report.lambda2;
  j["pass"] = report.pass;
  json entries = json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"n", e.n},
                       {"lambda", e.lambda},
                       {"residual", e.residual},
                       {"degenerate", e.degenerate},
                       {"pass", e.pass}});
  j["entries"] = std::move(entries);
  return wrap("rate-report", std::move(j), config_hash);
}

std::string to_json_text(const LightconeMap& map, const std::string& config_hash) {
  json j;
  j["theta"] = map.theta;
  if (map.v_lr) j["v_lr"] = *map.v_lr;
  j["x"] = map.xs;
  j["t"] = map.ts;
  json rows = json::array();
  for (std::size_t i = 0; i < map.ts.size(); ++i) {
    json row = json::array();
    for (std::size_t j2 = 0; j2 < map.xs.size(); ++j2)
      row.push_back(map.norms(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j2)));
    rows.push_back(std::move(row));
  }
  j["norms"] = std::move(rows);
  json contour = json::array();
  for (const auto& [t, x] : map.contour) contour.push_back({{"t", t}, {"x", x}});
  j["contour"] = std::move(contour);
  return wrap("lightcone", std::move(j), config_hash);
}

std::string to_json_text(const RayAverageSeries& series, const std::string& config_hash) {
  json j;
  j["velocity"] = series.velocity;
  j["dt"] = series.dt;
  j["step_warning"] = series.step_warning;
  j["wrap_warning"] = series.wrap_warning;
  json avgs = json::array();
  for (std::size_t k = 0; k < series.horizons.size(); ++k)
    avgs.push_back({{"T", series.horizons[k]},
                    {"re", series.averages[k].real()},
                    {"im", series.averages[k].imag()}});
  j["averages"] = std::move(avgs);
  return wrap("ray-average", std::move(j), config_hash);
}

std::string to_json_text(const MaxMinReport& report, const std::string& config_hash) {
  json j;
  j["envelope"] = {{"rate", report.envelope.rate},
                   {"prefactor", report.envelope.prefactor},
                   {"residual", report.envelope.residual}};
  j["max_excess"] = report.max_excess;
  j["envelope_ok"] = report.envelope_ok;
  json samples = json::array();
  for (const auto& s : report.samples)
    samples.push_back({{"z", s.z},
                       {"re", s.value.real()},
                       {"im", s.value.imag()},
                       {"argmax", s.argmax},
                       {"min_dist", s.min_dist},
                       {"lemma_residual", s.lemma_residual}});
  j["samples"] = std::move(samples);
  return wrap("maxmin", std::move(j), config_hash);
}

std::string to_json_text(const std::vector<ThreePointSample>& samples,
                         const std::string& config_hash) {
  json arr = json::array();
  for (const auto& s : samples)
    arr.push_back({{"x", s.x},
                   {"t", s.t},
                   {"three_re", s.three_point.real()},
                   {"three_im", s.three_point.imag()},
                   {"reordered_re", s.reordered.real()},
                   {"reordered_im", s.reordered.imag()},
                   {"bound", s.commutator_bound},
                   {"holds", s.holds}});
  return wrap("three-point", std::move(arr), config_hash);
}

}  // namespace cclab
