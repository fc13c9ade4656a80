#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cclab/harness.hpp"

namespace cclab {

/// 17 significant digits: shortest format that round-trips every double.
std::string fmt17(double value);

/// FNV-1a hash of the canonical config text, recorded in every artifact so
/// outputs can be matched back to the exact inputs.
std::uint64_t fnv1a(const std::string& text);
std::string hash_hex(const std::string& text);

struct Csv {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Writes content to a temp file in the target directory and renames it
/// into place, so a failed run never leaves a partial artifact.
void write_text_atomic(const std::string& path, const std::string& content);

/// Header row first, then a comment line carrying the tool version and the
/// config hash, then the data rows.
std::string render_csv(const Csv& csv, const std::string& config_hash);
void write_csv(const std::string& path, const Csv& csv, const std::string& config_hash);

Csv to_csv(const CorrelationSeries& series);              // z, t, re, im, abs
Csv to_csv(const RateReport& report);                     // n, lambda, residual, pass
Csv to_csv(const LightconeMap& map);                      // t, x, norm
Csv to_csv(const RayAverageSeries& series);               // T, re, im, abs
Csv to_csv(const MaxMinReport& report);                   // z, re, im, abs, argmax, ...
Csv to_csv(const std::vector<ThreePointSample>& samples); // x, t, three point, bound, holds

/// The same data as one structured JSON document (text, ready to write).
std::string to_json_text(const CorrelationSeries& series, const std::string& config_hash);
std::string to_json_text(const RateReport& report, const std::string& config_hash);
std::string to_json_text(const LightconeMap& map, const std::string& config_hash);
std::string to_json_text(const RayAverageSeries& series, const std::string& config_hash);
std::string to_json_text(const MaxMinReport& report, const std::string& config_hash);
std::string to_json_text(const std::vector<ThreePointSample>& samples,
                         const std::string& config_hash);

}  // namespace cclab
