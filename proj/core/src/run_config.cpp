#include "cclab/run_config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "key_match.hpp"

namespace cclab {

namespace {

using nlohmann::json;

const std::vector<std::string> kExperiments = {
    "cluster-scan", "rate-report", "lightcone", "spacelike",
    "three-point",  "ray-average", "maxmin",    "simulate",
};

const std::vector<std::string> kKeys = {
    "experiment", "model",    "obs",   "kind",       "n",    "orders",
    "x",          "t",        "times", "translated", "velocity",
    "horizons",   "dt",       "theta", "tol",        "placements",
    "seed",       "out",      "workers"};

[[noreturn]] void fail(const std::vector<std::string>& errors) {
  std::string msg = "invalid run config:";
  for (const auto& e : errors) msg += "\n  - " + e;
  throw std::invalid_argument(msg);
}

// Accepts either an explicit array or {"from": a, "to": b[, "step": s]}.
template <typename T>
std::vector<T> parse_grid(const json& node, const std::string& where,
                          std::vector<std::string>& errors) {
  std::vector<T> grid;
  if (node.is_array()) {
    for (const auto& v : node) {
      if (!v.is_number()) {
        errors.push_back(where + ": grid entries must be numbers");
        return {};
      }
      grid.push_back(v.get<T>());
    }
  } else if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it)
      if (it.key() != "from" && it.key() != "to" && it.key() != "step")
        errors.push_back(where + ": unknown grid key '" + it.key() + "'");
    if (!node.contains("from") || !node.contains("to")) {
      errors.push_back(where + ": grid object needs 'from' and 'to'");
      return {};
    }
    const double from = node["from"].get<double>();
    const double to = node["to"].get<double>();
    const double step = node.value("step", 1.0);
    if (step <= 0) {
      errors.push_back(where + ": grid step must be positive");
      return {};
    }
    for (double v = from; v <= to + 1e-12; v += step) grid.push_back(static_cast<T>(v));
  } else {
    errors.push_back(where + ": expected an array or a from/to object");
  }
  if (grid.empty()) errors.push_back(where + ": grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end(), std::less_equal<>()))
    errors.push_back(where + ": grid must be strictly increasing");
  return grid;
}

}  // namespace

std::string RunConfig::canonical() const {
  json j;
  j["experiment"] = experiment;
  j["model"] = json::parse(format_chain_model(model));
  j["obs"] = obs;
  j["kind"] = kind == CumulantKind::classical ? "classical" : "free";
  j["n"] = n;
  j["orders"] = orders;
  j["x"] = xs;
  j["t"] = ts;
  j["times"] = times;
  j["translated"] = translated;
  j["velocity"] = velocity;
  j["horizons"] = horizons;
  j["dt"] = dt;
  j["theta"] = theta;
  j["tol"] = tol;
  j["placements"] = placements;
  j["seed"] = seed;
  return j.dump();
}

RunConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("run config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");

  std::vector<std::string> errors;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(kKeys.begin(), kKeys.end(), it.key()) == kKeys.end())
      errors.push_back("unknown key '" + it.key() + "' (did you mean '" +
                       detail::nearest_key(it.key(), kKeys) + "'?)");
  }

  RunConfig cfg;
  if (j.contains("experiment")) {
    cfg.experiment = j["experiment"].get<std::string>();
    if (std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) == kExperiments.end())
      errors.push_back("unknown experiment '" + cfg.experiment + "' (did you mean '" +
                       detail::nearest_key(cfg.experiment, kExperiments) + "'?)");
  }

  if (!j.contains("model")) {
    errors.push_back("missing required key 'model'");
  } else if (j["model"].is_object()) {
    try {
      cfg.model = parse_chain_model(j["model"].dump());
    } catch (const std::exception& e) {
      errors.push_back(std::string("model: ") + e.what());
    }
  } else if (!j["model"].is_string()) {
    errors.push_back("model must be a file path or an inline model object");
  } else {
    cfg.model_path = j["model"].get<std::string>();
    std::filesystem::path p(cfg.model_path);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    if (!std::filesystem::exists(p)) {
      errors.push_back("model file '" + p.string() + "' does not exist");
    } else {
      try {
        cfg.model = load_chain_model(p.string());
      } catch (const std::exception& e) {
        errors.push_back(std::string("model: ") + e.what());
      }
    }
  }

  if (j.contains("obs")) cfg.obs = j["obs"].get<std::string>();
  if (j.contains("kind")) {
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "classical")
      cfg.kind = CumulantKind::classical;
    else if (kind == "free")
      cfg.kind = CumulantKind::free;
    else
      errors.push_back("kind must be 'classical' or 'free', got '" + kind + "'");
  }
  if (j.contains("n")) cfg.n = j["n"].get<int>();
  if (cfg.n < 1) errors.push_back("n must be at least 1");
  if (j.contains("orders")) cfg.orders = parse_grid<int>(j["orders"], "orders", errors);
  if (j.contains("x")) cfg.xs = parse_grid<int>(j["x"], "x", errors);
  if (j.contains("t")) cfg.ts = parse_grid<double>(j["t"], "t", errors);
  if (j.contains("times")) {
    if (!j["times"].is_array())
      errors.push_back("times must be an array with one entry per observable");
    else
      cfg.times = j["times"].get<std::vector<double>>();
  }
  if (j.contains("translated")) {
    cfg.translated = j["translated"].get<std::vector<int>>();
    if (cfg.translated.empty()) errors.push_back("translated set must be non-empty");
  }
  if (j.contains("velocity")) cfg.velocity = j["velocity"].get<double>();
  if (cfg.velocity < 0) errors.push_back("velocity must be non-negative");
  if (j.contains("horizons")) cfg.horizons = parse_grid<double>(j["horizons"], "horizons", errors);
  if (j.contains("dt")) cfg.dt = j["dt"].get<double>();
  if (cfg.dt <= 0) errors.push_back("dt must be positive");
  if (j.contains("theta")) cfg.theta = j["theta"].get<double>();
  if (cfg.theta <= 0) errors.push_back("theta must be positive");
  if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
  if (cfg.tol <= 0) errors.push_back("tol must be positive");
  if (j.contains("placements")) cfg.placements = j["placements"].get<int>();
  if (cfg.placements < 1) errors.push_back("placements must be at least 1");
  if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned>();
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (cfg.workers < 0) errors.push_back("workers must be non-negative");

  // Translations beyond L/2 wrap around the periodic chain and re-approach
  // the source, so scans refuse them up front.
  if (cfg.model.L >= 2) {
    for (int x : cfg.xs)
      if (x < 0 || x > cfg.model.L / 2)
        errors.push_back("x=" + std::to_string(x) + " exceeds the wraparound-safe window [0, " +
                         std::to_string(cfg.model.L / 2) + "] for L=" +
                         std::to_string(cfg.model.L));
  }

  if (!errors.empty()) fail(errors);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open run config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace cclab
