#include <algorithm>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cclab/harness.hpp"
#include "cclab/moments_io.hpp"
#include "cclab/output.hpp"
#include "cclab/run_config.hpp"

extern "C" void openblas_set_num_threads(int);

namespace {

using namespace cclab;

struct CommonOpts {
  std::string config_path;
  std::string model_path;
  std::string obs;
  std::string kind = "classical";
  int n = 0;
  std::string out;
  bool json = false;
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "run config file (JSON)");
  cmd->add_option("--model", opts.model_path, "model file (overrides config)");
  cmd->add_option("--obs", opts.obs, "observable spec, e.g. Z@0,Z@0 (overrides config)");
  cmd->add_option("--kind", opts.kind, "classical or free")
      ->check(CLI::IsMember({"classical", "free"}));
  cmd->add_option("--n", opts.n, "cumulant order (overrides config)");
  cmd->add_option("--out", opts.out, "output directory (overrides config)");
  cmd->add_flag("--json", opts.json, "also emit the result as a JSON document");
  cmd->add_option("--workers", opts.workers, "BLAS thread count (or env CCLAB_WORKERS)");
}

RunConfig resolve_config(const CommonOpts& opts, const std::string& experiment) {
  RunConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = load_config(opts.config_path);
    if (!cfg.experiment.empty() && cfg.experiment != experiment)
      throw std::invalid_argument("config is for experiment '" + cfg.experiment +
                                  "', invoked subcommand is '" + experiment + "'");
  }
  cfg.experiment = experiment;
  if (!opts.model_path.empty()) {
    cfg.model_path = opts.model_path;
    cfg.model = load_chain_model(opts.model_path);
  }
  if (cfg.model.L == 0) throw std::invalid_argument("no model given (--model or config)");
  if (!opts.obs.empty()) cfg.obs = opts.obs;
  if (cfg.obs.empty()) throw std::invalid_argument("no observables given (--obs or config)");
  cfg.kind = opts.kind == "free" ? CumulantKind::free : cfg.kind;
  if (opts.kind == "classical") cfg.kind = CumulantKind::classical;
  if (opts.n > 0) cfg.n = opts.n;
  if (!opts.out.empty()) cfg.out_dir = opts.out;
  if (opts.workers > 0) cfg.workers = opts.workers;
  if (cfg.workers == 0) {
    if (const char* env = std::getenv("CCLAB_WORKERS")) cfg.workers = std::atoi(env);
  }
  if (cfg.workers > 0) openblas_set_num_threads(cfg.workers);
  return cfg;
}

std::string artifact_path(const RunConfig& cfg, const char* ext) {
  return (std::filesystem::path(cfg.out_dir) / (cfg.experiment + ext)).string();
}

void emit(const RunConfig& cfg, const Csv& csv, const std::string& json_text, bool want_json) {
  const std::string hash = hash_hex(cfg.canonical());
  write_csv(artifact_path(cfg, ".csv"), csv, hash);
  if (want_json) write_text_atomic(artifact_path(cfg, ".json"), json_text);
}

std::vector<int> default_xs(const RunConfig& cfg) {
  if (!cfg.xs.empty()) return cfg.xs;
  std::vector<int> xs;
  for (int x = 1; x <= safe_window(cfg.model.L); ++x) xs.push_back(x);
  return xs;
}

int run_enumerate(const std::string& family, int n, bool mobius) {
  const FamilyKind kind = family == "nc" ? FamilyKind::non_crossing : FamilyKind::all;
  const PartitionFamily fam = kind == FamilyKind::non_crossing ? enumerate_noncrossing(n)
                                                               : enumerate_partitions(n);
  const Partition one = full_partition(n);
  for (const Partition& p : fam.members) {
    std::cout << to_string(p);
    if (mobius) {
      const long long mu = kind == FamilyKind::non_crossing
                               ? mobius_nc(p, one)
                               : mobius_full_classical(p);
      std::cout << "  mu=" << mu;
    }
    std::cout << "\n";
  }
  std::cout << "count=" << fam.members.size() << "\n";
  return 0;
}

int run_cumulants(const std::string& moments_path, const std::string& kind_name, int n) {
  const CumulantKind kind =
      kind_name == "free" ? CumulantKind::free : CumulantKind::classical;
  std::map<std::vector<int>, Complex> moments = load_moment_map(moments_path);
  int n_max = 0;
  for (const auto& [tuple, value] : moments)
    for (int i : tuple) n_max = std::max(n_max, i);
  if (n < 1 || n > n_max) throw std::invalid_argument("order n outside the moment table");
  MomentProvider provider = map_moment_provider(n_max, std::move(moments));
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i + 1;
  const CumulantTable table = cumulant_table(kind, provider, idx);
  for (const auto& [tuple, value] : table.values) {
    std::cout << (kind == CumulantKind::free ? "kappa" : "c") << "(";
    for (std::size_t i = 0; i < tuple.size(); ++i) std::cout << (i ? "," : "") << tuple[i];
    std::cout << ") = " << fmt17(value.real()) << " " << fmt17(value.imag()) << "\n";
  }
  return 0;
}

int run_simulate(const std::string& model_path, bool check) {
  const ChainModel model = load_chain_model(model_path);
  GibbsEnsemble ensemble = make_ensemble(model);
  std::cout << "L=" << model.L << " dim=" << ensemble.dim() << " beta=" << model.beta << "\n";
  if (!check) {
    std::cout << "REPORT diagonalization complete\n";
    return 0;
  }
  const double trace_err = ensemble.trace_error();
  const double stat_err = ensemble.stationarity_error();
  const double hnorm = ensemble.hamiltonian_norm();
  std::cout << "trace_error=" << fmt17(trace_err) << "\n";
  std::cout << "stationarity_error=" << fmt17(stat_err) << " (||H||=" << fmt17(hnorm) << ")\n";
  const bool ok = trace_err <= 1e-10 && stat_err <= 1e-10 * std::max(hnorm, 1.0);
  std::cout << (ok ? "PASS" : "FAIL") << " invariants\n";
  return ok ? 0 : 1;
}

int run_harness(const std::string& experiment, const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts, experiment);
  GibbsEnsemble ensemble = make_ensemble(cfg.model);
  const std::vector<LocalOperator> obs = parse_observables(cfg.model.L, cfg.obs);
  const std::string hash = hash_hex(cfg.canonical());
  const int n_obs = static_cast<int>(obs.size());

  if (experiment == "cluster-scan") {
    std::set<int> translated(cfg.translated.begin(), cfg.translated.end());
    CorrelationSeries series =
        scan_cumulant(ensemble, obs, cfg.kind, translated, default_xs(cfg), cfg.times);
    emit(cfg, to_csv(series), to_json_text(series, hash), opts.json);
    std::cout << "REPORT samples=" << series.samples.size() << "\n";
    return 0;
  }
  if (experiment == "rate-report") {
    std::vector<int> orders;
    for (int n : cfg.orders)
      if (n <= n_obs) orders.push_back(n);
    if (orders.empty()) throw std::invalid_argument("no orders within the observable count");
    RateReport report =
        rate_inheritance_report(ensemble, obs, orders, cfg.kind, default_xs(cfg), cfg.tol);
    emit(cfg, to_csv(report), to_json_text(report, hash), opts.json);
    std::cout << (report.pass ? "PASS n=" : "FAIL n=");
    for (std::size_t i = 0; i < report.entries.size(); ++i)
      std::cout << (i ? "," : "") << report.entries[i].n;
    std::cout << "\n";
    return report.pass ? 0 : 1;
  }
  if (experiment == "lightcone") {
    if (n_obs < 2) throw std::invalid_argument("lightcone needs two observables");
    std::vector<double> ts = cfg.ts;
    if (ts.empty()) ts = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25};
    LightconeMap map = lightcone_map(ensemble, obs[0], obs[1], default_xs(cfg), ts, cfg.theta);
    emit(cfg, to_csv(map), to_json_text(map, hash), opts.json);
    if (map.v_lr)
      std::cout << "REPORT v_lr=" << fmt17(*map.v_lr) << "\n";
    else
      std::cout << "REPORT contour absent (theta=" << fmt17(map.theta) << " never crossed)\n";
    return 0;
  }
  if (experiment == "spacelike") {
    if (cfg.velocity <= 0) throw std::invalid_argument("spacelike needs a positive velocity");
    const int n = cfg.n > 1 ? cfg.n : 2;
    std::vector<double> ts = cfg.ts;
    if (ts.empty())
      for (int j = 1; j <= std::min(5, safe_window(cfg.model.L)); ++j)
        ts.push_back((j + 0.5) / cfg.velocity);
    CorrelationSeries series =
        spacelike_cumulant_check(ensemble, obs, n, cfg.kind, cfg.velocity, ts);
    emit(cfg, to_csv(series), to_json_text(series, hash), opts.json);
    std::cout << "REPORT samples=" << series.samples.size() << "\n";
    return 0;
  }
  if (experiment == "three-point") {
    if (n_obs != 3) throw std::invalid_argument("three-point needs exactly three observables");
    std::vector<ThreePointSample> samples;
    bool all_hold = true;
    const double t = cfg.times.empty() ? 0.0 : cfg.times[0];
    for (int x : default_xs(cfg)) {
      samples.push_back(three_point_cluster(ensemble, obs[0], obs[1], obs[2], x, t));
      all_hold = all_hold && samples.back().holds;
    }
    emit(cfg, to_csv(samples), to_json_text(samples, hash), opts.json);
    std::cout << (all_hold ? "PASS" : "FAIL") << " inequality chain at " << samples.size()
              << " points\n";
    return all_hold ? 0 : 1;
  }
  if (experiment == "ray-average") {
    if (cfg.velocity <= 0) throw std::invalid_argument("ray-average needs a positive velocity");
    const int n = cfg.n > 1 ? cfg.n : 2;
    RayAverageSeries series =
        ray_average(ensemble, obs, n, cfg.kind, cfg.velocity, cfg.horizons, cfg.dt);
    emit(cfg, to_csv(series), to_json_text(series, hash), opts.json);
    std::cout << "REPORT averages=" << series.averages.size()
              << (series.step_warning ? " step_warning" : "")
              << (series.wrap_warning ? " wrap_warning" : "") << "\n";
    return 0;
  }
  if (experiment == "maxmin") {
    if (cfg.velocity <= 0) throw std::invalid_argument("maxmin needs a positive velocity");
    // Random placements at t=0, rejected until the max-min separation
    // clears the compact window z >= v.
    std::mt19937 rng(cfg.seed);
    std::uniform_int_distribution<int> site(0, cfg.model.L - 1);
    std::vector<Placement> placements;
    for (int attempts = 0;
         static_cast<int>(placements.size()) < cfg.placements && attempts < 100000; ++attempts) {
      Placement p;
      p.ts.assign(n_obs, 0.0);
      for (int i = 0; i < n_obs; ++i) p.xs.push_back(site(rng));
      double z = 0;
      for (int i = 0; i < n_obs; ++i) {
        int nearest = cfg.model.L;
        for (int j = 0; j < n_obs; ++j)
          if (j != i)
            nearest = std::min(nearest, periodic_distance(cfg.model.L, p.xs[i], p.xs[j]));
        z = std::max(z, static_cast<double>(nearest));
      }
      if (z >= cfg.velocity) placements.push_back(std::move(p));
    }
    MaxMinReport report = maxmin_bound_check(ensemble, obs, placements, cfg.kind, cfg.velocity);
    emit(cfg, to_csv(report), to_json_text(report, hash), opts.json);
    std::cout << (report.envelope_ok ? "PASS" : "FAIL") << " envelope rate="
              << fmt17(report.envelope.rate) << " max_excess=" << fmt17(report.max_excess)
              << "\n";
    return report.envelope_ok ? 0 : 1;
  }
  throw std::invalid_argument("unknown experiment '" + experiment + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cumulant clustering laboratory"};
  app.require_subcommand(1);

  std::string family = "all";
  int enum_n = 4;
  bool mobius = false;
  CLI::App* enumerate = app.add_subcommand("enumerate", "list set partitions");
  enumerate->add_option("--family", family, "all or nc")->check(CLI::IsMember({"all", "nc"}));
  enumerate->add_option("--n", enum_n, "number of elements")->required();
  enumerate->add_flag("--mobius", mobius, "print the Moebius value to the full partition");

  std::string moments_path, cum_kind = "classical";
  int cum_n = 2;
  CLI::App* cumulants = app.add_subcommand("cumulants", "moment table to cumulant table");
  cumulants->add_option("--moments", moments_path, "moment map file")->required();
  cumulants->add_option("--kind", cum_kind, "classical or free")
      ->check(CLI::IsMember({"classical", "free"}));
  cumulants->add_option("--n", cum_n, "top order")->required();

  std::string sim_model, sim_check;
  CLI::App* simulate = app.add_subcommand("simulate", "diagonalize a model and check invariants");
  simulate->add_option("--model", sim_model, "model file")->required();
  simulate->add_option("--check", sim_check, "set to 'invariants' to verify the state");

  const std::vector<std::string> experiments = {"cluster-scan", "rate-report", "lightcone",
                                                "spacelike",    "three-point", "ray-average",
                                                "maxmin"};
  std::map<std::string, CommonOpts> opts;
  for (const std::string& name : experiments)
    add_common(app.add_subcommand(name, "harness experiment"), opts[name]);

  CLI11_PARSE(app, argc, argv);

  try {
    if (enumerate->parsed()) return run_enumerate(family, enum_n, mobius);
    if (cumulants->parsed()) return run_cumulants(moments_path, cum_kind, cum_n);
    if (simulate->parsed()) return run_simulate(sim_model, sim_check == "invariants");
    for (const std::string& name : experiments)
      if (app.get_subcommand(name)->parsed()) return run_harness(name, opts[name]);
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
