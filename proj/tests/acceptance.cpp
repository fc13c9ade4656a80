// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. The heavy criteria share a single L=12 transverse-field
// Ising workspace (J=1, h=1.05, beta=0.2).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cclab/harness.hpp"
#include "cclab/output.hpp"
#include "oracles.hpp"

using namespace cclab;

namespace {

int g_failures = 0;

void report(const char* id, bool ok, const std::string& detail, double seconds) {
  std::printf("%s %s: %s (%.1fs)\n", id, ok ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

MomentProvider random_moments(int k, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::map<std::vector<int>, Complex> m;
  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<int> tuple;
    for (int i = 0; i < k; ++i)
      if (mask >> i & 1) tuple.push_back(i + 1);
    m[tuple] = Complex(u(rng), u(rng));
  }
  return map_moment_provider(k, std::move(m));
}

LocalOperator pauli_at(int L, const char* ops, int site) {
  return LocalOperator::from_pauli(pauli_string_at(L, ops, site));
}

// ---------------------------------------------------------------------------

void ac1() {
  Timer timer;
  bool ok = true;
  std::ostringstream detail;
  for (int n = 1; n <= 10 && ok; ++n)
    ok = enumerate_partitions(n).size() == oracle::bell_rgs(n);
  detail << "|P(n)| vs growth-string oracle n<=10";
  for (int n = 1; n <= 12 && ok; ++n)
    ok = enumerate_noncrossing(n).size() == oracle::catalan(n);
  detail << ", |NC(n)| vs Catalan n<=12";
  if (ok) {
    std::set<std::string> nc;
    for (const auto& p : enumerate_noncrossing(4).members) nc.insert(to_string(p));
    std::vector<std::string> missing;
    for (const auto& p : enumerate_partitions(4).members)
      if (!nc.count(to_string(p))) missing.push_back(to_string(p));
    ok = missing.size() == 1 && missing[0] == "{1,3}{2,4}";
    detail << ", NC(4) omits exactly {1,3}{2,4}";
  }
  const double s = timer.seconds();
  ok = ok && s < 30.0;
  report("AC-1", ok, detail.str(), s);
}

void ac2_ac3() {
  Timer timer;
  bool round_ok = true, path_ok = true, low_ok = true;
  double worst_round = 0, worst_path = 0, worst_low = 0;
  for (unsigned set = 0; set < 100; ++set) {
    const int k = 2 + static_cast<int>(set % 6);  // k in 2..7
    MomentProvider p = random_moments(k, 10'000 + set);
    std::vector<int> full;
    for (int i = 1; i <= k; ++i) full.push_back(i);
    for (CumulantKind kind : {CumulantKind::classical, CumulantKind::free}) {
      const CumulantTable table = cumulant_table(kind, p, full);
      for (int mask = 1; mask < (1 << k); ++mask) {
        std::vector<int> tuple;
        for (int i = 0; i < k; ++i)
          if (mask >> i & 1) tuple.push_back(i + 1);
        const Complex orig = p(tuple);
        const double err =
            std::abs(cumulants_to_moments(table, tuple) - orig) / std::max(1.0, std::abs(orig));
        worst_round = std::max(worst_round, err);
        if (err > 1e-10) round_ok = false;
        // classical = free up to order 3 (AC-3)
        if (tuple.size() <= 3) {
          const double diff = std::abs(classical_cumulant(p, tuple) - free_cumulant(p, tuple));
          worst_low = std::max(worst_low, diff);
          if (diff > 1e-12) low_ok = false;
        }
      }
    }
    const double dc = std::abs(classical_cumulant(p, full, CumulantPath::direct) -
                               classical_cumulant(p, full, CumulantPath::recursive));
    const double df = std::abs(free_cumulant(p, full, CumulantPath::direct) -
                               free_cumulant(p, full, CumulantPath::recursive));
    worst_path = std::max({worst_path, dc, df});
    if (dc > 1e-10 || df > 1e-10) path_ok = false;
  }
  const double s2 = timer.seconds();
  {
    std::ostringstream d;
    d << "100 round trips k<=7 (worst rel err " << worst_round << "), paths agree (worst "
      << worst_path << ")";
    report("AC-2", round_ok && path_ok && s2 < 60.0, d.str(), s2);
  }
  // AC-3 part two: the single-variable oracle moments (0, 1, 0, 2).
  Timer t3;
  MomentProvider sv;
  sv.n_max = 4;
  const double m[4] = {0.0, 1.0, 0.0, 2.0};
  sv.eval = [&m](std::span<const int> tuple) { return Complex(m[tuple.size() - 1], 0.0); };
  const std::vector<int> idx4 = {1, 2, 3, 4};
  const bool c4_ok = std::abs(classical_cumulant(sv, idx4) - Complex(-1.0, 0.0)) < 1e-12;
  const bool k4_ok = std::abs(free_cumulant(sv, idx4)) < 1e-12;
  std::ostringstream d3;
  d3 << "classical=free k<=3 (worst " << worst_low << "); moments (0,1,0,2): c4=-1, kappa4=0";
  report("AC-3", low_ok && c4_ok && k4_ok, d3.str(), s2 + t3.seconds());
}

void ac4() {
  Timer timer;
  const int L = 8;
  GibbsEnsemble ens = make_ensemble(tfim_model(L, 1.0, 1.05, 0.0));
  const std::vector<LocalOperator> obs = {pauli_at(L, "Z", 0), pauli_at(L, "X", 2),
                                          pauli_at(L, "Z", 4), pauli_at(L, "X", 6),
                                          pauli_at(L, "Y", 1)};
  std::vector<Operand> operands;
  for (const auto& o : obs) operands.push_back({o, 0.0});
  MomentProvider p = make_moment_provider(ens, operands);
  double worst = 0;
  for (int mask = 1; mask < (1 << 5); ++mask) {
    std::vector<int> tuple;
    for (int i = 0; i < 5; ++i)
      if (mask >> i & 1) tuple.push_back(i + 1);
    if (tuple.size() < 2) continue;
    worst = std::max(worst, std::abs(classical_cumulant(p, tuple)));
  }
  std::ostringstream d;
  d << "beta=0 tensor-product observables, mixed cumulants k<=5 all < 1e-10 (worst " << worst
    << ")";
  report("AC-4", worst < 1e-10, d.str(), timer.seconds());
}

// Shared L=12 workspace for AC-5..AC-10.
struct Workspace {
  int L = 12;
  std::unique_ptr<GibbsEnsemble> ens;
  double v_lr = 0.0;

  Workspace() {
    Timer timer;
    const ChainModel model = tfim_model(L, 1.0, 1.05, 0.2);
    ens = std::make_unique<GibbsEnsemble>(build_hamiltonian(model), model.beta, L);
    std::printf("# workspace: L=12 TFIM diagonalized in %.1fs\n", timer.seconds());
    std::fflush(stdout);
  }
};

void ac5(const Workspace& ws) {
  Timer timer;
  const std::vector<LocalOperator> obs(4, pauli_at(ws.L, "Z", 0));
  const std::vector<int> xs = {1, 2, 3, 4, 5};
  bool ok = true;
  std::ostringstream d;
  for (CumulantKind kind : {CumulantKind::classical, CumulantKind::free}) {
    const RateReport rep = rate_inheritance_report(*ws.ens, obs, {2, 3, 4}, kind, xs, 0.1);
    ok = ok && rep.pass;
    d << (kind == CumulantKind::classical ? "classical" : " | free") << ": ";
    for (const auto& e : rep.entries) {
      if (e.degenerate)
        d << "n=" << e.n << " degenerate(exact factorization) ";
      else
        d << "n=" << e.n << " lambda=" << e.lambda << " resid=" << e.residual << " ";
      ok = ok && e.pass;
    }
    // explicit AC-5 clauses
    ok = ok && rep.lambda2 > 0;
    for (const auto& e : rep.entries) {
      if (e.n == 2) ok = ok && e.residual < 0.5;
      if (!e.degenerate && e.n > 2) ok = ok && e.lambda >= rep.lambda2 - 0.1;
    }
  }
  report("AC-5", ok, d.str(), timer.seconds());
}

void ac6(Workspace& ws) {
  Timer timer;
  const LocalOperator z0 = pauli_at(ws.L, "Z", 0);
  const LightconeMap map =
      lightcone_map(*ws.ens, z0, z0, {1, 2, 3, 4}, {0.0, 0.5, 1.0});
  bool ok = map.v_lr.has_value() && *map.v_lr > 0 && std::isfinite(*map.v_lr);
  std::ostringstream d;
  if (!ok) {
    d << "no finite v_LR estimate";
    report("AC-6", false, d.str(), timer.seconds());
    return;
  }
  ws.v_lr = *map.v_lr;
  d << "v_LR=" << ws.v_lr;
  const double v = 2.0 * ws.v_lr;
  std::vector<double> ts;
  for (int j = 1; j <= 4; ++j) ts.push_back((j + 0.5) / v);  // floor(v t) = j
  const auto check_ray = [&](const std::vector<LocalOperator>& obs, int n, const char* name) {
    const CorrelationSeries ray =
        spacelike_cumulant_check(*ws.ens, obs, n, CumulantKind::classical, v, ts);
    int above = 0;
    bool monotone = true;
    double prev = std::abs(ray.samples.front().value);
    for (const auto& s : ray.samples) {
      const double mag = std::abs(s.value);
      if (mag > kMagnitudeFloor) ++above;
      if (mag > prev * (1.0 + 1e-9) && &s != &ray.samples.front()) monotone = false;
      prev = mag;
    }
    d << ", |" << name << "| " << (monotone ? "non-increasing" : "NOT monotone") << " over "
      << above << " ray points";
    return monotone && above >= 4;
  };
  ok = ok && check_ray({z0, z0}, 2, "c2");
  ok = ok && check_ray({z0, pauli_at(ws.L, "X", 0), pauli_at(ws.L, "Z", 0)}, 3, "c3");
  report("AC-6", ok, d.str(), timer.seconds());
}

void ac7(const Workspace& ws) {
  Timer timer;
  const double v = 1.5 * ws.v_lr;
  const std::vector<double> horizons = {5.0, 10.0, 20.0};
  // The integrand oscillates at frequencies up to the spectral spread
  // (~2||H||), so the quadrature step must resolve it.
  const double dt = 0.025;
  bool ok = true;
  std::ostringstream d;
  const std::vector<LocalOperator> obs = {pauli_at(ws.L, "Z", 0), pauli_at(ws.L, "X", 0),
                                          pauli_at(ws.L, "Z", 0)};
  for (int n : {2, 3}) {
    const std::vector<LocalOperator> sub =
        n == 2 ? std::vector<LocalOperator>{obs[0], obs[2]} : obs;
    const RayAverageSeries fine =
        ray_average(*ws.ens, sub, n, CumulantKind::classical, v, horizons, dt);
    const RayAverageSeries coarse =
        ray_average(*ws.ens, sub, n, CumulantKind::classical, v, horizons, 2 * dt);
    // relative change normalized against the integrand magnitude so a
    // near-cancelling average does not inflate the percentage
    double mean_mag = 0;
    for (const auto& [t, val] : fine.integrand) mean_mag += std::abs(val);
    mean_mag /= static_cast<double>(fine.integrand.size());
    double worst_change = 0;
    for (std::size_t k = 0; k < horizons.size(); ++k) {
      const double denom = std::max(std::abs(fine.averages[k]), mean_mag);
      worst_change =
          std::max(worst_change, std::abs(coarse.averages[k] - fine.averages[k]) / denom);
    }
    const double a5 = std::abs(fine.averages[0]);
    const double a20 = std::abs(fine.averages[2]);
    d << "n=" << n << ": |avg(20)|=" << a20 << " vs |avg(5)|=" << a5
      << ", halving-dt change " << worst_change * 100 << "% ";
    ok = ok && a20 < a5 && worst_change < 0.01;
  }
  d << "(v=" << v << ", wrap around the ring recorded)";
  report("AC-7", ok, d.str(), timer.seconds());
}

void ac8(const Workspace& ws) {
  Timer timer;
  const double v = ws.v_lr + 0.1;
  const std::vector<LocalOperator> obs = {pauli_at(ws.L, "Z", 0), pauli_at(ws.L, "X", 0),
                                          pauli_at(ws.L, "Z", 0)};
  // 20 random placements at t=0, rejected until the compact window z >= v
  // admits them.
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> site(0, ws.L - 1);
  std::vector<Placement> placements;
  while (placements.size() < 20) {
    Placement p;
    p.ts = {0.0, 0.0, 0.0};
    p.xs = {site(rng), site(rng), site(rng)};
    double z = 0;
    for (int i = 0; i < 3; ++i) {
      int nearest = ws.L;
      for (int j = 0; j < 3; ++j)
        if (j != i) nearest = std::min(nearest, periodic_distance(ws.L, p.xs[i], p.xs[j]));
      z = std::max(z, static_cast<double>(nearest));
    }
    if (z >= v) placements.push_back(std::move(p));
  }
  const MaxMinReport rep = maxmin_bound_check(*ws.ens, obs, placements, CumulantKind::classical, v);
  // The factorization residual should decay with the argmax observable's
  // distance from the rest.
  // Individual placements fluctuate (the residual depends on the full
  // geometry), so compare the per-distance maxima; residuals that underflow
  // the magnitude floor are clamped, not dropped — they are decay evidence.
  std::map<double, double> peak_by_dist;
  for (const auto& s : rep.samples) {
    const double r = std::max(s.lemma_residual, kMagnitudeFloor);
    auto [it, fresh] = peak_by_dist.try_emplace(s.min_dist, r);
    if (!fresh) it->second = std::max(it->second, r);
  }
  bool residual_decays = peak_by_dist.size() >= 2 &&
                         peak_by_dist.rbegin()->second < peak_by_dist.begin()->second;
  std::ostringstream d;
  d << "20 placements, envelope rate=" << rep.envelope.rate << " max_excess=" << rep.max_excess
    << ", lemma residual peaks by min-distance:";
  for (const auto& [dist, peak] : peak_by_dist) d << " d=" << dist << ":" << peak;
  d << " -> " << (residual_decays ? "decays" : "NOT decaying");
  report("AC-8", rep.envelope_ok && residual_decays, d.str(), timer.seconds());
}

void ac9(const Workspace& ws) {
  Timer timer;
  const LocalOperator a = pauli_at(ws.L, "Z", 0);
  const LocalOperator b = pauli_at(ws.L, "X", 0);
  const LocalOperator c = pauli_at(ws.L, "Z", 1);
  bool ok = true;
  double worst_margin = 0;
  for (int x = 1; x <= 5; ++x) {
    const ThreePointSample s = three_point_cluster(*ws.ens, a, b, c, x, 0.0);
    ok = ok && s.holds;
    const double margin = std::abs(s.three_point) -
                          (std::abs(s.reordered) + s.commutator_bound);
    worst_margin = std::max(worst_margin, margin);
  }
  std::ostringstream d;
  d << "inequality chain sample-wise at x=1..5 (worst violation " << worst_margin
    << " <= 1e-10)";
  report("AC-9", ok, d.str(), timer.seconds());
}

void ac10() {
  Timer timer;
  // Determinism across full re-runs (fresh diagonalization, fresh caches):
  // every experiment type at L=10, rendered to CSV text, byte-compared.
  const int L = 10;
  const ChainModel model = tfim_model(L, 1.0, 1.05, 0.2);
  const double v = 2.5;
  auto run_all = [&]() {
    GibbsEnsemble ens = make_ensemble(model);
    const LocalOperator z0 = pauli_at(L, "Z", 0);
    const LocalOperator x0 = pauli_at(L, "X", 0);
    const LocalOperator z1 = pauli_at(L, "Z", 1);
    std::vector<std::string> artifacts;
    artifacts.push_back(render_csv(
        to_csv(scan_cumulant(ens, {z0, z0}, CumulantKind::classical, {1}, {1, 2, 3, 4})), "h"));
    artifacts.push_back(render_csv(
        to_csv(rate_inheritance_report(ens, {z0, z0, z0, z0}, {2, 3, 4},
                                       CumulantKind::classical, {1, 2, 3, 4}, 0.1)),
        "h"));
    artifacts.push_back(
        render_csv(to_csv(lightcone_map(ens, z0, z0, {1, 2, 3}, {0.0, 0.4, 0.8})), "h"));
    artifacts.push_back(render_csv(
        to_csv(spacelike_cumulant_check(ens, {z0, z0}, 2, CumulantKind::classical, v,
                                        {0.6, 1.0, 1.4})),
        "h"));
    std::vector<ThreePointSample> tp;
    for (int x = 1; x <= 3; ++x) tp.push_back(three_point_cluster(ens, z0, x0, z1, x, 0.0));
    artifacts.push_back(render_csv(to_csv(tp), "h"));
    artifacts.push_back(render_csv(
        to_csv(ray_average(ens, {z0, z0}, 2, CumulantKind::classical, v, {1.0, 2.0}, 0.1)),
        "h"));
    std::vector<Placement> placements = {{{0, 3, 5}, {0, 0, 0}},
                                         {{0, 4, 4}, {0, 0, 0}},
                                         {{1, 4, 8}, {0, 0, 0}},
                                         {{0, 5, 5}, {0, 0, 0}},
                                         {{2, 5, 9}, {0, 0, 0}}};
    artifacts.push_back(render_csv(
        to_csv(maxmin_bound_check(ens, {z0, x0, z0}, placements, CumulantKind::classical, 2.0)),
        "h"));
    return artifacts;
  };
  const std::vector<std::string> first = run_all();
  const std::vector<std::string> second = run_all();
  bool ok = first.size() == second.size();
  int identical = 0;
  for (std::size_t i = 0; ok && i < first.size(); ++i)
    if (first[i] == second[i]) ++identical;
  ok = ok && identical == static_cast<int>(first.size());
  std::ostringstream d;
  d << identical << "/" << first.size()
    << " experiment artifacts byte-identical across independent re-runs";
  report("AC-10", ok, d.str(), timer.seconds());
}

}  // namespace

int main() {
  ac1();
  ac2_ac3();
  ac4();
  Workspace ws;
  ac5(ws);
  ac6(ws);
  if (ws.v_lr > 0) {
    ac7(ws);
    ac8(ws);
  } else {
    report("AC-7", false, "skipped: no v_LR estimate from AC-6", 0.0);
    report("AC-8", false, "skipped: no v_LR estimate from AC-6", 0.0);
  }
  ac9(ws);
  ac10();
  if (g_failures) std::printf("%d criteria FAILED\n", g_failures);
  else std::printf("all acceptance criteria PASSED\n");
  return g_failures ? 1 : 0;
}
