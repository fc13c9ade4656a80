#include "cclab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cclab {

namespace {

std::vector<int> full_tuple(int n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 1);
  return idx;
}

Complex point_cumulant(const GibbsEnsemble& ensemble, std::vector<Operand> operands,
                       CumulantKind kind) {
  const int n = static_cast<int>(operands.size());
  MomentProvider provider = make_moment_provider(ensemble, std::move(operands));
  const Complex value = cumulant(kind, provider, full_tuple(n));
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw std::runtime_error("cumulant evaluation produced a non-finite value");
  return value;
}

void check_window(int x, int L, const char* what) {
  if (x < 0 || x > safe_window(L)) {
    std::ostringstream msg;
    msg << what << " " << x << " exceeds the wraparound-safe window [0, " << safe_window(L)
        << "] for L=" << L << ": periodic translations beyond L/2 re-approach the source "
        << "from the other side of the ring";
    throw std::domain_error(msg.str());
  }
}

// ||[B(t), C]|| with the commutator applied matrix-free in the energy
// eigenbasis; the norm is basis independent.
double commutator_norm_timed(const GibbsEnsemble& ensemble, const LocalOperator& b, double t,
                             const LocalOperator& c, double tol) {
  if (t == 0.0) return commutator_norm(b, c);
  const auto n = ensemble.dim();
  auto bh = ensemble.rotated(b);
  auto ch = ensemble.rotated(c);
  const Eigen::VectorXd& e = ensemble.eigenvalues();
  Eigen::VectorXcd ph(n);
  for (Eigen::Index i = 0; i < n; ++i) ph(i) = std::exp(Complex(0, e(i) * t));
  auto apply_bt = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
    w = ph.asDiagonal() * (*bh * (ph.conjugate().asDiagonal() * v).eval());
  };
  auto apply_bt_adj = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
    w = ph.asDiagonal() * (bh->adjoint() * (ph.conjugate().asDiagonal() * v).eval());
  };
  Eigen::VectorXcd t1(n), t2(n);
  auto apply = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
    t1 = *ch * v;
    apply_bt(t1, t2);
    apply_bt(v, t1);
    w = t2 - *ch * t1;
  };
  auto apply_adj = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
    apply_bt_adj(v, t1);
    t2 = ch->adjoint() * t1;
    t1 = ch->adjoint() * v;
    Eigen::VectorXcd t3(n);
    apply_bt_adj(t1, t3);
    w = t2 - t3;
  };
  return spectral_norm(apply, apply_adj, n, tol, 500);
}

}  // namespace

int safe_window(int L) { return L / 2; }

CorrelationSeries scan_cumulant(const GibbsEnsemble& ensemble,
                                const std::vector<LocalOperator>& observables, CumulantKind kind,
                                const std::set<int>& translated, const std::vector<int>& xs,
                                const std::vector<double>& times) {
  const int n = static_cast<int>(observables.size());
  if (n < 1) throw std::invalid_argument("scan requires at least one observable");
  if (translated.empty()) throw std::invalid_argument("translated set must be non-empty");
  for (int i : translated)
    if (i < 1 || i > n) throw std::invalid_argument("translated index outside 1..n");
  if (!times.empty() && static_cast<int>(times.size()) != n)
    throw std::invalid_argument("times must be empty or one per observable");
  if (xs.empty()) throw std::invalid_argument("x-range is empty");
  if (!std::is_sorted(xs.begin(), xs.end(), std::less_equal<>()))
    throw std::invalid_argument("x-range must be strictly increasing");
  const int L = ensemble.sites();
  for (int x : xs) check_window(x, L, "translation x");

  CorrelationSeries series;
  series.descriptor.kind = kind;
  series.descriptor.n = n;
  series.descriptor.translated.assign(translated.begin(), translated.end());
  series.descriptor.beta = ensemble.beta();
  for (int x : xs) {
    std::vector<Operand> operands;
    operands.reserve(n);
    for (int i = 1; i <= n; ++i) {
      LocalOperator op =
          translated.count(i) ? observables[i - 1].translated(x) : observables[i - 1];
      operands.push_back({std::move(op), times.empty() ? 0.0 : times[i - 1]});
    }
    series.samples.push_back(
        {static_cast<double>(x), 0.0, point_cumulant(ensemble, std::move(operands), kind)});
  }
  return series;
}

DecayFit fit_decay(const CorrelationSeries& series, DecayLawKind law) {
  std::vector<double> zs, ys;
  int first = -1, last = -1;
  for (int i = 0; i < static_cast<int>(series.samples.size()); ++i) {
    const auto& s = series.samples[i];
    const double mag = std::abs(s.value);
    if (mag <= kMagnitudeFloor) continue;
    zs.push_back(law == DecayLawKind::exponential ? s.z : std::log1p(s.z));
    ys.push_back(std::log(mag));
    if (first < 0) first = i;
    last = i;
  }
  if (zs.size() < 3)
    throw std::invalid_argument("fit_decay needs at least 3 samples above the magnitude floor");
  const double m = static_cast<double>(zs.size());
  double sz = 0, sy = 0, szz = 0, szy = 0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    sz += zs[i];
    sy += ys[i];
    szz += zs[i] * zs[i];
    szy += zs[i] * ys[i];
  }
  const double denom = m * szz - sz * sz;
  if (std::abs(denom) < 1e-30) throw std::invalid_argument("degenerate abscissa for decay fit");
  const double slope = (m * szy - sz * sy) / denom;
  const double intercept = (sy - slope * sz) / m;
  double rss = 0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * zs[i]);
    rss += r * r;
  }
  DecayFit fit;
  fit.law = law;
  fit.rate = -slope;
  fit.prefactor = std::exp(intercept);
  fit.residual = std::sqrt(rss / m);
  fit.used = static_cast<int>(zs.size());
  fit.window_begin = first;
  fit.window_end = last;
  return fit;
}

RateReport rate_inheritance_report(const GibbsEnsemble& ensemble,
                                   const std::vector<LocalOperator>& observables,
                                   const std::vector<int>& orders, CumulantKind kind,
                                   const std::vector<int>& xs, double tol) {
  if (tol <= 0) throw std::invalid_argument("tolerance must be positive");
  RateReport report;
  report.kind = kind;
  report.tol = tol;
  report.lambda2 = std::numeric_limits<double>::infinity();
  for (int n : orders) {
    if (n < 2 || n > static_cast<int>(observables.size()))
      throw std::invalid_argument("order outside available observables");
    std::vector<LocalOperator> obs(observables.begin(), observables.begin() + n);
    CorrelationSeries series = scan_cumulant(ensemble, obs, kind, {1}, xs);
    RateEntry entry;
    entry.n = n;
    const bool all_zero =
        std::all_of(series.samples.begin(), series.samples.end(),
                    [](const CorrelationSample& s) { return std::abs(s.value) <= kMagnitudeFloor; });
    if (all_zero) {
      entry.degenerate = true;
      entry.lambda = std::numeric_limits<double>::infinity();
      entry.residual = 0.0;
    } else {
      DecayFit fit = fit_decay(series, DecayLawKind::exponential);
      entry.lambda = fit.rate;
      entry.residual = fit.residual;
    }
    if (n == 2 && !entry.degenerate) report.lambda2 = entry.lambda;
    report.entries.push_back(entry);
  }
  for (RateEntry& entry : report.entries) {
    if (entry.degenerate)
      entry.pass = true;
    else if (entry.n == 2)
      entry.pass = entry.lambda > 0 && entry.residual < 0.5;
    else
      entry.pass = entry.lambda >= report.lambda2 - tol;
  }
  report.pass = std::all_of(report.entries.begin(), report.entries.end(),
                            [](const RateEntry& e) { return e.pass; });
  return report;
}

LightconeMap lightcone_map(const GibbsEnsemble& ensemble, const LocalOperator& a,
                           const LocalOperator& b, const std::vector<int>& xs,
                           const std::vector<double>& ts, double theta_scale) {
  const int L = ensemble.sites();
  for (int x : xs) check_window(x, L, "grid x");
  LightconeMap map;
  map.xs = xs;
  map.ts = ts;
  map.theta = theta_scale * a.norm() * b.norm();
  map.norms.resize(static_cast<Eigen::Index>(ts.size()), static_cast<Eigen::Index>(xs.size()));
  // x outer so the eigenbasis rotation of the translated observable is
  // computed once per column.
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const LocalOperator ax = a.translated(xs[j]);
    for (std::size_t i = 0; i < ts.size(); ++i)
      map.norms(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          commutator_norm_timed(ensemble, ax, ts[i], b, 1e-3);
  }
  double sxt = 0, stt = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] <= 0) continue;
    int crossed = -1;
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (map.norms(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) >= map.theta)
        crossed = std::max(crossed, xs[j]);
    if (crossed < 0) continue;
    map.contour.emplace_back(ts[i], static_cast<double>(crossed));
    sxt += crossed * ts[i];
    stt += ts[i] * ts[i];
  }
  if (!map.contour.empty() && stt > 0) map.v_lr = sxt / stt;
  return map;
}

CorrelationSeries spacelike_cumulant_check(const GibbsEnsemble& ensemble,
                                           const std::vector<LocalOperator>& observables, int n,
                                           CumulantKind kind, double v,
                                           const std::vector<double>& ts) {
  if (v <= 0) throw std::invalid_argument("ray velocity must be positive");
  if (n < 2 || n > static_cast<int>(observables.size()))
    throw std::invalid_argument("order outside available observables");
  if (!std::is_sorted(ts.begin(), ts.end(), std::less_equal<>()))
    throw std::invalid_argument("t-range must be strictly increasing");
  const int L = ensemble.sites();
  CorrelationSeries series;
  series.descriptor.kind = kind;
  series.descriptor.n = n;
  series.descriptor.translated = {1};
  series.descriptor.beta = ensemble.beta();
  series.descriptor.velocity = v;
  std::map<int, LocalOperator> translated;  // stable ids so rotations cache
  for (double t : ts) {
    const int x = static_cast<int>(std::floor(v * t));
    check_window(x, L, "ray point floor(v t) =");
    auto it = translated.find(x);
    if (it == translated.end())
      it = translated.emplace(x, observables[0].translated(x)).first;
    std::vector<Operand> operands;
    operands.push_back({it->second, t});
    for (int i = 2; i <= n; ++i) operands.push_back({observables[i - 1], 0.0});
    series.samples.push_back({v * t, t, point_cumulant(ensemble, std::move(operands), kind)});
  }
  return series;
}

ThreePointSample three_point_cluster(const GibbsEnsemble& ensemble, const LocalOperator& a,
                                     const LocalOperator& b, const LocalOperator& c, int x,
                                     double t) {
  const LocalOperator bx = b.translated(x);
  MomentProvider abc = make_moment_provider(ensemble, {{a, 0.0}, {bx, t}, {c, 0.0}});
  MomentProvider acb = make_moment_provider(ensemble, {{a, 0.0}, {c, 0.0}, {bx, t}});
  const std::vector<int> full = {1, 2, 3};
  const std::vector<int> ac = {1, 3};
  const std::vector<int> bonly = {2};
  const Complex omega_ac = abc(ac);
  const Complex omega_b = abc(bonly);  // stationary state: time drops out
  ThreePointSample sample;
  sample.x = x;
  sample.t = t;
  sample.three_point = abc(full) - omega_ac * omega_b;
  sample.reordered = acb(full) - omega_ac * omega_b;
  sample.commutator_bound = a.norm() * commutator_norm_timed(ensemble, bx, t, c, 1e-6);
  sample.holds =
      std::abs(sample.three_point) <= std::abs(sample.reordered) + sample.commutator_bound + 1e-10;
  return sample;
}

RayAverageSeries ray_average(const GibbsEnsemble& ensemble,
                             const std::vector<LocalOperator>& observables, int n,
                             CumulantKind kind, double v, const std::vector<double>& horizons,
                             double dt) {
  if (v <= 0) throw std::invalid_argument("ray velocity must be positive");
  if (dt <= 0) throw std::invalid_argument("quadrature step must be positive");
  if (n < 2 || n > static_cast<int>(observables.size()))
    throw std::invalid_argument("order outside available observables");
  if (horizons.empty() || !std::is_sorted(horizons.begin(), horizons.end(), std::less_equal<>()))
    throw std::invalid_argument("horizons must be non-empty and strictly increasing");
  if (horizons.front() <= 0) throw std::invalid_argument("horizons must be positive");

  const int L = ensemble.sites();
  RayAverageSeries result;
  result.velocity = v;
  result.dt = dt;
  result.horizons = horizons;
  result.step_warning = dt > 0.5 / ensemble.hamiltonian_norm();

  const auto steps = static_cast<long long>(std::llround(horizons.back() / dt));
  for (double horizon : horizons) {
    const auto k = static_cast<long long>(std::llround(horizon / dt));
    if (k < 1 || k > steps || std::abs(k * dt - horizon) > 1e-9 * std::max(1.0, horizon))
      throw std::invalid_argument("each horizon must be a positive multiple of dt");
  }

  std::vector<double> times(static_cast<std::size_t>(steps) + 1);
  for (long long j = 0; j <= steps; ++j) times[static_cast<std::size_t>(j)] = j * dt;

  // The integrand jumps wherever the ray hops to the next lattice site
  // (x = floor(v t)), so composite trapezoid over the uniform grid alone
  // converges only linearly in dt. Quadrature nodes are therefore the grid
  // plus both one-sided limits at every hop boundary, and each smooth piece
  // is integrated with its own endpoint values.
  struct Node {
    double t;
    int x;  // lattice site (mod L) whose translated observable is evaluated
  };
  std::vector<Node> nodes;
  std::vector<std::pair<double, bool>> knots;  // (time, is hop boundary)
  nodes.reserve(times.size() * 2);
  knots.reserve(times.size() * 2);
  for (double t : times) {
    const int x = static_cast<int>(std::floor(v * t));
    if (x > safe_window(L)) result.wrap_warning = true;
    nodes.push_back({t, ((x % L) + L) % L});
    knots.emplace_back(t, false);
  }
  for (long long m = 1; m / v <= times.back() + 1e-12; ++m) {
    const double tau = m / v;
    nodes.push_back({tau, ((static_cast<int>(m - 1) % L) + L) % L});
    nodes.push_back({tau, ((static_cast<int>(m) % L) + L) % L});
    knots.emplace_back(tau, true);
  }

  std::map<int, LocalOperator> translated;
  for (const Node& node : nodes)
    if (!translated.count(node.x)) translated.emplace(node.x, observables[0].translated(node.x));

  // Evaluate grouped by lattice site so each eigenbasis rotation is done
  // once and stays hot in the ensemble cache.
  std::stable_sort(nodes.begin(), nodes.end(),
                   [](const Node& p, const Node& q) { return p.x < q.x; });
  std::map<std::pair<int, double>, Complex> values;
  for (const Node& node : nodes) {
    if (values.count({node.x, node.t})) continue;
    std::vector<Operand> operands;
    operands.push_back({translated.at(node.x), node.t});
    for (int i = 2; i <= n; ++i) operands.push_back({observables[i - 1], 0.0});
    values[{node.x, node.t}] = point_cumulant(ensemble, std::move(operands), kind);
  }

  result.integrand.reserve(times.size());
  for (double t : times) {
    const int x = ((static_cast<int>(std::floor(v * t)) % L) + L) % L;
    result.integrand.emplace_back(t, values.at({x, t}));
  }

  // Collapse knots that coincide (a hop boundary landing on a grid node),
  // keeping the hop representative so both one-sided values are available.
  std::sort(knots.begin(), knots.end());
  std::vector<std::pair<double, bool>> merged;
  for (const auto& knot : knots) {
    if (!merged.empty() && knot.first - merged.back().first < 1e-12) {
      if (knot.second && !merged.back().second) merged.back() = knot;
      continue;
    }
    merged.push_back(knot);
  }

  for (double horizon : horizons) {
    Complex sum = 0;
    for (std::size_t i = 0; i + 1 < merged.size() && merged[i].first < horizon - 1e-9; ++i) {
      const double u = merged[i].first;
      const double w = merged[i + 1].first;
      const int x =
          ((static_cast<int>(std::floor(v * 0.5 * (u + w))) % L) + L) % L;
      sum += 0.5 * (values.at({x, u}) + values.at({x, w})) * (w - u);
    }
    result.averages.push_back(sum / horizon);
  }
  return result;
}

MaxMinReport maxmin_bound_check(const GibbsEnsemble& ensemble,
                                const std::vector<LocalOperator>& observables,
                                const std::vector<Placement>& placements, CumulantKind kind,
                                double v) {
  if (v <= 0) throw std::invalid_argument("velocity must be positive");
  const int n = static_cast<int>(observables.size());
  if (n < 2) throw std::invalid_argument("need at least two observables");
  const int L = ensemble.sites();

  MaxMinReport report;
  for (const Placement& placement : placements) {
    if (static_cast<int>(placement.xs.size()) != n || static_cast<int>(placement.ts.size()) != n)
      throw std::invalid_argument("placement size does not match observable count");
    std::vector<std::set<int>> supports(n);
    for (int i = 0; i < n; ++i)
      for (int s : observables[i].support())
        supports[i].insert((((s + placement.xs[i]) % L) + L) % L);

    MaxMinSample sample;
    sample.z = 0;
    for (int i = 0; i < n; ++i) {
      int nearest = L;
      for (int j = 0; j < n; ++j)
        if (j != i) nearest = std::min(nearest, set_distance(L, supports[i], supports[j]));
      if (nearest > sample.z) {
        sample.z = nearest;
        sample.argmax = i;
        sample.min_dist = nearest;
      }
    }
    for (double t : placement.ts)
      if (std::abs(t) > sample.z / v - 1.0) {
        std::ostringstream msg;
        msg << "placement time " << t << " outside the compact window |t| <= z/v - 1 = "
            << sample.z / v - 1.0;
        throw std::invalid_argument(msg.str());
      }

    std::vector<Operand> operands;
    operands.reserve(n);
    for (int i = 0; i < n; ++i)
      operands.push_back({observables[i].translated(placement.xs[i]), placement.ts[i]});
    MomentProvider provider = make_moment_provider(ensemble, operands);
    sample.value = cumulant(kind, provider, full_tuple(n));

    std::vector<int> rest;
    for (int i = 1; i <= n; ++i)
      if (i != sample.argmax + 1) rest.push_back(i);
    const std::vector<int> lone = {sample.argmax + 1};
    sample.lemma_residual = std::abs(provider(full_tuple(n)) - provider(rest) * provider(lone));
    report.samples.push_back(std::move(sample));
  }

  // Upper envelope: per-z maxima of |value|, fitted log-linearly.
  std::map<double, double> peaks;
  for (const MaxMinSample& s : report.samples) {
    double& peak = peaks[s.z];
    peak = std::max(peak, std::abs(s.value));
  }
  CorrelationSeries peak_series;
  for (const auto& [z, mag] : peaks) peak_series.samples.push_back({z, 0.0, Complex(mag, 0.0)});
  report.envelope = fit_decay(peak_series, DecayLawKind::exponential);
  report.max_excess = 0;
  for (const MaxMinSample& s : report.samples) {
    const double env = report.envelope.prefactor * std::exp(-report.envelope.rate * s.z);
    if (env > 0) report.max_excess = std::max(report.max_excess, std::abs(s.value) / env);
  }
  report.envelope_ok = report.envelope.rate >= 0 && report.max_excess <= 2.0;
  return report;
}

std::vector<LocalOperator> parse_observables(int L, const std::string& spec) {
  std::vector<LocalOperator> out;
  for (const std::string& label : observable_labels(spec)) {
    const auto at = label.find('@');
    if (at == std::string::npos || at == 0 || at + 1 == label.size())
      throw std::invalid_argument("observable '" + label + "' is not of the form PAULIS@site");
    const std::string ops = label.substr(0, at);
    int site = 0;
    try {
      std::size_t used = 0;
      site = std::stoi(label.substr(at + 1), &used);
      if (used != label.size() - at - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("observable '" + label + "' has a malformed site index");
    }
    out.push_back(LocalOperator::from_pauli(pauli_string_at(L, ops, site)));
  }
  if (out.empty()) throw std::invalid_argument("observable spec is empty");
  return out;
}

std::vector<std::string> observable_labels(const std::string& spec) {
  std::vector<std::string> labels;
  std::string token;
  std::istringstream stream(spec);
  while (std::getline(stream, token, ',')) {
    // trim surrounding whitespace
    const auto b = token.find_first_not_of(" \t");
    const auto e = token.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    labels.push_back(token.substr(b, e - b + 1));
  }
  return labels;
}

}  // namespace cclab
