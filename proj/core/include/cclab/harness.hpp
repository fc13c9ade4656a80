#pragma once

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cclab/cumulants.hpp"
#include "cclab/spin_chain.hpp"

namespace cclab {

/// Samples with magnitude below this are numerical zeros and are excluded
/// from decay fits.
inline constexpr double kMagnitudeFloor = 1e-12;

/// Largest translation that keeps periodic distances faithful: beyond L/2
/// the image starts approaching the source from the other side.
int safe_window(int L);

struct SeriesDescriptor {
  CumulantKind kind = CumulantKind::classical;
  int n = 0;
  std::vector<int> translated;  // 1-based observable positions moved by the sweep
  std::vector<std::string> labels;
  double beta = 0.0;
  double velocity = 0.0;  // 0 for pure-space scans
};

struct CorrelationSample {
  double z = 0.0;  // chain separation (ray scans: v*t)
  double time = 0.0;
  Complex value;
};

struct CorrelationSeries {
  SeriesDescriptor descriptor;
  std::vector<CorrelationSample> samples;  // strictly increasing in z
};

enum class DecayLawKind { exponential, power_law };

struct DecayFit {
  DecayLawKind law = DecayLawKind::exponential;
  double rate = 0.0;       // lambda (exponential) or exponent p (power)
  double prefactor = 0.0;  // C in C e^{-lambda z} or C (1+z)^{-p}
  double residual = 0.0;   // RMS of log residuals over the fit window
  int used = 0;            // samples above the magnitude floor
  int window_begin = 0;    // index range of the series actually fitted
  int window_end = 0;
};

/// Sweeps the translation x over `xs`, moving the observables listed in
/// `translated` (1-based) and evolving observable i by times[i-1] when a
/// non-empty `times` is given, and records the order-n cumulant per point.
CorrelationSeries scan_cumulant(const GibbsEnsemble& ensemble,
                                const std::vector<LocalOperator>& observables, CumulantKind kind,
                                const std::set<int>& translated, const std::vector<int>& xs,
                                const std::vector<double>& times = {});

/// Log-linear least squares of |value| against z (exponential) or
/// log(1+z) (power). Throws when fewer than 3 samples clear the floor.
DecayFit fit_decay(const CorrelationSeries& series, DecayLawKind law);

struct RateEntry {
  int n = 0;
  bool degenerate = false;  // series identically zero: exact factorization
  double lambda = 0.0;      // +inf when degenerate
  double residual = 0.0;
  bool pass = false;
};

struct RateReport {
  CumulantKind kind = CumulantKind::classical;
  double tol = 0.1;
  double lambda2 = 0.0;
  std::vector<RateEntry> entries;
  bool pass = false;
};

/// Fits the decay rate of each order in `orders` (using the first n
/// observables for order n) and flags PASS when every lambda_n clears
/// lambda_2 - tol. Series entirely below the floor count as degenerate
/// passes: exact factorization decays faster than anything.
RateReport rate_inheritance_report(const GibbsEnsemble& ensemble,
                                   const std::vector<LocalOperator>& observables,
                                   const std::vector<int>& orders, CumulantKind kind,
                                   const std::vector<int>& xs, double tol = 0.1);

struct LightconeMap {
  std::vector<int> xs;
  std::vector<double> ts;
  Eigen::MatrixXd norms;  // norms(i, j) = ||[A(xs[j], ts[i]), B]||
  double theta = 0.0;
  std::vector<std::pair<double, double>> contour;  // (t, largest x with norm >= theta)
  std::optional<double> v_lr;                      // absent when theta is never crossed
};

/// Commutator-norm map over the grid; v_LR is the least-squares slope
/// (through the origin) of the theta-contour over the t rows that cross.
LightconeMap lightcone_map(const GibbsEnsemble& ensemble, const LocalOperator& a,
                           const LocalOperator& b, const std::vector<int>& xs,
                           const std::vector<double>& ts, double theta_scale = 1e-2);

/// Samples c_n(A_1(floor(v t), t), A_2, ..., A_n) along the space-like ray;
/// sample z = v*t. Refuses rays leaving the wraparound-safe window.
CorrelationSeries spacelike_cumulant_check(const GibbsEnsemble& ensemble,
                                           const std::vector<LocalOperator>& observables, int n,
                                           CumulantKind kind, double v,
                                           const std::vector<double>& ts);

struct ThreePointSample {
  int x = 0;
  double t = 0.0;
  Complex three_point;   // omega(A B(x,t) C) - omega(AC) omega(B(x,t))
  Complex reordered;     // omega(A C B(x,t)) - omega(AC) omega(B(x,t))
  double commutator_bound = 0.0;  // ||A|| ||[B(x,t), C]||
  bool holds = false;    // |three_point| <= |reordered| + bound + 1e-10
};

ThreePointSample three_point_cluster(const GibbsEnsemble& ensemble, const LocalOperator& a,
                                     const LocalOperator& b, const LocalOperator& c, int x,
                                     double t);

struct RayAverageSeries {
  double velocity = 0.0;
  double dt = 0.0;
  std::vector<double> horizons;
  std::vector<Complex> averages;  // (1/T) trapezoid of the integrand on [0, T]
  std::vector<std::pair<double, Complex>> integrand;  // (t, c_n at floor(v t))
  bool step_warning = false;  // dt coarser than 0.5/||H||
  bool wrap_warning = false;  // floor(v t) left the safe window, wrapped mod L
};

/// Trapezoidal time average of c_n(A_1(floor(v t) mod L, t), A_2, ...) per
/// horizon. Rays that leave the safe window wrap around the ring and set
/// wrap_warning instead of failing.
RayAverageSeries ray_average(const GibbsEnsemble& ensemble,
                             const std::vector<LocalOperator>& observables, int n,
                             CumulantKind kind, double v, const std::vector<double>& horizons,
                             double dt);

struct Placement {
  std::vector<int> xs;     // per-observable translation
  std::vector<double> ts;  // per-observable time
};

struct MaxMinSample {
  double z = 0.0;  // max over i of min over j != i of support distance
  Complex value;
  int argmax = 0;        // observable index attaining the max-min (0-based)
  double min_dist = 0.0; // its distance to the rest
  double lemma_residual = 0.0;  // |omega(full) - omega(rest) omega(argmax)|
};

struct MaxMinReport {
  std::vector<MaxMinSample> samples;
  DecayFit envelope;       // fit of per-z maxima of |value|
  double max_excess = 0.0; // largest |value| / envelope(z) over all samples
  bool envelope_ok = false;  // rate >= 0 and max_excess <= 2
};

/// Evaluates the order-n cumulant for each placement, computes the max-min
/// separation z, fits a monotone envelope of |value| against z, and reports
/// the single-observable factorization residual at the argmax index.
/// Placements whose times leave the window |t_i| <= z/v - 1 are refused.
MaxMinReport maxmin_bound_check(const GibbsEnsemble& ensemble,
                                const std::vector<LocalOperator>& observables,
                                const std::vector<Placement>& placements, CumulantKind kind,
                                double v);

/// Observable spec of the form "Z@0,X@3,ZZ@5": Pauli strings anchored at a
/// site, comma separated, one observable per entry.
std::vector<LocalOperator> parse_observables(int L, const std::string& spec);
std::vector<std::string> observable_labels(const std::string& spec);

}  // namespace cclab
