#pragma once

// Numerical checks of closeness-of-solutions results: sup-distance between
// two flows, the Gronwall-type finite-horizon bound, O(eps) sweeps on
// O(1/eps) horizons and long-horizon sweeps under stability.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geoavg/averaging.hpp"
#include "geoavg/flows.hpp"
#include "geoavg/geodesics.hpp"
#include "geoavg/stability.hpp"

namespace geoavg {

inline std::vector<double> uniform_times(double t0, double t1, int n) {
  if (n < 1) throw ContractViolation("uniform_times: need at least one sample");
  if (n == 1) return {t1};
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = (i + 1 == n) ? t1 : t0 + (t1 - t0) * i / (n - 1);
  return t;
}

struct DistanceSeries {
  std::vector<double> times;
  std::vector<double> distances;
  std::vector<ChartPoint> first;
  std::vector<ChartPoint> second;
  bool upper_bound = false;
};

/// Integrates both fields from the same initial condition and measures the
/// Riemannian distance at the given times.
inline DistanceSeries distance_series(const ManifoldSpec& M, const TimeVaryingField& f1,
                                      const TimeVaryingField& f2, const ChartPoint& x0, double t0,
                                      const std::vector<double>& times, double step,
                                      const GeodesicSolverConfig& cfg = {}) {
  const Trajectory a = flow_at(M, f1, t0, x0, times, step);
  const Trajectory b = flow_at(M, f2, t0, x0, times, step);
  DistanceSeries s;
  s.times = times;
  s.distances.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& p = a.samples[i].point;
    const auto& q = b.samples[i].point;
    if (p.chart == q.chart && (p.coords - q.coords).cwiseAbs().maxCoeff() == 0.0) {
      s.distances.push_back(0.0);
    } else {
      const DistanceResult d = distance_detailed(M, p, q, cfg);
      s.upper_bound = s.upper_bound || d.upper_bound;
      s.distances.push_back(d.value);
    }
    s.first.push_back(p);
    s.second.push_back(q);
  }
  return s;
}

struct SupDistance {
  double value = 0.0;
  double argmax_t = 0.0;
  int samples = 0;
  bool upper_bound = false;
};

inline SupDistance sup_of(const DistanceSeries& s, std::size_t count) {
  SupDistance out{0.0, s.times.empty() ? 0.0 : s.times.front(), static_cast<int>(count), s.upper_bound};
  for (std::size_t i = 0; i < count && i < s.distances.size(); ++i) {
    if (s.distances[i] > out.value) {
      out.value = s.distances[i];
      out.argmax_t = s.times[i];
    }
  }
  return out;
}

/// max over n_samples uniformly spaced times in [t0, t1] of
/// d(Phi_f1(t), Phi_f2(t)), with the time where it is attained.
inline SupDistance sup_distance(const ManifoldSpec& M, const TimeVaryingField& f1, const TimeVaryingField& f2,
                                const ChartPoint& x0, double t0, double t1, double step, int n_samples = 400,
                                const GeodesicSolverConfig& cfg = {}) {
  if (t1 < t0) throw ContractViolation("sup_distance: t1 must be >= t0");
  const auto s = distance_series(M, f1, f2, x0, t0, uniform_times(t0, t1, n_samples), step, cfg);
  return sup_of(s, s.times.size());
}

// ---------------------------------------------------------------------------
// Gronwall constants

struct GronwallConstants {
  double K = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  std::string domain_descriptor;

  double rate() const { return C1 + 2.0 * C2; }
};

/// Covariant differential (nabla f)^i_j = d_j f^i + Gamma^i_jk f^k at (x, t).
inline Mat covariant_differential(const ManifoldSpec& M, const TimeVaryingField& f, const ChartPoint& x,
                                  double t) {
  const int n = M.dim;
  Mat D(n, n);
  for (int j = 0; j < n; ++j) {
    const double h = fd_step(x.coords[j]);
    ChartPoint xp = x, xm = x;
    xp.coords[j] += h;
    xm.coords[j] -= h;
    D.col(j) = (f.eval(xp, t) - f.eval(xm, t)) / (2.0 * h);
  }
  const Christoffel G = christoffel_at(M, x);
  const Vec fx = f.eval(x, t);
  for (int i = 0; i < n; ++i) D.row(i) += (G.gamma[i] * fx).transpose();
  return D;
}

/// max_{v != 0} |A v|_g / |v|_g.
inline double operator_norm(const Mat& g, const Mat& A) {
  const Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("operator_norm: metric not positive definite");
  const Mat U = llt.matrixU();  // g = U^T U
  const Mat B = U * A * U.triangularView<Eigen::Upper>().solve(Mat::Identity(g.rows(), g.cols()));
  return Eigen::JacobiSVD<Mat>(B).singularValues()[0];
}

/// Time grid for constant estimation: one period suffices for periodic fields.
inline std::vector<double> constant_time_grid(const TimeVaryingField& f1, const TimeVaryingField& f2, double t_lo,
                                              double t_hi, int n) {
  std::optional<double> P;
  bool periodic = true;
  for (const auto* f : {&f1, &f2}) {
    if (f->autonomous) continue;
    if (!f->period) {
      periodic = false;
      continue;
    }
    if (P && *P != *f->period) periodic = false;
    P = f->period;
  }
  if (f1.autonomous && f2.autonomous) return {t_lo};
  double hi = t_hi;
  if (periodic && P && t_hi - t_lo > *P) hi = t_lo + *P;
  if (hi <= t_lo) return {t_lo};
  return uniform_times(t_lo, hi, n);
}

/// K = sup |f1 - f2|_g and C_i = sup |nabla f_i| over samples x time window.
inline GronwallConstants gronwall_constants(const ManifoldSpec& M, const TimeVaryingField& f1,
                                            const TimeVaryingField& f2, const std::vector<ChartPoint>& domain_samples,
                                            double t_lo, double t_hi, int time_samples = 129) {
  if (domain_samples.empty()) throw ContractViolation("gronwall_constants: empty sample set");
  if (t_hi < t_lo) throw ContractViolation("gronwall_constants: empty time window");
  const auto times = constant_time_grid(f1, f2, t_lo, t_hi, time_samples);
  GronwallConstants c;
  for (const ChartPoint& x : domain_samples) {
    const Mat g = metric_at(M, x);
    std::optional<Vec> f2_fixed;
    if (f2.autonomous) f2_fixed = f2.eval(x, t_lo);
    std::optional<Vec> f1_fixed;
    if (f1.autonomous) f1_fixed = f1.eval(x, t_lo);
    if (f1.autonomous) c.C1 = std::max(c.C1, operator_norm(g, covariant_differential(M, f1, x, t_lo)));
    if (f2.autonomous) c.C2 = std::max(c.C2, operator_norm(g, covariant_differential(M, f2, x, t_lo)));
    for (double t : times) {
      const Vec a = f1_fixed ? *f1_fixed : f1.eval(x, t);
      const Vec b = f2_fixed ? *f2_fixed : f2.eval(x, t);
      const Vec d = a - b;
      c.K = std::max(c.K, std::sqrt(std::max(0.0, d.dot(g * d))));
      if (!f1.autonomous) c.C1 = std::max(c.C1, operator_norm(g, covariant_differential(M, f1, x, t)));
      if (!f2.autonomous) c.C2 = std::max(c.C2, operator_norm(g, covariant_differential(M, f2, x, t)));
    }
  }
  if (!std::isfinite(c.K) || !std::isfinite(c.C1) || !std::isfinite(c.C2)) {
    throw NumericalError("gronwall_constants: non-finite constant");
  }
  c.domain_descriptor = std::to_string(domain_samples.size()) + " points x " + std::to_string(times.size()) +
                        " times in [" + std::to_string(times.front()) + ", " + std::to_string(times.back()) + "]";
  return c;
}

/// Grid over the per-chart bounding boxes of `points`, each box inflated by
/// `inflate` of its width on every side and clipped to the chart domain.
inline std::vector<ChartPoint> bounding_region_samples(const ManifoldSpec& M, const std::vector<ChartPoint>& points,
                                                       double inflate = 0.1, int per_axis = 0) {
  const int n = M.dim;
  if (per_axis <= 0) per_axis = n == 1 ? 201 : n == 2 ? 21 : n == 3 ? 7 : 4;
  std::map<std::string, std::pair<Vec, Vec>> boxes;
  for (const auto& p : points) {
    auto it = boxes.find(p.chart);
    if (it == boxes.end()) {
      boxes.emplace(p.chart, std::make_pair(p.coords, p.coords));
    } else {
      it->second.first = it->second.first.cwiseMin(p.coords);
      it->second.second = it->second.second.cwiseMax(p.coords);
    }
  }
  std::vector<ChartPoint> out;
  for (const auto& [chart, box] : boxes) {
    const Box& dom = find_chart(M, chart).domain;
    Vec lo = box.first, hi = box.second;
    for (int i = 0; i < n; ++i) {
      double w = hi[i] - lo[i];
      if (w <= 0.0) w = 1e-3 * std::max(1.0, std::abs(lo[i]));
      lo[i] -= inflate * w;
      hi[i] += inflate * w;
      const double dw = dom.hi[i] - dom.lo[i];
      const double pad = std::isfinite(dw) ? 1e-6 * dw : 0.0;
      lo[i] = std::max(lo[i], dom.lo[i] + pad);
      hi[i] = std::min(hi[i], dom.hi[i] - pad);
    }
    std::vector<int> idx(n, 0);
    while (true) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (per_axis - 1);
      out.push_back({chart, x});
      int k = 0;
      while (k < n && ++idx[k] == per_axis) idx[k++] = 0;
      if (k == n) break;
    }
  }
  return out;
}

enum class Verdict { Pass, Fail, Inconclusive, InsufficientPoints, Refused };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::InsufficientPoints: return "insufficient points";
    default: return "refused";
  }
}

struct BoundSample {
  double t;
  double distance;
  double bound;
  double margin;
};

struct Theorem3Verdict {
  Verdict verdict = Verdict::Inconclusive;
  GronwallConstants constants;
  std::vector<BoundSample> samples;
  double min_margin = 0.0;
  std::string note;
};

/// Checks d(t) <= K (t1 - t0) exp[(C1 + 2 C2)(t - t0)] on n_samples times.
inline Theorem3Verdict verify_theorem3(const ManifoldSpec& M, const TimeVaryingField& f1,
                                       const TimeVaryingField& f2, const ChartPoint& x0, double t0, double t1,
                                       double step, int n_samples = 200, const GeodesicSolverConfig& cfg = {}) {
  Theorem3Verdict out;
  const DistanceSeries s = distance_series(M, f1, f2, x0, t0, uniform_times(t0, t1, n_samples), step, cfg);
  try {
    std::vector<ChartPoint> pts;
    for (const auto* f : {&f1, &f2}) {
      const Trajectory tr = flow(M, *f, t0, t1, x0, step);
      for (const auto& smp : tr.samples) pts.push_back(smp.point);
    }
    out.constants = gronwall_constants(M, f1, f2, bounding_region_samples(M, pts), t0, t1);
  } catch (const std::exception& e) {
    out.verdict = Verdict::Inconclusive;
    out.note = std::string("constant estimation failed: ") + e.what();
    return out;
  }
  const double K = out.constants.K, C = out.constants.rate();
  out.min_margin = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double t = s.times[i];
    const double b = K * (t1 - t0) * std::exp(C * (t - t0));
    const double m = b - s.distances[i];
    out.samples.push_back({t, s.distances[i], b, m});
    out.min_margin = std::min(out.min_margin, m);
    if (!(s.distances[i] <= b)) ok = false;
  }
  out.verdict = ok ? Verdict::Pass : Verdict::Fail;
  out.note = "constants estimated on the trajectories' per-chart bounding boxes inflated by 10%; "
             "valid if that region contains the hull of the interpolating flows";
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepConfig {
  std::vector<double> epsilons;
  double horizon_constant = 10.0;  // t1 - t0 = c / eps
  ChartPoint x0;
  double t0 = 0.0;
  std::optional<double> step;  // default: default_step(T)
  int n_samples = 400;
  int quadrature_nodes = kDefaultQuadratureNodes;
  double slope_lo = 0.7;
  double slope_hi = 1.3;
  bool parallel = true;
  GeodesicSolverConfig distance;

  void validate() const {
    if (epsilons.empty()) throw ContractViolation("sweep: no epsilon values");
    for (double e : epsilons) {
      if (!(e > 0.0)) throw ContractViolation("sweep: epsilons must be positive");
    }
    if (!(horizon_constant > 0.0)) throw ContractViolation("sweep: horizon constant must be > 0");
    if (n_samples < 2) throw ContractViolation("sweep: need >= 2 distance samples");
  }
};

struct EpsilonRecord {
  double epsilon = 0.0;
  double horizon = 0.0;
  double sup_distance = 0.0;
  double argmax_t = 0.0;
  int samples = 0;
  bool ok = true;
  bool upper_bound = false;
  std::string error;
  bool escaped = false;
  double slope_contrib = 0.0;
  // long-horizon sweeps: sup over the short horizon c/eps
  std::optional<double> short_sup_distance;
};

struct ClosenessReport {
  std::string kind;
  std::string system;
  std::vector<EpsilonRecord> records;
  std::optional<double> slope;
  std::string slope_status;
  Verdict verdict = Verdict::Inconclusive;
  std::string verdict_reason;
  double slope_lo = 0.7, slope_hi = 1.3;
  std::optional<StabilityResult> stability;
  std::map<std::string, double> constants;
  std::vector<std::string> notes;
};

/// Least-squares slope of log D vs log eps over successful positive records;
/// writes each record's additive share of the slope into slope_contrib.
inline std::optional<double> fit_loglog_slope(std::vector<EpsilonRecord>& recs) {
  std::vector<std::size_t> use;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].ok && recs[i].sup_distance > 0.0) use.push_back(i);
  }
  if (use.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (auto i : use) {
    mx += std::log(recs[i].epsilon);
    my += std::log(recs[i].sup_distance);
  }
  mx /= use.size();
  my /= use.size();
  double sxx = 0;
  for (auto i : use) sxx += std::pow(std::log(recs[i].epsilon) - mx, 2);
  if (sxx <= 0) return std::nullopt;
  double slope = 0;
  for (auto i : use) {
    const double c = (std::log(recs[i].epsilon) - mx) * (std::log(recs[i].sup_distance) - my) / sxx;
    recs[i].slope_contrib = c;
    slope += c;
  }
  return slope;
}

namespace detail {

template <class Fn>
std::vector<EpsilonRecord> run_per_epsilon(const std::vector<double>& eps, bool parallel, Fn&& fn) {
  std::vector<EpsilonRecord> out(eps.size());
  auto guarded = [&](double e) {
    try {
      return fn(e);
    } catch (const EscapeError& ex) {
      EpsilonRecord r;
      r.epsilon = e;
      r.ok = false;
      r.escaped = true;
      r.error = ex.what();
      return r;
    } catch (const std::exception& ex) {
      EpsilonRecord r;
      r.epsilon = e;
      r.ok = false;
      r.error = ex.what();
      return r;
    }
  };
  if (parallel && eps.size() > 1) {
    std::vector<std::future<EpsilonRecord>> jobs;
    for (double e : eps) jobs.push_back(std::async(std::launch::async, guarded, e));
    for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < eps.size(); ++i) out[i] = guarded(eps[i]);
  }
  return out;
}

inline double exact_match_tol() { return 1e-12; }

}  // namespace detail

/// D(eps) = sup distance between the eps f and eps f_hat flows on
/// [t0, t0 + c/eps] for every eps, with a log-log slope fit.
inline ClosenessReport epsilon_sweep(const ManifoldSpec& M, const TimeVaryingField& f, double T,
                                     const SweepConfig& cfg) {
  cfg.validate();
  const AveragedField avg = average_field(f, T, cfg.quadrature_nodes);
  const TimeVaryingField fhat = avg.as_field();
  const double step = cfg.step.value_or(default_step(T));
  ClosenessReport rep;
  rep.kind = "epsilon_sweep";
  rep.system = f.label;
  rep.slope_lo = cfg.slope_lo;
  rep.slope_hi = cfg.slope_hi;
  rep.records = detail::run_per_epsilon(cfg.epsilons, cfg.parallel, [&](double e) {
    EpsilonRecord r;
    r.epsilon = e;
    r.horizon = cfg.horizon_constant / e;
    const auto sd = sup_distance(M, scaled(f, e), scaled(fhat, e), cfg.x0, cfg.t0, cfg.t0 + r.horizon, step,
                                 cfg.n_samples, cfg.distance);
    r.sup_distance = sd.value;
    r.argmax_t = sd.argmax_t;
    r.samples = sd.samples;
    r.upper_bound = sd.upper_bound;
    return r;
  });
  bool all_ok = true, all_zero = true;
  for (const auto& r : rep.records) {
    all_ok = all_ok && r.ok;
    all_zero = all_zero && r.ok && r.sup_distance < detail::exact_match_tol();
  }
  if (all_ok && all_zero) {
    rep.slope_status = "exact match";
    rep.verdict = Verdict::Pass;
    rep.verdict_reason = "averaged and nominal flows coincide";
    return rep;
  }
  rep.slope = fit_loglog_slope(rep.records);
  std::size_t usable = 0;
  for (const auto& r : rep.records) usable += (r.ok && r.sup_distance > 0.0);
  if (usable < 3) {
    rep.slope_status = "insufficient points";
    rep.verdict = Verdict::InsufficientPoints;
    rep.verdict_reason = "slope fit needs at least 3 successful epsilon values";
    return rep;
  }
  rep.slope_status = "fitted";
  const bool in_window = *rep.slope >= cfg.slope_lo && *rep.slope <= cfg.slope_hi;
  rep.verdict = in_window ? Verdict::Pass : Verdict::Fail;
  rep.verdict_reason = "log-log slope " + std::to_string(*rep.slope) + (in_window ? " inside " : " outside ") + "[" +
                       std::to_string(cfg.slope_lo) + ", " + std::to_string(cfg.slope_hi) + "]";
  if (!all_ok) rep.verdict_reason += "; some epsilon runs failed";
  return rep;
}

struct LongHorizonConfig {
  SweepConfig sweep;
  double long_factor = 50.0 / 10.0;  // c_long = long_factor * c; default c_long = 50 when c = 10
  double max_ratio_spread = 0.5;     // D(eps)/eps may vary by < 50% across eps
  double max_horizon_growth = 0.5;   // D(c_long/eps) / D(c/eps) - 1 < 50%
  double delta = 0.1;                // fixed-delta acceptance when stability is only asymptotic
  std::vector<double> probe_radii{0.25, 0.75};
  double probe_horizon = 20.0;
  StabilityProbeOptions probe;
};

/// Long-horizon version of epsilon_sweep. Runs a stability probe of the
/// averaged field at `center` first and refuses to give a verdict when the
/// centre is not (numerically) asymptotically stable.
inline ClosenessReport long_horizon_sweep(const ManifoldSpec& M, const TimeVaryingField& f, double T,
                                          const ChartPoint& center, const LongHorizonConfig& cfg) {
  cfg.sweep.validate();
  ClosenessReport rep;
  rep.kind = "long_horizon_sweep";
  rep.system = f.label;
  rep.slope_lo = cfg.sweep.slope_lo;
  rep.slope_hi = cfg.sweep.slope_hi;
  const AveragedField avg = average_field(f, T, cfg.sweep.quadrature_nodes);
  const TimeVaryingField fhat = avg.as_field();
  const double c = cfg.sweep.horizon_constant;
  const double c_long = cfg.long_factor * c;
  rep.constants["c"] = c;
  rep.constants["c_long"] = c_long;

  try {
    StabilityProbeOptions po = cfg.probe;
    po.geodesic = cfg.sweep.distance;
    rep.stability = stability_probe(M, fhat, center, cfg.probe_radii, cfg.probe_horizon, po);
  } catch (const ContractViolation& e) {
    rep.verdict = Verdict::Refused;
    rep.verdict_reason = std::string("stability probe inconclusive: ") + e.what();
    rep.slope_status = "skipped";
    return rep;
  }
  if (rep.stability->classification == StabilityClass::Inconclusive) {
    rep.verdict = Verdict::Refused;
    rep.verdict_reason = "stability probe inconclusive: " + rep.stability->note;
    rep.slope_status = "skipped";
    return rep;
  }
  {
    const double d0 = distance(M, cfg.sweep.x0, center, cfg.sweep.distance);
    const double rmax = *std::max_element(cfg.probe_radii.begin(), cfg.probe_radii.end());
    rep.constants["x0_distance_to_center"] = d0;
    rep.constants["probe_radius_max"] = rmax;
    if (d0 > rmax) rep.notes.push_back("x0 lies outside the largest probed radius");
  }

  const double step = cfg.sweep.step.value_or(default_step(T));
  const int n = cfg.sweep.n_samples;
  rep.records = detail::run_per_epsilon(cfg.sweep.epsilons, cfg.sweep.parallel, [&](double e) {
    EpsilonRecord r;
    r.epsilon = e;
    r.horizon = c_long / e;
    const double t0 = cfg.sweep.t0;
    const auto short_t = uniform_times(t0, t0 + c / e, n);
    const auto long_t = uniform_times(t0, t0 + c_long / e, n);
    std::set<double> all(short_t.begin(), short_t.end());
    all.insert(long_t.begin(), long_t.end());
    const std::vector<double> times(all.begin(), all.end());
    const auto s = distance_series(M, scaled(f, e), scaled(fhat, e), cfg.sweep.x0, t0, times, step,
                                   cfg.sweep.distance);
    const std::size_t n_short =
        static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t0 + c / e) - times.begin());
    const auto sd_short = sup_of(s, n_short);
    const auto sd_long = sup_of(s, times.size());
    r.sup_distance = sd_long.value;
    r.argmax_t = sd_long.argmax_t;
    r.samples = static_cast<int>(times.size());
    r.upper_bound = s.upper_bound;
    r.short_sup_distance = sd_short.value;
    return r;
  });
  bool all_ok = true, all_zero = true;
  for (const auto& r : rep.records) {
    all_ok = all_ok && r.ok;
    all_zero = all_zero && r.ok && r.sup_distance < detail::exact_match_tol();
  }
  rep.slope = fit_loglog_slope(rep.records);
  rep.slope_status = rep.slope ? (rep.records.size() >= 3 ? "fitted" : "two-point") : "insufficient points";
  if (!all_ok) {
    rep.verdict = Verdict::Fail;
    rep.verdict_reason = "some epsilon runs failed";
    return rep;
  }
  if (all_zero) {
    rep.slope_status = "exact match";
    rep.verdict = Verdict::Pass;
    rep.verdict_reason = "averaged and nominal flows coincide on every horizon";
    return rep;
  }
  if (rep.stability->classification == StabilityClass::Asymptotic) {
    const auto smallest = std::min_element(rep.records.begin(), rep.records.end(),
                                           [](const auto& a, const auto& b) { return a.epsilon < b.epsilon; });
    const bool ok = smallest->sup_distance <= cfg.delta;
    rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
    rep.verdict_reason = "asymptotic stability only: D at smallest eps " + std::to_string(smallest->sup_distance) +
                         (ok ? " <= " : " > ") + "delta " + std::to_string(cfg.delta);
    return rep;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, growth = 0.0;
  for (const auto& r : rep.records) {
    const double ratio = r.sup_distance / r.epsilon;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (*r.short_sup_distance > 0.0) growth = std::max(growth, r.sup_distance / *r.short_sup_distance - 1.0);
    else if (r.sup_distance > 0.0) growth = std::numeric_limits<double>::infinity();
  }
  const double spread = lo > 0.0 ? hi / lo - 1.0 : std::numeric_limits<double>::infinity();
  rep.constants["ratio_spread"] = spread;
  rep.constants["horizon_growth"] = growth;
  const bool ok = spread < cfg.max_ratio_spread && growth < cfg.max_horizon_growth;
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
  rep.verdict_reason = "D/eps spread " + std::to_string(spread) + ", horizon growth " + std::to_string(growth) +
                       (ok ? " (both < limits)" : " (limit exceeded)");
  return rep;
}

}  // namespace geoavg
