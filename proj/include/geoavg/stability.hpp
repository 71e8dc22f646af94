#pragma once

// Lyapunov-function probes and numerical stability classification of
// equilibria.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "geoavg/field.hpp"
#include "geoavg/flows.hpp"
#include "geoavg/geodesics.hpp"

namespace geoavg {

struct LyapunovProbe {
  std::function<double(const Vec&)> v;
  std::function<Vec(const Vec&)> gradient;  // optional
  ChartPoint center;
};

inline Vec probe_gradient(const LyapunovProbe& probe, const Vec& x) {
  if (probe.gradient) return probe.gradient(x);
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x[i]);
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (probe.v(xp) - probe.v(xm)) / (2.0 * h);
  }
  return g;
}

/// L_f v = dv(f) at x (x in the probe's chart).
inline double lie_derivative(const LyapunovProbe& probe, const TimeVaryingField& f, const ChartPoint& x,
                             double t = 0.0) {
  if (x.chart != probe.center.chart) {
    throw ContractViolation("lie_derivative: point must be in the probe chart '" + probe.center.chart + "'");
  }
  return probe_gradient(probe, x.coords).dot(f.eval(x, t));
}

/// Checks v(center) = 0 and v > 0 on rings around the centre (coordinate
/// radii). Returns false on the first violation.
inline bool lyapunov_positive(const LyapunovProbe& probe, const std::vector<double>& radii, int per_ring = 16) {
  if (std::abs(probe.v(probe.center.coords)) > 1e-14) return false;
  const auto n = probe.center.coords.size();
  for (double r : radii) {
    for (int k = 0; k < per_ring; ++k) {
      Vec d = Vec::Zero(n);
      const double a = 2.0 * std::numbers::pi * k / per_ring;
      d[0] = std::cos(a);
      if (n > 1) d[1] = std::sin(a);
      if (n > 2) d[k % n] += 0.5;
      d.normalize();
      if (!(probe.v(probe.center.coords + r * d) > 0.0)) return false;
    }
  }
  return true;
}

struct LyapunovScanSample {
  ChartPoint point;
  double value;
  double lie_derivative;
};

/// Evaluates v and L_f v on rings of the given coordinate radii.
inline std::vector<LyapunovScanSample> lyapunov_scan(const LyapunovProbe& probe, const TimeVaryingField& f,
                                                     const std::vector<double>& radii, int per_ring = 16) {
  std::vector<LyapunovScanSample> out;
  const auto n = probe.center.coords.size();
  for (double r : radii) {
    for (int k = 0; k < per_ring; ++k) {
      Vec d = Vec::Zero(n);
      const double a = 2.0 * std::numbers::pi * k / per_ring;
      d[0] = std::cos(a);
      if (n > 1) d[1] = std::sin(a);
      ChartPoint x{probe.center.chart, probe.center.coords + r * d};
      out.push_back({x, probe.v(x.coords), lie_derivative(probe, f, x)});
    }
  }
  return out;
}

enum class StabilityClass { Exponential, Asymptotic, Inconclusive };

inline const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Exponential: return "exponential";
    case StabilityClass::Asymptotic: return "asymptotic";
    default: return "inconclusive";
  }
}

struct ProbeRun {
  double radius;
  Vec direction;
  double rate_first = 0.0;   // mean log-decay rate, first half of resolved window
  double rate_second = 0.0;  // same, second half
  double tail_rate = 0.0;    // least-squares slope of -log d over second half
  double final_ratio = 1.0;  // d(end)/d(0)
  bool exponential = false;
  bool decaying = false;
};

struct StabilityResult {
  StabilityClass classification = StabilityClass::Inconclusive;
  double lambda = 0.0;  // smallest tail rate over runs
  double k = 0.0;       // smallest k with d <= k d0 exp(-lambda t) on all samples
  std::vector<ProbeRun> runs;
  std::string note;
};

struct StabilityProbeOptions {
  int samples = 200;
  double step = 1e-2;
  double equilibrium_tol = 1e-10;
  /// second-half / first-half decay-rate ratio required for an exponential fit
  double min_rate_ratio = 0.5;
  GeodesicSolverConfig geodesic;
};

namespace detail {

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t a, std::size_t b) {
  const double n = static_cast<double>(b - a);
  double sx = 0, sy = 0;
  for (std::size_t i = a; i < b; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = a; i < b; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace detail

/// Flows f from points at g-distance `radius` around the equilibrium and
/// classifies the decay of d(x(t), center).
inline StabilityResult stability_probe(const ManifoldSpec& M, const TimeVaryingField& f, const ChartPoint& center,
                                       const std::vector<double>& radii, double horizon,
                                       const StabilityProbeOptions& opt = {}) {
  check_point(M, center);
  const Vec fc = f.eval(center, 0.0);
  const double fnorm = std::sqrt(std::max(0.0, fc.dot(metric_at(M, center) * fc)));
  if (!(fnorm < opt.equilibrium_tol)) {
    throw ContractViolation("stability_probe: centre is not an equilibrium (|f| = " + std::to_string(fnorm) + ")");
  }
  if (radii.empty() || !(horizon > 0.0) || opt.samples < 8) {
    throw ContractViolation("stability_probe: need radii, horizon > 0 and >= 8 samples");
  }
  StabilityResult res;
  std::vector<double> times(opt.samples);
  for (int i = 0; i < opt.samples; ++i) times[i] = horizon * i / (opt.samples - 1);

  bool all_exp = true, all_decay = true;
  double lambda = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dists;
  for (double rho : radii) {
    for (const Vec& u : probe_directions(M, center)) {
      ProbeRun run{rho, u};
      const ChartPoint x0 = exp_map(M, center, {center, rho * u}, opt.geodesic);
      const Trajectory tr = flow_at(M, f, 0.0, x0, times, opt.step);
      std::vector<double> d(times.size()), logd(times.size());
      for (std::size_t i = 0; i < times.size(); ++i) {
        d[i] = distance(M, tr.samples[i].point, center, opt.geodesic);
      }
      const double d0 = d[0];
      const double floor = std::max(1e-10, 1e-8 * d0);
      std::size_t K = 0;
      while (K < d.size() && d[K] > floor) {
        logd[K] = std::log(d[K]);
        ++K;
      }
      run.final_ratio = d.back() / d0;
      run.decaying = d.back() < 0.5 * d0 && d.back() <= d[d.size() / 2];
      if (K >= 8) {
        const std::size_t mid = K / 2;
        run.rate_first = (logd[0] - logd[mid]) / (times[mid] - times[0]);
        run.rate_second = (logd[mid] - logd[K - 1]) / (times[K - 1] - times[mid]);
        run.tail_rate = -detail::ls_slope(times, logd, mid, K);
        run.exponential = run.rate_first > 0.0 && run.rate_second > 0.0 && run.tail_rate > 0.0 &&
                          run.rate_second >= opt.min_rate_ratio * run.rate_first;
      }
      all_exp = all_exp && run.exponential;
      all_decay = all_decay && run.decaying;
      if (run.exponential) lambda = std::min(lambda, run.tail_rate);
      dists.push_back(std::move(d));
      res.runs.push_back(std::move(run));
    }
  }
  if (all_exp) {
    res.classification = StabilityClass::Exponential;
    res.lambda = lambda;
    double k = 0.0;
    for (const auto& d : dists) {
      for (std::size_t i = 0; i < d.size(); ++i) {
        k = std::max(k, d[i] / (d[0] * std::exp(-lambda * times[i])));
        if (d[i] <= std::max(1e-10, 1e-8 * d[0])) break;
      }
    }
    res.k = k;
    res.note = "log-distance decays linearly in time on every probe run";
  } else if (all_decay) {
    res.classification = StabilityClass::Asymptotic;
    res.note = "distance decreases on every probe run but the decay rate falls off in time";
  } else {
    res.note = "at least one probe run does not decay";
  }
  return res;
}

}  // namespace geoavg
