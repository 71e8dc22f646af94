#pragma once

// Geodesic initial-value integration, exponential/logarithm maps and
// Riemannian distance.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <random>
#include <vector>

#include "geoavg/manifold.hpp"

namespace geoavg {

struct GeodesicSolverConfig {
  double step_size = 1e-2;    // arc-length step of the geodesic integrator
  double shooting_tol = 1e-9; // max-abs chart residual accepted by shooting
  int max_shooting_iters = 50;
  int multistart_count = 8;
  bool use_closed_form = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(step_size > 0.0)) throw ContractViolation("geodesic step_size must be > 0");
    if (!(shooting_tol > 0.0)) throw ContractViolation("shooting_tol must be > 0");
    if (max_shooting_iters < 1) throw ContractViolation("max_shooting_iters must be >= 1");
    if (multistart_count < 1) throw ContractViolation("multistart_count must be >= 1");
  }
};

namespace detail {

inline Vec geodesic_accel(const ManifoldSpec& M, const std::string& chart, const Vec& x, const Vec& v) {
  const Christoffel G = christoffel_from(M.metric.eval(chart, x), metric_partials(M, {chart, x}));
  return -G.contract(v, v);
}

/// Fixed number of classic RK4 steps of x'' = -Gamma(x)[x', x'] over [0, s].
inline TangentVec geodesic_steps(const ManifoldSpec& M, const ChartPoint& x0, const Vec& v0, double s,
                                 int steps) {
  ChartPoint p = retrust(M, x0);
  Vec v = transition_jacobian(M, x0.chart, p.chart, x0.coords) * v0;
  if (steps <= 0 || s == 0.0 || v.cwiseAbs().maxCoeff() == 0.0) return {p, v};
  const double h = s / steps;
  for (int k = 0; k < steps; ++k) {
    const Vec& x = p.coords;
    const Vec k1x = v;
    const Vec k1v = geodesic_accel(M, p.chart, x, v);
    const Vec k2x = v + 0.5 * h * k1v;
    const Vec k2v = geodesic_accel(M, p.chart, x + 0.5 * h * k1x, k2x);
    const Vec k3x = v + 0.5 * h * k2v;
    const Vec k3v = geodesic_accel(M, p.chart, x + 0.5 * h * k2x, k3x);
    const Vec k4x = v + h * k3v;
    const Vec k4v = geodesic_accel(M, p.chart, x + h * k3x, k4x);
    ChartPoint q{p.chart, x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)};
    Vec w = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!q.coords.allFinite() || !w.allFinite()) {
      throw EscapeError("geodesic: non-finite state", p, h * k);
    }
    const Chart& c = find_chart(M, q.chart);
    if (!c.domain.contains(q.coords) || c.domain.margin(q.coords) < kTrustMargin) {
      ChartPoint r;
      try {
        r = best_chart(M, q);
      } catch (const ChartError&) {
        throw EscapeError("geodesic left every chart domain", p, h * k);
      }
      w = transition_jacobian(M, q.chart, r.chart, q.coords) * w;
      q = std::move(r);
    }
    p = std::move(q);
    v = std::move(w);
  }
  return {p, v};
}

inline int geodesic_step_count(const ManifoldSpec& M, const ChartPoint& x, const Vec& v, double s,
                               double step) {
  const double speed = std::sqrt(std::max(0.0, v.dot(M.metric.eval(x.chart, x.coords) * v)));
  const double len = s * speed;
  if (len == 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(len / step - 1e-9)));
}

}  // namespace detail

/// Integrates the geodesic equation from (x, v) for parameter length s.
/// The number of steps is ceil(s * |v|_g / step_size): the step is measured
/// in arc length.
inline TangentVec geodesic_ivp(const ManifoldSpec& M, const ChartPoint& x, const TangentVec& v, double s,
                               const GeodesicSolverConfig& cfg) {
  cfg.validate();
  if (s < 0.0) throw ContractViolation("geodesic_ivp: parameter length must be >= 0");
  check_point(M, x);
  const TangentVec va = (v.base.chart == x.chart) ? v : to_chart(M, v, x);
  if (va.components.size() != M.dim) throw ContractViolation("geodesic_ivp: bad velocity size");
  const int steps = detail::geodesic_step_count(M, x, va.components, s, cfg.step_size);
  return detail::geodesic_steps(M, x, va.components, s, steps);
}

inline ChartPoint exp_map(const ManifoldSpec& M, const ChartPoint& x, const TangentVec& v,
                          const GeodesicSolverConfig& cfg) {
  if (cfg.use_closed_form && M.closed_form.exp_map) {
    check_point(M, x);
    return M.closed_form.exp_map(v.base.chart == x.chart ? v : to_chart(M, v, x));
  }
  return geodesic_ivp(M, x, v, 1.0, cfg).base;
}

struct LogResult {
  TangentVec velocity;
  double norm = 0.0;
  int starts_tried = 0;
  int starts_converged = 0;
  /// Converged starts disagreed in length by more than 1e-4: the returned
  /// length is only an upper bound on the distance.
  bool upper_bound = false;
};

namespace detail {

inline std::uint64_t hash_mix(std::uint64_t h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

/// Chart-coordinate difference y - x expressed in x's chart.
inline Vec chart_difference(const ManifoldSpec& M, const ChartPoint& x, const ChartPoint& y) {
  Vec d;
  if (auto y2 = to_chart(M, y, x.chart)) {
    d = y2->coords - x.coords;
  } else {
    try {
      auto [a, b] = common_chart(M, x, y);
      d = transition_jacobian(M, a.chart, x.chart, a.coords) * (b.coords - a.coords);
    } catch (const ChartError&) {
      d = Vec::Zero(M.dim);
    }
  }
  for (Eigen::Index i = 0; i < d.size() && i < M.periods.size(); ++i) {
    const double P = M.periods[i];
    if (P > 0.0) d[i] -= P * std::round(d[i] / P);
  }
  return d;
}

struct Shot {
  Vec v;
  double norm;
};

inline std::optional<Vec> shooting_residual(const ManifoldSpec& M, const ChartPoint& x, const Vec& v,
                                            const ChartPoint& y, int steps) {
  try {
    const TangentVec end = geodesic_steps(M, x, v, 1.0, steps);
    auto e = to_chart(M, end.base, y.chart);
    if (!e) return std::nullopt;
    return Vec(e->coords - y.coords);
  } catch (const EscapeError&) {
    return std::nullopt;
  } catch (const ChartError&) {
    return std::nullopt;
  }
}

/// Damped Gauss-Newton on the initial velocity.
inline std::optional<Vec> shoot(const ManifoldSpec& M, const ChartPoint& x, const ChartPoint& y, Vec v,
                                const GeodesicSolverConfig& cfg) {
  const auto n = v.size();
  for (int it = 0; it < cfg.max_shooting_iters; ++it) {
    const int steps = geodesic_step_count(M, x, v, 1.0, cfg.step_size);
    auto r = shooting_residual(M, x, v, y, steps);
    if (!r) return std::nullopt;
    const double rn = r->cwiseAbs().maxCoeff();
    if (rn < cfg.shooting_tol) return v;
    Mat J(n, n);
    const double delta = 1e-7 * std::max(1.0, v.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < n; ++j) {
      Vec vp = v;
      vp[j] += delta;
      auto rp = shooting_residual(M, x, vp, y, steps);
      if (!rp) return std::nullopt;
      J.col(j) = (*rp - *r) / delta;
    }
    const Vec dv = J.colPivHouseholderQr().solve(-*r);
    if (!dv.allFinite()) return std::nullopt;
    double lambda = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 12; ++ls) {
      const Vec trial = v + lambda * dv;
      const int ts = geodesic_step_count(M, x, trial, 1.0, cfg.step_size);
      auto rt = shooting_residual(M, x, trial, y, ts);
      if (rt && rt->cwiseAbs().maxCoeff() < rn) {
        v = trial;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) return std::nullopt;
  }
  const int steps = geodesic_step_count(M, x, v, 1.0, cfg.step_size);
  auto r = shooting_residual(M, x, v, y, steps);
  if (r && r->cwiseAbs().maxCoeff() < cfg.shooting_tol) return v;
  return std::nullopt;
}

}  // namespace detail

/// Inverse of exp_x near x by multistart shooting. Starts are the chart
/// difference, its random perturbations and (for angular coordinates) its
/// period-shifted copies; the shortest converged solution wins.
inline LogResult log_map_detailed(const ManifoldSpec& M, const ChartPoint& x, const ChartPoint& y,
                                  const GeodesicSolverConfig& cfg) {
  cfg.validate();
  check_point(M, x);
  check_point(M, y);
  if (cfg.use_closed_form && M.closed_form.log_map) {
    TangentVec v = M.closed_form.log_map(x, y);
    const double nv = std::sqrt(std::max(0.0, v.components.dot(metric_at(M, x) * v.components)));
    return {std::move(v), nv, 1, 1, false};
  }
  const ChartPoint xs = x;
  const ChartPoint ys = best_chart(M, y);
  const Mat gx = metric_at(M, xs);
  auto gnorm = [&](const Vec& v) { return std::sqrt(std::max(0.0, v.dot(gx * v))); };

  const Vec d0 = detail::chart_difference(M, xs, ys);

  std::uint64_t h = cfg.seed ^ 0x6a09e667f3bcc909ULL;
  for (Eigen::Index i = 0; i < xs.coords.size(); ++i) h = detail::hash_mix(h, xs.coords[i]);
  for (Eigen::Index i = 0; i < ys.coords.size(); ++i) h = detail::hash_mix(h, ys.coords[i]);
  std::mt19937_64 rng(h);
  std::normal_distribution<double> normal(0.0, 1.0);

  enum class Kind { Primary, Perturbed, Shifted };
  std::vector<std::pair<Kind, Vec>> starts;
  starts.emplace_back(Kind::Primary, d0);
  std::vector<Vec> shifts;
  for (Eigen::Index i = 0; i < M.periods.size(); ++i) {
    if (M.periods[i] <= 0.0) continue;
    for (double sgn : {1.0, -1.0}) {
      Vec s = d0;
      s[i] += sgn * M.periods[i];
      shifts.push_back(s);
    }
  }
  std::size_t next_shift = 0;
  const double scale = std::max(d0.norm(), 1e-3);
  while (static_cast<int>(starts.size()) < cfg.multistart_count) {
    // Alternate perturbations with wrap-around candidates.
    if (starts.size() % 2 == 0 && next_shift < shifts.size()) {
      starts.emplace_back(Kind::Shifted, shifts[next_shift++]);
      continue;
    }
    Vec s = d0;
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] += 0.1 * scale * normal(rng);
    starts.emplace_back(Kind::Perturbed, s);
  }

  std::vector<detail::Shot> found;
  std::optional<detail::Shot> best;
  bool confirmed = false;
  int tried = 0;
  for (const auto& [kind, start] : starts) {
    if (best && gnorm(start) > 1.5 * best->norm + 1e-12) continue;
    if (confirmed && kind == Kind::Perturbed) continue;
    ++tried;
    auto v = detail::shoot(M, xs, ys, start, cfg);
    if (!v) continue;
    const double nv = gnorm(*v);
    for (const auto& f : found) {
      if (std::abs(f.norm - nv) < 1e-9 && (f.v - *v).cwiseAbs().maxCoeff() < 1e-6) confirmed = true;
    }
    found.push_back({*v, nv});
    if (!best || nv < best->norm) best = found.back();
  }
  if (!best) {
    throw NonConvergence("log_map: shooting did not converge from any of " + std::to_string(tried) +
                         " starts");
  }
  LogResult out{{xs, best->v}, best->norm, tried, static_cast<int>(found.size()), false};
  for (const auto& f : found) {
    if (std::abs(f.norm - best->norm) > 1e-4) out.upper_bound = true;
  }
  return out;
}

inline TangentVec log_map(const ManifoldSpec& M, const ChartPoint& x, const ChartPoint& y,
                          const GeodesicSolverConfig& cfg) {
  return log_map_detailed(M, x, y, cfg).velocity;
}

struct DistanceResult {
  double value = 0.0;
  bool upper_bound = false;
};

inline DistanceResult distance_detailed(const ManifoldSpec& M, const ChartPoint& x, const ChartPoint& y,
                                        const GeodesicSolverConfig& cfg) {
  if (cfg.use_closed_form && M.closed_form.distance) {
    check_point(M, x);
    check_point(M, y);
    return {M.closed_form.distance(x, y), false};
  }
  const LogResult r = log_map_detailed(M, x, y, cfg);
  return {r.norm, r.upper_bound};
}

inline double distance(const ManifoldSpec& M, const ChartPoint& x, const ChartPoint& y,
                       const GeodesicSolverConfig& cfg) {
  return distance_detailed(M, x, y, cfg).value;
}

/// Unit (in g) probe directions at x: +-e_i and +-(e_i +- e_j)/sqrt2 in a
/// g-orthonormal frame.
inline std::vector<Vec> probe_directions(const ManifoldSpec& M, const ChartPoint& x) {
  const Mat g = metric_at(M, x);
  const Eigen::LLT<Mat> llt(g);
  const Mat Linv_t = llt.matrixU().solve(Mat::Identity(M.dim, M.dim));
  std::vector<Vec> dirs;
  for (int i = 0; i < M.dim; ++i) {
    for (double s : {1.0, -1.0}) dirs.push_back(s * Linv_t.col(i));
  }
  for (int i = 0; i < M.dim; ++i) {
    for (int j = i + 1; j < M.dim; ++j) {
      for (double si : {1.0, -1.0}) {
        for (double sj : {1.0, -1.0}) {
          dirs.push_back((si * Linv_t.col(i) + sj * Linv_t.col(j)) / std::sqrt(2.0));
        }
      }
    }
  }
  return dirs;
}

/// Largest radius of the grid for which every probe point y = exp_x(rho u)
/// round-trips through log_x (d(exp(log y), y) < 10 tol) and log_x(y) is
/// still the generating geodesic (|log_x y|_g = rho to 1e-6).
inline double injectivity_probe(const ManifoldSpec& M, const ChartPoint& x,
                                const std::vector<double>& radius_grid, const GeodesicSolverConfig& cfg) {
  for (std::size_t i = 0; i < radius_grid.size(); ++i) {
    if (!(radius_grid[i] > 0.0) || (i > 0 && !(radius_grid[i] > radius_grid[i - 1]))) {
      throw ContractViolation("injectivity_probe: radius grid must be increasing and positive");
    }
  }
  double passed = 0.0;
  const auto dirs = probe_directions(M, x);
  for (double rho : radius_grid) {
    bool ok = true;
    for (const Vec& u : dirs) {
      try {
        const ChartPoint y = exp_map(M, x, {x, rho * u}, cfg);
        const LogResult lr = log_map_detailed(M, x, y, cfg);
        const ChartPoint back = exp_map(M, x, lr.velocity, cfg);
        const double rt = distance(M, back, y, cfg);
        if (!(rt < 10.0 * cfg.shooting_tol) || std::abs(lr.norm - rho) > 1e-6) ok = false;
      } catch (const std::runtime_error&) {
        ok = false;
      }
      if (!ok) break;
    }
    if (!ok) break;
    passed = rho;
  }
  return passed;
}

}  // namespace geoavg
