#pragma once

// Chart-atlas manifolds with a Riemannian metric: points, tangent vectors,
// metric/Christoffel evaluation and discrete curve length.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geoavg/errors.hpp"

namespace geoavg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct ChartPoint {
  std::string chart;
  Vec coords;
};

/// Tangent vector in the coordinate basis d/dx_i of base.chart.
struct TangentVec {
  ChartPoint base;
  Vec components;
};

/// Open coordinate box. Infinite bounds are allowed.
struct Box {
  Vec lo;
  Vec hi;

  bool contains(const Vec& x) const {
    if (x.size() != lo.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!(x[i] > lo[i] && x[i] < hi[i])) return false;
    }
    return true;
  }

  /// Smallest distance to the boundary relative to the box width, in [0, 0.5].
  /// Unbounded directions count as centred.
  double margin(const Vec& x) const {
    double m = 0.5;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double w = hi[i] - lo[i];
      if (!std::isfinite(w)) continue;
      m = std::min(m, std::min(x[i] - lo[i], hi[i] - x[i]) / w);
    }
    return m;
  }
};

struct Chart {
  std::string id;
  Box domain;
};

/// g_ij as a function of chart coordinates. `partials`, when set, returns
/// dg/dx_k for k = 0..n-1.
struct MetricField {
  std::function<Mat(const std::string& chart, const Vec& x)> eval;
  std::function<std::vector<Mat>(const std::string& chart, const Vec& x)> partials;
};

/// Map into R^m whose ambient metric is `ambient_scale` times the Euclidean one.
struct Embedding {
  int ambient_dim = 0;
  double ambient_scale = 1.0;
  std::function<Vec(const ChartPoint&)> map;
};

struct ClosedFormGeometry {
  std::function<double(const ChartPoint&, const ChartPoint&)> distance;
  std::function<ChartPoint(const TangentVec&)> exp_map;
  std::function<TangentVec(const ChartPoint&, const ChartPoint&)> log_map;
};

/// Matrix Lie group data. Body velocities are left-trivialised: xdot = x * Xi.
struct GroupStructure {
  int matrix_size = 0;
  std::vector<Mat> algebra_basis;
  std::function<Mat(const ChartPoint&)> to_matrix;
  std::function<ChartPoint(const Mat&)> from_matrix;
  std::function<Mat(const ChartPoint&, const Vec&)> body_of;   // chart velocity -> Xi
  std::function<Vec(const ChartPoint&, const Mat&)> chart_of;  // Xi -> chart velocity
  std::function<Mat(const Mat&)> expm;                         // algebra -> group
};

struct ManifoldSpec {
  std::string name;
  int dim = 0;
  std::vector<Chart> charts;
  /// Coordinates of `x` (given in chart `from`) in chart `to`, or nullopt if
  /// the point is outside the target domain.
  std::function<std::optional<Vec>(const std::string& from, const std::string& to, const Vec& x)>
      transition;
  /// d(to-coords)/d(from-coords); finite differences of `transition` when unset.
  std::function<Mat(const std::string& from, const std::string& to, const Vec& x)>
      transition_jacobian;
  MetricField metric;
  std::optional<Embedding> embedding;
  ClosedFormGeometry closed_form;
  std::optional<GroupStructure> group;
  /// Per-coordinate period for angular coordinates (0 = not periodic).
  Vec periods;

  bool is_group() const { return group.has_value(); }
};

using ManifoldPtr = std::shared_ptr<const ManifoldSpec>;

/// Flow or geodesic left every chart; carries the last state that was valid.
class EscapeError : public std::runtime_error {
 public:
  EscapeError(const std::string& what, ChartPoint last, double last_time)
      : std::runtime_error(what), last_(std::move(last)), time_(last_time) {}
  const ChartPoint& last_valid() const noexcept { return last_; }
  double last_time() const noexcept { return time_; }

 private:
  ChartPoint last_;
  double time_;
};

/// Trust-region threshold: charts are switched when a coordinate comes within
/// this fraction of the box width of the boundary.
inline constexpr double kTrustMargin = 0.1;

inline const Chart& find_chart(const ManifoldSpec& M, const std::string& id) {
  for (const auto& c : M.charts) {
    if (c.id == id) return c;
  }
  throw ChartError(M.name + ": unknown chart '" + id + "'");
}

inline void check_point(const ManifoldSpec& M, const ChartPoint& p) {
  const Chart& c = find_chart(M, p.chart);
  if (p.coords.size() != M.dim) {
    throw ContractViolation("point in chart '" + p.chart + "' has " +
                            std::to_string(p.coords.size()) + " coordinates, manifold dimension is " +
                            std::to_string(M.dim));
  }
  if (!c.domain.contains(p.coords)) throw DomainError(p.chart, "point outside chart domain");
}

inline std::optional<ChartPoint> to_chart(const ManifoldSpec& M, const ChartPoint& p,
                                          const std::string& id) {
  if (id == p.chart) {
    if (find_chart(M, id).domain.contains(p.coords)) return p;
    return std::nullopt;
  }
  if (!M.transition) return std::nullopt;
  auto y = M.transition(p.chart, id, p.coords);
  if (!y || !find_chart(M, id).domain.contains(*y)) return std::nullopt;
  return ChartPoint{id, std::move(*y)};
}

/// Re-expresses p in the chart where it sits deepest inside the domain box.
inline ChartPoint best_chart(const ManifoldSpec& M, const ChartPoint& p) {
  std::optional<ChartPoint> best;
  double best_margin = -1.0;
  for (const auto& c : M.charts) {
    auto q = to_chart(M, p, c.id);
    if (!q) continue;
    const double m = c.domain.margin(q->coords);
    if (m > best_margin + 1e-12) {
      best_margin = m;
      best = std::move(q);
    }
  }
  if (!best) throw ChartError(M.name + ": point is not covered by any chart");
  return *best;
}

inline double chart_margin(const ManifoldSpec& M, const ChartPoint& p) {
  return find_chart(M, p.chart).domain.margin(p.coords);
}

/// Switches chart only when p has left the trust region of its current chart.
inline ChartPoint retrust(const ManifoldSpec& M, const ChartPoint& p) {
  if (chart_margin(M, p) >= kTrustMargin) return p;
  return best_chart(M, p);
}

inline Mat transition_jacobian(const ManifoldSpec& M, const std::string& from, const std::string& to,
                               const Vec& x) {
  const auto n = x.size();
  if (from == to) return Mat::Identity(n, n);
  if (M.transition_jacobian) return M.transition_jacobian(from, to, x);
  Mat J(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    auto yp = M.transition(from, to, xp);
    auto ym = M.transition(from, to, xm);
    if (!yp || !ym) throw ChartError(M.name + ": transition '" + from + "' -> '" + to +
                                     "' undefined near point");
    J.col(k) = (*yp - *ym) / (2.0 * h);
  }
  return J;
}

/// Re-expresses v in the chart of `target` (which must be the same point).
inline TangentVec to_chart(const ManifoldSpec& M, const TangentVec& v, const ChartPoint& target) {
  if (target.chart == v.base.chart) return {target, v.components};
  const Mat J = transition_jacobian(M, v.base.chart, target.chart, v.base.coords);
  return {target, J * v.components};
}

inline Mat metric_at(const ManifoldSpec& M, const ChartPoint& x) {
  check_point(M, x);
  return M.metric.eval(x.chart, x.coords);
}

inline double inner(const ManifoldSpec& M, const TangentVec& u, const TangentVec& v) {
  if (u.base.chart != v.base.chart || u.base.coords.size() != v.base.coords.size() ||
      (u.base.coords - v.base.coords).cwiseAbs().maxCoeff() > 0.0) {
    throw ContractViolation("inner: tangent vectors anchored at different points");
  }
  if (u.components.size() != M.dim || v.components.size() != M.dim) {
    throw ContractViolation("inner: component count differs from manifold dimension");
  }
  return u.components.dot(metric_at(M, u.base) * v.components);
}

inline double norm(const ManifoldSpec& M, const TangentVec& v) {
  return std::sqrt(std::max(0.0, inner(M, v, v)));
}

/// Central-difference step used for metric derivatives.
inline double fd_step(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

/// dg/dx_k for every k, analytic when the metric provides them.
inline std::vector<Mat> metric_partials(const ManifoldSpec& M, const ChartPoint& x) {
  if (M.metric.partials) return M.metric.partials(x.chart, x.coords);
  std::vector<Mat> d;
  d.reserve(M.dim);
  for (int k = 0; k < M.dim; ++k) {
    const double h = fd_step(x.coords[k]);
    Vec xp = x.coords, xm = x.coords;
    xp[k] += h;
    xm[k] -= h;
    d.push_back((M.metric.eval(x.chart, xp) - M.metric.eval(x.chart, xm)) / (2.0 * h));
  }
  return d;
}

/// Christoffel symbols of the second kind; gamma[i](j, k) = Gamma^i_{jk}.
struct Christoffel {
  std::vector<Mat> gamma;

  double operator()(int i, int j, int k) const { return gamma[i](j, k); }

  /// sum_jk Gamma^i_jk u^j w^k
  Vec contract(const Vec& u, const Vec& w) const {
    Vec out(static_cast<Eigen::Index>(gamma.size()));
    for (std::size_t i = 0; i < gamma.size(); ++i) out[static_cast<Eigen::Index>(i)] = u.dot(gamma[i] * w);
    return out;
  }
};

inline Christoffel christoffel_from(const Mat& g, const std::vector<Mat>& dg) {
  const auto n = g.rows();
  Eigen::FullPivLU<Mat> lu(g);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-300) {
    throw NumericalError("christoffel: metric matrix is singular");
  }
  const Mat ginv = lu.inverse();
  // first kind: G_l(j,k) = 1/2 (g_jl,k + g_kl,j - g_jk,l)
  std::vector<Mat> first(n, Mat::Zero(n, n));
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        first[l](j, k) = 0.5 * (dg[k](j, l) + dg[j](k, l) - dg[l](j, k));
      }
    }
  }
  Christoffel c;
  c.gamma.assign(n, Mat::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index l = 0; l < n; ++l) {
      if (ginv(i, l) != 0.0) c.gamma[i] += ginv(i, l) * first[l];
    }
  }
  return c;
}

inline Christoffel christoffel_at(const ManifoldSpec& M, const ChartPoint& x) {
  check_point(M, x);
  return christoffel_from(M.metric.eval(x.chart, x.coords), metric_partials(M, x));
}

/// Coordinates of q expressed in the chart of p, falling back to p expressed
/// in q's chart. Returns the pair (p', q') sharing one chart.
inline std::pair<ChartPoint, ChartPoint> common_chart(const ManifoldSpec& M, const ChartPoint& p,
                                                      const ChartPoint& q) {
  if (auto q2 = to_chart(M, q, p.chart)) return {p, *q2};
  if (auto p2 = to_chart(M, p, q.chart)) return {*p2, q};
  for (const auto& c : M.charts) {
    auto p3 = to_chart(M, p, c.id);
    auto q3 = to_chart(M, q, c.id);
    if (p3 && q3) return {*p3, *q3};
  }
  throw ChartError(M.name + ": charts '" + p.chart + "' and '" + q.chart + "' do not overlap here");
}

/// Length of a sampled curve: midpoint quadrature of sqrt(g(gamma', gamma'))
/// with gamma' taken as the chord between consecutive samples.
inline double curve_length(const ManifoldSpec& M,
                           const std::vector<std::pair<double, ChartPoint>>& samples) {
  if (samples.size() < 2) throw ContractViolation("curve_length: need at least two samples");
  double length = 0.0;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    if (!(samples[k + 1].first > samples[k].first)) {
      throw ContractViolation("curve_length: sample times must be strictly increasing");
    }
    auto [a, b] = common_chart(M, samples[k].second, samples[k + 1].second);
    const Vec delta = b.coords - a.coords;
    const Vec mid = 0.5 * (a.coords + b.coords);
    const Mat g = M.metric.eval(a.chart, mid);
    // |gamma'| dt with gamma' = delta/dt; the time step cancels.
    length += std::sqrt(std::max(0.0, delta.dot(g * delta)));
  }
  return length;
}

}  // namespace geoavg
