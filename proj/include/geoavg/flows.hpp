#pragma once

// Fixed-step integration of time-varying fields: classic RK4 in chart
// coordinates with trust-region chart switching, or a commutator-free
// fourth-order Lie-group scheme on matrix groups.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "geoavg/field.hpp"
#include "geoavg/manifolds.hpp"

namespace geoavg {

/// min(1e-2, T/200) for T-periodic fields, 1e-2 otherwise.
inline double default_step(std::optional<double> period) {
  if (period && *period > 0.0) return std::min(1e-2, *period / 200.0);
  return 1e-2;
}

namespace detail {

inline Mat group_body(const ManifoldSpec& M, const TimeVaryingField& f, const Mat& X, double t) {
  if (f.body) return f.body(X, t);
  const ChartPoint p = M.group->from_matrix(X);
  return M.group->body_of(p, f.eval(p, t));
}

/// Stepper state shared by the two backends.
class FlowStepper {
 public:
  FlowStepper(const ManifoldSpec& M, const TimeVaryingField& f, const ChartPoint& x0, double t0)
      : M_(M), f_(f), t_(t0) {
    check_point(M, x0);
    if (M.group) {
      X_ = M.group->to_matrix(x0);
      p_ = x0;
    } else {
      p_ = retrust(M, x0);
    }
  }

  double time() const { return t_; }
  void set_time(double t) { t_ = t; }
  const ChartPoint& point() const { return p_; }
  const Mat& matrix() const { return X_; }
  bool group() const { return M_.group.has_value(); }

  void step(double h) {
    if (group()) group_step(h);
    else chart_step(h);
    t_ += h;
  }

  /// Advances to `t1` with equal steps no longer than `h`.
  void advance_to(double t1, double h) {
    const double span = t1 - t_;
    if (span <= 0.0) return;
    const int n = std::max(1, static_cast<int>(std::ceil(span / h - 1e-9)));
    const double he = span / n;
    const double start = t_;
    for (int k = 0; k < n; ++k) {
      step(he);
      t_ = start + (k + 1) * he;
    }
    t_ = t1;
  }

 private:
  void chart_step(double h) {
    const Vec& x = p_.coords;
    const std::string& c = p_.chart;
    auto F = [&](const Vec& y, double t) { return f_.eval(ChartPoint{c, y}, t); };
    const Vec k1 = F(x, t_);
    const Vec k2 = F(x + 0.5 * h * k1, t_ + 0.5 * h);
    const Vec k3 = F(x + 0.5 * h * k2, t_ + 0.5 * h);
    const Vec k4 = F(x + h * k3, t_ + h);
    ChartPoint q{c, x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)};
    if (!q.coords.allFinite()) throw EscapeError("flow: non-finite state", p_, t_);
    const Chart& ch = find_chart(M_, c);
    if (!ch.domain.contains(q.coords) || ch.domain.margin(q.coords) < kTrustMargin) {
      try {
        q = best_chart(M_, q);
      } catch (const ChartError&) {
        throw EscapeError("flow: trajectory left the atlas", p_, t_);
      }
    }
    p_ = std::move(q);
  }

  void group_step(double h) {
    const auto& G = *M_.group;
    const Mat xi1 = group_body(M_, f_, X_, t_);
    const Mat Y2 = X_ * G.expm(0.5 * h * xi1);
    const Mat xi2 = group_body(M_, f_, Y2, t_ + 0.5 * h);
    const Mat Y3 = X_ * G.expm(0.5 * h * xi2);
    const Mat xi3 = group_body(M_, f_, Y3, t_ + 0.5 * h);
    const Mat Y4 = Y2 * G.expm(h * (xi3 - 0.5 * xi1));
    const Mat xi4 = group_body(M_, f_, Y4, t_ + h);
    const Mat A = (h / 12.0) * (3.0 * xi1 + 2.0 * xi2 + 2.0 * xi3 - xi4);
    const Mat B = (h / 12.0) * (-xi1 + 2.0 * xi2 + 2.0 * xi3 + 3.0 * xi4);
    Mat next = X_ * G.expm(A) * G.expm(B);
    if (!next.allFinite()) throw EscapeError("flow: non-finite group state", p_, t_);
    X_ = std::move(next);
    p_ = G.from_matrix(X_);
  }

  const ManifoldSpec& M_;
  const TimeVaryingField& f_;
  double t_;
  ChartPoint p_;
  Mat X_;
};

inline void check_step(double step) {
  if (!(step > 0.0)) throw ContractViolation("flow: step must be > 0");
}

}  // namespace detail

/// Integrates f from (t0, x0) to t1, recording every step.
inline Trajectory flow(const ManifoldSpec& M, const TimeVaryingField& f, double t0, double t1,
                       const ChartPoint& x0, double step) {
  detail::check_step(step);
  if (t1 < t0) throw ContractViolation("flow: t1 must be >= t0");
  detail::FlowStepper s(M, f, x0, t0);
  Trajectory tr;
  tr.field_label = f.label;
  const double span = t1 - t0;
  const int n = span > 0.0 ? std::max(1, static_cast<int>(std::ceil(span / step - 1e-9))) : 0;
  const double h = n > 0 ? span / n : step;
  tr.step_size = h;
  tr.samples.reserve(n + 1);
  auto record = [&](double t) {
    tr.samples.push_back({t, s.point()});
    if (s.group()) tr.group_states.push_back(s.matrix());
  };
  record(t0);
  for (int k = 0; k < n; ++k) {
    s.step(h);
    const double t = k + 1 == n ? t1 : t0 + (k + 1) * h;
    s.set_time(t);
    record(t);
  }
  return tr;
}

/// States at the requested non-decreasing times (all >= t0). Each interval
/// between consecutive output times is split into equal steps <= step.
inline Trajectory flow_at(const ManifoldSpec& M, const TimeVaryingField& f, double t0, const ChartPoint& x0,
                          const std::vector<double>& times, double step) {
  detail::check_step(step);
  detail::FlowStepper s(M, f, x0, t0);
  Trajectory tr;
  tr.field_label = f.label;
  tr.step_size = step;
  tr.samples.reserve(times.size());
  double prev = t0;
  for (double t : times) {
    if (t < prev) throw ContractViolation("flow_at: output times must be non-decreasing and >= t0");
    s.advance_to(t, step);
    tr.samples.push_back({t, s.point()});
    if (s.group()) tr.group_states.push_back(s.matrix());
    prev = t;
  }
  return tr;
}

/// Phi_f(t, t0, x0).
inline ChartPoint flow_map(const ManifoldSpec& M, const TimeVaryingField& f, double t, double t0,
                           const ChartPoint& x0, double step) {
  if (t < t0) throw ContractViolation("flow_map: t must be >= t0");
  return flow_at(M, f, t0, x0, {t}, step).samples.back().point;
}

}  // namespace geoavg
