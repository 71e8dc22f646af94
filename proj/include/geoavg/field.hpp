#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geoavg/manifold.hpp"

namespace geoavg {

/// Time-varying vector field. `eval` returns components in the chart of the
/// query point. Fields on matrix groups may also carry `body`, the
/// left-trivialised algebra element Xi(x, t) with xdot = x Xi.
struct TimeVaryingField {
  std::string label;
  std::function<Vec(const ChartPoint&, double)> eval;
  std::optional<double> period;
  bool autonomous = false;
  std::function<Mat(const Mat&, double)> body;

  TangentVec at(const ChartPoint& p, double t) const { return {p, eval(p, t)}; }
};

/// Field given by coordinate formulas in `home_chart`; other charts are
/// served through the transition map and its Jacobian.
inline TimeVaryingField chart_field(const ManifoldPtr& M, std::string home_chart,
                                    std::function<Vec(const Vec& x, double t)> fn, std::string label,
                                    std::optional<double> period = std::nullopt, bool autonomous = false) {
  find_chart(*M, home_chart);
  TimeVaryingField f;
  f.label = std::move(label);
  f.period = period;
  f.autonomous = autonomous;
  f.eval = [M, home = std::move(home_chart), fn = std::move(fn)](const ChartPoint& p, double t) -> Vec {
    if (p.chart == home) return fn(p.coords, t);
    auto q = M->transition(p.chart, home, p.coords);
    if (!q) throw DomainError(home, "field undefined at point given in chart '" + p.chart + "'");
    return transition_jacobian(*M, home, p.chart, *q) * fn(*q, t);
  };
  return f;
}

/// xdot = x Xi(t) on a matrix group.
inline TimeVaryingField left_invariant_field(const ManifoldPtr& M, std::function<Mat(double)> xi,
                                             std::string label, std::optional<double> period = std::nullopt,
                                             bool autonomous = false) {
  if (!M->group) throw ContractViolation("left_invariant_field: manifold has no group structure");
  TimeVaryingField f;
  f.label = std::move(label);
  f.period = period;
  f.autonomous = autonomous;
  f.body = [xi](const Mat&, double t) { return xi(t); };
  f.eval = [M, xi](const ChartPoint& p, double t) -> Vec { return M->group->chart_of(p, xi(t)); };
  return f;
}

inline TimeVaryingField scaled(const TimeVaryingField& f, double eps) {
  TimeVaryingField g = f;
  g.label = f.label;
  g.eval = [e = f.eval, eps](const ChartPoint& p, double t) -> Vec { return eps * e(p, t); };
  if (f.body) g.body = [b = f.body, eps](const Mat& X, double t) -> Mat { return eps * b(X, t); };
  return g;
}

/// a f1 + b f2
inline TimeVaryingField combination(double a, const TimeVaryingField& f1, double b,
                                    const TimeVaryingField& f2) {
  TimeVaryingField g;
  g.label = f1.label + "+" + f2.label;
  g.autonomous = f1.autonomous && f2.autonomous;
  if (f1.period && f2.period && *f1.period == *f2.period) g.period = f1.period;
  else if (f1.autonomous) g.period = f2.period;
  else if (f2.autonomous) g.period = f1.period;
  g.eval = [e1 = f1.eval, e2 = f2.eval, a, b](const ChartPoint& p, double t) -> Vec {
    return a * e1(p, t) + b * e2(p, t);
  };
  if (f1.body && f2.body) {
    g.body = [b1 = f1.body, b2 = f2.body, a, b](const Mat& X, double t) -> Mat {
      return a * b1(X, t) + b * b2(X, t);
    };
  }
  return g;
}

struct TrajectorySample {
  double t;
  ChartPoint point;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  /// Group elements for Lie-group integration (same length as samples).
  std::vector<Mat> group_states;
  std::string field_label;
  double step_size = 0.0;

  const TrajectorySample& back() const { return samples.back(); }
};

}  // namespace geoavg
