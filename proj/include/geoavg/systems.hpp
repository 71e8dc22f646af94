#pragma once

// Built-in systems: the SO(3) and torus worked examples plus flat
// calibration systems with closed-form averages.
// Fields are native lambdas; each bundle also carries the equivalent text
// definition, and the lambdas follow the same operation order as the
// expression evaluator so a reloaded definition reproduces them bit for bit.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "geoavg/config.hpp"

namespace geoavg {

inline SystemBundle so3_system() {
  const double T = 2.0 * std::numbers::pi;
  SystemDefinition d;
  d.name = "so3";
  d.kind = "so3";
  d.dimension = 3;
  d.period = T;
  d.x0 = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  d.field = {"pow(sin(t), 2)", "cos(t)", "1"};
  d.averaged = {"0.5", "0", "1"};
  d.notes = {"left-invariant xdot = x Xi(t), Xi = sin^2(t) e1 + cos(t) e2 + e3",
             "x0 = identity (the initial attitude is not stated for this example)"};

  SystemBundle b;
  b.name = d.name;
  b.definition = d;
  b.manifold = so3();
  b.period = T;
  b.nominal = left_invariant_field(
      b.manifold,
      [](double t) -> Mat { return Mat(rot::hat({std::pow(std::sin(t), 2.0), std::cos(t), 1.0})); }, d.name, T);
  b.reference_averaged = left_invariant_field(
      b.manifold, [](double) -> Mat { return Mat(rot::hat({0.5, 0.0, 1.0})); }, "ref-avg(so3)", T, true);
  b.x0 = so3_point(Mat::Identity(3, 3));
  b.notes = d.notes;
  return b;
}

inline SystemBundle torus_system() {
  const double T = 2.0 * std::numbers::pi;
  SystemDefinition d;
  d.name = "torus";
  d.kind = "torus";
  d.dimension = 2;
  d.R = 1.0;
  d.r = 0.5;
  d.period = T;
  d.x0 = {1, 1};
  d.center = {0, 0};
  d.field = {"-x_1 - sin(t)", "x_1 - x_2"};
  d.averaged = {"-x_1", "x_1 - x_2"};
  d.printed_averaged = {"-x_1", "-x_1 - x_2"};
  d.averaged_note =
      "the averaging operator gives theta2' = theta1 - theta2; the printed averaged system reads "
      "theta2' = -theta1 - theta2, which is not the average of the nominal field";
  d.notes = {"theta1 is the tube angle, theta2 the angle around the central circle"};

  SystemBundle b;
  b.name = d.name;
  b.definition = d;
  b.manifold = torus(d.R, d.r);
  b.period = T;
  b.nominal = chart_field(
      b.manifold, "main",
      [](const Vec& x, double t) -> Vec {
        Vec v(2);
        v << -x[0] - std::sin(t), x[0] - x[1];
        return v;
      },
      d.name, T);
  b.reference_averaged = chart_field(
      b.manifold, "main",
      [](const Vec& x, double) -> Vec {
        Vec v(2);
        v << -x[0], x[0] - x[1];
        return v;
      },
      "ref-avg(torus)", T, true);
  b.printed_averaged = chart_field(
      b.manifold, "main",
      [](const Vec& x, double) -> Vec {
        Vec v(2);
        v << -x[0], -x[0] - x[1];
        return v;
      },
      "printed-avg(torus)", T, true);
  b.x0 = {"main", Vec::Ones(2)};
  b.center = ChartPoint{"main", Vec::Zero(2)};
  b.notes = d.notes;
  b.notes.push_back(d.averaged_note);
  return b;
}

/// xdot = -x + sin t on R^1; averaged xdot = -x.
inline SystemBundle scalar_system() {
  const double T = 2.0 * std::numbers::pi;
  SystemDefinition d;
  d.name = "scalar";
  d.kind = "euclidean";
  d.dimension = 1;
  d.period = T;
  d.x0 = {1};
  d.center = {0};
  d.field = {"-x_1 + sin(t)"};
  d.averaged = {"-x_1"};
  SystemBundle b;
  b.name = d.name;
  b.definition = d;
  b.manifold = euclidean(1);
  b.period = T;
  b.nominal = chart_field(
      b.manifold, "cartesian",
      [](const Vec& x, double t) -> Vec { return Vec::Constant(1, -x[0] + std::sin(t)); }, d.name, T);
  b.reference_averaged = chart_field(
      b.manifold, "cartesian", [](const Vec& x, double) -> Vec { return Vec::Constant(1, -x[0]); },
      "ref-avg(scalar)", T, true);
  b.x0 = {"cartesian", Vec::Ones(1)};
  b.center = ChartPoint{"cartesian", Vec::Zero(1)};
  return b;
}

/// xdot = A(t) x on R^2, A(t) = [[-1 + sin t, 1], [-1, -1 + cos t]];
/// averaged A = [[-1, 1], [-1, -1]].
inline SystemBundle linear_system() {
  const double T = 2.0 * std::numbers::pi;
  SystemDefinition d;
  d.name = "linear2";
  d.kind = "euclidean";
  d.dimension = 2;
  d.period = T;
  d.x0 = {1, 0};
  d.center = {0, 0};
  d.field = {"(-1 + sin(t)) * x_1 + x_2", "-x_1 + (-1 + cos(t)) * x_2"};
  d.averaged = {"-x_1 + x_2", "-x_1 - x_2"};
  SystemBundle b;
  b.name = d.name;
  b.definition = d;
  b.manifold = euclidean(2);
  b.period = T;
  b.nominal = chart_field(
      b.manifold, "cartesian",
      [](const Vec& x, double t) -> Vec {
        Vec v(2);
        v << (-1.0 + std::sin(t)) * x[0] + x[1], -x[0] + (-1.0 + std::cos(t)) * x[1];
        return v;
      },
      d.name, T);
  b.reference_averaged = chart_field(
      b.manifold, "cartesian",
      [](const Vec& x, double) -> Vec {
        Vec v(2);
        v << -x[0] + x[1], -x[0] - x[1];
        return v;
      },
      "ref-avg(linear2)", T, true);
  b.x0 = {"cartesian", Vec(Eigen::Vector2d(1.0, 0.0))};
  b.center = ChartPoint{"cartesian", Vec::Zero(2)};
  return b;
}

inline std::vector<SystemBundle> euclidean_calibration_systems() { return {scalar_system(), linear_system()}; }

inline std::vector<std::string> builtin_names() { return {"so3", "torus", "scalar", "linear2"}; }

/// Builtin by name, otherwise a system-definition file path.
inline SystemBundle resolve_system(const std::string& name_or_path) {
  if (name_or_path == "so3") return so3_system();
  if (name_or_path == "torus") return torus_system();
  if (name_or_path == "scalar") return scalar_system();
  if (name_or_path == "linear2") return linear_system();
  return load_system_file(name_or_path);
}

}  // namespace geoavg
