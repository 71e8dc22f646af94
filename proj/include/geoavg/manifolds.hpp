#pragma once

// Built-in manifolds: flat R^n, the embedded torus T^2 and SO(3) with the
// bi-invariant metric <X, Y> = 1/2 tr(X^T Y).

#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "geoavg/manifold.hpp"
#include "geoavg/so3.hpp"

namespace geoavg {

inline ManifoldPtr euclidean(int n) {
  auto M = std::make_shared<ManifoldSpec>();
  M->name = "R" + std::to_string(n);
  M->dim = n;
  const double inf = std::numeric_limits<double>::infinity();
  M->charts.push_back({"cartesian", {Vec::Constant(n, -inf), Vec::Constant(n, inf)}});
  M->transition = [](const std::string&, const std::string&, const Vec& x) -> std::optional<Vec> {
    return x;
  };
  M->metric.eval = [n](const std::string&, const Vec&) -> Mat { return Mat::Identity(n, n); };
  M->metric.partials = [n](const std::string&, const Vec&) {
    return std::vector<Mat>(n, Mat::Zero(n, n));
  };
  M->embedding = Embedding{n, 1.0, [](const ChartPoint& p) -> Vec { return p.coords; }};
  M->closed_form.distance = [](const ChartPoint& a, const ChartPoint& b) {
    return (a.coords - b.coords).norm();
  };
  M->closed_form.exp_map = [](const TangentVec& v) {
    return ChartPoint{v.base.chart, v.base.coords + v.components};
  };
  M->closed_form.log_map = [](const ChartPoint& a, const ChartPoint& b) {
    return TangentVec{a, b.coords - a.coords};
  };
  M->periods = Vec::Zero(n);
  return M;
}

namespace detail {

// Torus chart ids encode which angles use the shifted (0, 2pi) range.
inline bool torus_shifted(const std::string& id, int axis) {
  return id == "shift12" || (axis == 0 && id == "shift1") || (axis == 1 && id == "shift2");
}

inline double wrap_to(double a, double lo) {
  const double two_pi = 2.0 * std::numbers::pi;
  double y = std::fmod(a - lo, two_pi);
  if (y < 0.0) y += two_pi;
  return lo + y;
}

}  // namespace detail

/// Torus of tube radius r around a circle of radius R. Coordinates are
/// (theta1, theta2) with theta1 the tube angle, so that
/// g = r^2 dtheta1^2 + (R + r cos theta1)^2 dtheta2^2.
inline ManifoldPtr torus(double R = 1.0, double r = 0.5) {
  auto M = std::make_shared<ManifoldSpec>();
  M->name = "T2";
  M->dim = 2;
  const double pi = std::numbers::pi;
  for (const char* id : {"main", "shift1", "shift2", "shift12"}) {
    Vec lo(2), hi(2);
    for (int a = 0; a < 2; ++a) {
      lo[a] = detail::torus_shifted(id, a) ? 0.0 : -pi;
      hi[a] = lo[a] + 2.0 * pi;
    }
    M->charts.push_back({id, {lo, hi}});
  }
  M->transition = [pi](const std::string& from, const std::string& to,
                       const Vec& x) -> std::optional<Vec> {
    (void)from;
    Vec y(2);
    for (int a = 0; a < 2; ++a) y[a] = detail::wrap_to(x[a], detail::torus_shifted(to, a) ? 0.0 : -pi);
    return y;
  };
  M->transition_jacobian = [](const std::string&, const std::string&, const Vec&) -> Mat {
    return Mat::Identity(2, 2);
  };
  M->metric.eval = [R, r](const std::string&, const Vec& x) -> Mat {
    const double rho = R + r * std::cos(x[0]);
    Mat g = Mat::Zero(2, 2);
    g(0, 0) = r * r;
    g(1, 1) = rho * rho;
    return g;
  };
  M->metric.partials = [R, r](const std::string&, const Vec& x) {
    std::vector<Mat> d(2, Mat::Zero(2, 2));
    d[0](1, 1) = -2.0 * r * std::sin(x[0]) * (R + r * std::cos(x[0]));
    return d;
  };
  M->embedding = Embedding{3, 1.0, [R, r](const ChartPoint& p) -> Vec {
                             const double rho = R + r * std::cos(p.coords[0]);
                             return Eigen::Vector3d(rho * std::cos(p.coords[1]),
                                                    rho * std::sin(p.coords[1]),
                                                    r * std::sin(p.coords[0]));
                           }};
  M->periods = Vec::Constant(2, 2.0 * pi);
  return M;
}

namespace detail {

inline constexpr double kSo3ChartHalfWidth = 1.5;

inline int so3_chart_index(const std::string& id) {
  if (id.size() < 5 || id.compare(0, 4, "cube") != 0) {
    throw ChartError("SO3: unknown chart '" + id + "'");
  }
  return std::stoi(id.substr(4));
}

inline std::string so3_chart_id(int k) { return "cube" + std::to_string(k); }

}  // namespace detail

/// SO(3) as 24 exponential-coordinate charts R = A_c Exp(w), one per cube
/// symmetry A_c, each with domain |w_i| < 1.5.
inline ManifoldPtr so3() {
  auto M = std::make_shared<ManifoldSpec>();
  M->name = "SO3";
  M->dim = 3;
  const auto& anchors = rot::cube_rotations();
  const double hw = detail::kSo3ChartHalfWidth;
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    M->charts.push_back({detail::so3_chart_id(static_cast<int>(k)),
                         {Vec::Constant(3, -hw), Vec::Constant(3, hw)}});
  }
  auto to_matrix = [](const ChartPoint& p) -> Mat {
    const auto& A = rot::cube_rotations()[detail::so3_chart_index(p.chart)];
    return A * rot::Exp(p.coords);
  };
  auto from_matrix = [](const Mat& X) -> ChartPoint {
    const auto& anchors = rot::cube_rotations();
    int best = 0;
    double best_trace = -1e300;
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      const double tr = (anchors[k].transpose() * X).trace();
      if (tr > best_trace + 1e-12) {
        best_trace = tr;
        best = static_cast<int>(k);
      }
    }
    const rot::Mat3 rel = anchors[best].transpose() * X;
    return {detail::so3_chart_id(best), rot::Log(rel)};
  };
  M->transition = [hw](const std::string& from, const std::string& to,
                       const Vec& x) -> std::optional<Vec> {
    if (from == to) return x;
    const auto& anchors = rot::cube_rotations();
    const rot::Mat3 C = anchors[detail::so3_chart_index(to)].transpose() *
                        anchors[detail::so3_chart_index(from)];
    Vec y = rot::Log(C * rot::Exp(x));
    if (y.cwiseAbs().maxCoeff() >= hw) return std::nullopt;
    return y;
  };
  M->transition_jacobian = [](const std::string& from, const std::string& to, const Vec& x) -> Mat {
    if (from == to) return Mat::Identity(3, 3);
    const auto& anchors = rot::cube_rotations();
    const rot::Mat3 C = anchors[detail::so3_chart_index(to)].transpose() *
                        anchors[detail::so3_chart_index(from)];
    const rot::Vec3 y = rot::Log(C * rot::Exp(x));
    return rot::right_jacobian_inverse(y) * rot::right_jacobian(x);
  };
  M->metric.eval = [](const std::string&, const Vec& x) -> Mat {
    const rot::Mat3 J = rot::right_jacobian(x);
    return J.transpose() * J;
  };
  M->embedding = Embedding{9, 0.5, [to_matrix](const ChartPoint& p) -> Vec {
                             const Mat X = to_matrix(p);
                             Vec e(9);
                             for (int i = 0; i < 3; ++i)
                               for (int j = 0; j < 3; ++j) e[3 * i + j] = X(i, j);
                             return e;
                           }};

  GroupStructure G;
  G.matrix_size = 3;
  G.algebra_basis = {rot::hat({1, 0, 0}), rot::hat({0, 1, 0}), rot::hat({0, 0, 1})};
  G.to_matrix = to_matrix;
  G.from_matrix = from_matrix;
  G.body_of = [](const ChartPoint& p, const Vec& v) -> Mat {
    return rot::cross(rot::right_jacobian(p.coords) * v);
  };
  G.chart_of = [](const ChartPoint& p, const Mat& xi) -> Vec {
    return rot::right_jacobian_inverse(p.coords) * rot::uncross(xi);
  };
  G.expm = [](const Mat& xi) -> Mat { return rot::expm_skew(xi); };
  M->group = G;

  M->closed_form.distance = [to_matrix](const ChartPoint& a, const ChartPoint& b) {
    const rot::Mat3 Ra = to_matrix(a), Rb = to_matrix(b);
    return rot::angle(Ra.transpose() * Rb);
  };
  M->closed_form.exp_map = [to_matrix, from_matrix](const TangentVec& v) {
    const rot::Mat3 R = to_matrix(v.base);
    const rot::Vec3 body = rot::right_jacobian(v.base.coords) * v.components;
    return from_matrix(R * rot::Exp(body));
  };
  M->closed_form.log_map = [to_matrix](const ChartPoint& a, const ChartPoint& b) {
    const rot::Mat3 Ra = to_matrix(a), Rb = to_matrix(b);
    const rot::Vec3 body = rot::Log(Ra.transpose() * Rb);
    return TangentVec{a, rot::right_jacobian_inverse(a.coords) * body};
  };
  M->periods = Vec::Zero(3);
  return M;
}

inline ChartPoint so3_point(const Mat& X) {
  static const ManifoldPtr M = so3();
  return M->group->from_matrix(X);
}

}  // namespace geoavg
