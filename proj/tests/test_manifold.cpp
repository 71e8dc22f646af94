#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geoavg/manifolds.hpp"

using namespace geoavg;
namespace {

const double pi = std::numbers::pi;

Vec v2(double a, double b) { return Vec(Eigen::Vector2d(a, b)); }

// Random points of a built-in manifold, each in a valid chart.
std::vector<ChartPoint> sample_points(const ManifoldSpec& M, int n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<ChartPoint> out;
  for (int i = 0; i < n; ++i) {
    const Chart& c = M.charts[i % M.charts.size()];
    Vec x(M.dim);
    for (int k = 0; k < M.dim; ++k) {
      const double lo = std::isfinite(c.domain.lo[k]) ? c.domain.lo[k] : -5.0;
      const double hi = std::isfinite(c.domain.hi[k]) ? c.domain.hi[k] : 5.0;
      x[k] = 0.5 * (lo + hi) + 0.499 * (hi - lo) * U(g);
    }
    out.push_back({c.id, x});
  }
  return out;
}

}  // namespace

TEST(Box, ContainsIsOpen) {
  Box b{v2(0, 0), v2(1, 1)};
  EXPECT_TRUE(b.contains(v2(0.5, 0.5)));
  EXPECT_FALSE(b.contains(v2(0.0, 0.5)));
  EXPECT_FALSE(b.contains(v2(1.0, 0.5)));
  EXPECT_NEAR(b.margin(v2(0.05, 0.5)), 0.05, 1e-15);
}

TEST(MetricAt, EuclideanIdentity) {
  auto M = euclidean(2);
  EXPECT_TRUE(metric_at(*M, {"cartesian", v2(3, -7)}).isApprox(Mat::Identity(2, 2)));
}

TEST(MetricAt, TorusValues) {
  auto T = torus();
  const Mat g0 = metric_at(*T, {"main", v2(0, 0.3)});
  EXPECT_NEAR(g0(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(g0(1, 1), 2.25, 1e-15);
  EXPECT_EQ(g0(0, 1), 0.0);
  // theta1 = pi lives in the shifted chart.
  const Mat gpi = metric_at(*T, {"shift1", v2(pi, 0.0)});
  EXPECT_NEAR(gpi(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(gpi(1, 1), 0.25, 1e-15);
}

TEST(MetricAt, OutsideDomainNamesChart) {
  auto T = torus();
  try {
    metric_at(*T, {"main", v2(3.5, 0)});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.chart(), "main");
  }
}

TEST(MetricAt, SpdOnSamplesForEveryBuiltin) {
  for (const auto& M : {euclidean(3), torus(), so3()}) {
    for (const auto& p : sample_points(*M, 1000, 7)) {
      const Mat g = metric_at(*M, p);
      EXPECT_EQ((g - g.transpose()).cwiseAbs().maxCoeff(), 0.0) << M->name;
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat>(g).eigenvalues().minCoeff(), 0.0) << M->name;
    }
  }
}

TEST(Inner, Examples) {
  auto E = euclidean(2);
  ChartPoint o{"cartesian", v2(0, 0)};
  EXPECT_EQ(inner(*E, {o, v2(1, 0)}, {o, v2(0, 1)}), 0.0);
  auto T = torus();
  ChartPoint x{"main", v2(0, 0)};
  EXPECT_NEAR(inner(*T, {x, v2(1, 0)}, {x, v2(1, 0)}), 0.25, 1e-15);
  EXPECT_EQ(inner(*T, {x, v2(0, 0)}, {x, v2(0, 0)}), 0.0);
}

TEST(Inner, SymmetricAndPositive) {
  auto T = torus();
  std::mt19937_64 g(3);
  std::normal_distribution<double> N;
  for (const auto& p : sample_points(*T, 50, 9)) {
    TangentVec u{p, v2(N(g), N(g))}, w{p, v2(N(g), N(g))};
    EXPECT_NEAR(inner(*T, u, w), inner(*T, w, u), 1e-15);
    EXPECT_GT(inner(*T, u, u), 0.0);
  }
}

TEST(Inner, MismatchedBasesIsContractViolation) {
  auto T = torus();
  EXPECT_THROW(inner(*T, {{"main", v2(0, 0)}, v2(1, 0)}, {{"main", v2(0.1, 0)}, v2(1, 0)}), ContractViolation);
}

TEST(Christoffel, EuclideanZero) {
  auto E = euclidean(3);
  const auto G = christoffel_at(*E, {"cartesian", Vec::Constant(3, 0.7)});
  for (const auto& m : G.gamma) EXPECT_EQ(m.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Christoffel, TorusKnownValue) {
  auto T = torus();
  const auto G = christoffel_at(*T, {"main", v2(pi / 2, 0.0)});
  EXPECT_NEAR(G(0, 1, 1), 2.0, 1e-12);
}

// Oracle: the closed-form symbols of g = r^2 dth1^2 + (R + r cos th1)^2 dth2^2
// and the Christoffel formula fed with central differences of g.
TEST(Christoffel, TorusAnalyticMatchesFiniteDifferenceGrid) {
  const double R = 1.0, r = 0.5;
  auto T = torus(R, r);
  double worst_fd = 0.0, worst_formula = 0.0;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const ChartPoint p{"main", v2(-pi + (i + 0.5) * 2 * pi / 50, -pi + (j + 0.5) * 2 * pi / 50)};
      const auto G = christoffel_at(*T, p);
      std::vector<Mat> dg;
      for (int k = 0; k < 2; ++k) {
        const double h = 1e-5;
        Vec a = p.coords, b = p.coords;
        a[k] += h;
        b[k] -= h;
        dg.push_back((T->metric.eval("main", a) - T->metric.eval("main", b)) / (2 * h));
      }
      const auto F = christoffel_from(T->metric.eval("main", p.coords), dg);
      const double th = p.coords[0], w = R + r * std::cos(th);
      Mat exact0 = Mat::Zero(2, 2), exact1 = Mat::Zero(2, 2);
      exact0(1, 1) = w * std::sin(th) / r;
      exact1(0, 1) = exact1(1, 0) = -r * std::sin(th) / w;
      for (int a = 0; a < 2; ++a) {
        worst_fd = std::max(worst_fd, (G.gamma[a] - F.gamma[a]).cwiseAbs().maxCoeff());
        EXPECT_EQ((G.gamma[a] - G.gamma[a].transpose()).cwiseAbs().maxCoeff(), 0.0);
      }
      worst_formula = std::max(worst_formula, (G.gamma[0] - exact0).cwiseAbs().maxCoeff());
      worst_formula = std::max(worst_formula, (G.gamma[1] - exact1).cwiseAbs().maxCoeff());
    }
  }
  EXPECT_LT(worst_fd, 1e-6);
  EXPECT_LT(worst_formula, 1e-12);
}

TEST(Christoffel, SingularMetricIsNumericalError) {
  EXPECT_THROW(christoffel_from(Mat::Zero(2, 2), {Mat::Zero(2, 2), Mat::Zero(2, 2)}), NumericalError);
}

TEST(Christoffel, So3SymmetricInLowerIndices) {
  auto S = so3();
  for (const auto& p : sample_points(*S, 30, 4)) {
    const auto G = christoffel_at(*S, p);
    for (const auto& m : G.gamma) EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Transitions, RoundTripOnOverlaps) {
  for (const auto& M : {torus(), so3()}) {
    int checked = 0;
    for (const auto& p : sample_points(*M, 300, 11)) {
      for (const auto& c : M->charts) {
        auto q = to_chart(*M, p, c.id);
        if (!q) continue;
        auto back = to_chart(*M, *q, p.chart);
        ASSERT_TRUE(back.has_value());
        EXPECT_LT((back->coords - p.coords).cwiseAbs().maxCoeff(), 1e-10) << M->name << " " << c.id;
        ++checked;
      }
    }
    EXPECT_GT(checked, 300);
  }
}

TEST(Transitions, JacobianHookMatchesFiniteDifferences) {
  auto S = so3();
  auto noj = std::make_shared<ManifoldSpec>(*S);
  noj->transition_jacobian = nullptr;
  for (const auto& p : sample_points(*S, 40, 5)) {
    for (const auto& c : S->charts) {
      auto q = to_chart(*S, p, c.id);
      if (!q || c.id == p.chart || chart_margin(*S, *q) < 0.05) continue;
      const Mat a = transition_jacobian(*S, p.chart, c.id, p.coords);
      const Mat b = transition_jacobian(*noj, p.chart, c.id, p.coords);
      EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-7);
    }
  }
}

// Pullback of the ambient metric through the embedding Jacobian.
TEST(Embedding, PullbackReproducesMetric) {
  for (const auto& M : {torus(), so3()}) {
    double worst = 0.0;
    for (const auto& p : sample_points(*M, 400, 13)) {
      Mat J(M->embedding->ambient_dim, M->dim);
      for (int k = 0; k < M->dim; ++k) {
        const double h = 1e-6;
        ChartPoint a = p, b = p;
        a.coords[k] += h;
        b.coords[k] -= h;
        J.col(k) = (M->embedding->map(a) - M->embedding->map(b)) / (2 * h);
      }
      const Mat pull = M->embedding->ambient_scale * J.transpose() * J;
      worst = std::max(worst, (pull - metric_at(*M, p)).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-8) << M->name;
  }
}

TEST(Charts, So3AtlasCoversRotationsWithinTrustRegion) {
  auto S = so3();
  std::mt19937_64 g(21);
  std::normal_distribution<double> N;
  for (int i = 0; i < 500; ++i) {
    Eigen::Vector4d q(N(g), N(g), N(g), N(g));
    q.normalize();
    const Mat R = Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
    const ChartPoint p = so3_point(R);
    EXPECT_GE(chart_margin(*S, p), kTrustMargin);
    EXPECT_LT((S->group->to_matrix(p) - R).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Charts, BestChartPrefersCentre) {
  auto T = torus();
  const ChartPoint p = best_chart(*T, {"main", v2(3.0, 0.0)});
  EXPECT_EQ(p.chart, "shift1");
  EXPECT_NEAR(p.coords[0], 3.0, 1e-15);
}

TEST(Charts, UnknownChartIsChartError) {
  auto T = torus();
  EXPECT_THROW(find_chart(*T, "nope"), ChartError);
}

TEST(Charts, WrongDimensionIsContractViolation) {
  auto T = torus();
  EXPECT_THROW(check_point(*T, {"main", Vec::Zero(3)}), ContractViolation);
}

TEST(CurveLength, ConstantCurveIsZero) {
  auto T = torus();
  std::vector<std::pair<double, ChartPoint>> s;
  for (int k = 0; k < 5; ++k) s.push_back({double(k), {"main", v2(0.2, 0.3)}});
  EXPECT_EQ(curve_length(*T, s), 0.0);
}

TEST(CurveLength, EuclideanSegment) {
  auto E = euclidean(2);
  std::vector<std::pair<double, ChartPoint>> s;
  for (int k = 0; k <= 1000; ++k) s.push_back({k * 1e-3, {"cartesian", v2(3e-3 * k, 4e-3 * k)}});
  EXPECT_NEAR(curve_length(*E, s), 5.0, 1e-6);
}

TEST(CurveLength, TorusOuterHalfCircleAcrossCharts) {
  auto T = torus();
  std::vector<std::pair<double, ChartPoint>> s;
  const int n = 2000;
  for (int k = 0; k <= n; ++k) {
    const double th2 = pi * k / n;
    // The endpoint theta2 = pi is only in the shifted charts.
    s.push_back({double(k), th2 < 3.0 ? ChartPoint{"main", v2(0.0, th2)} : ChartPoint{"shift2", v2(0.0, th2)}});
  }
  EXPECT_NEAR(curve_length(*T, s), pi * 1.5, 1e-5);
}

TEST(CurveLength, ReparametrisationInvariant) {
  auto T = torus();
  std::vector<std::pair<double, ChartPoint>> a, b;
  for (int k = 0; k <= 200; ++k) {
    const double u = k / 200.0;
    const ChartPoint p{"main", v2(0.3 * std::sin(3 * u), 2 * u - 1)};
    a.push_back({u, p});
    b.push_back({u * u * u + u, p});
  }
  EXPECT_NEAR(curve_length(*T, a), curve_length(*T, b), 1e-10);
}

TEST(CurveLength, Errors) {
  auto T = torus();
  EXPECT_THROW(curve_length(*T, {{0.0, {"main", v2(0, 0)}}}), ContractViolation);
  // A chart with no transitions to the other one.
  auto M = std::make_shared<ManifoldSpec>(*euclidean(1));
  M->charts.push_back({"other", {Vec::Constant(1, 10.0), Vec::Constant(1, 20.0)}});
  M->transition = [](const std::string& a, const std::string& b, const Vec& x) -> std::optional<Vec> {
    if (a == b) return x;
    return std::nullopt;
  };
  EXPECT_THROW(curve_length(*M, {{0.0, {"cartesian", Vec::Zero(1)}}, {1.0, {"other", Vec::Constant(1, 15.0)}}}),
               ChartError);
}
