#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geoavg/geodesics.hpp"
#include "geoavg/manifolds.hpp"

using namespace geoavg;
namespace {

const double pi = std::numbers::pi;

Vec v2(double a, double b) { return Vec(Eigen::Vector2d(a, b)); }

GeodesicSolverConfig shooting_only() {
  GeodesicSolverConfig c;
  c.use_closed_form = false;
  return c;
}

Mat random_rotation(std::mt19937_64& g) {
  std::normal_distribution<double> N;
  Eigen::Vector4d q(N(g), N(g), N(g), N(g));
  q.normalize();
  return Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
}

// Truncated power series, independent of the Rodrigues formula.
Mat expm_series(const Mat& X) {
  Mat out = Mat::Identity(X.rows(), X.cols()), term = out;
  for (int k = 1; k < 60; ++k) {
    term = term * X / k;
    out += term;
  }
  return out;
}

Mat rot_axis_angle(Eigen::Vector3d axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

// Torus points in a 0.5 rad box around a random base point.
std::vector<ChartPoint> torus_cluster(std::mt19937_64& g, int n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const Vec c = v2(2.0 * U(g), 2.0 * U(g));
  std::vector<ChartPoint> out;
  for (int i = 0; i < n; ++i) out.push_back({"main", c + 0.25 * v2(U(g), U(g))});
  return out;
}

}  // namespace

TEST(GeodesicIvp, ZeroVelocityStays) {
  for (const auto& M : {euclidean(2), torus()}) {
    const ChartPoint x = {M->charts[0].id, v2(0.3, -0.2)};
    const auto r = geodesic_ivp(*M, x, {x, Vec::Zero(2)}, 5.0, {});
    EXPECT_EQ((r.base.coords - x.coords).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.components.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(GeodesicIvp, EuclideanStraightLine) {
  auto E = euclidean(2);
  const ChartPoint x{"cartesian", v2(0, 0)};
  const auto r = geodesic_ivp(*E, x, {x, v2(1, 2)}, 1.0, {});
  EXPECT_NEAR(r.base.coords[0], 1.0, 1e-14);
  EXPECT_NEAR(r.base.coords[1], 2.0, 1e-14);
}

TEST(GeodesicIvp, TorusTubeCircleHalfTurn) {
  const double r = 0.5;
  auto T = torus(1.0, r);
  const ChartPoint x{"main", v2(0, 0)};
  const auto end = geodesic_ivp(*T, x, {x, v2(1.0 / r, 0)}, pi * r, {});
  // theta1 = pi is reached in a shifted chart.
  auto in_shift = to_chart(*T, end.base, "shift1");
  ASSERT_TRUE(in_shift.has_value());
  EXPECT_NEAR(in_shift->coords[0], pi, 1e-9);
  EXPECT_NEAR(in_shift->coords[1], 0.0, 1e-12);
  // Dense-step oracle.
  GeodesicSolverConfig fine;
  fine.step_size = 1e-4;
  const auto ref = geodesic_ivp(*T, x, {x, v2(1.0 / r, 0)}, pi * r, fine);
  auto ref_s = to_chart(*T, ref.base, "shift1");
  EXPECT_LT((ref_s->coords - in_shift->coords).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(GeodesicIvp, SpeedConservedOnTorus) {
  auto T = torus();
  std::mt19937_64 g(5);
  std::normal_distribution<double> N;
  for (int i = 0; i < 20; ++i) {
    const ChartPoint x{"main", v2(N(g), N(g))};
    const Vec v = v2(N(g), N(g));
    const double s0 = norm(*T, {x, v});
    const double len = 3.0;
    const auto end = geodesic_ivp(*T, x, {x, v}, len, {});
    const double s1 = norm(*T, end);
    EXPECT_LT(std::abs(s1 - s0) / len, 1e-8);
  }
}

TEST(GeodesicIvp, So3IntegrationMatchesOneParameterSubgroup) {
  auto S = so3();
  const ChartPoint I = so3_point(Mat::Identity(3, 3));
  for (double theta : {0.3, 1.0, 2.5}) {
    const Mat xi = theta * S->group->algebra_basis[0];
    const Vec v = S->group->chart_of(I, xi);
    const auto end = geodesic_ivp(*S, I, {I, v}, 1.0, shooting_only());
    const Mat expect = expm_series(xi);
    EXPECT_LT((S->group->to_matrix(end.base) - expect).cwiseAbs().maxCoeff(), 1e-8) << theta;
    // rotation in the (1,2)-plane
    EXPECT_NEAR(expect(0, 0), std::cos(theta), 1e-14);
    EXPECT_NEAR(expect(2, 2), 1.0, 1e-14);
    const ChartPoint hook = exp_map(*S, I, {I, v}, {});
    EXPECT_LT((S->group->to_matrix(hook) - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GeodesicIvp, NegativeLengthIsContractViolation) {
  auto E = euclidean(1);
  const ChartPoint x{"cartesian", Vec::Zero(1)};
  EXPECT_THROW(geodesic_ivp(*E, x, {x, Vec::Ones(1)}, -1.0, {}), ContractViolation);
}

TEST(GeodesicIvp, EscapeFromBoundedChart) {
  auto M = std::make_shared<ManifoldSpec>(*euclidean(1));
  M->charts[0].domain = {Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)};
  const ChartPoint x{"cartesian", Vec::Zero(1)};
  GeodesicSolverConfig c;
  c.use_closed_form = false;
  M->closed_form = {};
  try {
    geodesic_ivp(*M, x, {x, Vec::Ones(1)}, 5.0, c);
    FAIL() << "expected EscapeError";
  } catch (const EscapeError& e) {
    EXPECT_EQ(e.last_valid().chart, "cartesian");
    EXPECT_LT(std::abs(e.last_valid().coords[0]), 1.0);
  }
}

TEST(SolverConfig, Validation) {
  GeodesicSolverConfig c;
  c.step_size = 0;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = {};
  c.max_shooting_iters = 0;
  EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(ExpMap, Examples) {
  auto E = euclidean(2);
  const ChartPoint x{"cartesian", v2(1, 1)};
  EXPECT_TRUE(exp_map(*E, x, {x, v2(2, -1)}, {}).coords.isApprox(v2(3, 0)));
  auto T = torus();
  const ChartPoint y{"main", v2(0.2, 0.1)};
  EXPECT_EQ((exp_map(*T, y, {y, v2(0, 0)}, {}).coords - y.coords).norm(), 0.0);
}

TEST(LogMap, Examples) {
  auto E = euclidean(2);
  const ChartPoint a{"cartesian", v2(1, 1)}, b{"cartesian", v2(4, 5)};
  EXPECT_TRUE(log_map(*E, a, b, {}).components.isApprox(v2(3, 4)));
  auto T = torus();
  const ChartPoint x{"main", v2(0, 0)};
  EXPECT_LT(log_map(*T, x, x, {}).components.norm(), 1e-12);
  const ChartPoint y{"main", v2(0, pi / 4)};
  const Vec v = log_map(*T, x, y, {}).components;
  EXPECT_NEAR(v[0], 0.0, 1e-9);
  EXPECT_NEAR(v[1], pi / 4, 1e-9);
  // IVP oracle with a fine step.
  GeodesicSolverConfig fine;
  fine.step_size = 1e-4;
  const auto end = geodesic_ivp(*T, x, {x, v}, 1.0, fine);
  EXPECT_LT((end.base.coords - y.coords).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(LogMap, WrapAroundPicksShortGeodesic) {
  auto T = torus();
  const ChartPoint x{"main", v2(0, 3.0)}, y{"main", v2(0, -3.0)};
  // Across the seam theta2 = pi the gap is 2 pi - 6.
  EXPECT_NEAR(distance(*T, x, y, {}), 1.5 * (2 * pi - 6.0), 1e-8);
}

TEST(LogMap, ResultCarriesMultistartDiagnostics) {
  auto T = torus();
  const auto r = log_map_detailed(*T, {"main", v2(0.1, 0.2)}, {"main", v2(0.3, 0.5)}, {});
  EXPECT_GE(r.starts_tried, 1);
  EXPECT_GE(r.starts_converged, 1);
  EXPECT_FALSE(r.upper_bound);
}

TEST(LogMap, DeterministicUnderSeed) {
  auto T = torus();
  const ChartPoint a{"main", v2(0.4, -1.0)}, b{"main", v2(-0.2, 0.1)};
  GeodesicSolverConfig c;
  c.seed = 42;
  const Vec v1 = log_map(*T, a, b, c).components;
  const Vec v2_ = log_map(*T, a, b, c).components;
  EXPECT_EQ((v1 - v2_).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Distance, Examples) {
  auto E = euclidean(2);
  EXPECT_NEAR(distance(*E, {"cartesian", v2(0, 0)}, {"cartesian", v2(3, 4)}, {}), 5.0, 1e-15);
  auto S = so3();
  const ChartPoint I = so3_point(Mat::Identity(3, 3));
  const ChartPoint Rz = so3_point(rot_axis_angle({0, 0, 1}, pi / 3));
  EXPECT_NEAR(distance(*S, I, Rz, {}), pi / 3, 1e-12);
  EXPECT_NEAR(distance(*S, I, Rz, shooting_only()), pi / 3, 1e-6);
  EXPECT_EQ(distance(*S, I, I, {}), 0.0);
  auto T = torus();
  EXPECT_LT(distance(*T, {"main", v2(1, 1)}, {"main", v2(1, 1)}, {}), 1e-12);
}

TEST(Distance, So3ClosedFormMatchesShooting) {
  auto S = so3();
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int n = 0;
  while (n < 50) {
    const Mat A = random_rotation(g);
    std::normal_distribution<double> N;
    const Eigen::Vector3d axis(N(g), N(g), N(g));
    const double angle = (pi / 2) * U(g);
    const Mat B = A * rot_axis_angle(axis, angle);
    const ChartPoint a = so3_point(A), b = so3_point(B);
    EXPECT_NEAR(distance(*S, a, b, {}), angle, 1e-12);
    EXPECT_LT(std::abs(distance(*S, a, b, shooting_only()) - distance(*S, a, b, {})), 1e-6);
    ++n;
  }
}

TEST(Distance, SymmetryAndTriangleSo3) {
  auto S = so3();
  std::mt19937_64 g(23);
  for (int i = 0; i < 100; ++i) {
    const ChartPoint a = so3_point(random_rotation(g)), b = so3_point(random_rotation(g)),
                     c = so3_point(random_rotation(g));
    EXPECT_LT(std::abs(distance(*S, a, b, {}) - distance(*S, b, a, {})), 1e-6);
    EXPECT_LE(distance(*S, a, c, {}), distance(*S, a, b, {}) + distance(*S, b, c, {}) + 1e-6);
  }
}

TEST(Distance, SymmetryAndTriangleEuclidean) {
  auto E = euclidean(3);
  std::mt19937_64 g(29);
  std::normal_distribution<double> N;
  auto pt = [&] { return ChartPoint{"cartesian", Vec(Eigen::Vector3d(N(g), N(g), N(g)))}; };
  for (int i = 0; i < 100; ++i) {
    const auto a = pt(), b = pt(), c = pt();
    EXPECT_LT(std::abs(distance(*E, a, b, {}) - distance(*E, b, a, {})), 1e-6);
    EXPECT_LE(distance(*E, a, c, {}), distance(*E, a, b, {}) + distance(*E, b, c, {}) + 1e-6);
  }
}

// Pairs and triples are drawn from 0.5 rad neighbourhoods: shooting is only
// claimed inside normal neighbourhoods, not between arbitrary far points.
TEST(Distance, SymmetryAndTriangleTorus) {
  auto T = torus();
  std::mt19937_64 g(31);
  for (int i = 0; i < 100; ++i) {
    const auto p = torus_cluster(g, 3);
    const double ab = distance(*T, p[0], p[1], {}), ba = distance(*T, p[1], p[0], {});
    EXPECT_LT(std::abs(ab - ba), 1e-6);
    EXPECT_LE(distance(*T, p[0], p[2], {}), ab + distance(*T, p[1], p[2], {}) + 1e-6);
  }
}

TEST(Injectivity, Examples) {
  const std::vector<double> grid{0.1, 0.25, 0.5};
  auto E = euclidean(2);
  EXPECT_EQ(injectivity_probe(*E, {"cartesian", v2(0, 0)}, grid, {}), 0.5);
  auto T = torus();
  EXPECT_EQ(injectivity_probe(*T, {"main", v2(0, 0)}, grid, {}), 0.5);
  auto S = so3();
  EXPECT_EQ(injectivity_probe(*S, so3_point(Mat::Identity(3, 3)), {0.25, 0.5, 1.0}, {}), 1.0);
  EXPECT_EQ(injectivity_probe(*S, so3_point(Mat::Identity(3, 3)), {0.5, 1.0}, shooting_only()), 1.0);
}

TEST(Injectivity, BadGridIsContractViolation) {
  auto E = euclidean(1);
  EXPECT_THROW(injectivity_probe(*E, {"cartesian", Vec::Zero(1)}, {0.5, 0.1}, {}), ContractViolation);
}

TEST(Injectivity, CutLocusDetectedOnSo3) {
  auto S = so3();
  // Beyond pi the exponential stops being injective.
  const double r = injectivity_probe(*S, so3_point(Mat::Identity(3, 3)), {1.0, 2.0, 3.0, 3.5}, {});
  EXPECT_EQ(r, 3.0);
}

TEST(ExpLog, RoundTripInsideProbedRadius) {
  auto T = torus();
  std::mt19937_64 g(37);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const ChartPoint x{"main", v2(2 * U(g), 2 * U(g))};
    const Vec dir = v2(U(g), U(g));
    const Vec v = 0.4 * dir / norm(*T, {x, dir});
    const ChartPoint y = exp_map(*T, x, {x, v}, {});
    const ChartPoint back = exp_map(*T, x, log_map(*T, x, y, {}), {});
    EXPECT_LT(distance(*T, back, y, {}), 1e-6);
  }
}
