#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "geoavg/geodesics.hpp"
#include "geoavg/systems.hpp"

using namespace geoavg;
namespace {

const double pi = std::numbers::pi;

double ev(const std::string& s, Vec x = Vec(), double t = 0.0) { return Expr::parse(s)(x, t); }

int error_line(const std::string& text) {
  try {
    parse_system_definition(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_field(const std::string& text) {
  try {
    parse_system_definition(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

const char* kMinimal =
    "[system]\n"
    "name = demo\n"
    "period = 2*pi\n"
    "x0 = 1\n"
    "[manifold]\n"
    "kind = euclidean\n"
    "dimension = 1\n"
    "[field]\n"
    "f_1 = -x_1 + cos(t)\n";

}  // namespace

TEST(Expr, Precedence) {
  EXPECT_EQ(ev("1 + 2 * 3"), 7.0);
  EXPECT_EQ(ev("(1 + 2) * 3"), 9.0);
  EXPECT_EQ(ev("2 ^ 3 ^ 2"), 512.0);
  EXPECT_EQ(ev("-2 ^ 2"), -4.0);
  EXPECT_EQ(ev("2 ^ -1"), 0.5);
  EXPECT_EQ(ev("8 / 4 / 2"), 1.0);
  EXPECT_EQ(ev("5 - 3 - 1"), 1.0);
  EXPECT_EQ(ev("--3"), 3.0);
  EXPECT_EQ(ev("+3"), 3.0);
  EXPECT_EQ(ev("1e-3 * 1E3"), 1.0);
}

TEST(Expr, FunctionsAndSymbols) {
  EXPECT_EQ(ev("pow(2, 10)"), 1024.0);
  EXPECT_NEAR(ev("sin(pi / 2)"), 1.0, 1e-15);
  EXPECT_EQ(ev("e"), std::numbers::e);
  EXPECT_EQ(ev("2*pi"), 2 * pi);
  EXPECT_EQ(ev("sqrt(16) + abs(-2) + log(exp(1))"), 7.0);
  EXPECT_NEAR(ev("tan(pi/4) + cos(0)"), 2.0, 1e-15);
  EXPECT_EQ(ev("t * t", Vec(), 3.0), 9.0);
  EXPECT_EQ(ev("x_1 * x_2 - x_2", Vec(Eigen::Vector2d(3, 4))), 8.0);
}

TEST(Expr, Metadata) {
  const Expr a = Expr::parse("x_3 + sin(t)");
  EXPECT_EQ(a.max_var(), 3);
  EXPECT_TRUE(a.uses_time());
  EXPECT_EQ(a.source(), "x_3 + sin(t)");
  EXPECT_FALSE(Expr::parse("x_1").uses_time());
  EXPECT_EQ(Expr::parse("2 * t").max_var(), 0);
}

TEST(Expr, Errors) {
  EXPECT_THROW(Expr::parse(""), ExprError);
  EXPECT_THROW(Expr::parse("1 +"), ExprError);
  EXPECT_THROW(Expr::parse("(1"), ExprError);
  EXPECT_THROW(Expr::parse("1 2"), ExprError);
  EXPECT_THROW(Expr::parse("foo(1)"), ExprError);
  EXPECT_THROW(Expr::parse("x_0"), ExprError);
  EXPECT_THROW(Expr::parse("x_3", 2), ExprError);
  EXPECT_THROW(Expr::parse("x_1", 0), ExprError);
  EXPECT_THROW(Expr::parse("pow(1)"), ExprError);
  try {
    Expr::parse("1 + * 2");
    FAIL();
  } catch (const ExprError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(Config, ParsesMinimalFile) {
  const auto d = parse_system_definition(kMinimal);
  EXPECT_EQ(d.name, "demo");
  EXPECT_EQ(*d.period, 2 * pi);
  EXPECT_EQ(d.dimension, 1);
  ASSERT_EQ(d.field.size(), 1u);
  const auto b = build_system(d);
  EXPECT_EQ(b.nominal.eval(b.x0, 0.0)[0], 0.0);
  EXPECT_FALSE(b.nominal.autonomous);
  EXPECT_FALSE(b.reference_averaged.has_value());
}

TEST(Config, ErrorsCarryLineAndField) {
  const std::string base = kMinimal;
  EXPECT_EQ(error_line(base + "bogus = 1\n"), 10);
  EXPECT_EQ(error_field(base + "bogus = 1\n"), "bogus");
  EXPECT_EQ(error_line(base + "f_1 = 0\n"), 10);  // duplicate
  EXPECT_EQ(error_line(base + "[extras]\n"), 10);
  EXPECT_EQ(error_field("[system]\nname = a\nx0 = 1\n[manifold]\nkind = euclidean\ndimension = 1\n[field]\n"), "field.f_1");
  EXPECT_EQ(error_field("[system]\nname = a\n[manifold]\nkind = euclidean\ndimension = 1\n[field]\nf_1 = 0\n"), "system.x0");
  EXPECT_EQ(error_line("[system]\nname = a\nx0 = 1, 2\n[manifold]\nkind = euclidean\ndimension = 1\n[field]\nf_1 = 0\n"), 3);
  EXPECT_EQ(error_field("[system]\nname = a\nx0 = 1\n[manifold]\nkind = sphere\n[field]\nf_1 = 0\n"), "kind");
  EXPECT_EQ(error_line("[system]\nname = a\nperiod = t\nx0 = 1\n[manifold]\nkind = euclidean\ndimension = 1\n[field]\nf_1 = 0\n"), 3);
  EXPECT_EQ(error_line("[system]\nname = a\nperiod = -1\nx0 = 1\n[manifold]\nkind = euclidean\ndimension = 1\n[field]\nf_1 = 0\n"), 3);
  EXPECT_EQ(error_line("name = a\n"), 1);
  EXPECT_EQ(error_line("[system\n"), 1);
  EXPECT_EQ(error_line("[system]\njunk\n"), 2);
  EXPECT_EQ(error_field("[system]\nname = a\nx0 = 1\n[manifold]\nkind = euclidean\ndimension = 1.5\n[field]\nf_1 = 0\n"),
            "dimension");
  EXPECT_EQ(error_field("[system]\nname = a\nx0 = 1, 1\n[manifold]\nkind = torus\nR = 0.5\nr = 1\n[field]\nf_1 = 0\nf_2 = 0\n"),
            "R");
}

TEST(Config, BadExpressionsAndStatesFailAtBuild) {
  auto d = parse_system_definition(kMinimal);
  d.field = {"x_2"};
  EXPECT_THROW(build_system(d), ConfigError);
  d = parse_system_definition(kMinimal);
  d.field = {"sin("};
  EXPECT_THROW(build_system(d), ConfigError);
  auto s = so3_system().definition;
  s.x0 = {1, 0, 0, 0, 1, 0, 0, 0, -1};
  EXPECT_THROW(build_system(s), ConfigError);
}

TEST(Config, NotesAndComments) {
  const std::string text = std::string("# leading comment\n") + kMinimal + "note = ignored?\n";
  EXPECT_THROW(parse_system_definition(text), ConfigError);  // note is not a [field] key
  const std::string ok =
      "[system]\nname = n\nnote = first\nnote = second\nx0 = 0\n; other comment\n"
      "[manifold]\nkind = euclidean\ndimension = 1\n[field]\nf_1 = 1\n";
  const auto d = parse_system_definition(ok);
  ASSERT_EQ(d.notes.size(), 2u);
  EXPECT_EQ(d.notes[1], "second");
}

TEST(Config, RoundTripOfBuiltins) {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (const auto& sys : {so3_system(), torus_system(), scalar_system(), linear_system()}) {
    const std::string text = serialize_system_definition(sys.definition);
    const auto d = parse_system_definition(text);
    EXPECT_EQ(serialize_system_definition(d), text) << sys.name;
    const auto re = build_system(d);
    EXPECT_EQ(re.period, sys.period);
    EXPECT_EQ(re.x0.chart, sys.x0.chart);
    EXPECT_EQ((re.x0.coords - sys.x0.coords).cwiseAbs().maxCoeff(), 0.0);
    for (int i = 0; i < 50; ++i) {
      ChartPoint p = sys.x0;
      for (Eigen::Index k = 0; k < p.coords.size(); ++k) p.coords[k] += 0.5 * U(g);
      const double t = 20.0 * U(g);
      const Vec a = sys.nominal.eval(p, t), b = re.nominal.eval(p, t);
      EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-15 * std::max(1.0, a.cwiseAbs().maxCoeff())) << sys.name;
      const Vec ra = sys.reference_averaged->eval(p, t), rb = re.reference_averaged->eval(p, t);
      EXPECT_LE((ra - rb).cwiseAbs().maxCoeff(), 1e-15 * std::max(1.0, ra.cwiseAbs().maxCoeff())) << sys.name;
    }
    EXPECT_TRUE(re.reference_averaged->autonomous);
  }
}

TEST(Config, TorusAnglesAreWrapped) {
  auto d = torus_system().definition;
  d.x0 = {1.0 + 2 * pi, -2 * pi};
  const auto b = build_system(d);
  EXPECT_NEAR(b.x0.coords[0], 1.0, 1e-14);
  EXPECT_NEAR(b.x0.coords[1], 0.0, 1e-14);
}

// Upper half-plane with metric dy^2/y^2 + dx^2/y^2: vertical lines are
// geodesics and d((0,1), (0,e)) = 1.
TEST(Config, ChartKindManifold) {
  const std::string text =
      "[system]\nname = hyperbolic\nperiod = 2*pi\nx0 = 0, 1\n"
      "[manifold]\nkind = chart\ndimension = 2\ndomain_lo = -10, 0.01\ndomain_hi = 10, 100\n"
      "metric_1_1 = 1 / x_2^2\nmetric_1_2 = 0\nmetric_2_1 = 0\nmetric_2_2 = 1 / x_2^2\n"
      "embed_1 = x_1\nembed_2 = x_2\nembed_3 = 0\n"
      "[field]\nf_1 = sin(t)\nf_2 = -x_2 * cos(t)^2\n"
      "[averaged]\nf_1 = 0\nf_2 = -0.5 * x_2\n";
  const auto b = build_system(parse_system_definition(text));
  EXPECT_EQ(b.manifold->dim, 2);
  EXPECT_EQ(b.x0.chart, "chart");
  ASSERT_TRUE(b.manifold->embedding.has_value());
  EXPECT_EQ(b.manifold->embedding->ambient_dim, 3);
  const ChartPoint a{"chart", Vec(Eigen::Vector2d(0, 1))}, c{"chart", Vec(Eigen::Vector2d(0, std::numbers::e))};
  EXPECT_NEAR(distance(*b.manifold, a, c, {}), 1.0, 1e-7);
  EXPECT_EQ(serialize_system_definition(b.definition), serialize_system_definition(parse_system_definition(
                                                           serialize_system_definition(b.definition))));
  auto d = b.definition;
  d.metric[0] = "1 / x_2^2 + t";
  EXPECT_THROW(build_system(d), ConfigError);
  d = b.definition;
  d.x0 = {0, -1};
  EXPECT_THROW(build_system(d), ConfigError);
}

TEST(Config, LoadFromFile) {
  const std::string path = testing::TempDir() + "geoavg_cfg_test.ini";
  {
    std::ofstream o(path);
    o << serialize_system_definition(torus_system().definition);
  }
  const auto b = resolve_system(path);
  EXPECT_EQ(b.name, "torus");
  EXPECT_TRUE(b.center.has_value());
  EXPECT_TRUE(b.printed_averaged.has_value());
  EXPECT_THROW(load_system_file(path + ".missing"), ConfigError);
}
