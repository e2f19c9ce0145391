#include "weylcheck/expression.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "weylcheck/error.hpp"

using namespace weylcheck;

namespace {

Jet3 eval(std::string_view text, std::vector<double> coords = {0.5, 0.2, -0.3, 1.1}) {
  return Expression::parse(text).evaluate(coords);
}

}  // namespace

TEST(Expression, ArithmeticPrecedence) {
  EXPECT_DOUBLE_EQ(eval("1 + 2 * 3").value(), 7.0);
  EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3").value(), 9.0);
  EXPECT_DOUBLE_EQ(eval("2 ^ 3 ^ 2").value(), 512.0);
  EXPECT_DOUBLE_EQ(eval("-2 ^ 2").value(), -4.0);
  EXPECT_DOUBLE_EQ(eval("8 / 4 / 2").value(), 1.0);
}

TEST(Expression, ConstantsAndFunctions) {
  EXPECT_DOUBLE_EQ(eval("pi").value(), std::numbers::pi);
  EXPECT_DOUBLE_EQ(eval("exp(0) + log(1) + cos(0) + sin(0) + sqrt(4)").value(), 4.0);
  EXPECT_DOUBLE_EQ(eval("pow(2, 10)").value(), 1024.0);
  EXPECT_DOUBLE_EQ(eval("1.5e1").value(), 15.0);
}

TEST(Expression, TimeIsFirstCoordinate) {
  const Jet3 a = eval("t * t");
  const Jet3 b = eval("x0 * x0");
  EXPECT_EQ(a, b);
  EXPECT_DOUBLE_EQ(a.d1(0), 1.0);
  EXPECT_DOUBLE_EQ(a.d2(0, 0), 2.0);
}

TEST(Expression, DerivativesMatchHandWrittenJets) {
  const std::vector<double> p{0.5, 0.2, -0.3, 1.1};
  const Jet3 got = eval("exp(2*t) * sin(x1)^2 / (1 + x3^2)", p);
  const Jet3 t = Jet3::variable(4, 0, p[0]);
  const Jet3 x1 = Jet3::variable(4, 1, p[1]);
  const Jet3 x3 = Jet3::variable(4, 3, p[3]);
  const Jet3 want = exp(2.0 * t) * sin(x1) * sin(x1) / (1.0 + x3 * x3);
  EXPECT_LT(max_abs_diff(got, want), 1e-14);
}

TEST(Expression, MaxVariable) {
  EXPECT_EQ(Expression::parse("3").max_variable(), -1);
  EXPECT_EQ(Expression::parse("t + x2*x5").max_variable(), 5);
}

TEST(Expression, VariableBeyondPointIsRejected) {
  EXPECT_THROW((void)eval("x6", {0.1, 0.2, 0.3, 0.4}), ConfigError);
}

TEST(Expression, MalformedInputReportsPosition) {
  for (const char* bad : {"", "1 +", "sin(", "foo(1)", "x9", "2 $ 3", "pow(1)", "(1"}) {
    try {
      (void)Expression::parse(bad);
      FAIL() << "accepted '" << bad << "'";
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find("position"), std::string::npos) << e.what();
    }
  }
}

TEST(Expression, DomainErrorsSurfaceAtEvaluation) {
  const auto e = Expression::parse("log(x1)");
  EXPECT_THROW((void)e.evaluate(std::vector<double>{0.0, -1.0, 0.0, 0.0}), NumericalError);
  EXPECT_THROW((void)eval("1 / (t - 0.5)"), NumericalError);
}
