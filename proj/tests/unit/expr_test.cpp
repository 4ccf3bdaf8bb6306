#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "dtorus/expr.hpp"

using namespace dtorus;

namespace {

double at(const std::string& src, std::initializer_list<double> phi) {
  const std::vector<double> v(phi);
  return parse(src).eval(std::span<const double>(v));
}

// Random well-formed source text over phi1, phi2 with every operator and function.
std::string generate(std::mt19937_64& rng, int depth) {
  static const char* fns[] = {"sin", "cos", "tanh", "sinh", "cosh", "exp", "abs", "th", "ch", "sh"};
  static const char* ops[] = {"+", "-", "*", "/"};
  std::uniform_int_distribution<int> pick(0, 9);
  const int k = depth <= 0 ? pick(rng) % 3 : pick(rng);
  switch (k) {
    case 0: return std::to_string(std::uniform_int_distribution<int>(0, 99)(rng)) + "." +
                   std::to_string(std::uniform_int_distribution<int>(0, 999)(rng));
    case 1: return "phi1";
    case 2: return "phi2";
    case 3: case 4: case 5:
      return "(" + generate(rng, depth - 1) + ops[pick(rng) % 4] + generate(rng, depth - 1) + ")";
    case 6: return "-" + generate(rng, depth - 1);
    case 7: return generate(rng, 0) + "^" + std::to_string(pick(rng) % 4);
    default: return std::string(fns[pick(rng)]) + "(" + generate(rng, depth - 1) + ")";
  }
}

bool same_bits(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

TEST(Expr, SpecValues) {
  EXPECT_EQ(at("tanh(phi)", {0.0}), 0.0);
  EXPECT_EQ(at("sinh(phi)/cosh(phi)^3", {0.0}), 0.0);
  EXPECT_NEAR(at("sinh(phi)/cosh(phi)^3", {1.0}), std::sinh(1.0) / std::pow(std::cosh(1.0), 3), 1e-15);
  EXPECT_NEAR(at("sinh(phi)/cosh(phi)^3", {1.0}), 0.319850, 1e-6);
  EXPECT_EQ(at("2.5", {7.0}), 2.5);
  EXPECT_EQ(at("phi1+phi2", {1.0, 2.0}), 3.0);
  EXPECT_NEAR(at("tanh(phi)", {2.0}), 0.964027, 1e-6);
}

TEST(Expr, Precedence) {
  EXPECT_EQ(at("2+3*4", {0.0}), 14.0);
  EXPECT_EQ(at("-2^2", {0.0}), -4.0);
  EXPECT_EQ(at("2^3^2", {0.0}), 512.0);
  EXPECT_EQ(at("2^-1", {0.0}), 0.5);
  EXPECT_EQ(at("(1-2)-3", {0.0}), -4.0);
  EXPECT_EQ(at("1-2-3", {0.0}), -4.0);
  EXPECT_EQ(at("8/2/2", {0.0}), 2.0);
  EXPECT_EQ(at("-(2)^2", {0.0}), -4.0);
  EXPECT_EQ(at("(-2)^2", {0.0}), 4.0);
}

TEST(Expr, AliasesAndConstants) {
  EXPECT_EQ(at("th(phi)", {0.3}), std::tanh(0.3));
  EXPECT_EQ(at("sh(phi)", {0.3}), std::sinh(0.3));
  EXPECT_EQ(at("ch(phi)", {0.3}), std::cosh(0.3));
  EXPECT_EQ(at("phi", {0.3}), at("phi1", {0.3}));
  EXPECT_DOUBLE_EQ(at("pi", {0.0}), M_PI);
  EXPECT_EQ(at("1e-3", {0.0}), 1e-3);
  EXPECT_EQ(at("sqrt(4)+log(exp(2))+abs(-1)+tan(0)", {0.0}), 5.0);
  EXPECT_TRUE(parse("0").is_constant(0.0));
  EXPECT_FALSE(parse("phi").is_constant(0.0));
}

TEST(Expr, Arity) {
  EXPECT_EQ(parse("3").arity(), 0);
  EXPECT_EQ(parse("phi").arity(), 1);
  EXPECT_TRUE(parse("phi").uses_alias());
  EXPECT_EQ(parse("phi1*phi3").arity(), 3);
  EXPECT_THROW(parse("phi1+phi2").eval(Eigen::VectorXd::Zero(1)), DimensionError);
}

TEST(Expr, NonFiniteResultsPassThrough) {
  EXPECT_TRUE(std::isinf(at("1/0", {0.0})));
  EXPECT_TRUE(std::isnan(at("log(-1)", {0.0})));
}

TEST(Expr, SyntaxErrorsCarryOffset) {
  try {
    parse("1 + * 2");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
    EXPECT_FALSE(e.expected().empty());
  }
  try {
    parse("2phi");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 1u);
  }
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("(1+2"), ParseError);
  EXPECT_THROW(parse("1+2)"), ParseError);
  EXPECT_THROW(parse("sin 1"), ParseError);
}

TEST(Expr, UnknownNames) {
  EXPECT_THROW(parse("foo(1)"), ParseError);
  EXPECT_THROW(parse("x+1"), ParseError);
  EXPECT_THROW(parse("phi0"), ParseError);
  EXPECT_THROW(parse("sin(1, 2)"), ParseError);
}

TEST(Expr, RoundTripOverGeneratedCorpus) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> phi(-3.0, 3.0);
  for (int k = 0; k < 60; ++k) {
    const std::string src = generate(rng, 4);
    const Expression e = parse(src);
    const Expression back = parse(e.str());
    EXPECT_EQ(back.str(), e.str()) << src;
    for (int s = 0; s < 100; ++s) {
      const double v[2] = {phi(rng), phi(rng)};
      ASSERT_TRUE(same_bits(e.eval(v), back.eval(v))) << src << " -> " << e.str();
    }
  }
}

TEST(Expr, EvaluationIsDeterministic) {
  const Expression e = parse("sinh(phi)/cosh(phi)^4 + exp(-phi^2)");
  const double v[1] = {0.731};
  EXPECT_EQ(e.eval(v), e.eval(v));
  EXPECT_EQ(e.eval(v), parse("sinh(phi)/cosh(phi)^4 + exp(-phi^2)").eval(v));
}
