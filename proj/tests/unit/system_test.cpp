#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "dtorus/system.hpp"

using namespace dtorus;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

const char* kTwoDimensional = R"js({
  "m": 1, "n": 2,
  "a": ["1"],
  "P": [["tanh(phi)", "0"], ["0", "-tanh(phi)"]],
  "f": ["sinh(phi)/cosh(phi)^3", "sinh(phi)/cosh(phi)^4"]
})js";

double idempotency(const MatrixXd& c) { return inf_norm(MatrixXd(c * c - c)); }

}  // namespace

TEST(System, LoadsTwoDimensionalConfig) {
  const auto sys = load_config(write_temp("dtorus_2d.json", kTwoDimensional));
  EXPECT_EQ(sys.m, 1);
  EXPECT_EQ(sys.n, 2);
  EXPECT_EQ(sys.phase_mode, PhaseMode::line);
  EXPECT_TRUE(sys.diagonal());
  const CatalogEntry ref = catalog("paper-2d");
  for (double phi : {-2.0, 0.0, 0.4, 3.0}) {
    const VectorXd p = VectorXd::Constant(1, phi);
    EXPECT_EQ(sys.matrix(p), ref.system.matrix(p));
    EXPECT_EQ(sys.forcing(p), ref.system.forcing(p));
    EXPECT_EQ(sys.velocity(p), ref.system.velocity(p));
  }
}

TEST(System, MissingField) {
  try {
    entry_from_json_text(R"({"m": 1, "n": 1, "a": ["1"], "P": [["0"]]})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("missing field f"), std::string::npos) << e.what();
  }
}

TEST(System, MatrixShapeMismatch) {
  try {
    entry_from_json_text(R"({"m": 1, "n": 2, "a": ["1"], "P": [["0","0"],["0","0"],["0","0"]], "f": ["0","0"]})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("dimension mismatch"), std::string::npos) << e.what();
  }
  EXPECT_THROW(entry_from_json_text(R"({"m": 1, "n": 2, "a": ["1"], "P": [["0"],["0"]], "f": ["0","0"]})"),
               ConfigError);
  EXPECT_THROW(entry_from_json_text(R"({"m": 1, "n": 2, "a": ["1"], "P": [["0","0"],["0","0"]], "f": ["0"]})"),
               ConfigError);
}

TEST(System, ParseErrorsNameTheField) {
  try {
    entry_from_json_text(R"({"m": 1, "n": 1, "a": ["1"], "P": [["tanh(phi"]], "f": ["0"]})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("P[0][0]"), std::string::npos) << e.what();
  }
}

TEST(System, PhaseIndexBeyondM) {
  EXPECT_THROW(entry_from_json_text(R"({"m": 1, "n": 1, "a": ["1"], "P": [["phi2"]], "f": ["0"]})"), ConfigError);
}

TEST(System, NumbersAcceptedAsConstants) {
  const auto e = entry_from_json_text(R"({"m": 1, "n": 1, "a": [1], "P": [[-1.5]], "f": [0]})");
  EXPECT_EQ(e.system.matrix(VectorXd::Zero(1))(0, 0), -1.5);
}

TEST(System, PeriodicModeReducesAngles) {
  const auto e = entry_from_json_text(
      R"({"m": 1, "n": 1, "a": ["1"], "P": [["-1"]], "f": ["phi"], "phase_mode": "periodic"})");
  EXPECT_NEAR(e.system.forcing(VectorXd::Constant(1, 2 * M_PI + 0.5))(0), 0.5, 1e-12);
  EXPECT_THROW(entry_from_json_text(R"({"m": 1, "n": 1, "a": ["1"], "P": [["-1"]], "f": ["0"], "phase_mode": "x"})"),
               ConfigError);
}

TEST(System, OptionalProjectorsAndTorus) {
  const auto e = entry_from_json_text(R"({"m": 1, "n": 1, "a": ["1"], "P": [["-1"]], "f": ["1"],
    "projectors": {"plus": [["1"]], "minus": [["0"]]}, "torus": ["1"]})");
  ASSERT_TRUE(e.known_projectors.has_value());
  ASSERT_TRUE(e.known_torus.has_value());
  EXPECT_EQ(e.torus(VectorXd::Zero(1))(0), 1.0);
}

TEST(Catalog, TwoDimensionalCatalog) {
  const CatalogEntry e = catalog("paper-2d");
  EXPECT_EQ(e.system.P(0, 0).str(), parse("tanh(phi)").str());
  EXPECT_EQ(e.system.P(1, 1).str(), parse("-tanh(phi)").str());
  const VectorXd u = e.torus(VectorXd::Zero(1));
  EXPECT_DOUBLE_EQ(u(0), -1.0 / 3);
  EXPECT_DOUBLE_EQ(u(1), -0.5);
  const VectorXd p = VectorXd::Constant(1, 0.7);
  const MatrixXd cp = e.known_projectors->plus.eval(p), cm = e.known_projectors->minus.eval(p);
  EXPECT_EQ(cp, (MatrixXd(2, 2) << 0, 0, 0, 1).finished());
  EXPECT_EQ(cm, (MatrixXd(2, 2) << 1, 0, 0, 0).finished());
  EXPECT_EQ(idempotency(cp), 0.0);
  EXPECT_EQ(idempotency(cm), 0.0);
}

TEST(Catalog, L2Catalog) {
  const CatalogEntry e = catalog("paper-l2", {{"N", "3"}});
  EXPECT_EQ(e.system.n, 3);
  const VectorXd p = VectorXd::Zero(1);
  EXPECT_EQ(e.known_projectors->plus.eval(p), VectorXd((VectorXd(3) << 0, 0, 1).finished()).asDiagonal().toDenseMatrix());
  for (int N : {3, 4, 7, 12}) {
    const CatalogEntry l2 = catalog("paper-l2", {{"N", std::to_string(N)}});
    const MatrixXd cp = l2.known_projectors->plus.eval(p), cm = l2.known_projectors->minus.eval(p);
    EXPECT_EQ(cp - MatrixXd::Identity(N, N) + cm, MatrixXd::Zero(N, N));
    for (int i = 0; i < N; ++i) {
      const double phi = 0.3;
      const double expected = std::sinh(phi) / std::pow(std::cosh(phi), i + 3);
      EXPECT_NEAR(l2.system.forcing(VectorXd::Constant(1, phi))(i), expected, 1e-15);
    }
  }
}

TEST(Catalog, KnownProjectorsIdempotentAlongSamples) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> phi(-10.0, 10.0);
  for (const auto& e : {catalog("paper-2d"), catalog("paper-l2", {{"N", "6"}})}) {
    for (int k = 0; k < 100; ++k) {
      const VectorXd p = VectorXd::Constant(1, phi(rng));
      EXPECT_LE(idempotency(e.known_projectors->plus.eval(p)), 1e-12);
      EXPECT_LE(idempotency(e.known_projectors->minus.eval(p)), 1e-12);
    }
  }
}

TEST(Catalog, Errors) {
  EXPECT_THROW(catalog("nonexistent"), ConfigError);
  EXPECT_THROW(catalog("paper-l2", {{"N", "2"}}), ConfigError);
  EXPECT_THROW(catalog("paper-l2", {}), ConfigError);
}

TEST(Catalog, ResolveAndOverride) {
  CatalogEntry e = resolve_system("catalog:paper-l2?N=5");
  EXPECT_EQ(e.system.n, 5);
  e = resolve_system("catalog:paper-2d");
  override_expression(e, "f1", "1");
  EXPECT_EQ(e.system.forcing(VectorXd::Zero(1))(0), 1.0);
  EXPECT_FALSE(e.known_torus.has_value());
  EXPECT_TRUE(e.known_projectors.has_value());
  override_expression(e, "P12", "0.5");
  EXPECT_FALSE(e.known_projectors.has_value());
  EXPECT_FALSE(e.system.diagonal());
  EXPECT_THROW(override_expression(e, "f3", "1"), ConfigError);
  EXPECT_THROW(override_expression(e, "q1", "1"), ConfigError);
  const auto path = write_temp("dtorus_resolve.json", kTwoDimensional);
  EXPECT_EQ(resolve_system(path.string()).system.n, 2);
  EXPECT_THROW(resolve_system("/nonexistent/file.json"), ConfigError);
}
