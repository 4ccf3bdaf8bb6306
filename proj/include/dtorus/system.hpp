#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtorus/expr.hpp"
#include "dtorus/types.hpp"

namespace dtorus {

enum class PhaseMode { periodic, line };

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Row-major square (or rectangular) grid of expressions.
struct ExpressionMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Expression> entries;

  const Expression& operator()(int i, int j) const { return entries[static_cast<std::size_t>(i * cols + j)]; }
  Expression& operator()(int i, int j) { return entries[static_cast<std::size_t>(i * cols + j)]; }

  MatrixXd eval(const VectorXd& phi) const;
  static ExpressionMatrix constant(const MatrixXd& m);
};

/// dphi/dt = a(phi), dx/dt = P(phi) x + f(phi) on the phase space times R^n.
struct SystemDefinition {
  int m = 1;
  int n = 1;
  std::vector<Expression> a;
  ExpressionMatrix P;
  std::vector<Expression> f;
  PhaseMode phase_mode = PhaseMode::line;

  /// Argument actually fed to the expressions (angles reduced mod 2*pi in periodic mode).
  VectorXd reduce(const VectorXd& phi) const;

  VectorXd velocity(const VectorXd& phi) const;
  MatrixXd matrix(const VectorXd& phi) const;
  VectorXd forcing(const VectorXd& phi) const;

  /// True when every off-diagonal entry of P is the literal 0.
  bool diagonal() const;

  /// Throws ConfigError if dimensions disagree or an expression references phi_k with k > m.
  void validate() const;
};

struct ProjectorExpressions {
  ExpressionMatrix plus;
  ExpressionMatrix minus;
};

struct CatalogEntry {
  std::string name;
  SystemDefinition system;
  std::optional<ProjectorExpressions> known_projectors;
  std::optional<std::vector<Expression>> known_torus;

  VectorXd torus(const VectorXd& phi) const;
};

/// Reads a JSON document with fields m, n, a, P, f and optional phase_mode, projectors, torus.
SystemDefinition load_config(const std::filesystem::path& path);
CatalogEntry load_entry(const std::filesystem::path& path);
CatalogEntry entry_from_json_text(const std::string& text, const std::string& name = "config");

/// Built-in systems: "paper-2d" and "paper-l2" (parameter N >= 3).
CatalogEntry catalog(const std::string& name, const std::map<std::string, std::string>& params = {});

/// Resolves "catalog:name?key=value&..." or a config file path.
CatalogEntry resolve_system(const std::string& source);

/// Replaces one expression, addressed as a1, f2, P12 (1-based indices). Drops the known torus.
void override_expression(CatalogEntry& entry, const std::string& key, const std::string& expression);

}  // namespace dtorus
