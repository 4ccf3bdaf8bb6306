#pragma once

// Scalar expressions of the phase variables phi1..phim.
//
// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?        right associative
//   primary := number | name | name '(' sum ')' | '(' sum ')'
//
// Unary minus binds looser than '^', so "-2^2" is -4 and "2^-1" is 0.5.
// There is no implicit multiplication: "2phi" is a syntax error.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtorus/types.hpp"

namespace dtorus {

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset, std::vector<std::string> expected = {});

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

enum class Function : std::uint8_t { sin, cos, tan, tanh, sinh, cosh, exp, log, sqrt, abs };

const char* function_name(Function f);

class Expression {
 public:
  enum class Kind : std::uint8_t { constant, variable, negate, function, add, sub, mul, div, pow };

  struct Node {
    Kind kind;
    double value = 0.0;     // constant
    int index = 0;          // variable: zero-based phase index
    Function fn = Function::sin;
    int lhs = -1;           // operand of unary nodes, left operand of binary nodes
    int rhs = -1;
  };

  /// The constant 0.
  Expression();

  static Expression constant(double value);

  double eval(std::span<const double> phi) const;
  double eval(const VectorXd& phi) const { return eval(std::span<const double>(phi.data(), phi.size())); }

  /// Number of phase components this expression needs (highest index used + 1).
  int arity() const { return arity_; }
  /// True when the bare alias "phi" appears.
  bool uses_alias() const { return uses_alias_; }
  /// True when the tree is a single literal equal to `v`.
  bool is_constant(double v) const;

  /// Fully parenthesised text that parses back to an identically evaluating tree.
  std::string str() const;

  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  friend class Parser;
  friend Expression parse(std::string_view);

  double eval_node(int i, std::span<const double> phi) const;
  void print_node(int i, std::string& out) const;

  std::vector<Node> nodes_;
  int root_ = 0;
  int arity_ = 0;
  bool uses_alias_ = false;
};

Expression parse(std::string_view src);

}  // namespace dtorus
