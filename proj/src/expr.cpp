#include "dtorus/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <utility>

namespace dtorus {

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) out += ", ";
    out += expected[i];
  }
  return out;
}

struct FunctionEntry {
  const char* name;
  Function fn;
};

// th, ch and sh are the short names used for the hyperbolic functions in the literature.
constexpr FunctionEntry kFunctions[] = {
    {"sin", Function::sin},   {"cos", Function::cos},   {"tan", Function::tan},
    {"tanh", Function::tanh}, {"sinh", Function::sinh}, {"cosh", Function::cosh},
    {"th", Function::tanh},   {"sh", Function::sinh},   {"ch", Function::cosh},
    {"exp", Function::exp},   {"log", Function::log},   {"sqrt", Function::sqrt},
    {"abs", Function::abs},
};

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t offset, std::vector<std::string> expected)
    : Error(message + " at offset " + std::to_string(offset) +
            (expected.empty() ? std::string() : " (expected " + join_expected(expected) + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

const char* function_name(Function f) {
  switch (f) {
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::tan: return "tan";
    case Function::tanh: return "tanh";
    case Function::sinh: return "sinh";
    case Function::cosh: return "cosh";
    case Function::exp: return "exp";
    case Function::log: return "log";
    case Function::sqrt: return "sqrt";
    case Function::abs: return "abs";
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expression run() {
    skip_space();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_, {"number", "identifier", "(", "-"});
    out_.root_ = sum();
    skip_space();
    if (pos_ < src_.size()) throw ParseError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_,
                                             {"+", "-", "*", "/", "^", "end of input"});
    return std::move(out_);
  }

 private:
  int push(Expression::Node node) {
    out_.nodes_.push_back(node);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int binary(Expression::Kind kind, int lhs, int rhs) {
    Expression::Node n{kind};
    n.lhs = lhs;
    n.rhs = rhs;
    return push(n);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int sum() {
    int lhs = product();
    for (;;) {
      if (accept('+')) lhs = binary(Expression::Kind::add, lhs, product());
      else if (accept('-')) lhs = binary(Expression::Kind::sub, lhs, product());
      else return lhs;
    }
  }

  int product() {
    int lhs = unary();
    for (;;) {
      if (accept('*')) lhs = binary(Expression::Kind::mul, lhs, unary());
      else if (accept('/')) lhs = binary(Expression::Kind::div, lhs, unary());
      else return lhs;
    }
  }

  int unary() {
    if (accept('-')) {
      Expression::Node n{Expression::Kind::negate};
      n.lhs = unary();
      return push(n);
    }
    if (accept('+')) return unary();
    return power();
  }

  int power() {
    int base = primary();
    if (accept('^')) return binary(Expression::Kind::pow, base, unary());
    return base;
  }

  int primary() {
    skip_space();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_, {"number", "identifier", "(", "-"});
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_, {"number", "identifier", "(", "-"});
  }

  void expect(char c) {
    if (!accept(c)) {
      throw ParseError(pos_ < src_.size() ? "unexpected character '" + std::string(1, src_[pos_]) + "'"
                                          : std::string("unexpected end of input"),
                       pos_, {std::string(1, c)});
    }
  }

  int number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_) throw ParseError("malformed number", start, {"number"});
    if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      throw ParseError("implicit multiplication is not supported", pos_, {"*", "+", "-", "/", "^", ")"});
    }
    Expression::Node n{Expression::Kind::constant};
    n.value = value;
    return push(n);
  }

  int name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view id = src_.substr(start, pos_ - start);

    for (const auto& entry : kFunctions) {
      if (id == entry.name) return call(entry.fn, id, start);
    }
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == '(') throw ParseError("unknown function '" + std::string(id) + "'", start);

    if (id == "pi") {
      Expression::Node n{Expression::Kind::constant};
      n.value = std::numbers::pi;
      return push(n);
    }
    int index = -1;
    if (id == "phi") {
      index = 0;
      out_.uses_alias_ = true;
    } else if (id.size() > 3 && id.substr(0, 3) == "phi") {
      const auto digits = id.substr(3);
      int k = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && k >= 1 && digits[0] != '0') index = k - 1;
    }
    if (index < 0) throw ParseError("unknown identifier '" + std::string(id) + "'", start);
    out_.arity_ = std::max(out_.arity_, index + 1);
    Expression::Node n{Expression::Kind::variable};
    n.index = index;
    return push(n);
  }

  int call(Function fn, std::string_view id, std::size_t start) {
    skip_space();
    if (pos_ >= src_.size() || src_[pos_] != '(') {
      throw ParseError("function '" + std::string(id) + "' needs an argument", pos_, {"("});
    }
    ++pos_;
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == ')') {
      throw ParseError("arity mismatch: '" + std::string(id) + "' takes 1 argument, got 0", start);
    }
    int arg = sum();
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == ',') {
      throw ParseError("arity mismatch: '" + std::string(id) + "' takes 1 argument", start);
    }
    expect(')');
    Expression::Node n{Expression::Kind::function};
    n.fn = fn;
    n.lhs = arg;
    return push(n);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Expression out_;
};

Expression::Expression() {
  nodes_.push_back(Node{Kind::constant});
  root_ = 0;
}

Expression Expression::constant(double value) {
  Expression e;
  e.nodes_[0].value = value;
  return e;
}

Expression parse(std::string_view src) {
  Parser p(src);
  Expression e = p.run();
  return e;
}

bool Expression::is_constant(double v) const {
  const Node& n = nodes_[static_cast<std::size_t>(root_)];
  return n.kind == Kind::constant && n.value == v;
}

double Expression::eval(std::span<const double> phi) const {
  if (static_cast<int>(phi.size()) < arity_) {
    throw DimensionError("expression uses phi" + std::to_string(arity_) + " but only " +
                         std::to_string(phi.size()) + " phase components were given");
  }
  return eval_node(root_, phi);
}

double Expression::eval_node(int i, std::span<const double> phi) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  switch (n.kind) {
    case Kind::constant: return n.value;
    case Kind::variable: return phi[static_cast<std::size_t>(n.index)];
    case Kind::negate: return -eval_node(n.lhs, phi);
    case Kind::add: return eval_node(n.lhs, phi) + eval_node(n.rhs, phi);
    case Kind::sub: return eval_node(n.lhs, phi) - eval_node(n.rhs, phi);
    case Kind::mul: return eval_node(n.lhs, phi) * eval_node(n.rhs, phi);
    case Kind::div: return eval_node(n.lhs, phi) / eval_node(n.rhs, phi);
    case Kind::pow: return std::pow(eval_node(n.lhs, phi), eval_node(n.rhs, phi));
    case Kind::function: {
      const double x = eval_node(n.lhs, phi);
      switch (n.fn) {
        case Function::sin: return std::sin(x);
        case Function::cos: return std::cos(x);
        case Function::tan: return std::tan(x);
        case Function::tanh: return std::tanh(x);
        case Function::sinh: return std::sinh(x);
        case Function::cosh: return std::cosh(x);
        case Function::exp: return std::exp(x);
        case Function::log: return std::log(x);
        case Function::sqrt: return std::sqrt(x);
        case Function::abs: return std::abs(x);
      }
    }
  }
  return 0.0;
}

std::string Expression::str() const {
  std::string out;
  print_node(root_, out);
  return out;
}

void Expression::print_node(int i, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  auto bin = [&](const char* op) {
    out += '(';
    print_node(n.lhs, out);
    out += op;
    print_node(n.rhs, out);
    out += ')';
  };
  switch (n.kind) {
    case Kind::constant: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, n.value);
      (void)ec;
      out.append(buf, ptr);
      return;
    }
    case Kind::variable:
      out += "phi" + std::to_string(n.index + 1);
      return;
    case Kind::negate:
      out += "(-";
      print_node(n.lhs, out);
      out += ')';
      return;
    case Kind::function:
      out += function_name(n.fn);
      out += '(';
      print_node(n.lhs, out);
      out += ')';
      return;
    case Kind::add: bin("+"); return;
    case Kind::sub: bin("-"); return;
    case Kind::mul: bin("*"); return;
    case Kind::div: bin("/"); return;
    case Kind::pow: bin("^"); return;
  }
}

}  // namespace dtorus
