#include "dtorus/system.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace dtorus {

using nlohmann::json;

MatrixXd ExpressionMatrix::eval(const VectorXd& phi) const {
  MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = (*this)(i, j).eval(phi);
  return out;
}

ExpressionMatrix ExpressionMatrix::constant(const MatrixXd& m) {
  ExpressionMatrix out;
  out.rows = static_cast<int>(m.rows());
  out.cols = static_cast<int>(m.cols());
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out.entries.push_back(Expression::constant(m(i, j)));
  return out;
}

VectorXd SystemDefinition::reduce(const VectorXd& phi) const {
  if (phase_mode == PhaseMode::line) return phi;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  VectorXd out = phi;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = std::fmod(out(i), two_pi);
    if (out(i) < 0.0) out(i) += two_pi;
  }
  return out;
}

VectorXd SystemDefinition::velocity(const VectorXd& phi) const {
  const VectorXd arg = reduce(phi);
  VectorXd out(m);
  for (int i = 0; i < m; ++i) out(i) = a[static_cast<std::size_t>(i)].eval(arg);
  return out;
}

MatrixXd SystemDefinition::matrix(const VectorXd& phi) const { return P.eval(reduce(phi)); }

VectorXd SystemDefinition::forcing(const VectorXd& phi) const {
  const VectorXd arg = reduce(phi);
  VectorXd out(n);
  for (int i = 0; i < n; ++i) out(i) = f[static_cast<std::size_t>(i)].eval(arg);
  return out;
}

bool SystemDefinition::diagonal() const {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !P(i, j).is_constant(0.0)) return false;
  return true;
}

namespace {

void check_expression(const Expression& e, int m, const std::string& where) {
  if (e.arity() > m) {
    throw ConfigError(where + ": references phi" + std::to_string(e.arity()) + " but m = " + std::to_string(m));
  }
  if (e.uses_alias() && m > 1) throw ConfigError(where + ": bare 'phi' is only allowed when m = 1");
}

}  // namespace

void SystemDefinition::validate() const {
  if (m < 1) throw ConfigError("m must be >= 1");
  if (n < 1) throw ConfigError("n must be >= 1");
  if (static_cast<int>(a.size()) != m) {
    throw ConfigError("dimension mismatch: a has " + std::to_string(a.size()) + " entries, m = " + std::to_string(m));
  }
  if (P.rows != n || P.cols != n) {
    throw ConfigError("dimension mismatch: P is " + std::to_string(P.rows) + "x" + std::to_string(P.cols) +
                      ", n = " + std::to_string(n));
  }
  if (static_cast<int>(f.size()) != n) {
    throw ConfigError("dimension mismatch: f has " + std::to_string(f.size()) + " entries, n = " + std::to_string(n));
  }
  for (int i = 0; i < m; ++i) check_expression(a[static_cast<std::size_t>(i)], m, "a[" + std::to_string(i) + "]");
  for (int i = 0; i < n; ++i) {
    check_expression(f[static_cast<std::size_t>(i)], m, "f[" + std::to_string(i) + "]");
    for (int j = 0; j < n; ++j)
      check_expression(P(i, j), m, "P[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
}

VectorXd CatalogEntry::torus(const VectorXd& phi) const {
  if (!known_torus) throw Error("catalog entry '" + name + "' has no closed-form torus");
  const VectorXd arg = system.reduce(phi);
  VectorXd out(static_cast<Eigen::Index>(known_torus->size()));
  for (std::size_t i = 0; i < known_torus->size(); ++i) out(static_cast<Eigen::Index>(i)) = (*known_torus)[i].eval(arg);
  return out;
}

namespace {

Expression expression_field(const json& value, const std::string& where) {
  std::string src;
  if (value.is_string()) src = value.get<std::string>();
  else if (value.is_number()) {
    return Expression::constant(value.get<double>());
  } else {
    throw ConfigError(where + ": expected an expression string or number");
  }
  try {
    return parse(src);
  } catch (const ParseError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ConfigError(std::string("missing field ") + key);
  return *it;
}

int require_int(const json& doc, const char* key) {
  const json& v = require(doc, key);
  if (!v.is_number_integer()) throw ConfigError(std::string("field ") + key + " must be an integer");
  return v.get<int>();
}

std::vector<Expression> expression_vector(const json& v, const std::string& key, int expected) {
  if (!v.is_array()) throw ConfigError("field " + key + " must be an array");
  if (static_cast<int>(v.size()) != expected) {
    throw ConfigError("dimension mismatch: " + key + " has " + std::to_string(v.size()) + " entries, expected " +
                      std::to_string(expected));
  }
  std::vector<Expression> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(expression_field(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

ExpressionMatrix expression_matrix(const json& v, const std::string& key, int n) {
  if (!v.is_array()) throw ConfigError("field " + key + " must be an array of rows");
  if (static_cast<int>(v.size()) != n) {
    throw ConfigError("dimension mismatch: " + key + " has " + std::to_string(v.size()) + " rows, declared n = " +
                      std::to_string(n));
  }
  ExpressionMatrix out;
  out.rows = out.cols = n;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& row = v[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ConfigError("dimension mismatch: " + key + "[" + std::to_string(i) + "] must have " + std::to_string(n) +
                        " entries");
    }
    for (std::size_t j = 0; j < row.size(); ++j)
      out.entries.push_back(expression_field(row[j], key + "[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
  }
  return out;
}

CatalogEntry entry_from_json(const json& doc, const std::string& name) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  CatalogEntry entry;
  entry.name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : name;
  SystemDefinition& sys = entry.system;
  sys.m = require_int(doc, "m");
  sys.n = require_int(doc, "n");
  if (sys.m < 1) throw ConfigError("m must be >= 1");
  if (sys.n < 1) throw ConfigError("n must be >= 1");
  sys.a = expression_vector(require(doc, "a"), "a", sys.m);
  sys.P = expression_matrix(require(doc, "P"), "P", sys.n);
  sys.f = expression_vector(require(doc, "f"), "f", sys.n);
  if (auto it = doc.find("phase_mode"); it != doc.end()) {
    const std::string mode = it->is_string() ? it->get<std::string>() : "";
    if (mode == "line") sys.phase_mode = PhaseMode::line;
    else if (mode == "periodic") sys.phase_mode = PhaseMode::periodic;
    else throw ConfigError("phase_mode must be \"line\" or \"periodic\"");
  }
  if (auto it = doc.find("projectors"); it != doc.end()) {
    ProjectorExpressions pe;
    pe.plus = expression_matrix(require(*it, "plus"), "projectors.plus", sys.n);
    pe.minus = expression_matrix(require(*it, "minus"), "projectors.minus", sys.n);
    entry.known_projectors = std::move(pe);
  }
  if (auto it = doc.find("torus"); it != doc.end()) entry.known_torus = expression_vector(*it, "torus", sys.n);
  sys.validate();
  return entry;
}

}  // namespace

CatalogEntry entry_from_json_text(const std::string& text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return entry_from_json(doc, name);
}

CatalogEntry load_entry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return entry_from_json_text(buffer.str(), path.stem().string());
}

SystemDefinition load_config(const std::filesystem::path& path) { return load_entry(path).system; }

namespace {

ExpressionMatrix diagonal_expressions(const std::vector<std::string>& diag) {
  const int n = static_cast<int>(diag.size());
  ExpressionMatrix out;
  out.rows = out.cols = n;
  out.entries.assign(static_cast<std::size_t>(n * n), Expression());
  for (int i = 0; i < n; ++i) out(i, i) = parse(diag[static_cast<std::size_t>(i)]);
  return out;
}

ExpressionMatrix diagonal_constant(const std::vector<double>& diag) {
  VectorXd d(static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) d(static_cast<Eigen::Index>(i)) = diag[i];
  return ExpressionMatrix::constant(d.asDiagonal());
}

CatalogEntry paper_2d() {
  CatalogEntry e;
  e.name = "paper-2d";
  SystemDefinition& s = e.system;
  s.m = 1;
  s.n = 2;
  s.a = {parse("1")};
  s.P = diagonal_expressions({"tanh(phi)", "-tanh(phi)"});
  s.f = {parse("sinh(phi)/cosh(phi)^3"), parse("sinh(phi)/cosh(phi)^4")};
  s.phase_mode = PhaseMode::line;
  e.known_projectors = ProjectorExpressions{diagonal_constant({0, 1}), diagonal_constant({1, 0})};
  e.known_torus = std::vector<Expression>{parse("-1/(3*cosh(phi)^2)"), parse("-1/(2*cosh(phi)^3)")};
  return e;
}

CatalogEntry paper_l2(int N) {
  if (N < 3) throw ConfigError("paper-l2 needs truncation dimension N >= 3, got " + std::to_string(N));
  CatalogEntry e;
  e.name = "paper-l2";
  SystemDefinition& s = e.system;
  s.m = 1;
  s.n = N;
  s.a = {parse("1")};
  std::vector<std::string> diag;
  std::vector<double> plus, minus;
  std::vector<Expression> torus;
  for (int i = 1; i <= N; ++i) {
    const bool unstable = i <= 2;
    diag.push_back(unstable ? "tanh(phi)" : "-tanh(phi)");
    plus.push_back(unstable ? 0.0 : 1.0);
    minus.push_back(unstable ? 1.0 : 0.0);
    s.f.push_back(parse("sinh(phi)/cosh(phi)^" + std::to_string(i + 2)));
    // Antiderivative of sh/ch^k is -1/((k-1) ch^(k-1)).
    const int denom = unstable ? i + 2 : i;
    torus.push_back(parse("-1/(" + std::to_string(denom) + "*cosh(phi)^" + std::to_string(i + 1) + ")"));
  }
  s.P = diagonal_expressions(diag);
  s.phase_mode = PhaseMode::line;
  e.known_projectors = ProjectorExpressions{diagonal_constant(plus), diagonal_constant(minus)};
  e.known_torus = std::move(torus);
  return e;
}

}  // namespace

CatalogEntry catalog(const std::string& name, const std::map<std::string, std::string>& params) {
  if (name == "paper-2d") return paper_2d();
  if (name == "paper-l2") {
    auto it = params.find("N");
    if (it == params.end()) throw ConfigError("paper-l2 requires parameter N");
    int N = 0;
    try {
      std::size_t used = 0;
      N = std::stoi(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("paper-l2: N must be an integer, got '" + it->second + "'");
    }
    return paper_l2(N);
  }
  throw ConfigError("unknown catalog entry '" + name + "'");
}

CatalogEntry resolve_system(const std::string& source) {
  constexpr std::string_view prefix = "catalog:";
  if (source.rfind(prefix, 0) != 0) return load_entry(source);
  std::string rest = source.substr(prefix.size());
  std::map<std::string, std::string> params;
  const auto q = rest.find('?');
  std::string name = rest.substr(0, q);
  if (q != std::string::npos) {
    std::stringstream ss(rest.substr(q + 1));
    std::string kv;
    while (std::getline(ss, kv, '&')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("catalog parameter '" + kv + "' must be key=value");
      params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  }
  return catalog(name, params);
}

void override_expression(CatalogEntry& entry, const std::string& key, const std::string& expression) {
  SystemDefinition& s = entry.system;
  auto index = [&](const std::string& digits, int limit) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(digits, &used);
      if (used != digits.size()) k = 0;
    } catch (const std::exception&) {
      k = 0;
    }
    if (k < 1 || k > limit) throw ConfigError("override key '" + key + "' is out of range");
    return k - 1;
  };
  Expression e;
  try {
    e = parse(expression);
  } catch (const ParseError& err) {
    throw ConfigError("override " + key + ": " + err.what());
  }
  if (key.size() < 2) throw ConfigError("override key '" + key + "' must look like a1, f2 or P12");
  const std::string digits = key.substr(1);
  switch (key[0]) {
    case 'a':
      s.a[static_cast<std::size_t>(index(digits, s.m))] = e;
      entry.known_projectors.reset();
      break;
    case 'f':
      s.f[static_cast<std::size_t>(index(digits, s.n))] = e;
      break;
    case 'P': {
      if (digits.size() != 2 && digits.find(',') == std::string::npos) {
        throw ConfigError("override key '" + key + "': use P<i><j> or P<i>,<j>");
      }
      const auto comma = digits.find(',');
      const std::string r = comma == std::string::npos ? digits.substr(0, 1) : digits.substr(0, comma);
      const std::string c = comma == std::string::npos ? digits.substr(1) : digits.substr(comma + 1);
      s.P(index(r, s.n), index(c, s.n)) = e;
      entry.known_projectors.reset();
      break;
    }
    default: throw ConfigError("override key '" + key + "' must start with a, f or P");
  }
  entry.known_torus.reset();
  s.validate();
}

}  // namespace dtorus
