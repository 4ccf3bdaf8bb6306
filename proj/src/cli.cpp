#include "dtorus/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtorus/torus.hpp"

namespace dtorus::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string subcommand;
  std::string system;
  std::vector<std::string> sets;
  std::vector<double> phi{0.0};
  double T = 40.0;
  double tol = 1e-12;
  double rtol = 1e-10;
  double tol_solv = 1e-7;
  std::string grid;
  double t_star = 2.0;
  std::string variant;
  std::string glue;
  std::vector<int> Ns{3, 5, 10};
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string span = "-10:10";
  double cert_T = 10.0;
  double cert_step = 0.5;
  int quad_order = 7;
  double panel_width = 0.25;
  double checkpoint = 1.0;
  double estimate_T = 20.0;
  bool estimate = false;
  bool force = false;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

json to_json(const MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(VectorXd(m.row(i).transpose())));
  return a;
}

json to_json(const DichotomyCertificate& c) {
  return {{"side", to_string(c.side)},
          {"K", number(c.K)},
          {"alpha", number(c.alpha)},
          {"maxViolation", number(c.max_violation)},
          {"T", c.window},
          {"grid_step", c.grid_step},
          {"pairs", c.pairs},
          {"verified", c.verified},
          {"diagnostic", c.diagnostic}};
}

json to_json(const SolvabilityReport& r) {
  return {{"variant", to_string(r.variant)},
          {"residual", to_json(r.residual)},
          {"residual_norm", number(r.residual_norm)},
          {"bracket_residual", to_json(r.bracket_residual)},
          {"bracket_norm", number(r.bracket_norm)},
          {"alternate_residual", to_json(r.alternate_residual)},
          {"alternate_norm", number(r.alternate_norm)},
          {"T", r.horizon},
          {"tail_bound", number(r.tail_bound)},
          {"tolerance", r.tolerance},
          {"solvable", r.solvable}};
}

json to_json(const DegeneracyReport& d) {
  return {{"plus_kernel", d.plus_kernel},
          {"minus_kernel", d.minus_kernel},
          {"plus_complement", d.plus_complement},
          {"minus_complement", d.minus_complement},
          {"variant_one", d.variant_one},
          {"variant_two", d.variant_two}};
}

std::pair<double, double> parse_range(const std::string& text, const char* what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError(std::string(what) + " must be lo:hi, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + " must be lo:hi, got '" + text + "'");
  }
}

struct GridSpec {
  double lo;
  double hi;
  int count;
};

GridSpec parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) throw ConfigError("--grid must be lo:hi:count, got '" + text + "'");
  try {
    std::size_t used = 0;
    const int count = std::stoi(text.substr(b + 1), &used);
    if (used != text.size() - b - 1 || count < 1) throw ConfigError("");
    return {std::stod(text.substr(0, a)), std::stod(text.substr(a + 1, b - a - 1)), count};
  } catch (const std::exception&) {
    throw ConfigError("--grid must be lo:hi:count with count >= 1, got '" + text + "'");
  }
}

Variant parse_variant(const std::string& s) {
  if (s == "one" || s == "1") return Variant::one;
  if (s == "two" || s == "2") return Variant::two;
  throw ConfigError("variant must be one or two, got '" + s + "'");
}

int resolve_jobs(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("DTORUS_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CatalogEntry load(const RunConfig& cfg) {
  CatalogEntry entry = resolve_system(cfg.system);
  for (const auto& s : cfg.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=expression, got '" + s + "'");
    override_expression(entry, s.substr(0, eq), s.substr(eq + 1));
  }
  entry.system.validate();
  return entry;
}

PointOptions point_options(const RunConfig& cfg) {
  PointOptions o;
  o.flow.tol = {cfg.tol, cfg.tol};
  o.flow.checkpoint_interval = cfg.checkpoint;
  o.quad.horizon = cfg.T;
  o.quad.order = cfg.quad_order;
  o.quad.panel_width = cfg.panel_width;
  o.rtol = cfg.rtol;
  o.tol_solv = cfg.tol_solv;
  o.certificate_window = cfg.cert_T;
  o.certificate_step = cfg.cert_step;
  o.estimate_horizon = cfg.estimate_T;
  o.force_estimate = cfg.estimate;
  return o;
}

VectorXd base_point(const RunConfig& cfg, const SystemDefinition& sys) {
  if (static_cast<int>(cfg.phi.size()) != sys.m) {
    throw DimensionError("--phi has " + std::to_string(cfg.phi.size()) + " components, system has m = " +
                         std::to_string(sys.m));
  }
  return Eigen::Map<const VectorXd>(cfg.phi.data(), sys.m);
}

Selection selection(const RunConfig& cfg, int n) {
  if (!cfg.variant.empty() && !cfg.glue.empty()) throw ConfigError("--variant and --glue are mutually exclusive");
  if (!cfg.variant.empty()) return Selection::single(parse_variant(cfg.variant));
  if (cfg.glue.empty() || cfg.glue == "auto") return Selection::automatic();
  std::vector<Variant> a;
  std::stringstream ss(cfg.glue);
  for (std::string item; std::getline(ss, item, ',');) a.push_back(parse_variant(item));
  if (static_cast<int>(a.size()) != n) {
    throw ConfigError("--glue lists " + std::to_string(a.size()) + " variants, system has n = " + std::to_string(n));
  }
  return Selection::glue(std::move(a));
}

std::string selection_text(const Selection& s) {
  switch (s.mode) {
    case Selection::Mode::single: return to_string(s.variant);
    case Selection::Mode::glue_auto: return "glue:auto";
    case Selection::Mode::glue_explicit: {
      std::string t = "glue:";
      for (std::size_t i = 0; i < s.assignment.size(); ++i) t += (i ? "," : "") + std::string(to_string(s.assignment[i]));
      return t;
    }
  }
  return {};
}

std::string assignment_text(const std::vector<Variant>& a) {
  std::string t;
  for (std::size_t i = 0; i < a.size(); ++i) t += (i ? "," : "") + std::string(to_string(a[i]));
  return t;
}

std::vector<VectorXd> grid_points(const RunConfig& cfg, const SystemDefinition& sys) {
  if (cfg.grid.empty()) return default_grid(sys);
  const auto g = parse_grid(cfg.grid);
  return uniform_grid(sys.m, g.lo, g.hi, g.count);
}

json manifest(const RunConfig& cfg, const CatalogEntry& entry) {
  json sets = json::array();
  for (const auto& s : cfg.sets) sets.push_back(s);
  return {{"program", "dtorus"},
          {"version", kVersion},
          {"subcommand", cfg.subcommand},
          {"system", cfg.system},
          {"system_name", entry.name},
          {"m", entry.system.m},
          {"n", entry.system.n},
          {"phase_mode", entry.system.phase_mode == PhaseMode::periodic ? "periodic" : "line"},
          {"set", sets},
          {"phi", cfg.phi},
          {"T", cfg.T},
          {"tol", cfg.tol},
          {"rtol", cfg.rtol},
          {"tol_solv", cfg.tol_solv},
          {"grid", cfg.grid.empty() ? json("default") : json(cfg.grid)},
          {"t_star", cfg.t_star},
          {"variant", cfg.variant.empty() ? json(nullptr) : json(cfg.variant)},
          {"glue", cfg.glue.empty() ? json(nullptr) : json(cfg.glue)},
          {"N", cfg.Ns},
          {"seed", cfg.seed},
          {"span", cfg.span},
          {"cert_T", cfg.cert_T},
          {"cert_step", cfg.cert_step},
          {"quad_order", cfg.quad_order},
          {"panel_width", cfg.panel_width},
          {"checkpoint", cfg.checkpoint},
          {"estimate", cfg.estimate},
          {"estimate_T", cfg.estimate_T},
          {"force", cfg.force},
          {"format", cfg.format}};
}

class Output {
 public:
  Output(const RunConfig& cfg, std::ostream& out) : path_(cfg.out), out_(out) {
    if (!path_.empty()) {
      file_.open(path_, std::ios::binary);
      if (!file_) throw Error("cannot open output file '" + path_ + "'");
    }
  }
  std::ostream& stream() { return path_.empty() ? out_ : file_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ostream& out_;
  std::ofstream file_;
};

void write_json(const RunConfig& cfg, std::ostream& out, json doc) {
  Output o(cfg, out);
  o.stream() << doc.dump(2) << '\n';
}

// CSV manifest: <out>.manifest.json, or stderr when the CSV goes to stdout.
void write_manifest_sidecar(const RunConfig& cfg, const json& m, std::ostream& err) {
  if (cfg.out.empty()) {
    err << m.dump() << '\n';
    return;
  }
  std::ofstream f(cfg.out + ".manifest.json", std::ios::binary);
  if (!f) throw Error("cannot write manifest '" + cfg.out + ".manifest.json'");
  f << m.dump(2) << '\n';
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const CatalogEntry entry = load(cfg);
  const VectorXd phi = base_point(cfg, entry.system);
  const PointOptions opts = point_options(cfg);
  const auto [lo, hi] = parse_range(cfg.span, "--span");
  if (!(lo < hi)) throw ConfigError("--span needs lo < hi");

  const PointPipeline pipeline(entry, phi, opts, std::max(std::abs(lo), std::abs(hi)));
  const auto& oracle = pipeline.oracle();
  const auto& cd = pipeline.critical();
  const auto& pr = pipeline.projectors();

  json flow_doc = {{"span", {lo, hi}},
                   {"phase_lo", to_json(oracle.phase(lo))},
                   {"phase_hi", to_json(oracle.phase(hi))},
                   {"omega_0_hi", to_json(oracle.forward(hi))},
                   {"omega_0_lo", to_json(oracle.forward(lo))},
                   {"inverse_defect_hi", (oracle.forward(hi) * oracle.backward(hi) - MatrixXd::Identity(oracle.dimension(), oracle.dimension())).cwiseAbs().rowwise().sum().maxCoeff()},
                   {"tol", cfg.tol}};
  json critical = {{"D", to_json(cd.D)},
                   {"D_plus", to_json(cd.D_plus)},
                   {"P_kernel", to_json(cd.P_kernel)},
                   {"P_cokernel", to_json(cd.P_cokernel)},
                   {"rank", cd.rank},
                   {"singular_values", to_json(cd.singular_values)},
                   {"rtol", cd.rtol},
                   {"moore_penrose", cd.moore_penrose}};
  json doc = {{"phi", to_json(phi)},
              {"flow", flow_doc},
              {"projectors",
               {{"plus", to_json(pr.plus.base)}, {"minus", to_json(pr.minus.base)}, {"estimated", pr.plus.estimated}}},
              {"certificates", json::array({to_json(pipeline.plus_certificate()), to_json(pipeline.minus_certificate())})},
              {"critical", critical},
              {"degeneracy", to_json(pipeline.degeneracy())},
              {"manifest", manifest(cfg, entry)}};
  write_json(cfg, out, std::move(doc));
  return 0;
}

int cmd_solvability(const RunConfig& cfg, std::ostream& out) {
  const CatalogEntry entry = load(cfg);
  const VectorXd phi = base_point(cfg, entry.system);
  const PointPipeline pipeline(entry, phi, point_options(cfg));
  std::vector<Variant> variants;
  if (cfg.variant.empty() || cfg.variant == "both") {
    variants = {Variant::one, Variant::two};
  } else {
    variants = {parse_variant(cfg.variant)};
  }
  json reports = json::array();
  bool ok = true;
  for (Variant v : variants) {
    reports.push_back(to_json(pipeline.report(v)));
    ok = ok && pipeline.report(v).solvable;
  }
  json doc = {{"phi", to_json(phi)},
              {"reports", reports},
              {"rank", pipeline.critical().rank},
              {"degeneracy", to_json(pipeline.degeneracy())},
              {"manifest", manifest(cfg, entry)}};
  write_json(cfg, out, std::move(doc));
  return ok ? 0 : 2;
}

json sample_json(const TorusSample& s) {
  json points = json::array();
  for (const auto& p : s.points) {
    points.push_back({{"phi", to_json(p.phi)},
                      {"u", to_json(p.u)},
                      {"assignment", assignment_text(p.assignment)},
                      {"residual_norm", number(p.residual_norm)},
                      {"tail_bound", number(p.tail_bound)},
                      {"solvable", p.solvable},
                      {"failed", p.failed},
                      {"message", p.message}});
  }
  return points;
}

void report_point_problems(const TorusSample& s, std::ostream& err) {
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    if (p.failed || !p.solvable) err << "point " << i << " (phi = " << fmt(p.phi(0)) << "): " << p.message << '\n';
  }
}

int cmd_torus(const RunConfig& cfg, std::ostream& out, std::ostream& err, int jobs) {
  const CatalogEntry entry = load(cfg);
  const auto grid = grid_points(cfg, entry.system);
  const Selection sel = selection(cfg, entry.system.n);
  const TorusSample sample = sample_torus(entry, grid, sel, point_options(cfg), jobs);
  json m = manifest(cfg, entry);
  m["selection"] = selection_text(sel);

  if (cfg.format == "json") {
    write_json(cfg, out, {{"points", sample_json(sample)}, {"manifest", m},
                          {"failures", sample.failures()}, {"unsolvable", sample.unsolvable()}});
  } else {
    Output o(cfg, out);
    auto& os = o.stream();
    const int mdim = entry.system.m;
    const int n = entry.system.n;
    if (mdim == 1) {
      os << "phi";
    } else {
      for (int k = 1; k <= mdim; ++k) os << (k > 1 ? "," : "") << "phi" << k;
    }
    for (int i = 1; i <= n; ++i) os << ",u_" << i;
    os << ",residual_norm,T,tail_bound\n";
    for (const auto& p : sample.points) {
      for (int k = 0; k < mdim; ++k) os << (k ? "," : "") << fmt(p.phi(k));
      for (int i = 0; i < n; ++i) os << ',' << fmt(p.u(i));
      os << ',' << fmt(p.residual_norm) << ',' << fmt(cfg.T) << ',' << fmt(p.tail_bound) << '\n';
    }
    m["failures"] = sample.failures();
    m["unsolvable"] = sample.unsolvable();
    write_manifest_sidecar(cfg, m, err);
  }
  report_point_problems(sample, err);
  if (sample.failures() > 0) return 1;
  if (sample.unsolvable() > 0 && !cfg.force) return 2;
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err, int jobs) {
  const CatalogEntry entry = load(cfg);
  const auto grid = grid_points(cfg, entry.system);
  const Selection sel = selection(cfg, entry.system.n);
  const PointOptions opts = point_options(cfg);
  const TorusSample sample = sample_torus(entry, grid, sel, opts, jobs);
  report_point_problems(sample, err);
  const InvarianceReport rep = verify_invariance(entry, sample, cfg.t_star, opts, jobs);
  json defects = json::array();
  for (double d : rep.defects) defects.push_back(number(d));
  json m = manifest(cfg, entry);
  m["selection"] = selection_text(sel);
  write_json(cfg, out,
             {{"t_star", rep.t_star},
              {"max_defect", rep.max_defect},
              {"defects", defects},
              {"failures", rep.failures},
              {"messages", rep.messages},
              {"unsolvable", sample.unsolvable()},
              {"manifest", m}});
  for (const auto& msg : rep.messages) err << msg << '\n';
  if (rep.failures > 0 || sample.failures() > 0) return 1;
  if (sample.unsolvable() > 0 && !cfg.force) return 2;
  return 0;
}

int cmd_ramp(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  CatalogEntry entry;
  entry.name = "paper-l2";
  entry.system = catalog("paper-l2", {{"N", "3"}}).system;
  if (cfg.phi.size() != 1) throw DimensionError("ramp takes a single phase value");
  const VectorXd phi = VectorXd::Constant(1, cfg.phi[0]);
  const auto rows = l2_ramp(cfg.Ns, phi, point_options(cfg));
  json m = manifest(cfg, entry);
  m["system"] = "catalog:paper-l2";
  if (cfg.format == "json") {
    json table = json::array();
    for (const auto& r : rows) {
      table.push_back({{"N", r.N},
                       {"u", to_json(r.u)},
                       {"max_change", number(r.max_change)},
                       {"residual_norm", r.residual_norm},
                       {"tail_bound", number(r.tail_bound)}});
    }
    write_json(cfg, out, {{"phi", cfg.phi[0]}, {"rows", table}, {"manifest", m}});
  } else {
    Output o(cfg, out);
    auto& os = o.stream();
    const int width = rows.back().N;
    os << "N";
    for (int i = 1; i <= width; ++i) os << ",u_" << i;
    os << ",max_change,residual_norm,T,tail_bound\n";
    for (const auto& r : rows) {
      os << r.N;
      for (int i = 0; i < width; ++i) os << ',' << (i < r.u.size() ? fmt(r.u(i)) : "");
      os << ',' << (std::isnan(r.max_change) ? "" : fmt(r.max_change)) << ',' << fmt(r.residual_norm) << ','
         << fmt(cfg.T) << ',' << fmt(r.tail_bound) << '\n';
    }
    write_manifest_sidecar(cfg, m, err);
  }
  return 0;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--system", cfg.system, "config file path or catalog:name?key=value")->required();
  sub->add_option("--set", cfg.sets, "override an expression, key=expr with key a1, f2, P12 (repeatable)");
  sub->add_option("--T", cfg.T, "truncation horizon of the improper integrals")->check(CLI::PositiveNumber);
  sub->add_option("--tol", cfg.tol, "integrator absolute and relative tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--rtol", cfg.rtol, "relative rank tolerance of the pseudoinverse")->check(CLI::Range(1e-300, 0.999));
  sub->add_option("--tol-solv", cfg.tol_solv, "solvability tolerance")->check(CLI::NonNegativeNumber);
  sub->add_option("--cert-T", cfg.cert_T, "dichotomy certificate window")->check(CLI::PositiveNumber);
  sub->add_option("--cert-step", cfg.cert_step, "dichotomy certificate grid step")->check(CLI::PositiveNumber);
  sub->add_option("--quad-order", cfg.quad_order, "Gauss-Legendre order per panel")->check(CLI::Range(1, 64));
  sub->add_option("--panel-width", cfg.panel_width, "quadrature panel width")->check(CLI::PositiveNumber);
  sub->add_option("--checkpoint", cfg.checkpoint, "dense-output checkpoint interval")->check(CLI::PositiveNumber);
  sub->add_flag("--estimate", cfg.estimate, "estimate projectors from singular values even if known");
  sub->add_option("--estimate-T", cfg.estimate_T, "horizon for projector estimation")->check(CLI::PositiveNumber);
  sub->add_option("--out", cfg.out, "output file (default stdout)");
  sub->add_option("--seed", cfg.seed, "seed recorded in the manifest");
  sub->add_option("--jobs", cfg.jobs, "worker threads (default DTORUS_JOBS or logical cores)")->check(CLI::NonNegativeNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Invariant tori of linear skew-product systems in the critical dichotomy case.\n"
               "Expressions: + - * / ^, unary minus binds looser than ^ (-2^2 = -4); variables phi, phi1..phiM, pi;\n"
               "functions sin cos tan tanh sinh cosh exp log sqrt abs, with th sh ch as aliases.",
               "dtorus"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "flow, dichotomy certificates and critical data at one point");
  auto* solv = app.add_subcommand("solvability", "solvability reports at one point (exit 2 if violated)");
  auto* torus = app.add_subcommand("torus", "sample u(phi) on a grid");
  auto* verify = app.add_subcommand("verify", "dynamic invariance defect of the sampled torus");
  auto* ramp = app.add_subcommand("ramp", "Galerkin truncation table for paper-l2");

  for (auto* sub : {analyze, solv, torus, verify}) add_common(sub, cfg);
  for (auto* sub : {analyze, solv, ramp}) sub->add_option("--phi", cfg.phi, "base point")->delimiter(',');
  analyze->add_option("--span", cfg.span, "flow report interval lo:hi");
  solv->add_option("--variant", cfg.variant, "one, two or both")->check(CLI::IsMember({"one", "two", "both"}));
  for (auto* sub : {torus, verify}) {
    sub->add_option("--grid", cfg.grid, "lo:hi:count on each phase axis");
    sub->add_option("--variant", cfg.variant, "use a single variant for all components")->check(CLI::IsMember({"one", "two"}));
    sub->add_option("--glue", cfg.glue, "auto (diagonal P only) or a list like one,two");
    sub->add_flag("--force", cfg.force, "exit 0 even if some points violate solvability");
  }
  torus->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  verify->add_option("--t-star", cfg.t_star, "integration time, either sign");

  ramp->add_option("--N", cfg.Ns, "ascending truncation sizes >= 3")->delimiter(',');
  ramp->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  ramp->add_option("--T", cfg.T, "truncation horizon")->check(CLI::PositiveNumber);
  ramp->add_option("--tol", cfg.tol, "integrator tolerance")->check(CLI::PositiveNumber);
  ramp->add_option("--rtol", cfg.rtol, "rank tolerance")->check(CLI::Range(1e-300, 0.999));
  ramp->add_option("--tol-solv", cfg.tol_solv, "solvability tolerance")->check(CLI::NonNegativeNumber);
  ramp->add_option("--quad-order", cfg.quad_order, "Gauss-Legendre order per panel")->check(CLI::Range(1, 64));
  ramp->add_option("--panel-width", cfg.panel_width, "quadrature panel width")->check(CLI::PositiveNumber);
  ramp->add_option("--out", cfg.out, "output file (default stdout)");
  ramp->add_option("--seed", cfg.seed, "seed recorded in the manifest");

  std::vector<std::string> storage{"dtorus"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return 1;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  cfg.subcommand = chosen->get_name();
  if (cfg.format.empty()) cfg.format = (cfg.subcommand == "torus" || cfg.subcommand == "ramp") ? "csv" : "json";
  try {
    const int jobs = resolve_jobs(cfg.jobs);
    if (cfg.subcommand == "analyze") return cmd_analyze(cfg, out);
    if (cfg.subcommand == "solvability") return cmd_solvability(cfg, out);
    if (cfg.subcommand == "torus") return cmd_torus(cfg, out, err, jobs);
    if (cfg.subcommand == "verify") return cmd_verify(cfg, out, err, jobs);
    return cmd_ramp(cfg, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace dtorus::cli
