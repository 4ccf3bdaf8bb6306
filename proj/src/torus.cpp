#include "dtorus/torus.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace dtorus {

namespace {

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

ProjectorPair known_projectors(const CatalogEntry& entry, const VectorXd& phi) {
  const auto& pe = *entry.known_projectors;
  const VectorXd arg = entry.system.reduce(phi);
  return {{Side::plus, pe.plus.eval(arg), false}, {Side::minus, pe.minus.eval(arg), false}};
}

}  // namespace

std::vector<Variant> auto_assignment(const SystemDefinition& sys, const ProjectorPair& projectors) {
  if (!sys.diagonal()) throw Error("automatic glue needs a diagonal P; pass an explicit assignment");
  std::vector<Variant> out;
  for (int i = 0; i < sys.n; ++i) out.push_back(projectors.plus.base(i, i) < 0.5 ? Variant::one : Variant::two);
  return out;
}

PointPipeline::PointPipeline(const CatalogEntry& source, const VectorXd& phi, const PointOptions& opts, double reach)
    : entry_(std::make_unique<const CatalogEntry>(source)), phi_(phi) {
  const CatalogEntry& entry = *entry_;
  const SystemDefinition& sys = entry.system;
  const bool estimate = opts.force_estimate || !entry.known_projectors;
  double half = opts.quad.horizon + std::abs(reach);
  half = std::max(half, opts.certificate_window);
  if (estimate) half = std::max(half, opts.estimate_horizon);
  oracle_ = std::make_unique<FundamentalMatrixOracle>(sys, phi, Span{-half, half}, opts.flow);

  ProjectorPair projectors = estimate ? estimate_projectors(*oracle_, opts.estimate_horizon) : known_projectors(entry, phi);
  plus_cert_ = verify_dichotomy(projectors.plus, *oracle_, opts.certificate_window, opts.certificate_step);
  minus_cert_ = verify_dichotomy(projectors.minus, *oracle_, opts.certificate_window, opts.certificate_step);

  auto critical = pinv<double>(build_D<double>(projectors.plus.base, projectors.minus.base), opts.rtol);
  context_ = std::make_unique<GreenContext>(sys, *oracle_, std::move(projectors), std::move(critical), opts.quad,
                                            plus_cert_, minus_cert_);
  one_ = solvability(*context_, Variant::one, opts.tol_solv);
  two_ = solvability(*context_, Variant::two, opts.tol_solv);
}

std::vector<Variant> PointPipeline::resolve(const Selection& selection) const {
  switch (selection.mode) {
    case Selection::Mode::single: return std::vector<Variant>(static_cast<std::size_t>(entry_->system.n), selection.variant);
    case Selection::Mode::glue_explicit:
      if (static_cast<int>(selection.assignment.size()) != entry_->system.n) {
        throw Error("glue assignment has " + std::to_string(selection.assignment.size()) + " entries, n = " +
                    std::to_string(entry_->system.n));
      }
      return selection.assignment;
    case Selection::Mode::glue_auto: return auto_assignment(entry_->system, projectors());
  }
  return {};
}

PointPipeline::Value PointPipeline::evaluate(const Selection& selection, double t) const {
  const std::vector<Variant> assignment = resolve(selection);
  Value out;
  out.x = VectorXd::Zero(entry_->system.n);
  out.solvable = true;
  for (Variant v : {Variant::one, Variant::two}) {
    bool used = false;
    for (Variant a : assignment) used = used || a == v;
    if (!used) continue;
    const GreenValue g = green(*context_, t, v);
    for (int i = 0; i < entry_->system.n; ++i)
      if (assignment[static_cast<std::size_t>(i)] == v) out.x(i) = g.x(i);
    const SolvabilityReport& r = report(v);
    out.residual_norm = std::max(out.residual_norm, r.residual_norm);
    out.tail_bound = std::max({out.tail_bound, g.tail_bound, r.tail_bound});
    out.solvable = out.solvable && r.solvable;
  }
  return out;
}

int TorusSample::failures() const {
  int k = 0;
  for (const auto& p : points) k += p.failed ? 1 : 0;
  return k;
}

int TorusSample::unsolvable() const {
  int k = 0;
  for (const auto& p : points) k += (!p.failed && !p.solvable) ? 1 : 0;
  return k;
}

TorusSample sample_torus(const CatalogEntry& entry, const std::vector<VectorXd>& grid, const Selection& selection,
                         const PointOptions& opts, int jobs) {
  if (grid.empty()) throw Error("sample_torus: empty grid");
  const auto start = std::chrono::steady_clock::now();
  TorusSample out;
  out.selection = selection;
  out.quad = opts.quad;
  out.points.resize(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    TorusPoint& p = out.points[i];
    p.phi = entry.system.reduce(grid[i]);
    try {
      const PointPipeline pipeline(entry, grid[i], opts);
      p.assignment = pipeline.resolve(selection);
      const auto value = pipeline.evaluate(selection, 0.0);
      p.u = value.x;
      p.residual_norm = value.residual_norm;
      p.tail_bound = value.tail_bound;
      p.solvable = value.solvable;
      if (!p.solvable) p.message = "solvability condition violated";
    } catch (const std::exception& e) {
      p.failed = true;
      p.u = VectorXd::Constant(entry.system.n, std::numeric_limits<double>::quiet_NaN());
      p.residual_norm = std::numeric_limits<double>::quiet_NaN();
      p.tail_bound = std::numeric_limits<double>::quiet_NaN();
      p.message = e.what();
    }
  });
  out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

InvarianceReport verify_invariance(const CatalogEntry& entry, const TorusSample& sample, double t_star,
                                   const PointOptions& opts, int jobs) {
  if (t_star == 0.0) throw Error("verify_invariance: t_star must be non-zero");
  const SystemDefinition& sys = entry.system;
  const int m = sys.m;
  const int n = sys.n;
  InvarianceReport out;
  out.t_star = t_star;
  out.defects.assign(sample.points.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(sample.points.size());

  auto rhs = [&sys, m, n](double, const VectorXd& y) {
    VectorXd dy(y.size());
    const VectorXd p = y.head(m);
    dy.head(m) = sys.velocity(p);
    dy.tail(n) = sys.matrix(p) * y.tail(n) + sys.forcing(p);
    return dy;
  };

  parallel_for(sample.points.size(), jobs, [&](std::size_t i) {
    const TorusPoint& p = sample.points[i];
    if (p.failed) {
      errors[i] = "point was not sampled: " + p.message;
      return;
    }
    try {
      VectorXd y0(m + n);
      y0.head(m) = p.phi;
      y0.tail(n) = p.u;
      const auto sol = integrate_dopri5<double>(rhs, 0.0, y0, t_star, opts.flow.tol, 0.0);
      const VectorXd y1 = sol(t_star);
      const PointPipeline there(entry, y1.head(m), opts);
      Selection sel = sample.selection;
      if (sel.mode == Selection::Mode::glue_auto) sel = Selection::glue(p.assignment);
      const VectorXd u1 = there.evaluate(sel, 0.0).x;
      out.defects[i] = (y1.tail(n) - u1).cwiseAbs().maxCoeff();
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      ++out.failures;
      out.messages.push_back("point " + std::to_string(i) + ": " + errors[i]);
    } else {
      out.max_defect = std::max(out.max_defect, out.defects[i]);
    }
  }
  return out;
}

std::vector<RampRow> l2_ramp(const std::vector<int>& Ns, const VectorXd& phi, const PointOptions& opts) {
  if (Ns.empty()) throw Error("l2_ramp: no truncation dimensions given");
  std::vector<RampRow> rows;
  for (std::size_t k = 0; k < Ns.size(); ++k) {
    if (Ns[k] < 3) throw Error("l2_ramp: N must be >= 3");
    if (k > 0 && Ns[k] <= Ns[k - 1]) throw Error("l2_ramp: N values must be strictly ascending");
    const CatalogEntry entry = catalog("paper-l2", {{"N", std::to_string(Ns[k])}});
    const PointPipeline pipeline(entry, phi, opts);
    const auto value = pipeline.evaluate(Selection::automatic(), 0.0);
    RampRow row;
    row.N = Ns[k];
    row.u = value.x;
    row.residual_norm = value.residual_norm;
    row.tail_bound = value.tail_bound;
    if (rows.empty()) {
      row.max_change = std::numeric_limits<double>::quiet_NaN();
    } else {
      const auto& prev = rows.back().u;
      row.max_change = (row.u.head(prev.size()) - prev).cwiseAbs().maxCoeff();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<VectorXd> uniform_grid(int m, double lo, double hi, int count, bool open_end) {
  if (count < 1) throw Error("grid needs at least one point");
  if (m < 1) throw Error("grid dimension must be >= 1");
  std::vector<double> axis(static_cast<std::size_t>(count));
  const int divisions = open_end ? count : count - 1;
  for (int i = 0; i < count; ++i) axis[static_cast<std::size_t>(i)] = divisions == 0 ? lo : lo + (hi - lo) * i / divisions;
  std::vector<VectorXd> out;
  std::size_t total = 1;
  for (int d = 0; d < m; ++d) total *= static_cast<std::size_t>(count);
  for (std::size_t k = 0; k < total; ++k) {
    VectorXd p(m);
    std::size_t rest = k;
    for (int d = m - 1; d >= 0; --d) {
      p(d) = axis[rest % static_cast<std::size_t>(count)];
      rest /= static_cast<std::size_t>(count);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<VectorXd> default_grid(const SystemDefinition& sys) {
  if (sys.phase_mode == PhaseMode::periodic) return uniform_grid(sys.m, 0.0, 2.0 * std::numbers::pi, 61, true);
  return uniform_grid(sys.m, -3.0, 3.0, 61);
}

}  // namespace dtorus
