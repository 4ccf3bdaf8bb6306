#include "dtorus/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dtorus {

Span required_span(double t, double horizon) { return Span{std::min(-horizon, t - horizon), std::max(horizon, t + horizon)}; }

GreenContext::GreenContext(const SystemDefinition& sys, const FundamentalMatrixOracle& oracle,
                           ProjectorPair projectors, CriticalData<double> critical, QuadratureScheme quad,
                           std::optional<DichotomyCertificate> plus_certificate,
                           std::optional<DichotomyCertificate> minus_certificate)
    : sys_(sys),
      oracle_(oracle),
      projectors_(std::move(projectors)),
      critical_(std::move(critical)),
      quad_(quad),
      plus_cert_(std::move(plus_certificate)),
      minus_cert_(std::move(minus_certificate)),
      rule_(quad.order),
      n_(sys.n) {
  if (!(quad_.horizon > 0.0) || !(quad_.panel_width > 0.0)) throw Error("quadrature horizon and panel width must be positive");
  if (oracle_.dimension() != n_) throw ShapeError("oracle dimension does not match the system");
  for (const MatrixXd* M : {&projectors_.plus.base, &projectors_.minus.base, &critical_.D_plus}) {
    if (M->rows() != n_ || M->cols() != n_) throw ShapeError("projector or critical data size mismatch");
  }
  const Span span = oracle_.span();
  if (span.lo > -quad_.horizon || span.hi < quad_.horizon) {
    throw SpanError("oracle span [" + std::to_string(span.lo) + ", " + std::to_string(span.hi) +
                    "] does not cover the quadrature horizon " + std::to_string(quad_.horizon));
  }

  // Sup-norm estimate of f along the trajectory, sampled over the oracle span.
  const double step = quad_.panel_width;
  for (double tau = span.lo; tau <= span.hi + 1e-12; tau += step) {
    const double clamped = std::min(tau, span.hi);
    const double v = sys_.forcing(oracle_.phase(clamped)).cwiseAbs().maxCoeff();
    f_sup_ = std::max(f_sup_, v);
  }

  negative_half_ = integral(-quad_.horizon, 0.0);
  positive_half_ = integral(0.0, quad_.horizon);
  if (!negative_half_.allFinite() || !positive_half_.allFinite()) throw Error("quadrature produced non-finite values");
}

VectorXd GreenContext::integrand(double tau) const {
  const auto s = oracle_.sample(tau);
  return s.backward * sys_.forcing(s.phase);
}

VectorXd GreenContext::integral(double a, double b) const {
  const Span span = oracle_.span();
  if (!span.contains(a) || !span.contains(b)) {
    throw SpanError("integration limits [" + std::to_string(std::min(a, b)) + ", " + std::to_string(std::max(a, b)) +
                    "] exceed oracle span");
  }
  return dtorus::integrate<double>([this](double tau) { return integrand(tau); }, a, b, rule_, quad_.panel_width, n_);
}

double GreenContext::tail(const MatrixXd& M, double end, int direction, bool controlled) const {
  const auto& cert = direction > 0 ? plus_cert_ : minus_cert_;
  if (controlled && cert && cert->verified) {
    return dichotomy_tail(cert->K, cert->alpha, std::abs(end), f_sup_);
  }
  const double before = (M * integrand(end - direction * 1.0)).cwiseAbs().maxCoeff();
  const double at_end = (M * integrand(end)).cwiseAbs().maxCoeff();
  return extrapolated_tail(before, at_end);
}

GreenContext::Placement GreenContext::placement(Variant v) const {
  const MatrixXd I = MatrixXd::Identity(n_, n_);
  const MatrixXd& Cp = projectors_.plus.base;
  const MatrixXd& Cm = projectors_.minus.base;
  if (v == Variant::one) return {Cp, I - Cp, Cm, I - Cm, true, true};
  return {I - Cp, Cp, I - Cm, Cm, false, false};
}

VectorXd GreenContext::bracket(Variant v) const {
  const Placement p = placement(v);
  return p.minus_inner * negative_half_ + p.plus_outer * positive_half_;
}

double GreenContext::bracket_tail(Variant v) const {
  const Placement p = placement(v);
  const double T = quad_.horizon;
  return tail(p.minus_inner, -T, -1, p.minus_controlled) + tail(p.plus_outer, T, +1, p.plus_controlled);
}

SolvabilityReport solvability(const GreenContext& ctx, Variant variant, double tol_solv) {
  const int n = ctx.dimension();
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd& Pc = ctx.critical().P_cokernel;
  const MatrixXd& Cp = ctx.projectors().plus.base;
  const MatrixXd& Cm = ctx.projectors().minus.base;
  const double T = ctx.quadrature().horizon;
  const VectorXd whole = ctx.negative_half() + ctx.positive_half();

  SolvabilityReport r;
  r.variant = variant;
  r.horizon = T;
  r.tolerance = tol_solv;

  // Whole-line single-integral forms: primary and alternate, with their own tails.
  const MatrixXd primary = variant == Variant::one ? Cm : MatrixXd(I - Cm);
  const MatrixXd alternate = variant == Variant::one ? MatrixXd(I - Cp) : Cp;
  const bool one = variant == Variant::one;
  const double primary_tail = ctx.tail(primary, -T, -1, one) + ctx.tail(primary, T, +1, false);
  const double alternate_tail = ctx.tail(alternate, -T, -1, false) + ctx.tail(alternate, T, +1, one);

  r.residual = Pc * primary * whole;
  r.alternate_residual = Pc * alternate * whole;
  r.bracket_residual = Pc * ctx.bracket(variant);
  r.residual_norm = r.residual.cwiseAbs().maxCoeff();
  r.alternate_norm = r.alternate_residual.cwiseAbs().maxCoeff();
  r.bracket_norm = r.bracket_residual.cwiseAbs().maxCoeff();

  const double scale = inf_norm(Pc);
  r.tail_bound = scale * std::max({primary_tail, alternate_tail, ctx.bracket_tail(variant)});
  if (!std::isfinite(r.residual_norm)) throw Error("solvability: non-finite residual");
  r.solvable = r.residual_norm <= tol_solv + r.tail_bound;
  return r;
}

GreenValue xi(const GreenContext& ctx, Variant variant, const VectorXd& c) {
  const auto& cd = ctx.critical();
  if (c.size() != ctx.dimension()) throw DimensionError("xi: constant vector has wrong dimension");
  GreenValue out;
  out.x = cd.D_plus * ctx.bracket(variant) + cd.P_kernel * c;
  out.tail_bound = inf_norm(cd.D_plus) * ctx.bracket_tail(variant);
  return out;
}

namespace {

void check_span(const GreenContext& ctx, double t) {
  const Span need = required_span(t, ctx.quadrature().horizon);
  const Span have = ctx.oracle().span();
  if (need.lo < have.lo || need.hi > have.hi) {
    throw SpanError("evaluation at t = " + std::to_string(t) + " needs oracle span [" + std::to_string(need.lo) + ", " +
                    std::to_string(need.hi) + "]");
  }
}

// Shared body of green() and bounded_solution(): Omega_0^t [inner - outer + coefficient * bracket + free].
GreenValue evaluate(const GreenContext& ctx, double t, Variant variant, const MatrixXd& plus_coeff,
                    const MatrixXd& minus_coeff, const VectorXd* free_term_plus, const VectorXd* free_term_minus) {
  check_span(ctx, t);
  const double T = ctx.quadrature().horizon;
  const auto p = ctx.placement(variant);
  const VectorXd b = ctx.bracket(variant);
  const double b_tail = ctx.bracket_tail(variant);

  VectorXd inside;
  double tail = 0.0;
  if (t >= 0.0) {
    const VectorXd outer = t == 0.0 ? ctx.positive_half() : ctx.integral(t, t + T);
    inside = -(p.plus_outer * outer) + plus_coeff * b;
    if (t > 0.0) inside += p.plus_inner * ctx.integral(0.0, t);
    if (free_term_plus) inside += *free_term_plus;
    tail = ctx.tail(p.plus_outer, t + T, +1, p.plus_controlled) + inf_norm(plus_coeff) * b_tail;
  } else {
    inside = p.minus_inner * ctx.integral(t - T, t) - p.minus_outer * ctx.integral(t, 0.0) + minus_coeff * b;
    if (free_term_minus) inside += *free_term_minus;
    tail = ctx.tail(p.minus_inner, t - T, -1, p.minus_controlled) + inf_norm(minus_coeff) * b_tail;
  }
  GreenValue out;
  if (t == 0.0) {
    out.x = inside;
    out.tail_bound = tail;
  } else {
    const MatrixXd F = ctx.oracle().forward(t);
    out.x = F * inside;
    out.tail_bound = inf_norm(F) * tail;
  }
  return out;
}

}  // namespace

GreenValue green(const GreenContext& ctx, double t, Variant variant) {
  const int n = ctx.dimension();
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd CpDp = ctx.projectors().plus.base * ctx.critical().D_plus;
  return evaluate(ctx, t, variant, CpDp, CpDp - I, nullptr, nullptr);
}

GreenValue bounded_solution(const GreenContext& ctx, double t, Variant variant, const VectorXd& c) {
  const int n = ctx.dimension();
  if (c.size() != n) throw DimensionError("bounded_solution: constant vector has wrong dimension");
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd& Cp = ctx.projectors().plus.base;
  const MatrixXd& Cm = ctx.projectors().minus.base;
  const auto& cd = ctx.critical();
  const VectorXd free_plus = Cp * cd.P_kernel * c;
  const VectorXd free_minus = (I - Cm) * cd.P_kernel * c;
  return evaluate(ctx, t, variant, Cp * cd.D_plus, (I - Cm) * cd.D_plus, &free_plus, &free_minus);
}

DegeneracyReport degeneracy(const GreenContext& ctx, double tol) {
  const int n = ctx.dimension();
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd& Cp = ctx.projectors().plus.base;
  const MatrixXd& Cm = ctx.projectors().minus.base;
  const MatrixXd& Pk = ctx.critical().P_kernel;
  DegeneracyReport r;
  r.plus_kernel = inf_norm(MatrixXd(Cp * Pk));
  r.minus_kernel = inf_norm(MatrixXd((I - Cm) * Pk));
  r.plus_complement = inf_norm(MatrixXd((I - Cp) * Pk));
  r.minus_complement = inf_norm(MatrixXd(Cm * Pk));
  r.variant_one = r.plus_kernel <= tol && r.minus_kernel <= tol;
  r.variant_two = r.plus_complement <= tol && r.minus_complement <= tol;
  return r;
}

}  // namespace dtorus
