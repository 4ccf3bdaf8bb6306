#include "dtorus/flow.hpp"

#include <algorithm>
#include <cmath>

namespace dtorus {

namespace {

Span covering_zero(Span span) {
  if (!(std::isfinite(span.lo) && std::isfinite(span.hi)) || span.lo > span.hi) {
    throw SpanError("span must be finite with lo <= hi");
  }
  return Span{std::min(span.lo, 0.0), std::max(span.hi, 0.0)};
}

void check_tolerances(const FlowOptions& opts) {
  if (!(opts.tol.abs_tol > 0.0) || !(opts.tol.rel_tol > 0.0)) throw Error("integrator tolerances must be positive");
}

}  // namespace

VectorXd FlowTrajectory::operator()(double t) const {
  if (t == 0.0) return base_;
  if (!span_.contains(t)) {
    throw SpanError("time " + std::to_string(t) + " outside flow span [" + std::to_string(span_.lo) + ", " +
                    std::to_string(span_.hi) + "]");
  }
  const auto& sol = t > 0.0 ? *forward_ : *backward_;
  return sol(t).segment(offset_, m_);
}

FlowTrajectory flow(const SystemDefinition& sys, const VectorXd& phi, Span span, const FlowOptions& opts) {
  if (phi.size() != sys.m) throw DimensionError("phase point has wrong dimension");
  check_tolerances(opts);
  FlowTrajectory out;
  out.base_ = phi;
  out.span_ = covering_zero(span);
  out.options_ = opts;
  out.m_ = sys.m;
  auto rhs = [&sys](double, const VectorXd& y) { return sys.velocity(y); };
  out.forward_ = std::make_shared<DenseSolution<double>>(
      integrate_dopri5<double>(rhs, 0.0, phi, out.span_.hi, opts.tol, opts.checkpoint_interval));
  out.backward_ = std::make_shared<DenseSolution<double>>(
      integrate_dopri5<double>(rhs, 0.0, phi, out.span_.lo, opts.tol, opts.checkpoint_interval));
  return out;
}

FundamentalMatrixOracle::FundamentalMatrixOracle(const SystemDefinition& sys, const VectorXd& phi, Span span,
                                                 const FlowOptions& opts)
    : n_(sys.n) {
  if (phi.size() != sys.m) throw DimensionError("phase point has wrong dimension");
  check_tolerances(opts);
  const int m = sys.m;
  const int n = sys.n;
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;

  // State layout: [phi (m) | vec(Omega_0^t) (n*n) | vec(Omega_t^0) (n*n)], column-major blocks.
  VectorXd y0(m + 2 * nn);
  y0.head(m) = phi;
  Eigen::Map<MatrixXd>(y0.data() + m, n, n).setIdentity();
  Eigen::Map<MatrixXd>(y0.data() + m + nn, n, n).setIdentity();

  auto rhs = [&sys, m, n, nn](double, const VectorXd& y) {
    VectorXd dy(y.size());
    const VectorXd p = y.head(m);
    dy.head(m) = sys.velocity(p);
    const MatrixXd P = sys.matrix(p);
    Eigen::Map<const MatrixXd> fwd(y.data() + m, n, n);
    Eigen::Map<const MatrixXd> adj(y.data() + m + nn, n, n);
    Eigen::Map<MatrixXd>(dy.data() + m, n, n).noalias() = P * fwd;
    Eigen::Map<MatrixXd>(dy.data() + m + nn, n, n).noalias() = -adj * P;
    return dy;
  };

  trajectory_.base_ = phi;
  trajectory_.span_ = covering_zero(span);
  trajectory_.options_ = opts;
  trajectory_.offset_ = 0;
  trajectory_.m_ = m;
  trajectory_.forward_ = std::make_shared<DenseSolution<double>>(
      integrate_dopri5<double>(rhs, 0.0, y0, trajectory_.span_.hi, opts.tol, opts.checkpoint_interval));
  trajectory_.backward_ = std::make_shared<DenseSolution<double>>(
      integrate_dopri5<double>(rhs, 0.0, y0, trajectory_.span_.lo, opts.tol, opts.checkpoint_interval));
}

VectorXd FundamentalMatrixOracle::state(double t) const {
  if (!span().contains(t)) {
    throw SpanError("time " + std::to_string(t) + " outside oracle span [" + std::to_string(span().lo) + ", " +
                    std::to_string(span().hi) + "]");
  }
  return t >= 0.0 ? (*trajectory_.forward_)(t) : (*trajectory_.backward_)(t);
}

MatrixXd FundamentalMatrixOracle::forward(double t) const {
  if (t == 0.0) return MatrixXd::Identity(n_, n_);
  const VectorXd y = state(t);
  return Eigen::Map<const MatrixXd>(y.data() + trajectory_.m_, n_, n_);
}

MatrixXd FundamentalMatrixOracle::backward(double t) const {
  if (t == 0.0) return MatrixXd::Identity(n_, n_);
  const VectorXd y = state(t);
  const Eigen::Index nn = static_cast<Eigen::Index>(n_) * n_;
  return Eigen::Map<const MatrixXd>(y.data() + trajectory_.m_ + nn, n_, n_);
}

FundamentalMatrixOracle::Sample FundamentalMatrixOracle::sample(double t) const {
  if (t == 0.0) return {base(), MatrixXd::Identity(n_, n_), MatrixXd::Identity(n_, n_)};
  const VectorXd y = state(t);
  const int m = trajectory_.m_;
  const Eigen::Index nn = static_cast<Eigen::Index>(n_) * n_;
  return {y.head(m), Eigen::Map<const MatrixXd>(y.data() + m, n_, n_),
          Eigen::Map<const MatrixXd>(y.data() + m + nn, n_, n_)};
}

MatrixXd FundamentalMatrixOracle::omega(double t, double tau) const {
  if (t == tau) return MatrixXd::Identity(n_, n_);
  return forward(t) * backward(tau);
}

CocycleDefect cocycle_check(const SystemDefinition& sys, const FundamentalMatrixOracle& oracle,
                            const std::vector<TimeTriple>& samples) {
  CocycleDefect out;
  for (const auto& [t, tau, s] : samples) {
    const MatrixXd lhs = oracle.omega(t, tau) * oracle.omega(tau, s);
    out.cocycle = std::max(out.cocycle, inf_norm(lhs - oracle.omega(t, s)));

    const double lo = std::min({t, tau, 0.0});
    const double hi = std::max({t, tau, 0.0});
    const FundamentalMatrixOracle shifted(sys, oracle.phase(s), Span{lo, hi}, oracle.options());
    out.shift = std::max(out.shift, inf_norm(shifted.omega(t, tau) - oracle.omega(t + s, tau + s)));
  }
  return out;
}

}  // namespace dtorus
