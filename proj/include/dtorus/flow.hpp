#pragma once

#include <memory>
#include <vector>

#include "dtorus/ode.hpp"
#include "dtorus/system.hpp"

namespace dtorus {

struct Span {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double t) const { return t >= lo && t <= hi; }
};

struct FlowOptions {
  Tolerances<double> tol{1e-12, 1e-12};
  double checkpoint_interval = 1.0;
};

/// phi_t(phi) on a finite span around t = 0.
class FlowTrajectory {
 public:
  FlowTrajectory() = default;

  const VectorXd& base() const { return base_; }
  Span span() const { return span_; }
  const FlowOptions& options() const { return options_; }

  VectorXd operator()(double t) const;

 private:
  friend FlowTrajectory flow(const SystemDefinition&, const VectorXd&, Span, const FlowOptions&);
  friend class FundamentalMatrixOracle;

  VectorXd base_;
  Span span_;
  FlowOptions options_;
  int offset_ = 0;
  int m_ = 0;
  std::shared_ptr<const DenseSolution<double>> forward_;
  std::shared_ptr<const DenseSolution<double>> backward_;
};

FlowTrajectory flow(const SystemDefinition& sys, const VectorXd& phi, Span span, const FlowOptions& opts = {});

/// Omega_0^t(phi) from the state equation and Omega_t^0(phi) from the adjoint equation
/// dY/dt = -Y P(phi_t(phi)), both with dense output over the span. Immutable once built.
class FundamentalMatrixOracle {
 public:
  FundamentalMatrixOracle(const SystemDefinition& sys, const VectorXd& phi, Span span, const FlowOptions& opts = {});

  const VectorXd& base() const { return trajectory_.base(); }
  Span span() const { return trajectory_.span(); }
  int dimension() const { return n_; }
  const FlowTrajectory& trajectory() const { return trajectory_; }
  const FlowOptions& options() const { return trajectory_.options(); }

  VectorXd phase(double t) const { return trajectory_(t); }
  /// Omega_0^t(phi).
  MatrixXd forward(double t) const;
  /// Omega_t^0(phi), the inverse of forward(t), without forming an inverse.
  MatrixXd backward(double t) const;
  /// Omega_tau^t(phi) = Omega_0^t(phi) Omega_tau^0(phi); exactly I when t == tau.
  MatrixXd omega(double t, double tau) const;

  struct Sample {
    VectorXd phase;
    MatrixXd forward;   // Omega_0^t
    MatrixXd backward;  // Omega_t^0
  };
  /// All three quantities from a single dense-output evaluation.
  Sample sample(double t) const;

 private:
  VectorXd state(double t) const;

  FlowTrajectory trajectory_;
  int n_ = 0;
};

inline MatrixXd omega(const FundamentalMatrixOracle& oracle, double t, double tau) { return oracle.omega(t, tau); }

struct TimeTriple {
  double t = 0.0;
  double tau = 0.0;
  double s = 0.0;
};

struct CocycleDefect {
  double cocycle = 0.0;  // max |Omega_tau^t Omega_s^tau - Omega_s^t|
  double shift = 0.0;    // max |Omega_tau^t(phi_s(phi)) - Omega_{tau+s}^{t+s}(phi)|
  double max() const { return cocycle > shift ? cocycle : shift; }
};

/// The shift identity needs oracles at the shifted base points phi_s(phi); they are built on demand.
/// `oracle` must already cover t + s and tau + s for every sample.
CocycleDefect cocycle_check(const SystemDefinition& sys, const FundamentalMatrixOracle& oracle,
                            const std::vector<TimeTriple>& samples);

}  // namespace dtorus
