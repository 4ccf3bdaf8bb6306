#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dtorus/green.hpp"

namespace dtorus {

struct PointOptions {
  FlowOptions flow;
  QuadratureScheme quad;
  double rtol = 1e-10;
  double tol_solv = 1e-7;
  double certificate_window = 10.0;
  double certificate_step = 0.5;
  double estimate_horizon = 20.0;
  bool force_estimate = false;
};

/// Either one variant for every component, or a per-component assignment ("glue").
struct Selection {
  enum class Mode { single, glue_explicit, glue_auto };
  Mode mode = Mode::glue_auto;
  Variant variant = Variant::one;
  std::vector<Variant> assignment;

  static Selection single(Variant v) { return {Mode::single, v, {}}; }
  static Selection glue(std::vector<Variant> a) { return {Mode::glue_explicit, Variant::one, std::move(a)}; }
  static Selection automatic() { return {Mode::glue_auto, Variant::one, {}}; }
};

/// Components whose C+ diagonal entry is 0 take variant one, the rest variant two.
/// Only defined for systems with diagonal P.
std::vector<Variant> auto_assignment(const SystemDefinition& sys, const ProjectorPair& projectors);

/// Builds everything needed at one base point: oracle, projectors, certificates, critical data,
/// Green context and both solvability reports.
class PointPipeline {
 public:
  /// green() is valid for |t| <= reach.
  /// Holds its own copy of the entry.
  PointPipeline(const CatalogEntry& entry, const VectorXd& phi, const PointOptions& opts, double reach = 0.0);

  const VectorXd& phi() const { return phi_; }
  const CatalogEntry& entry() const { return *entry_; }
  const FundamentalMatrixOracle& oracle() const { return *oracle_; }
  const GreenContext& context() const { return *context_; }
  const ProjectorPair& projectors() const { return context_->projectors(); }
  const CriticalData<double>& critical() const { return context_->critical(); }
  const DichotomyCertificate& plus_certificate() const { return plus_cert_; }
  const DichotomyCertificate& minus_certificate() const { return minus_cert_; }
  const SolvabilityReport& report(Variant v) const { return v == Variant::one ? one_ : two_; }
  DegeneracyReport degeneracy() const { return dtorus::degeneracy(*context_); }

  std::vector<Variant> resolve(const Selection& selection) const;

  struct Value {
    VectorXd x;
    double residual_norm = 0.0;
    double tail_bound = 0.0;
    bool solvable = false;
  };
  /// Green evaluation at time t with the selection applied componentwise.
  Value evaluate(const Selection& selection, double t = 0.0) const;

 private:
  std::unique_ptr<const CatalogEntry> entry_;
  VectorXd phi_;
  std::unique_ptr<FundamentalMatrixOracle> oracle_;
  DichotomyCertificate plus_cert_;
  DichotomyCertificate minus_cert_;
  std::unique_ptr<GreenContext> context_;
  SolvabilityReport one_;
  SolvabilityReport two_;
};

struct TorusPoint {
  VectorXd phi;
  VectorXd u;
  std::vector<Variant> assignment;
  double residual_norm = 0.0;
  double tail_bound = 0.0;
  bool solvable = false;
  bool failed = false;
  std::string message;
};

struct TorusSample {
  std::vector<TorusPoint> points;
  Selection selection;
  QuadratureScheme quad;
  double elapsed_seconds = 0.0;

  int failures() const;
  int unsolvable() const;
};

/// u(phi) = (G_0 f)(phi) per grid point. Failing points are flagged, never dropped; results keep grid order.
TorusSample sample_torus(const CatalogEntry& entry, const std::vector<VectorXd>& grid, const Selection& selection,
                         const PointOptions& opts = {}, int jobs = 1);

struct InvarianceReport {
  double t_star = 0.0;
  double max_defect = 0.0;
  std::vector<double> defects;
  int failures = 0;
  std::vector<std::string> messages;
};

/// Integrates the full system from (phi, u(phi)) over [0, t_star] and compares x(t_star) with u
/// recomputed at phi_{t_star}(phi). Negative t_star integrates backward.
InvarianceReport verify_invariance(const CatalogEntry& entry, const TorusSample& sample, double t_star,
                                   const PointOptions& opts = {}, int jobs = 1);

struct RampRow {
  int N = 0;
  VectorXd u;
  double max_change = 0.0;  // against the previous row on shared components; NaN for the first row
  double residual_norm = 0.0;
  double tail_bound = 0.0;
};

/// Glued torus of the paper-l2 truncation at one phase point for each N.
std::vector<RampRow> l2_ramp(const std::vector<int>& Ns, const VectorXd& phi, const PointOptions& opts = {});

/// lo:hi:count on each phase axis (tensor product for m > 1). `open_end` drops hi (periodic grids).
std::vector<VectorXd> uniform_grid(int m, double lo, double hi, int count, bool open_end = false);
std::vector<VectorXd> default_grid(const SystemDefinition& sys);

}  // namespace dtorus
