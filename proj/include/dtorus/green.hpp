#pragma once

// Solvability conditions, the constants xi, the generalized Green operator and the bounded solutions
// with a free constant, for the critical case of semi-axis dichotomies.
//
// All integrands use projectors at the base point: M Omega_tau^0(phi) f(phi_tau(phi)) with M built from
// C+(phi), C-(phi). Infinite limits are cut at distance T (QuadratureScheme::horizon) and every result
// carries a tail bound.
//
// Variant one places C+ / (I - C+) on the positive semi-axis and C- / (I - C-) on the negative one;
// variant two swaps each pair.

#include <optional>

#include "dtorus/critical.hpp"
#include "dtorus/dichotomy.hpp"
#include "dtorus/quadrature.hpp"
#include "dtorus/system.hpp"

namespace dtorus {

/// Per-point evaluation context. Holds references to the system and the oracle, which must outlive it.
/// The two half-line integrals int_{-T}^0 and int_0^T of Omega_tau^0 f are computed on construction.
class GreenContext {
 public:
  GreenContext(const SystemDefinition& sys, const FundamentalMatrixOracle& oracle, ProjectorPair projectors,
               CriticalData<double> critical, QuadratureScheme quad = {},
               std::optional<DichotomyCertificate> plus_certificate = std::nullopt,
               std::optional<DichotomyCertificate> minus_certificate = std::nullopt);

  const SystemDefinition& system() const { return sys_; }
  const FundamentalMatrixOracle& oracle() const { return oracle_; }
  const ProjectorPair& projectors() const { return projectors_; }
  const CriticalData<double>& critical() const { return critical_; }
  const QuadratureScheme& quadrature() const { return quad_; }
  int dimension() const { return n_; }
  double f_sup() const { return f_sup_; }

  /// Omega_tau^0(phi) f(phi_tau(phi)).
  VectorXd integrand(double tau) const;
  /// int_a^b integrand, composite Gauss-Legendre.
  VectorXd integral(double a, double b) const;
  const VectorXd& negative_half() const { return negative_half_; }  // int_{-T}^0
  const VectorXd& positive_half() const { return positive_half_; }  // int_0^T

  /// Tail of the truncated integral of M * integrand beyond `end` (direction +1: [end, inf),
  /// -1: (-inf, end]). `controlled` selects the dichotomy bound when a certificate is present.
  double tail(const MatrixXd& M, double end, int direction, bool controlled) const;

  struct Placement {
    MatrixXd plus_inner;   // on int_0^t, t >= 0
    MatrixXd plus_outer;   // on int_t^inf, t >= 0
    MatrixXd minus_inner;  // on int_{-inf}^t, t <= 0
    MatrixXd minus_outer;  // on int_t^0, t <= 0
    bool plus_controlled;  // plus_outer decays by the + dichotomy
    bool minus_controlled; // minus_inner decays by the - dichotomy
  };
  Placement placement(Variant v) const;

  /// The right-hand side of the matching system D xi = bracket.
  VectorXd bracket(Variant v) const;
  double bracket_tail(Variant v) const;

 private:
  const SystemDefinition& sys_;
  const FundamentalMatrixOracle& oracle_;
  ProjectorPair projectors_;
  CriticalData<double> critical_;
  QuadratureScheme quad_;
  std::optional<DichotomyCertificate> plus_cert_;
  std::optional<DichotomyCertificate> minus_cert_;
  GaussLegendre<double> rule_;
  int n_;
  double f_sup_ = 0.0;
  VectorXd negative_half_;
  VectorXd positive_half_;
};

struct SolvabilityReport {
  Variant variant = Variant::one;
  /// P_{N(D*)} int_R C- Omega f (variant one) or P_{N(D*)} int_R (I - C-) Omega f (variant two).
  VectorXd residual;
  double residual_norm = 0.0;
  /// P_{N(D*)} applied to the matching right-hand side.
  VectorXd bracket_residual;
  double bracket_norm = 0.0;
  /// P_{N(D*)} int_R (I - C+) Omega f (variant one) or P_{N(D*)} int_R C+ Omega f (variant two).
  VectorXd alternate_residual;
  double alternate_norm = 0.0;
  double horizon = 0.0;
  double tail_bound = 0.0;
  double tolerance = 1e-7;
  bool solvable = false;
};

SolvabilityReport solvability(const GreenContext& ctx, Variant variant, double tol_solv = 1e-7);

struct GreenValue {
  VectorXd x;
  double tail_bound = 0.0;
};

/// xi = D+ bracket + P_{N(D)} c.
GreenValue xi(const GreenContext& ctx, Variant variant, const VectorXd& c);

/// (G_t f)(phi). The t <= 0 branch uses [C+ D+ - I] for both variants, which makes the branches
/// meet at t = 0 whenever the solvability condition holds.
GreenValue green(const GreenContext& ctx, double t, Variant variant);

/// Bounded solution with free constant c; reduces to green() when C+ P_{N(D)} = 0.
GreenValue bounded_solution(const GreenContext& ctx, double t, Variant variant, const VectorXd& c);

struct DegeneracyReport {
  double plus_kernel = 0.0;        // |C+ P_{N(D)}|
  double minus_kernel = 0.0;       // |(I - C-) P_{N(D)}|
  double plus_complement = 0.0;    // |(I - C+) P_{N(D)}|
  double minus_complement = 0.0;   // |C- P_{N(D)}|
  bool variant_one = false;        // C+ P = (I - C-) P = 0
  bool variant_two = false;        // (I - C+) P = C- P = 0
};

DegeneracyReport degeneracy(const GreenContext& ctx, double tol = 1e-10);

/// Oracle span needed to evaluate green() / bounded_solution() at time t with horizon T.
Span required_span(double t, double horizon);

}  // namespace dtorus
