#pragma once

#include <optional>
#include <string>
#include <utility>

#include "dtorus/flow.hpp"

namespace dtorus {

enum class Side { plus, minus };

inline const char* to_string(Side s) { return s == Side::plus ? "plus" : "minus"; }

/// Base projector C(phi) of a semi-axis dichotomy; values along the flow follow by transport.
struct ProjectorField {
  Side side = Side::plus;
  MatrixXd base;
  bool estimated = false;
};

struct ProjectorPair {
  ProjectorField plus;
  ProjectorField minus;
};

/// Omega_0^tau C Omega_tau^0, the projector at phi_tau(phi).
MatrixXd transport(const ProjectorField& field, const FundamentalMatrixOracle& oracle, double tau);

/// Fitted constants of |Omega_0^t C Omega_tau^0| <= K exp(-alpha (t - tau)), t >= tau and
/// |Omega_0^t (I - C) Omega_tau^0| <= K exp(-alpha (tau - t)), tau >= t, on [0, T] or [-T, 0].
struct DichotomyCertificate {
  Side side = Side::plus;
  double window = 0.0;  // T
  double grid_step = 0.0;
  int pairs = 0;
  double alpha = 0.0;
  double K = 1.0;
  /// Largest relative excess of a sampled norm over the fitted exponential exp(b - alpha d).
  double max_violation = 0.0;
  bool verified = false;
  std::string diagnostic;
};

/// alpha is fitted by least squares on log-norm against |t - tau| using pairs with |t - tau| >= 1;
/// K is the largest ratio against exp(-alpha |t - tau|). Growth (alpha <= 0) or a non-finite norm
/// marks the certificate as not verified.
DichotomyCertificate verify_dichotomy(const ProjectorField& field, const FundamentalMatrixOracle& oracle, double T,
                                      double grid_step);

class AmbiguousSplitError : public Error {
 public:
  using Error::Error;
};

/// Heuristic: C+ projects orthogonally onto the right singular vectors of Omega_0^T with singular value
/// below 1; I - C- likewise for Omega_0^{-T}. Valid for well-separated exponents only.
/// Throws AmbiguousSplitError when the singular values adjacent to 1 differ by less than a factor
/// `min_gap`, or when an estimated projector would be zero.
ProjectorPair estimate_projectors(const FundamentalMatrixOracle& oracle, double T, double min_gap = 10.0);

}  // namespace dtorus
