#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dtorus/types.hpp"

namespace dtorus {

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_order.
template <typename Scalar>
struct GaussLegendre {
  std::vector<Scalar> nodes;
  std::vector<Scalar> weights;

  explicit GaussLegendre(int order) {
    if (order < 1) throw Error("Gauss-Legendre order must be >= 1");
    nodes.resize(static_cast<std::size_t>(order));
    weights.resize(static_cast<std::size_t>(order));
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
      Scalar x = std::cos(std::numbers::pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) / (Scalar(order) + Scalar(0.5)));
      Scalar dp = 0;
      for (int iter = 0; iter < 100; ++iter) {
        Scalar p0 = 1, p1 = x;
        for (int k = 2; k <= order; ++k) {
          const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1);
        const Scalar dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) <= 2 * std::numeric_limits<Scalar>::epsilon()) break;
      }
      {
        // Recompute the derivative at the converged node.
        Scalar p0 = 1, p1 = x;
        for (int k = 2; k <= order; ++k) {
          const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = order == 1 ? Scalar(1) : order * (x * p1 - p0) / (x * x - 1);
      }
      const Scalar w = 2 / ((1 - x * x) * dp * dp);
      nodes[static_cast<std::size_t>(i)] = -x;
      nodes[static_cast<std::size_t>(order - 1 - i)] = x;
      weights[static_cast<std::size_t>(i)] = w;
      weights[static_cast<std::size_t>(order - 1 - i)] = w;
    }
    if (order % 2 == 1) nodes[static_cast<std::size_t>(order / 2)] = 0;
  }
};

/// Truncated improper integrals: composite Gauss-Legendre on panels of width <= panel_width,
/// infinite limits cut at distance `horizon` from the finite end.
struct QuadratureScheme {
  double horizon = 40.0;
  int order = 7;
  double panel_width = 0.25;
};

/// Composite rule over [a, b] (b < a allowed); g maps a time to a vector.
template <typename Scalar, typename Integrand>
Vector<Scalar> integrate(Integrand&& g, Scalar a, Scalar b, const GaussLegendre<Scalar>& rule, Scalar panel_width,
                         Eigen::Index dim) {
  Vector<Scalar> acc = Vector<Scalar>::Zero(dim);
  if (a == b) return acc;
  const Scalar length = std::abs(b - a);
  const auto panels = std::max<long>(1, static_cast<long>(std::ceil(length / panel_width - Scalar(1e-12))));
  const Scalar width = (b - a) / Scalar(panels);
  for (long p = 0; p < panels; ++p) {
    const Scalar left = a + width * Scalar(p);
    const Scalar mid = left + width / 2;
    Vector<Scalar> panel = Vector<Scalar>::Zero(dim);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) panel += rule.weights[k] * g(mid + width / 2 * rule.nodes[k]);
    acc += (width / 2) * panel;
  }
  return acc;
}

/// Bound on the tail of int_T^inf |M(tau) f| when |M(tau)| <= K exp(-alpha tau).
template <typename Scalar>
Scalar dichotomy_tail(Scalar K, Scalar alpha, Scalar horizon, Scalar f_sup) {
  if (!(alpha > 0)) return std::numeric_limits<Scalar>::infinity();
  return K * std::exp(-alpha * horizon) / alpha * f_sup;
}

/// Tail estimate from the decay of |g| over the last unit before the cut: exponential extrapolation
/// |g(end)| / lambda with lambda = log(|g(end - 1)| / |g(end)|). Infinite when |g| is not decaying.
template <typename Scalar>
Scalar extrapolated_tail(Scalar before, Scalar at_end) {
  if (at_end == Scalar(0)) return Scalar(0);
  if (!(before > at_end)) return std::numeric_limits<Scalar>::infinity();
  return at_end / std::log(before / at_end);
}

}  // namespace dtorus
