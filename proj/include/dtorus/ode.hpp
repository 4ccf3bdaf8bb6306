#pragma once

// Dormand-Prince 5(4) with the continuous extension of Hairer/Norsett/Wanner
// and forced landing on checkpoint times.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dtorus/types.hpp"

namespace dtorus {

template <typename Scalar>
struct Tolerances {
  Scalar abs_tol = Scalar(1e-10);
  Scalar rel_tol = Scalar(1e-10);
};

template <typename Scalar>
class DenseSolution;

/// Integrates y' = rhs(t, y) from t0 to t1 (either direction). `checkpoint_interval` <= 0 disables
/// checkpoint landing.
template <typename Scalar, typename Rhs>
DenseSolution<Scalar> integrate_dopri5(Rhs&& rhs, Scalar t0, const Vector<Scalar>& y0, Scalar t1,
                                       const Tolerances<Scalar>& tol, Scalar checkpoint_interval = Scalar(1));

template <typename Scalar>
class DenseSolution {
 public:
  using VectorType = Vector<Scalar>;

  DenseSolution() = default;

  Scalar t_begin() const { return t_begin_; }
  Scalar t_end() const { return t_end_; }
  Scalar lower() const { return std::min(t_begin_, t_end_); }
  Scalar upper() const { return std::max(t_begin_, t_end_); }
  std::size_t steps() const { return steps_.size(); }
  bool contains(Scalar t) const { return t >= lower() && t <= upper(); }

  /// States stored at t_begin + k * interval (k = 0, 1, ...), plus the final state.
  const std::vector<std::pair<Scalar, VectorType>>& checkpoints() const { return checkpoints_; }

  VectorType operator()(Scalar t) const {
    if (!contains(t)) {
      throw SpanError("time " + std::to_string(static_cast<double>(t)) + " outside integrated span [" +
                      std::to_string(static_cast<double>(lower())) + ", " +
                      std::to_string(static_cast<double>(upper())) + "]");
    }
    if (t == t_begin_) return checkpoints_.front().second;
    const Scalar s = direction_ * (t - t_begin_);
    // Checkpoint index narrows the step search.
    std::size_t k = interval_ > Scalar(0) ? static_cast<std::size_t>(s / interval_) : 0;
    k = std::min(k, checkpoint_steps_.size() - 1);
    auto first = steps_.begin() + static_cast<std::ptrdiff_t>(checkpoint_steps_[k]);
    auto last = k + 1 < checkpoint_steps_.size()
                    ? steps_.begin() + static_cast<std::ptrdiff_t>(checkpoint_steps_[k + 1]) + 1
                    : steps_.end();
    last = std::min(last, steps_.end());
    auto it = std::upper_bound(first, last, s, [this](Scalar value, const Step& step) {
      return value < direction_ * (step.t0 - t_begin_);
    });
    if (it != steps_.begin()) --it;
    const Step& step = *it;
    const Scalar theta = std::clamp((t - step.t0) / step.h, Scalar(0), Scalar(1));
    const Scalar theta1 = Scalar(1) - theta;
    const auto& r = step.coeffs;
    return r.col(0) + theta * (r.col(1) + theta1 * (r.col(2) + theta * (r.col(3) + theta1 * r.col(4))));
  }

 private:
  template <typename S, typename Rhs>
  friend DenseSolution<S> integrate_dopri5(Rhs&& rhs, S t0, const Vector<S>& y0, S t1, const Tolerances<S>& tol,
                                           S checkpoint_interval);

  struct Step {
    Scalar t0;
    Scalar h;
    Matrix<Scalar> coeffs;  // dim x 5
  };

  Scalar t_begin_ = Scalar(0);
  Scalar t_end_ = Scalar(0);
  Scalar direction_ = Scalar(1);
  Scalar interval_ = Scalar(0);
  std::vector<Step> steps_;
  std::vector<std::size_t> checkpoint_steps_;
  std::vector<std::pair<Scalar, VectorType>> checkpoints_;
};

template <typename Scalar, typename Rhs>
DenseSolution<Scalar> integrate_dopri5(Rhs&& rhs, Scalar t0, const Vector<Scalar>& y0, Scalar t1,
                                       const Tolerances<Scalar>& tol, Scalar checkpoint_interval) {
  using V = Vector<Scalar>;
  using std::abs;
  using std::max;
  using std::min;
  using std::pow;
  using std::sqrt;

  constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10, c4 = Scalar(4) / 5, c5 = Scalar(8) / 9;
  constexpr Scalar a21 = Scalar(1) / 5;
  constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
  constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187, a53 = Scalar(64448) / 6561,
                   a54 = Scalar(-212) / 729;
  constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33, a63 = Scalar(46732) / 5247,
                   a64 = Scalar(49) / 176, a65 = Scalar(-5103) / 18656;
  constexpr Scalar a71 = Scalar(35) / 384, a73 = Scalar(500) / 1113, a74 = Scalar(125) / 192,
                   a75 = Scalar(-2187) / 6784, a76 = Scalar(11) / 84;
  constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695, e4 = Scalar(71) / 1920,
                   e5 = Scalar(-17253) / 339200, e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;
  constexpr Scalar d1 = Scalar(-12715105075.0) / Scalar(11282082432.0),
                   d3 = Scalar(87487479700.0) / Scalar(32700410799.0),
                   d4 = Scalar(-10690763975.0) / Scalar(1880347072.0),
                   d5 = Scalar(701980252875.0) / Scalar(199316789632.0),
                   d6 = Scalar(-1453857185.0) / Scalar(822651844.0), d7 = Scalar(69997945.0) / Scalar(29380423.0);

  DenseSolution<Scalar> sol;
  sol.t_begin_ = t0;
  sol.t_end_ = t1;
  sol.direction_ = t1 >= t0 ? Scalar(1) : Scalar(-1);
  sol.interval_ = checkpoint_interval > Scalar(0) ? checkpoint_interval : Scalar(0);
  sol.checkpoints_.emplace_back(t0, y0);
  sol.checkpoint_steps_.push_back(0);
  if (t1 == t0) {
    typename DenseSolution<Scalar>::Step step{t0, Scalar(0), Matrix<Scalar>::Zero(y0.size(), 5)};
    step.coeffs.col(0) = y0;
    sol.steps_.push_back(std::move(step));
    return sol;
  }

  const Scalar dir = sol.direction_;
  const Eigen::Index dim = y0.size();
  const Scalar span = abs(t1 - t0);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  auto error_norm = [&](const V& err, const V& ya, const V& yb) {
    Scalar acc = 0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const Scalar sc = tol.abs_tol + tol.rel_tol * max(abs(ya(i)), abs(yb(i)));
      const Scalar q = err(i) / sc;
      acc += q * q;
    }
    return dim > 0 ? sqrt(acc / Scalar(dim)) : Scalar(0);
  };

  V y = y0;
  V k1 = rhs(t0, y);
  Scalar t = t0;

  // Initial step guess.
  Scalar h;
  {
    const Scalar d0 = error_norm(y, y, y);
    const Scalar dd1 = error_norm(k1, y, y);
    Scalar h0 = (d0 < Scalar(1e-5) || dd1 < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / dd1;
    h0 = min(h0, span);
    const V y1 = y + dir * h0 * k1;
    const V f1 = rhs(t + dir * h0, y1);
    const Scalar d2 = error_norm(f1 - k1, y, y) / h0;
    const Scalar h1 = max(dd1, d2) <= Scalar(1e-15) ? max(Scalar(1e-6), h0 * Scalar(1e-3))
                                                    : pow(Scalar(0.01) / max(dd1, d2), Scalar(1) / 5);
    h = min(Scalar(100) * h0, h1);
    if (!(h > Scalar(0)) || !std::isfinite(static_cast<double>(h))) h = Scalar(1e-6);
  }
  h = min(h, span);

  std::size_t next_checkpoint = 1;
  auto checkpoint_time = [&](std::size_t k) { return t0 + dir * Scalar(k) * sol.interval_; };

  bool last_rejected = false;
  constexpr std::size_t max_steps = 20'000'000;
  for (std::size_t count = 0;; ++count) {
    if (count > max_steps) throw IntegrationError("too many steps", static_cast<double>(t));

    // Target time for this step: end of span or next checkpoint.
    Scalar target = t1;
    if (sol.interval_ > Scalar(0)) {
      const Scalar ck = checkpoint_time(next_checkpoint);
      if (dir * (ck - t1) < Scalar(0)) target = ck;
    }
    Scalar h_step = min(h, abs(target - t));
    bool lands = h_step >= abs(target - t) * (Scalar(1) - Scalar(4) * eps);
    if (!lands && abs(target - t) - h_step < Scalar(1e-3) * h_step) {
      // Avoid a sliver step right before the target.
      h_step = abs(target - t) * Scalar(0.5);
    }
    if (h_step < Scalar(16) * eps * max(abs(t), Scalar(1))) {
      throw IntegrationError("step size underflow (state blow-up?) at t = " + std::to_string(static_cast<double>(t)),
                             static_cast<double>(t));
    }
    const Scalar hs = dir * h_step;

    const V k2 = rhs(t + c2 * hs, V(y + hs * (a21 * k1)));
    const V k3 = rhs(t + c3 * hs, V(y + hs * (a31 * k1 + a32 * k2)));
    const V k4 = rhs(t + c4 * hs, V(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
    const V k5 = rhs(t + c5 * hs, V(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const V k6 = rhs(t + hs, V(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const Scalar t_new = lands ? target : t + hs;
    const V y_new = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const V k7 = rhs(t_new, y_new);
    const V err_vec = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    Scalar err = error_norm(err_vec, y, y_new);
    if (!y_new.allFinite() || !k7.allFinite() || !std::isfinite(static_cast<double>(err))) {
      err = std::numeric_limits<Scalar>::infinity();
    }

    if (err <= Scalar(1)) {
      typename DenseSolution<Scalar>::Step step{t, t_new - t, Matrix<Scalar>(dim, 5)};
      const V ydiff = y_new - y;
      const V bspl = hs * k1 - ydiff;
      step.coeffs.col(0) = y;
      step.coeffs.col(1) = ydiff;
      step.coeffs.col(2) = bspl;
      step.coeffs.col(3) = ydiff - hs * k7 - bspl;
      step.coeffs.col(4) = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      sol.steps_.push_back(std::move(step));

      t = t_new;
      y = y_new;
      k1 = k7;
      const Scalar fac = err == Scalar(0) ? Scalar(10) : min(Scalar(10), max(Scalar(0.2), Scalar(0.9) * pow(err, Scalar(-0.2))));
      const Scalar grown = h_step * (last_rejected ? min(fac, Scalar(1)) : fac);
      // Keep the untruncated proposal when the step was shortened to land on a target.
      h = lands ? max(grown, min(h, grown * Scalar(10))) : grown;
      last_rejected = false;

      if (lands) {
        if (t == t1) {
          sol.checkpoints_.emplace_back(t, y);
          break;
        }
        sol.checkpoints_.emplace_back(t, y);
        sol.checkpoint_steps_.push_back(sol.steps_.size());
        ++next_checkpoint;
      }
    } else {
      if (!std::isfinite(static_cast<double>(err))) {
        h = h_step * Scalar(0.2);
      } else {
        h = h_step * max(Scalar(0.2), Scalar(0.9) * pow(err, Scalar(-0.2)));
      }
      last_rejected = true;
    }
  }
  return sol;
}

}  // namespace dtorus
