#include "dtorus/dichotomy.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/SVD>

namespace dtorus {

MatrixXd transport(const ProjectorField& field, const FundamentalMatrixOracle& oracle, double tau) {
  if (tau == 0.0) return field.base;
  return oracle.forward(tau) * field.base * oracle.backward(tau);
}

DichotomyCertificate verify_dichotomy(const ProjectorField& field, const FundamentalMatrixOracle& oracle, double T,
                                      double grid_step) {
  if (!(T > 0.0) || !(grid_step > 0.0)) throw Error("verify_dichotomy: T and grid_step must be positive");
  const int n = oracle.dimension();
  if (field.base.rows() != n || field.base.cols() != n) throw ShapeError("verify_dichotomy: projector size mismatch");

  DichotomyCertificate cert;
  cert.side = field.side;
  cert.window = T;
  cert.grid_step = grid_step;

  const int count = static_cast<int>(std::floor(T / grid_step + 1e-9)) + 1;
  const double sign = field.side == Side::plus ? 1.0 : -1.0;
  std::vector<double> times(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) times[static_cast<std::size_t>(i)] = sign * grid_step * i;

  std::vector<MatrixXd> fwd, bwd;
  for (double t : times) {
    fwd.push_back(oracle.forward(t));
    bwd.push_back(oracle.backward(t));
  }
  const MatrixXd C = field.base;
  const MatrixXd Q = MatrixXd::Identity(n, n) - C;

  struct Sample {
    double distance;
    double norm;
  };
  std::vector<Sample> samples;
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < count; ++j) {
      const double t = times[static_cast<std::size_t>(i)];
      const double tau = times[static_cast<std::size_t>(j)];
      const auto& F = fwd[static_cast<std::size_t>(i)];
      const auto& B = bwd[static_cast<std::size_t>(j)];
      if (t >= tau) {
        const double v = inf_norm(F * C * B);
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "non-finite norm at (t, tau) = (" << t << ", " << tau << ")";
          cert.diagnostic = os.str();
          return cert;
        }
        samples.push_back({t - tau, v});
      }
      if (tau >= t) {
        const double v = inf_norm(F * Q * B);
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "non-finite norm at (t, tau) = (" << t << ", " << tau << ")";
          cert.diagnostic = os.str();
          return cert;
        }
        samples.push_back({tau - t, v});
      }
    }
  }
  cert.pairs = static_cast<int>(samples.size());

  // Zero norms satisfy any bound and carry no rate information.
  constexpr double null_norm = 1e-13;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int fit = 0;
  for (const auto& s : samples) {
    if (s.distance < 1.0 || s.norm <= null_norm) continue;
    const double y = std::log(s.norm);
    sx += s.distance;
    sy += y;
    sxx += s.distance * s.distance;
    sxy += s.distance * y;
    ++fit;
  }
  if (fit == 0) {
    bool all_null = true;
    for (const auto& s : samples) all_null = all_null && s.norm <= null_norm;
    cert.alpha = std::numeric_limits<double>::infinity();
    cert.K = 1.0;
    for (const auto& s : samples) cert.K = std::max(cert.K, s.norm);
    cert.verified = all_null;
    cert.diagnostic = all_null ? "all sampled norms vanish" : "window too short: no pairs with |t - tau| >= 1";
    return cert;
  }
  double slope = 0.0;
  double intercept = sy / fit;
  const double denom = fit * sxx - sx * sx;
  if (fit >= 2 && std::abs(denom) > 1e-12) {
    slope = (fit * sxy - sx * sy) / denom;
    intercept = (sy - slope * sx) / fit;
  }
  cert.alpha = -slope;

  cert.K = 1.0;
  cert.max_violation = 0.0;
  for (const auto& s : samples) {
    if (s.norm <= null_norm) continue;
    cert.K = std::max(cert.K, s.norm * std::exp(cert.alpha * s.distance));
    if (s.distance >= 1.0) {
      cert.max_violation = std::max(cert.max_violation, s.norm / std::exp(intercept - cert.alpha * s.distance) - 1.0);
    }
  }
  if (cert.alpha > 0.0) {
    cert.verified = true;
  } else {
    std::ostringstream os;
    os << "growth detected: fitted rate " << cert.alpha << " <= 0";
    cert.diagnostic = os.str();
  }
  return cert;
}

namespace {

// Orthogonal projector onto the span of right singular vectors with singular value < 1.
MatrixXd decaying_projector(const MatrixXd& M, double min_gap, const char* label, int& rank) {
  Eigen::JacobiSVD<MatrixXd> svd(M, Eigen::ComputeFullV);
  const VectorXd& s = svd.singularValues();  // descending
  const Eigen::Index n = s.size();
  if (!s.allFinite()) throw AmbiguousSplitError(std::string(label) + ": non-finite singular values");
  Eigen::Index split = 0;  // number of values >= 1
  while (split < n && s(split) >= 1.0) ++split;
  if (split > 0 && split < n) {
    const double ratio = s(split - 1) / s(split);
    if (ratio < min_gap) {
      std::ostringstream os;
      os << label << ": singular values " << s(split - 1) << " and " << s(split) << " straddle 1 with ratio " << ratio
         << " < " << min_gap;
      throw AmbiguousSplitError(os.str());
    }
  }
  // A value close to 1 on either side leaves the split undecided.
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = s(i) >= 1.0 ? s(i) : 1.0 / s(i);
    if (r < std::sqrt(min_gap)) {
      std::ostringstream os;
      os << label << ": singular value " << s(i) << " too close to 1 (increase T)";
      throw AmbiguousSplitError(os.str());
    }
  }
  rank = static_cast<int>(n - split);
  const MatrixXd V = svd.matrixV().rightCols(n - split);
  return V * V.transpose();
}

}  // namespace

ProjectorPair estimate_projectors(const FundamentalMatrixOracle& oracle, double T, double min_gap) {
  if (!(T > 0.0)) throw Error("estimate_projectors: T must be positive");
  const int n = oracle.dimension();
  const MatrixXd I = MatrixXd::Identity(n, n);

  int plus_rank = 0;
  int minus_unstable_rank = 0;
  ProjectorPair out;
  out.plus = {Side::plus, decaying_projector(oracle.forward(T), min_gap, "forward split", plus_rank), true};
  const MatrixXd backward_decaying = decaying_projector(oracle.forward(-T), min_gap, "backward split", minus_unstable_rank);
  out.minus = {Side::minus, I - backward_decaying, true};
  if (plus_rank == 0) {
    throw AmbiguousSplitError("forward split: no direction decays forward, C+ would be zero");
  }
  if (minus_unstable_rank == n) {
    throw AmbiguousSplitError("backward split: every direction decays as t -> -inf, C- would be zero");
  }
  return out;
}

}  // namespace dtorus
