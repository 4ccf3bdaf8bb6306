#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace dtorus {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

/// Operator infinity-norm (max absolute row sum). Used for every matrix bound.
template <typename Derived>
typename Derived::Scalar inf_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return typename Derived::Scalar(0);
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested time lies outside the integrated span of an oracle.
class SpanError : public Error {
 public:
  using Error::Error;
};

/// Integration produced a non-finite state or could not make progress.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

enum class Variant { one, two };

inline const char* to_string(Variant v) { return v == Variant::one ? "one" : "two"; }

}  // namespace dtorus
