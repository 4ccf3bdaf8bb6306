#pragma once

// D = C+ - (I - C-), its Moore-Penrose pseudoinverse, and the orthoprojectors onto ker D and ker D*.

#include <Eigen/SVD>

#include "dtorus/types.hpp"

namespace dtorus {

template <typename Scalar>
struct CriticalData {
  Matrix<Scalar> D;
  /// Moore-Penrose pseudoinverse at a base point; a generalized inverse after transport.
  Matrix<Scalar> D_plus;
  Matrix<Scalar> P_kernel;    // onto N(D):  I - D+ D
  Matrix<Scalar> P_cokernel;  // onto N(D*): I - D D+
  int rank = 0;
  Vector<Scalar> singular_values;
  Scalar rtol = Scalar(1e-10);
  /// False once carried along the flow by a non-orthogonal similarity.
  bool moore_penrose = true;
};

template <typename Scalar>
Matrix<Scalar> build_D(const Matrix<Scalar>& c_plus, const Matrix<Scalar>& c_minus) {
  if (c_plus.rows() != c_plus.cols() || c_minus.rows() != c_minus.cols() || c_plus.rows() != c_minus.rows()) {
    throw ShapeError("build_D: projectors must be square and of equal size");
  }
  return c_plus - Matrix<Scalar>::Identity(c_plus.rows(), c_plus.cols()) + c_minus;
}

/// SVD pseudoinverse; singular values <= rtol * sigma_max count as zero.
template <typename Scalar>
CriticalData<Scalar> pinv(const Matrix<Scalar>& D, Scalar rtol = Scalar(1e-10)) {
  if (D.rows() != D.cols()) throw ShapeError("pinv: matrix must be square");
  if (!D.allFinite()) throw Error("pinv: matrix has non-finite entries");
  if (!(rtol > Scalar(0) && rtol < Scalar(1))) throw Error("pinv: rtol must lie in (0, 1)");

  const Eigen::Index n = D.rows();
  CriticalData<Scalar> cd;
  cd.D = D;
  cd.rtol = rtol;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(D, Eigen::ComputeFullU | Eigen::ComputeFullV);
  cd.singular_values = svd.singularValues();
  const Scalar sigma_max = n > 0 ? cd.singular_values(0) : Scalar(0);

  Vector<Scalar> inverted = Vector<Scalar>::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar s = cd.singular_values(i);
    if (sigma_max > Scalar(0) && s > rtol * sigma_max) {
      inverted(i) = Scalar(1) / s;
      ++cd.rank;
    }
  }
  cd.D_plus = svd.matrixV() * inverted.asDiagonal() * svd.matrixU().transpose();
  const Matrix<Scalar> I = Matrix<Scalar>::Identity(n, n);
  cd.P_kernel = I - cd.D_plus * D;
  cd.P_cokernel = I - D * cd.D_plus;
  return cd;
}

/// Carries the critical data along the flow: X -> forward * X * backward, where
/// forward = Omega_0^t and backward = Omega_t^0.
template <typename Scalar>
CriticalData<Scalar> transport_critical(const CriticalData<Scalar>& cd, const Matrix<Scalar>& forward,
                                        const Matrix<Scalar>& backward) {
  CriticalData<Scalar> out = cd;
  out.D = forward * cd.D * backward;
  out.D_plus = forward * cd.D_plus * backward;
  out.P_kernel = forward * cd.P_kernel * backward;
  out.P_cokernel = forward * cd.P_cokernel * backward;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(out.D);
  out.singular_values = svd.singularValues();
  out.moore_penrose = false;
  return out;
}

template <typename Scalar>
struct PenroseDefects {
  Scalar reflexive = 0;     // |D D+ D - D|
  Scalar weak = 0;          // |D+ D D+ - D+|
  Scalar range_sym = 0;     // |(D D+)^T - D D+|
  Scalar domain_sym = 0;    // |(D+ D)^T - D+ D|
  Scalar max() const { return std::max({reflexive, weak, range_sym, domain_sym}); }
};

template <typename Scalar>
PenroseDefects<Scalar> penrose_defects(const Matrix<Scalar>& D, const Matrix<Scalar>& G) {
  PenroseDefects<Scalar> out;
  const Matrix<Scalar> DG = D * G;
  const Matrix<Scalar> GD = G * D;
  out.reflexive = inf_norm(DG * D - D);
  out.weak = inf_norm(GD * G - G);
  out.range_sym = inf_norm(Matrix<Scalar>(DG.transpose() - DG));
  out.domain_sym = inf_norm(Matrix<Scalar>(GD.transpose() - GD));
  return out;
}

}  // namespace dtorus
