#pragma once

#include <Eigen/SparseCore>

#include "eigdef/types.hpp"

namespace eigdef {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// SPD mass matrix E together with its upper Cholesky factor F (FᵀF = E).
/// Stored sparse so that diagonal masses scale to large n; general masses
/// are factored densely.
class MassMatrix {
 public:
  MassMatrix() = default;
  explicit MassMatrix(const RealMatrix& dense);
  explicit MassMatrix(SparseMatrix sparse);

  static MassMatrix identity(Index n);
  static MassMatrix diagonal(const RealVector& d);

  Index size() const { return matrix_.rows(); }
  bool is_diagonal() const { return diagonal_; }
  const SparseMatrix& matrix() const { return matrix_; }
  const SparseMatrix& factor() const { return factor_; }
  RealMatrix dense() const { return RealMatrix(matrix_); }
  RealMatrix dense_factor() const { return RealMatrix(factor_); }

  ComplexVector apply(const ComplexVector& v) const;
  /// F·v, the Cholesky weighting.
  ComplexVector weigh(const ComplexVector& v) const;
  ComplexMatrix weigh(const ComplexMatrix& v) const;
  /// F⁻¹·v by triangular solve.
  ComplexMatrix unweigh(const ComplexMatrix& v) const;

  /// aᴴ·E·b
  Complex inner(const ComplexVector& a, const ComplexVector& b) const;
  /// sqrt(vᴴ·E·v) = ‖F·v‖₂
  double norm(const ComplexVector& v) const;

  friend bool operator==(const MassMatrix& a, const MassMatrix& b);

 private:
  void init_factor();

  SparseMatrix matrix_;
  SparseMatrix factor_;
  RealVector diag_;
  bool diagonal_ = false;
};

}  // namespace eigdef
