#include "eigdef/mass_matrix.hpp"

#include <cmath>
#include <sstream>

#include "eigdef/error.hpp"
#include "eigdef/numerics.hpp"

namespace eigdef {

MassMatrix::MassMatrix(const RealMatrix& dense) : MassMatrix(SparseMatrix(dense.sparseView())) {}

MassMatrix::MassMatrix(SparseMatrix sparse) : matrix_(std::move(sparse)) {
  if (matrix_.rows() < 1 || matrix_.rows() != matrix_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "mass matrix must be square and non-empty");
  }
  matrix_.makeCompressed();
  diagonal_ = true;
  for (Index c = 0; c < matrix_.outerSize() && diagonal_; ++c) {
    for (SparseMatrix::InnerIterator it(matrix_, c); it; ++it) {
      if (it.row() != it.col() && it.value() != 0.0) {
        diagonal_ = false;
        break;
      }
    }
  }
  init_factor();
}

MassMatrix MassMatrix::identity(Index n) {
  SparseMatrix s(n, n);
  s.setIdentity();
  return MassMatrix(std::move(s));
}

MassMatrix MassMatrix::diagonal(const RealVector& d) {
  SparseMatrix s(d.size(), d.size());
  s.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (Index i = 0; i < d.size(); ++i) s.insert(i, i) = d(i);
  return MassMatrix(std::move(s));
}

void MassMatrix::init_factor() {
  if (diagonal_) {
    const Index n = matrix_.rows();
    diag_ = matrix_.diagonal();
    for (Index i = 0; i < n; ++i) {
      if (!(diag_(i) > 0.0)) {
        std::ostringstream os;
        os << "mass matrix is not positive definite: pivot " << i << " is " << diag_(i);
        throw Error(ErrorCode::kNotPositiveDefinite, os.str());
      }
    }
    SparseMatrix f(n, n);
    f.reserve(Eigen::VectorXi::Constant(n, 1));
    for (Index i = 0; i < n; ++i) f.insert(i, i) = std::sqrt(diag_(i));
    factor_ = std::move(f);
  } else {
    factor_ = numerics::cholesky_factor(RealMatrix(matrix_)).sparseView();
  }
  factor_.makeCompressed();
}

ComplexVector MassMatrix::apply(const ComplexVector& v) const {
  if (diagonal_) return diag_.cast<Complex>().cwiseProduct(v);
  return matrix_.cast<Complex>() * v;
}

ComplexVector MassMatrix::weigh(const ComplexVector& v) const {
  if (diagonal_) return diag_.cwiseSqrt().cast<Complex>().cwiseProduct(v);
  return factor_.cast<Complex>() * v;
}

ComplexMatrix MassMatrix::weigh(const ComplexMatrix& v) const {
  if (diagonal_) return diag_.cwiseSqrt().cast<Complex>().asDiagonal() * v;
  return factor_.cast<Complex>() * v;
}

ComplexMatrix MassMatrix::unweigh(const ComplexMatrix& v) const {
  if (diagonal_) return diag_.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * v;
  const Eigen::SparseMatrix<Complex> f = factor_.cast<Complex>();
  return f.triangularView<Eigen::Upper>().solve(v);
}

Complex MassMatrix::inner(const ComplexVector& a, const ComplexVector& b) const {
  return a.dot(apply(b));  // Eigen's dot conjugates the first argument
}

double MassMatrix::norm(const ComplexVector& v) const { return weigh(v).norm(); }

bool operator==(const MassMatrix& a, const MassMatrix& b) {
  if (a.size() != b.size()) return false;
  return SparseMatrix(a.matrix_ - b.matrix_).norm() == 0.0;
}

}  // namespace eigdef
