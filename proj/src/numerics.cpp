#include "eigdef/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace eigdef {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kNotSymmetric: return "not symmetric";
    case ErrorCode::kNotPositiveDefinite: return "not positive definite";
    case ErrorCode::kNoConvergence: return "no convergence";
    case ErrorCode::kSingular: return "singular";
    case ErrorCode::kRankOutOfRange: return "rank out of range";
    case ErrorCode::kOutOfDomain: return "out of domain";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kNotAligned: return "not aligned";
    case ErrorCode::kNotSampled: return "not sampled";
    case ErrorCode::kEquilibriumUndefined: return "equilibrium undefined";
    case ErrorCode::kUndefinedFraction: return "undefined fraction";
    case ErrorCode::kChecksumMismatch: return "checksum mismatch";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kMissingFile: return "missing file";
    case ErrorCode::kFormat: return "format";
  }
  return "unknown";
}

namespace numerics {

namespace {

void require_square(const RealMatrix& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << " must be square and non-empty, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

// C = F⁻ᵀ·A·F⁻¹ without forming F⁻¹.
RealMatrix reduce_pencil(const RealMatrix& op, const RealMatrix& factor) {
  const auto upper = factor.triangularView<Eigen::Upper>();
  RealMatrix left_reduced = upper.transpose().solve(op);  // F⁻ᵀA
  RealMatrix t = upper.transpose().solve(left_reduced.transpose());
  return t.transpose();
}

}  // namespace

bool is_symmetric(const RealMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.norm();
  return (m - m.transpose()).norm() <= rel_tol * std::max(scale, std::numeric_limits<double>::min());
}

RealMatrix cholesky_factor(const RealMatrix& mass) {
  require_square(mass, "mass matrix");
  if (!is_symmetric(mass, 1e-12)) {
    throw Error(ErrorCode::kNotSymmetric, "mass matrix is not symmetric to 1e-12 relative");
  }
  const Index n = mass.rows();
  RealMatrix f = RealMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const double pivot = mass(j, j) - f.col(j).head(j).squaredNorm();
    if (!(pivot > 0.0)) {
      std::ostringstream os;
      os << "mass matrix is not positive definite: pivot " << j << " is " << pivot;
      throw Error(ErrorCode::kNotPositiveDefinite, os.str());
    }
    const double d = std::sqrt(pivot);
    f(j, j) = d;
    const Index rest = n - j - 1;
    if (rest > 0) {
      f.row(j).tail(rest) =
          (mass.row(j).tail(rest) - f.col(j).head(j).transpose() * f.block(0, j + 1, j, rest)) / d;
    }
  }
  return f;
}

std::vector<Index> spectral_permutation(const std::vector<Complex>& eigenvalues,
                                        double rel_tie_tol) {
  std::vector<Index> order(eigenvalues.size());
  std::iota(order.begin(), order.end(), Index{0});
  double scale = 0.0;
  for (const auto& l : eigenvalues) scale = std::max(scale, std::abs(l));
  const double tol = rel_tie_tol * scale;

  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return eigenvalues[a].real() > eigenvalues[b].real();
  });
  // Tie groups are maximal runs whose neighbouring real parts differ by ≤ tol.
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() &&
           eigenvalues[order[end - 1]].real() - eigenvalues[order[end]].real() <= tol) {
      ++end;
    }
    std::stable_sort(order.begin() + start, order.begin() + end, [&](Index a, Index b) {
      return eigenvalues[a].imag() > eigenvalues[b].imag();
    });
    start = end;
  }
  return order;
}

std::vector<SpectralPair> generalized_eig(const RealMatrix& op, const RealMatrix& mass,
                                          bool want_left) {
  return generalized_eig(op, mass, cholesky_factor(mass), want_left);
}

std::vector<SpectralPair> generalized_eig(const RealMatrix& op, const RealMatrix& mass,
                                          const RealMatrix& factor, bool want_left) {
  require_square(op, "operator");
  require_square(mass, "mass matrix");
  if (op.rows() != mass.rows() || factor.rows() != mass.rows() || factor.cols() != mass.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "operator, mass matrix and factor sizes differ");
  }
  const Index n = op.rows();
  const auto upper = factor.triangularView<Eigen::Upper>();
  RealMatrix reduced = reduce_pencil(op, factor);

  std::vector<Complex> values(static_cast<std::size_t>(n));
  ComplexMatrix right(n, n);
  std::optional<ComplexMatrix> left;

  if (is_symmetric(op, 1e-12)) {
    reduced = 0.5 * (reduced + reduced.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(reduced);
    if (es.info() != Eigen::Success) {
      std::ostringstream os;
      os << "symmetric eigensolver did not converge within "
         << Eigen::SelfAdjointEigenSolver<RealMatrix>::m_maxIterations * n << " iterations";
      throw Error(ErrorCode::kNoConvergence, os.str());
    }
    RealMatrix phi = upper.solve(es.eigenvectors());
    right = phi.cast<Complex>();
    for (Index i = 0; i < n; ++i) values[i] = Complex(es.eigenvalues()(i), 0.0);
    if (want_left) left = right;
  } else {
    Eigen::EigenSolver<RealMatrix> es(reduced, true);
    if (es.info() != Eigen::Success) {
      std::ostringstream os;
      os << "eigensolver did not converge within " << 40 * n << " QR iterations";
      throw Error(ErrorCode::kNoConvergence, os.str());
    }
    const ComplexMatrix factor_c = factor.cast<Complex>();
    ComplexMatrix w = es.eigenvectors();
    for (Index i = 0; i < n; ++i) {
      w.col(i).normalize();
      values[i] = es.eigenvalues()(i);
    }
    if (want_left) {
      Eigen::PartialPivLU<ComplexMatrix> lu(w);
      const double rcond = lu.rcond();
      if (!(rcond > 1e3 * std::numeric_limits<double>::epsilon())) {
        std::ostringstream os;
        os << "eigenvector matrix is numerically singular (rcond " << rcond
           << "); pencil is defective or nearly so";
        throw Error(ErrorCode::kSingular, os.str());
      }
      // Rows of W⁻¹ are the left eigenvectors of the reduced matrix.
      ComplexMatrix z = lu.inverse().adjoint();
      left = factor_c.triangularView<Eigen::Upper>().solve(z);
    }
    right = factor_c.triangularView<Eigen::Upper>().solve(w);
  }

  const auto order = spectral_permutation(values);
  std::vector<SpectralPair> pairs;
  pairs.reserve(order.size());
  for (Index idx : order) {
    SpectralPair p{values[idx], right.col(idx), std::nullopt};
    if (left) p.left = left->col(idx);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

TruncatedSvd truncated_svd(const ComplexMatrix& data, Index rank) {
  const Index full = std::min(data.rows(), data.cols());
  if (rank < 1 || rank > full) {
    std::ostringstream os;
    os << "rank " << rank << " outside [1, " << full << "]";
    throw Error(ErrorCode::kRankOutOfRange, os.str());
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU().leftCols(rank), svd.singularValues(), svd.matrixV().leftCols(rank)};
}

Index numerical_rank(const RealVector& singular_values, Index rows, Index cols) {
  if (singular_values.size() == 0) return 0;
  const double tol = static_cast<double>(std::max(rows, cols)) *
                     std::numeric_limits<double>::epsilon() * singular_values(0);
  Index r = 0;
  for (Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > tol) ++r;
  }
  return r;
}

RealVector solve_linear(const RealMatrix& op, const RealVector& rhs) {
  require_square(op, "matrix");
  if (rhs.size() != op.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "right-hand side length differs from matrix size");
  }
  Eigen::PartialPivLU<RealMatrix> lu(op);
  const double rcond = lu.rcond();
  if (!(rcond > static_cast<double>(op.rows()) * std::numeric_limits<double>::epsilon())) {
    std::ostringstream os;
    os << "matrix is singular to working precision (rcond estimate " << rcond << ")";
    throw Error(ErrorCode::kSingular, os.str());
  }
  return lu.solve(rhs);
}

}  // namespace numerics
}  // namespace eigdef
