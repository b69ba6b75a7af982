#pragma once

#include <optional>
#include <vector>

#include "eigdef/error.hpp"
#include "eigdef/types.hpp"

namespace eigdef::numerics {

/// One eigentriple of the pencil (A, E): A·right = λ·E·right and
/// leftᴴ·A = λ·leftᴴ·E. Right vectors are E-normalized; when present the
/// left vector satisfies leftᴴ·E·right = 1.
struct SpectralPair {
  Complex eigenvalue;
  ComplexVector right;
  std::optional<ComplexVector> left;
};

/// Upper-triangular F with FᵀF = E.
///
/// Throws kNotSymmetric when E deviates from symmetry by more than 1e-12
/// relative, and kNotPositiveDefinite naming the first failing pivot.
RealMatrix cholesky_factor(const RealMatrix& mass);

/// Generalized eigendecomposition of A·φ = λ·E·φ for SPD E, sorted by
/// descending real part (ties broken by descending imaginary part).
///
/// For symmetric A the self-adjoint path is taken and left vectors alias the
/// right ones. Otherwise the pencil is reduced to F⁻ᵀAF⁻¹ and left vectors
/// come from the inverse of the eigenvector matrix, which makes the pair
/// bi-normalized by construction.
std::vector<SpectralPair> generalized_eig(const RealMatrix& op, const RealMatrix& mass,
                                          bool want_left);

/// Same as above with a precomputed upper Cholesky factor of `mass`.
std::vector<SpectralPair> generalized_eig(const RealMatrix& op, const RealMatrix& mass,
                                          const RealMatrix& factor, bool want_left);

/// Permutation putting eigenvalues in descending real part. Real parts that
/// chain within rel_tie_tol·max|λ| of each other form a tie group, ordered by
/// descending imaginary part.
std::vector<Index> spectral_permutation(const std::vector<Complex>& eigenvalues,
                                        double rel_tie_tol = 1e-10);

struct TruncatedSvd {
  ComplexMatrix left;       // n × r
  RealVector singular_values;  // all min(n, p) values, non-increasing
  ComplexMatrix right;      // p × r
};

/// Thin SVD of M truncated to rank r (1 ≤ r ≤ min(n, p)).
TruncatedSvd truncated_svd(const ComplexMatrix& data, Index rank);

/// Count of singular values above max(n, p)·eps·σ₁.
Index numerical_rank(const RealVector& singular_values, Index rows, Index cols);

/// Solves A·x = b by LU with partial pivoting. Throws kSingular with the
/// reciprocal condition estimate when A is singular to working precision.
RealVector solve_linear(const RealMatrix& op, const RealVector& rhs);

bool is_symmetric(const RealMatrix& m, double rel_tol);

}  // namespace eigdef::numerics
