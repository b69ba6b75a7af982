#include <doctest.h>

#include <random>

#include "eigdef/mass_matrix.hpp"

using namespace eigdef;

TEST_CASE("diagonal mass matrix uses the square-root factor") {
  RealVector d(3);
  d << 4, 9, 0.25;
  const auto e = MassMatrix::diagonal(d);
  CHECK(e.is_diagonal());
  CHECK(e.dense_factor().diagonal().isApprox(RealVector((RealVector(3) << 2, 3, 0.5).finished())));
  ComplexVector v(3);
  v << Complex(1, 1), 2, Complex(0, -3);
  CHECK(e.norm(v) == doctest::Approx(std::sqrt(4 * 2 + 9 * 4 + 0.25 * 9)));
  CHECK((e.unweigh(e.weigh(ComplexMatrix(v))) - v).norm() < 1e-14);
}

TEST_CASE("dense mass matrix factors and weighs consistently") {
  std::mt19937 rng(4);
  std::normal_distribution<double> g;
  RealMatrix b(6, 6);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j) b(i, j) = g(rng);
  const RealMatrix dense = b.transpose() * b + 6 * RealMatrix::Identity(6, 6);
  const MassMatrix e(dense);
  CHECK_FALSE(e.is_diagonal());
  const RealMatrix f = e.dense_factor();
  CHECK((f.transpose() * f - dense).norm() <= 1e-10 * dense.norm());

  ComplexVector a(6), c(6);
  for (Index i = 0; i < 6; ++i) {
    a(i) = Complex(g(rng), g(rng));
    c(i) = Complex(g(rng), g(rng));
  }
  const Complex want = (a.adjoint() * dense.cast<Complex>() * c)(0);
  CHECK(std::abs(e.inner(a, c) - want) < 1e-10 * std::abs(want));
  CHECK(e.norm(a) == doctest::Approx(e.weigh(a).norm()));
  CHECK((e.apply(a) - dense.cast<Complex>() * a).norm() < 1e-10);
  CHECK((e.unweigh(e.weigh(ComplexMatrix(a))) - a).norm() < 1e-10);
  CHECK(e == MassMatrix(dense));
  CHECK_FALSE(e == MassMatrix::identity(6));
}
