#include <algorithm>
#include <cmath>

#include <omp.h>

#include "eigdef/kernels.hpp"

namespace eigdef::kernels::omp {

void blend(std::span<const ConstColumn> sources, std::span<const double> weights,
           Eigen::Ref<ComplexVector> out) {
  const Index n = out.size();
  const std::size_t count = sources.size();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    Complex acc(0.0, 0.0);
    for (std::size_t k = 0; k < count; ++k) acc += weights[k] * sources[k](i);
    out(i) = acc;
  }
}

void affine_combine(const Eigen::Ref<const ComplexVector>& mean,
                    const Eigen::Ref<const ComplexMatrix>& basis,
                    const Eigen::Ref<const ComplexVector>& coeffs, Eigen::Ref<ComplexVector> out) {
  const Index n = mean.size();
  const Index r = basis.cols();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    Complex acc = mean(i);
    for (Index j = 0; j < r; ++j) acc += basis(i, j) * coeffs(j);
    out(i) = acc;
  }
}

void center_columns(const Eigen::Ref<const ComplexMatrix>& snapshots, Eigen::Ref<ComplexVector> mean,
                    Eigen::Ref<ComplexMatrix> deviations) {
  const Index n = snapshots.rows();
  const Index p = snapshots.cols();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    Complex acc(0.0, 0.0);
    for (Index k = 0; k < p; ++k) acc += snapshots(i, k);
    const Complex mu = acc / static_cast<double>(p);
    mean(i) = mu;
    for (Index k = 0; k < p; ++k) deviations(i, k) = snapshots(i, k) - mu;
  }
}

double synthesize(const Eigen::Ref<const ComplexMatrix>& basis,
                  const Eigen::Ref<const ComplexMatrix>& reduced,
                  const Eigen::Ref<const RealVector>& offset, Eigen::Ref<RealMatrix> states) {
  const Index n = basis.rows();
  const Index m = basis.cols();
  const Index steps = reduced.cols();
  double residue = 0.0;
#pragma omp parallel for schedule(static) reduction(max : residue)
  for (Index t = 0; t < steps; ++t) {
    for (Index i = 0; i < n; ++i) {
      Complex acc(offset(i), 0.0);
      for (Index j = 0; j < m; ++j) acc += basis(i, j) * reduced(j, t);
      states(i, t) = acc.real();
      residue = std::max(residue, std::abs(acc.imag()));
    }
  }
  return residue;
}

}  // namespace eigdef::kernels::omp
