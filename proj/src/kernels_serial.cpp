#include <algorithm>
#include <atomic>
#include <cmath>

#include "eigdef/error.hpp"
#include "eigdef/kernels.hpp"

namespace eigdef::kernels {

namespace serial {

void blend(std::span<const ConstColumn> sources, std::span<const double> weights,
           Eigen::Ref<ComplexVector> out) {
  const Index n = out.size();
  for (Index i = 0; i < n; ++i) {
    Complex acc(0.0, 0.0);
    for (std::size_t k = 0; k < sources.size(); ++k) acc += weights[k] * sources[k](i);
    out(i) = acc;
  }
}

void affine_combine(const Eigen::Ref<const ComplexVector>& mean,
                    const Eigen::Ref<const ComplexMatrix>& basis,
                    const Eigen::Ref<const ComplexVector>& coeffs, Eigen::Ref<ComplexVector> out) {
  const Index n = mean.size();
  const Index r = basis.cols();
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
  for (Index i = 0; i < n; ++i) {
    Complex acc(0.0, 0.0);
    for (Index k = 0; k < p; ++k) acc += snapshots(i, k);
    mean(i) = acc / static_cast<double>(p);
    for (Index k = 0; k < p; ++k) deviations(i, k) = snapshots(i, k) - mean(i);
  }
}

double synthesize(const Eigen::Ref<const ComplexMatrix>& basis,
                  const Eigen::Ref<const ComplexMatrix>& reduced,
                  const Eigen::Ref<const RealVector>& offset, Eigen::Ref<RealMatrix> states) {
  const Index n = basis.rows();
  const Index m = basis.cols();
  const Index steps = reduced.cols();
  double residue = 0.0;
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

}  // namespace serial

namespace {
std::atomic<Backend> g_backend{Backend::kOpenMP};
}

Backend active_backend() { return g_backend.load(); }
void set_backend(Backend backend) { g_backend.store(backend); }

void blend(std::span<const ConstColumn> sources, std::span<const double> weights,
           Eigen::Ref<ComplexVector> out) {
  if (sources.size() != weights.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "blend: sources and weights differ in count");
  }
  for (const auto& s : sources) {
    if (s.size() != out.size()) throw Error(ErrorCode::kDimensionMismatch, "blend: length mismatch");
  }
  active_backend() == Backend::kSerial ? serial::blend(sources, weights, out)
                                       : omp::blend(sources, weights, out);
}

void affine_combine(const Eigen::Ref<const ComplexVector>& mean,
                    const Eigen::Ref<const ComplexMatrix>& basis,
                    const Eigen::Ref<const ComplexVector>& coeffs, Eigen::Ref<ComplexVector> out) {
  if (basis.rows() != mean.size() || basis.cols() != coeffs.size() || out.size() != mean.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "affine_combine: shape mismatch");
  }
  active_backend() == Backend::kSerial ? serial::affine_combine(mean, basis, coeffs, out)
                                       : omp::affine_combine(mean, basis, coeffs, out);
}

void center_columns(const Eigen::Ref<const ComplexMatrix>& snapshots, Eigen::Ref<ComplexVector> mean,
                    Eigen::Ref<ComplexMatrix> deviations) {
  if (snapshots.cols() < 1 || mean.size() != snapshots.rows() ||
      deviations.rows() != snapshots.rows() || deviations.cols() != snapshots.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "center_columns: shape mismatch");
  }
  active_backend() == Backend::kSerial ? serial::center_columns(snapshots, mean, deviations)
                                       : omp::center_columns(snapshots, mean, deviations);
}

double synthesize(const Eigen::Ref<const ComplexMatrix>& basis,
                  const Eigen::Ref<const ComplexMatrix>& reduced,
                  const Eigen::Ref<const RealVector>& offset, Eigen::Ref<RealMatrix> states) {
  if (basis.cols() != reduced.rows() || offset.size() != basis.rows() ||
      states.rows() != basis.rows() || states.cols() != reduced.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "synthesize: shape mismatch");
  }
  return active_backend() == Backend::kSerial ? serial::synthesize(basis, reduced, offset, states)
                                              : omp::synthesize(basis, reduced, offset, states);
}

}  // namespace eigdef::kernels
