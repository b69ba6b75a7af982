#pragma once

#include <span>

#include "eigdef/types.hpp"

// Data-parallel inner loops of the pipeline. Each kernel exists as a plain
// serial reference and an OpenMP version with the same signature; the serial
// one is what the tests trust, the OpenMP one is what the library calls.
namespace eigdef::kernels {

using ConstColumn = Eigen::Map<const ComplexVector>;

enum class Backend { kSerial, kOpenMP };

namespace serial {

/// out = Σ_k weights[k]·sources[k]
void blend(std::span<const ConstColumn> sources, std::span<const double> weights,
           Eigen::Ref<ComplexVector> out);

/// out = mean + basis·coeffs
void affine_combine(const Eigen::Ref<const ComplexVector>& mean,
                    const Eigen::Ref<const ComplexMatrix>& basis,
                    const Eigen::Ref<const ComplexVector>& coeffs, Eigen::Ref<ComplexVector> out);

/// Column mean of `snapshots` and the mean-free deviations.
void center_columns(const Eigen::Ref<const ComplexMatrix>& snapshots, Eigen::Ref<ComplexVector> mean,
                    Eigen::Ref<ComplexMatrix> deviations);

/// states(:, t) = Re(offset + basis·reduced(:, t)); returns max |Im| seen.
double synthesize(const Eigen::Ref<const ComplexMatrix>& basis,
                  const Eigen::Ref<const ComplexMatrix>& reduced,
                  const Eigen::Ref<const RealVector>& offset, Eigen::Ref<RealMatrix> states);

}  // namespace serial

namespace omp {

void blend(std::span<const ConstColumn> sources, std::span<const double> weights,
           Eigen::Ref<ComplexVector> out);
void affine_combine(const Eigen::Ref<const ComplexVector>& mean,
                    const Eigen::Ref<const ComplexMatrix>& basis,
                    const Eigen::Ref<const ComplexVector>& coeffs, Eigen::Ref<ComplexVector> out);
void center_columns(const Eigen::Ref<const ComplexMatrix>& snapshots, Eigen::Ref<ComplexVector> mean,
                    Eigen::Ref<ComplexMatrix> deviations);
double synthesize(const Eigen::Ref<const ComplexMatrix>& basis,
                  const Eigen::Ref<const ComplexMatrix>& reduced,
                  const Eigen::Ref<const RealVector>& offset, Eigen::Ref<RealMatrix> states);

}  // namespace omp

/// Backend used by the library entry points; defaults to OpenMP.
Backend active_backend();
void set_backend(Backend backend);

void blend(std::span<const ConstColumn> sources, std::span<const double> weights,
           Eigen::Ref<ComplexVector> out);
void affine_combine(const Eigen::Ref<const ComplexVector>& mean,
                    const Eigen::Ref<const ComplexMatrix>& basis,
                    const Eigen::Ref<const ComplexVector>& coeffs, Eigen::Ref<ComplexVector> out);
void center_columns(const Eigen::Ref<const ComplexMatrix>& snapshots, Eigen::Ref<ComplexVector> mean,
                    Eigen::Ref<ComplexMatrix> deviations);
double synthesize(const Eigen::Ref<const ComplexMatrix>& basis,
                  const Eigen::Ref<const ComplexMatrix>& reduced,
                  const Eigen::Ref<const RealVector>& offset, Eigen::Ref<RealMatrix> states);

}  // namespace eigdef::kernels
