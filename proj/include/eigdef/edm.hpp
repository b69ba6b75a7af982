#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "eigdef/interpolation.hpp"
#include "eigdef/mass_matrix.hpp"
#include "eigdef/modal.hpp"
#include "eigdef/types.hpp"

namespace eigdef::edm {

/// Energy captured by the leading singular values, used when none is given.
inline constexpr double kDefaultEnergyThreshold = 0.999;

/// Which eigenvectors a data matrix is built from.
enum class ModeSide { kRight, kLeft };

struct DataMatrix {
  ComplexVector mean;        // φ̄ = (1/p)·Σ_k φ^(k)
  ComplexMatrix deviations;  // column k = φ^(k) − φ̄
};

/// Mean mode and mean-free data matrix of one tracked mode. Refuses
/// databases that are not paired and aligned.
DataMatrix build_data_matrix(const modal::ModeDatabase& db, Index mode,
                             ModeSide side = ModeSide::kRight);

struct ExplicitRank {
  Index r = 0;
};
struct EnergyThreshold {
  double fraction = kDefaultEnergyThreshold;
};
using RankSpec = std::variant<ExplicitRank, EnergyThreshold>;

/// Eigen-deformation modes of one tracked eigenmode.
struct EdmBasis {
  Index mode_index = 0;           // 0-based
  ModeSide side = ModeSide::kRight;
  ComplexVector mean_mode;        // n
  ComplexMatrix edms;             // n × r, E-orthonormal
  RealVector singular_values;     // min(n, p), non-increasing
  ComplexMatrix coefficients;     // r × p, column k = Σ·Vᴴ e_k
  std::vector<double> sample_mus; // p

  Index rank() const { return edms.cols(); }
  Index n() const { return mean_mode.size(); }
};

/// Weighted SVD of D̃ = F·D; EDMs U = F⁻¹·Ũ by triangular solve, coefficients
/// Σ·Vᴴ. An explicit rank of 0 keeps only the mean mode. Throws
/// kRankOutOfRange for r > min(n, p).
EdmBasis compute_edms(const DataMatrix& data, const MassMatrix& mass, const RankSpec& rank,
                      const std::vector<double>& sample_mus);

/// build_data_matrix followed by compute_edms.
EdmBasis compute_edm_basis(const modal::ModeDatabase& db, Index mode, const RankSpec& rank,
                           ModeSide side = ModeSide::kRight);

/// One basis per tracked mode (left bases when `side` says so), computed
/// concurrently.
std::vector<EdmBasis> compute_all_edm_bases(const modal::ModeDatabase& db, const RankSpec& rank,
                                            ModeSide side = ModeSide::kRight);

/// (Σ_{k≤r} σ_k) / (Σ_k σ_k): sums of σ, not σ². Throws kUndefinedFraction
/// when every σ is zero and kRankOutOfRange for r outside [0, len(σ)].
double energy_fraction(const RealVector& singular_values, Index r);

/// Smallest r with energy_fraction(σ, r) ≥ threshold, 0 < threshold ≤ 1.
Index select_rank(const RealVector& singular_values, double threshold);

/// φ̄ + U·φ̂(μ) with φ̂ interpolated across the sample parameters.
ComplexVector interpolate_mode(const EdmBasis& basis, double mu, Scheme scheme = Scheme::kLinear);

/// Componentwise interpolation of the aligned modes in physical space.
ComplexVector direct_interpolate(const modal::ModeDatabase& db, Index mode, double mu,
                                 Scheme scheme = Scheme::kLinear,
                                 ModeSide side = ModeSide::kRight);

/// ‖F(truth − predicted)‖₂ / ‖F·truth‖₂
double interpolation_error(const ComplexVector& truth, const ComplexVector& predicted,
                           const MassMatrix& mass);

/// Copy of `basis` keeping only its leading r EDMs.
EdmBasis truncate(const EdmBasis& basis, Index r);

struct SweepRow {
  double mu = 0.0;
  Index r = -1;  // -1 for direct interpolation
  std::string strategy;
  double error = 0.0;
};

/// Interpolation error of one mode against `truth(μ)` on a validation grid,
/// for every EDM rank in `ranks` and for direct interpolation.
std::vector<SweepRow> error_sweep(const modal::ModeDatabase& db, Index mode,
                                  const std::vector<double>& mus, const std::vector<Index>& ranks,
                                  Scheme scheme,
                                  const std::function<ComplexVector(double)>& truth);

/// Mean error per strategy/rank from an error sweep, in first-seen order.
std::vector<SweepRow> average_by_rank(const std::vector<SweepRow>& rows);

}  // namespace eigdef::edm
