#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eigdef/mass_matrix.hpp"
#include "eigdef/systems.hpp"
#include "eigdef/types.hpp"

namespace eigdef::modal {

/// Eigen-data at one parameter sample. Column i of right/left belongs to
/// chain i once the database is paired.
struct ModeSample {
  double mu = 0.0;
  ComplexVector eigenvalues;
  ComplexMatrix right;
  std::optional<ComplexMatrix> left;
};

struct ModeDatabase {
  std::vector<ModeSample> samples;
  MassMatrix mass;
  Index m = 0;
  bool is_complex = false;
  /// Complex-conjugate partners of tracked modes were dropped; they are
  /// implied by the real system and rebuilt on demand.
  bool conjugates_implied = false;
  bool paired = false;
  bool aligned = false;
  nlohmann::json generator;            // provenance, may be null
  RealVector coordinates;              // optional, size n when present
  std::vector<std::string> warnings;

  Index n() const { return mass.size(); }
  Index p() const { return static_cast<Index>(samples.size()); }
  bool has_left() const { return !samples.empty() && samples.front().left.has_value(); }
  std::vector<double> mus() const;
  /// Column `mode` of every sample's right (or left) block, as n×p.
  ComplexMatrix snapshots(Index mode, bool left = false) const;

  /// Throws kShapeMismatch/kInvalidArgument when the invariants fail.
  void validate() const;
};

struct SampleOptions {
  bool parallel = true;
};

/// Solves the pencil at every μ_k and keeps the m eigenpairs with the largest
/// real parts. For a real operator only the member of a complex-conjugate
/// pair with Im λ ≥ 0 is kept. Left vectors are stored when A(μ) is not
/// symmetric.
ModeDatabase sample_spectrum(const systems::FullOrderSystem& sys, const std::vector<double>& mus,
                             Index m, const SampleOptions& options = {});

/// Builds a single-mode database of traveling bumps (E = I), already paired.
ModeDatabase traveling_bump_database(Index n, double width, const std::vector<double>& mus);

/// |aᴴ·E·b|² for E-normalized a and b.
double mac(const ComplexVector& a, const ComplexVector& b, const MassMatrix& mass);

struct Crossing {
  Index gap = 0;           // between samples gap and gap + 1
  double mu_from = 0.0;
  double mu_to = 0.0;
  std::vector<Index> chains;  // chains whose eigenvalue rank changed
};

struct PairingResult {
  ModeDatabase db;
  std::vector<Crossing> crossings;
  std::vector<std::string> warnings;
};

/// Chains modes across consecutive samples by greedy maximum MAC. Candidates
/// within 0.01 MAC of the best are a degeneration: a warning is recorded and
/// eigenvalue proximity decides.
PairingResult pair_modes(const ModeDatabase& db);

struct AlignResult {
  ModeDatabase db;
  std::vector<std::string> warnings;
};

/// Neighbour-chain sign alignment for real modes; first-sample modes get
/// their largest-magnitude component positive.
AlignResult align_signs(const ModeDatabase& db);

/// Rotates every mode at sample k ≥ 2 by e^{iθ}, θ = −arg(φ₁ᴴ·E·φ_k), the
/// exact minimizer of ‖F(φ_k·e^{iθ} − φ₁)‖₂. First-sample modes get their
/// largest-magnitude component real and positive.
AlignResult align_phases(const ModeDatabase& db);

/// align_signs for real databases, align_phases otherwise.
AlignResult align(const ModeDatabase& db);

/// The angle minimizing ‖F(φ·e^{iθ} − reference)‖₂.
double optimal_phase(const ComplexVector& reference, const ComplexVector& mode,
                     const MassMatrix& mass);

/// Eigenvector `mode` solved directly at μ, then matched to the database:
/// the candidate with the highest MAC against the nearest sample's mode is
/// taken and its sign/phase set to best align with that sample.
ComplexVector reference_mode(const systems::FullOrderSystem& sys, const ModeDatabase& db,
                             Index mode, double mu);

}  // namespace eigdef::modal
