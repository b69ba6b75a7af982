#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eigdef/edm.hpp"
#include "eigdef/interpolation.hpp"
#include "eigdef/mass_matrix.hpp"
#include "eigdef/modal.hpp"
#include "eigdef/systems.hpp"

namespace eigdef::rom {

/// Modal-truncation ROM at one parameter: ẋ̂ = Λ·x̂ with x ≈ x̄ + Φ·x̂.
struct Rom {
  double mu = 0.0;
  ComplexMatrix basis;        // Φ_m, n × m (conjugate partners appended when implied)
  ComplexMatrix adjoint;      // Ψ_m
  ComplexVector eigenvalues;  // diagonal of Λ_m
  RealVector equilibrium;     // linearization point x̄
  MassMatrix mass;
  bool adjoint_aliased = false;
  double biorthogonality_defect = 0.0;  // ‖ΨᴴEΦ − I‖_F

  Index n() const { return basis.rows(); }
  Index order() const { return basis.cols(); }
};

struct Trajectory {
  std::vector<double> times;
  RealMatrix states;  // one column per time
  bool reduced = false;
  double imaginary_residue = 0.0;
  std::optional<double> cross_check_discrepancy;
  std::vector<std::string> warnings;
};

enum class Strategy { kSolutionInterpolation, kDirect, kEdm };

Strategy parse_strategy(const std::string& name);
const char* to_string(Strategy s);

struct RomSchemes {
  Scheme modes = Scheme::kLinear;
  Scheme eigenvalues = Scheme::kCubicSpline;
};

/// ‖ΨᴴEΦ − I‖_F
double biorthogonality_defect(const ComplexMatrix& basis, const ComplexMatrix& adjoint,
                              const MassMatrix& mass);

/// Copies the first m tracked modes at the sampled μ_k. Throws kNotSampled
/// when μ_k is not one of the database parameters.
Rom build_rom_at_sample(const modal::ModeDatabase& db, double mu, Index m,
                        const RealVector& equilibrium);

/// ROM at an arbitrary μ inside the sampled interval. Modes come from direct
/// interpolation or from the EDM bases (one per mode, plus left bases for
/// non-self-adjoint databases); eigenvalues are interpolated per chain. The
/// interpolated bases are not re-bi-orthogonalized; the defect is recorded.
Rom build_rom_interpolated(const modal::ModeDatabase& db, const std::vector<edm::EdmBasis>* right_bases,
                           const std::vector<edm::EdmBasis>* left_bases, double mu, Index m,
                           Strategy strategy, const RomSchemes& schemes,
                           const RealVector& equilibrium);

/// x(t) = x̄ + Φ·exp(Λt)·x̂₀ with x̂₀ = ΨᴴE(x0 − x̄), evaluated exactly.
Trajectory simulate_rom(const Rom& rom, const RealVector& x0, const std::vector<double>& times);

struct FullSimulationOptions {
  bool cross_check = true;
  int integrator_steps = 10000;  // Crank–Nicolson steps over the horizon
};

/// Exact spectral solution of the full-order system about its equilibrium,
/// cross-checked against Crank–Nicolson. Falls back to the integrator with a
/// warning when the eigenbasis is defective.
Trajectory simulate_full(const systems::FullOrderSystem& sys, double mu, const RealVector& x0,
                         const std::vector<double>& times, const FullSimulationOptions& options = {});

/// Crank–Nicolson solution of E·ż = A·z about x̄, with `steps` uniform steps
/// across the horizon.
Trajectory integrate_crank_nicolson(const RealMatrix& mass, const RealMatrix& op,
                                    const RealVector& equilibrium, const RealVector& x0,
                                    const std::vector<double>& times, int steps);

/// Simulates every sampled ROM and interpolates their states at μ. When
/// `linearization` is given it replaces each ROM's own equilibrium.
Trajectory solution_interpolation(const std::vector<Rom>& roms, double mu, const RealVector& x0,
                                  const std::vector<double>& times, Scheme scheme,
                                  const std::optional<RealVector>& linearization = std::nullopt);

struct TrajectoryError {
  RealVector instantaneous;
  double integrated = 0.0;
};

/// Instantaneous ‖F(x_ref − x)‖ / max_t ‖F·x_ref‖ and its trapezoidal time
/// average over the horizon.
TrajectoryError trajectory_error(const Trajectory& reference, const Trajectory& test,
                                 const MassMatrix& mass);

/// 5 / |Re λ_slowest| at the first sample.
double characteristic_horizon(const modal::ModeDatabase& db, double multiple = 5.0);

std::vector<double> uniform_times(double horizon, Index count = 1000);

struct BenchmarkConfig {
  Index m = 6;
  RealVector x0;
  std::vector<double> times;
  int repetitions = 100;
  RomSchemes schemes;
  std::vector<Strategy> strategies{Strategy::kSolutionInterpolation, Strategy::kDirect,
                                   Strategy::kEdm};
  bool time_full_order = true;
};

struct BenchmarkRow {
  double mu = 0.0;
  std::string strategy;  // "full", "solution-interpolation", "direct", "edm"
  double error = 0.0;    // time-integrated
  double seconds = 0.0;  // mean build + simulate wall time
  double defect = 0.0;   // bi-orthogonality defect of the ROM used
};

/// Error and wall time of every strategy at every validation μ. Timing runs
/// are serial.
std::vector<BenchmarkRow> benchmark_strategies(const systems::FullOrderSystem& sys,
                                               const modal::ModeDatabase& db,
                                               const std::vector<edm::EdmBasis>& edm_bases,
                                               const std::vector<double>& validation_mus,
                                               const BenchmarkConfig& config);

}  // namespace eigdef::rom
