#pragma once

#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "eigdef/types.hpp"

namespace eigdef::systems {

struct ParameterDomain {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double mu) const { return mu >= lower && mu <= upper; }
};

struct SystemMetadata {
  std::string name;
  std::string parameter_label;
  RealVector coordinates;      // one entry per state, for plotting
  nlohmann::json generator;    // {"kind": ..., "params": {...}}, enough to rebuild
};

/// E·ẋ = A(μ)·x + b(μ) with SPD E.
class FullOrderSystem {
 public:
  using OperatorFn = std::function<RealMatrix(double)>;
  using SourceFn = std::function<RealVector(double)>;

  FullOrderSystem(RealMatrix mass, OperatorFn op, SourceFn source, ParameterDomain domain,
                  SystemMetadata metadata);

  Index n() const { return mass_.rows(); }
  const RealMatrix& mass() const { return mass_; }
  const ParameterDomain& domain() const { return domain_; }
  const SystemMetadata& metadata() const { return metadata_; }

  /// Throws kOutOfDomain for μ outside the parameter domain.
  RealMatrix operator_at(double mu) const;
  RealVector source_at(double mu) const;

 private:
  void check_domain(double mu) const;

  RealMatrix mass_;
  OperatorFn op_;
  SourceFn source_;
  ParameterDomain domain_;
  SystemMetadata metadata_;
};

/// M·ÿ = K(μ)·y, with K negative semidefinite in this sign convention.
class SecondOrderSystem {
 public:
  using StiffnessFn = std::function<RealMatrix(double)>;

  SecondOrderSystem(RealMatrix mass, StiffnessFn stiffness, ParameterDomain domain,
                    SystemMetadata metadata);

  Index n() const { return mass_.rows(); }
  const RealMatrix& mass() const { return mass_; }
  const ParameterDomain& domain() const { return domain_; }
  const SystemMetadata& metadata() const { return metadata_; }
  RealMatrix stiffness_at(double mu) const;

 private:
  RealMatrix mass_;
  StiffnessFn stiffness_;
  ParameterDomain domain_;
  SystemMetadata metadata_;
};

struct HeatRodParams {
  Index n = 50;
  double length = 1.0;
  double conductivity = 1.0;
  double heat_capacity = 1.0;  // ρc
  double h_left = 1.0;
  double t_ambient = 293.0;
  double generation = 100.0;   // volumetric heat source q
  ParameterDomain domain{0.0, 1000.0};
};

/// 1-D conduction with Robin ends, half-cell finite volumes on n nodes; the
/// parameter is the right-end film coefficient.
FullOrderSystem heat_rod(const HeatRodParams& params);

struct SpringChainParams {
  Index n_mass = 40;
  double mass = 1.0;
  double length = 1.0;
  double k_nominal = 1.0;
  double k_defect = 0.05;
};

/// Chain of n_mass masses anchored at x = 0. Spring j (0-based) connects
/// mass j−1 (or the anchor) to mass j and has its midpoint at (j + ½)·h,
/// h = length / n_mass. The spring whose midpoint is nearest μ is softened
/// to k_defect; equidistant ties go to the spring closer to the anchor.
SecondOrderSystem spring_chain_with_defect(const SpringChainParams& params);

/// Index of the defective spring for a defect at μ.
Index defect_spring_index(const SpringChainParams& params, double mu);

/// The displacement pencil (K(μ), M) as a first-order-shaped system, used
/// for modal analysis of mode shapes: eigenvalues are −ω².
FullOrderSystem displacement_form(const SecondOrderSystem& sys);

/// E = [[I, 0], [0, M]], A(μ) = [[0, I], [K(μ), 0]], zero source.
FullOrderSystem first_order_form(const SecondOrderSystem& sys);

/// Solves A(μ)·x̄ = −b(μ). Throws kEquilibriumUndefined for singular A(μ).
RealVector equilibrium(const FullOrderSystem& sys, double mu);

/// Unit-norm Gaussian bump on n grid points centered at μ·(n−1); the width
/// is measured in the same [0, 1] units as μ.
RealVector traveling_bump(Index n, double width, double mu);

/// Rebuilds a system from SystemMetadata::generator.
FullOrderSystem make_system(const nlohmann::json& generator);

nlohmann::json to_json(const HeatRodParams& p);
nlohmann::json to_json(const SpringChainParams& p);
HeatRodParams heat_rod_params_from_json(const nlohmann::json& j);
SpringChainParams spring_chain_params_from_json(const nlohmann::json& j);

}  // namespace eigdef::systems
