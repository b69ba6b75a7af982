#include "eigdef/systems.hpp"

#include <cmath>
#include <sstream>

#include "eigdef/error.hpp"
#include "eigdef/numerics.hpp"

namespace eigdef::systems {

namespace {

std::string domain_message(double mu, const ParameterDomain& d) {
  std::ostringstream os;
  os << "parameter " << mu << " outside [" << d.lower << ", " << d.upper << "]";
  return os.str();
}

}  // namespace

FullOrderSystem::FullOrderSystem(RealMatrix mass, OperatorFn op, SourceFn source,
                                 ParameterDomain domain, SystemMetadata metadata)
    : mass_(std::move(mass)),
      op_(std::move(op)),
      source_(std::move(source)),
      domain_(domain),
      metadata_(std::move(metadata)) {
  if (mass_.rows() < 1 || mass_.rows() != mass_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "mass matrix must be square and non-empty");
  }
  if (!(domain_.lower <= domain_.upper)) {
    throw Error(ErrorCode::kInvalidArgument, "empty parameter domain");
  }
}

void FullOrderSystem::check_domain(double mu) const {
  if (!domain_.contains(mu)) throw Error(ErrorCode::kOutOfDomain, domain_message(mu, domain_));
}

RealMatrix FullOrderSystem::operator_at(double mu) const {
  check_domain(mu);
  RealMatrix a = op_(mu);
  if (a.rows() != n() || a.cols() != n()) {
    throw Error(ErrorCode::kDimensionMismatch, "operator size differs from mass matrix");
  }
  return a;
}

RealVector FullOrderSystem::source_at(double mu) const {
  check_domain(mu);
  if (!source_) return RealVector::Zero(n());
  RealVector b = source_(mu);
  if (b.size() != n() || !b.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "source must be a finite n-vector");
  }
  return b;
}

SecondOrderSystem::SecondOrderSystem(RealMatrix mass, StiffnessFn stiffness,
                                     ParameterDomain domain, SystemMetadata metadata)
    : mass_(std::move(mass)),
      stiffness_(std::move(stiffness)),
      domain_(domain),
      metadata_(std::move(metadata)) {
  if (mass_.rows() < 1 || mass_.rows() != mass_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "mass matrix must be square and non-empty");
  }
}

RealMatrix SecondOrderSystem::stiffness_at(double mu) const {
  if (!domain_.contains(mu)) throw Error(ErrorCode::kOutOfDomain, domain_message(mu, domain_));
  return stiffness_(mu);
}

FullOrderSystem heat_rod(const HeatRodParams& p) {
  if (p.n < 3) throw Error(ErrorCode::kInvalidArgument, "heat rod needs n >= 3 nodes");
  if (!(p.length > 0.0) || !(p.conductivity > 0.0) || !(p.heat_capacity > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "length, conductivity and heat capacity must be positive");
  }
  if (!(p.h_left >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "h_left must be non-negative");
  if (!(p.domain.lower >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "film coefficient domain must be non-negative");
  }

  const Index n = p.n;
  const double dx = p.length / static_cast<double>(n - 1);
  const double g = p.conductivity / dx;

  RealMatrix mass = RealMatrix::Zero(n, n);
  mass.diagonal().setConstant(p.heat_capacity * dx);
  mass(0, 0) = mass(n - 1, n - 1) = 0.5 * p.heat_capacity * dx;

  RealMatrix base = RealMatrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) {
    base(i, i) -= g;
    base(i + 1, i + 1) -= g;
    base(i, i + 1) += g;
    base(i + 1, i) += g;
  }
  base(0, 0) -= p.h_left;

  auto op = [base, n](double mu) {
    RealMatrix a = base;
    a(n - 1, n - 1) -= mu;
    return a;
  };
  auto source = [p, n, dx](double mu) {
    RealVector b = RealVector::Constant(n, p.generation * dx);
    b(0) = p.h_left * p.t_ambient + 0.5 * p.generation * dx;
    b(n - 1) = mu * p.t_ambient + 0.5 * p.generation * dx;
    return b;
  };

  SystemMetadata meta;
  meta.name = "heat-rod";
  meta.parameter_label = "right-end film coefficient";
  meta.coordinates = RealVector::LinSpaced(n, 0.0, p.length);
  meta.generator = {{"kind", "heat-rod"}, {"params", to_json(p)}};
  return FullOrderSystem(std::move(mass), op, source, p.domain, std::move(meta));
}

Index defect_spring_index(const SpringChainParams& p, double mu) {
  const double h = p.length / static_cast<double>(p.n_mass);
  auto j = static_cast<Index>(std::ceil(mu / h)) - 1;
  if (j < 0) j = 0;
  if (j > p.n_mass - 1) j = p.n_mass - 1;
  return j;
}

SecondOrderSystem spring_chain_with_defect(const SpringChainParams& p) {
  if (p.n_mass < 2) throw Error(ErrorCode::kInvalidArgument, "spring chain needs at least 2 masses");
  if (!(p.mass > 0.0) || !(p.length > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mass and length must be positive");
  }
  if (!(p.k_defect > 0.0) || !(p.k_defect <= p.k_nominal)) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 < k_defect <= k_nominal");
  }
  const Index n = p.n_mass;
  RealMatrix mass = RealMatrix::Identity(n, n) * p.mass;

  auto stiffness = [p, n](double mu) {
    const Index defect = defect_spring_index(p, mu);
    RealMatrix k = RealMatrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
      const double kj = (j == defect) ? p.k_defect : p.k_nominal;
      // spring j joins node j−1 (anchor when j = 0) and node j
      k(j, j) -= kj;
      if (j > 0) {
        k(j - 1, j - 1) -= kj;
        k(j - 1, j) += kj;
        k(j, j - 1) += kj;
      }
    }
    return k;
  };

  SystemMetadata meta;
  meta.name = "spring-chain";
  meta.parameter_label = "defect location";
  const double h = p.length / static_cast<double>(n);
  meta.coordinates = RealVector::LinSpaced(n, h, p.length);
  meta.generator = {{"kind", "spring-chain"}, {"params", to_json(p)}};
  return SecondOrderSystem(std::move(mass), stiffness, ParameterDomain{0.0, p.length},
                           std::move(meta));
}

FullOrderSystem displacement_form(const SecondOrderSystem& sys) {
  auto op = [sys](double mu) { return sys.stiffness_at(mu); };
  SystemMetadata meta = sys.metadata();
  return FullOrderSystem(sys.mass(), op, nullptr, sys.domain(), std::move(meta));
}

FullOrderSystem first_order_form(const SecondOrderSystem& sys) {
  const Index n = sys.n();
  RealMatrix mass = RealMatrix::Zero(2 * n, 2 * n);
  mass.topLeftCorner(n, n).setIdentity();
  mass.bottomRightCorner(n, n) = sys.mass();

  auto op = [sys, n](double mu) {
    RealMatrix a = RealMatrix::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n).setIdentity();
    a.bottomLeftCorner(n, n) = sys.stiffness_at(mu);
    return a;
  };

  SystemMetadata meta = sys.metadata();
  meta.name += "-first-order";
  RealVector coords(2 * n);
  if (sys.metadata().coordinates.size() == n) {
    coords << sys.metadata().coordinates, sys.metadata().coordinates;
  } else {
    coords = RealVector::LinSpaced(2 * n, 0.0, static_cast<double>(2 * n - 1));
  }
  meta.coordinates = coords;
  if (meta.generator.is_object() && meta.generator.contains("kind")) {
    meta.generator["kind"] = meta.generator["kind"].get<std::string>() + "-first-order";
  }
  return FullOrderSystem(std::move(mass), op, nullptr, sys.domain(), std::move(meta));
}

RealVector equilibrium(const FullOrderSystem& sys, double mu) {
  const RealMatrix a = sys.operator_at(mu);
  const RealVector b = sys.source_at(mu);
  if (b.isZero(0.0)) return RealVector::Zero(sys.n());
  try {
    return numerics::solve_linear(a, -b);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingular) throw;
    std::ostringstream os;
    os << "equilibrium undefined at mu = " << mu << ": " << e.what();
    throw Error(ErrorCode::kEquilibriumUndefined, os.str());
  }
}

RealVector traveling_bump(Index n, double width, double mu) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "bump grid needs at least 2 points");
  if (!(width > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bump width must be positive");
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw Error(ErrorCode::kOutOfDomain, domain_message(mu, ParameterDomain{0.0, 1.0}));
  }
  RealVector v(n);
  const double last = static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) {
    // measure from both ends so the grid is exactly mirror-symmetric
    const double s = (2 * i < n) ? static_cast<double>(i) / last - mu
                                 : (1.0 - mu) - static_cast<double>(n - 1 - i) / last;
    const double z = s / width;
    v(i) = std::exp(-0.5 * z * z);
  }
  return v / v.norm();
}

nlohmann::json to_json(const HeatRodParams& p) {
  return {{"n", p.n},
          {"length", p.length},
          {"conductivity", p.conductivity},
          {"heat_capacity", p.heat_capacity},
          {"h_left", p.h_left},
          {"t_ambient", p.t_ambient},
          {"generation", p.generation},
          {"domain", {p.domain.lower, p.domain.upper}}};
}

nlohmann::json to_json(const SpringChainParams& p) {
  return {{"n_mass", p.n_mass},     {"mass", p.mass},
          {"length", p.length},     {"k_nominal", p.k_nominal},
          {"k_defect", p.k_defect}};
}

HeatRodParams heat_rod_params_from_json(const nlohmann::json& j) {
  HeatRodParams p;
  p.n = j.value("n", p.n);
  p.length = j.value("length", p.length);
  p.conductivity = j.value("conductivity", p.conductivity);
  p.heat_capacity = j.value("heat_capacity", p.heat_capacity);
  p.h_left = j.value("h_left", p.h_left);
  p.t_ambient = j.value("t_ambient", p.t_ambient);
  p.generation = j.value("generation", p.generation);
  if (j.contains("domain")) p.domain = {j["domain"].at(0).get<double>(), j["domain"].at(1).get<double>()};
  return p;
}

SpringChainParams spring_chain_params_from_json(const nlohmann::json& j) {
  SpringChainParams p;
  p.n_mass = j.value("n_mass", p.n_mass);
  p.mass = j.value("mass", p.mass);
  p.length = j.value("length", p.length);
  p.k_nominal = j.value("k_nominal", p.k_nominal);
  p.k_defect = j.value("k_defect", p.k_defect);
  return p;
}

FullOrderSystem make_system(const nlohmann::json& generator) {
  const std::string kind = generator.value("kind", "");
  const nlohmann::json params = generator.value("params", nlohmann::json::object());
  if (kind == "heat-rod") return heat_rod(heat_rod_params_from_json(params));
  if (kind == "spring-chain") {
    return displacement_form(spring_chain_with_defect(spring_chain_params_from_json(params)));
  }
  if (kind == "spring-chain-first-order") {
    return first_order_form(spring_chain_with_defect(spring_chain_params_from_json(params)));
  }
  throw Error(ErrorCode::kInvalidArgument, "no system generator named '" + kind + "'");
}

}  // namespace eigdef::systems
