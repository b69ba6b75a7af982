#include "eigdef/rom.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "eigdef/error.hpp"
#include "eigdef/kernels.hpp"
#include "eigdef/numerics.hpp"

namespace eigdef::rom {

Strategy parse_strategy(const std::string& name) {
  if (name == "solution" || name == "solution-interpolation") return Strategy::kSolutionInterpolation;
  if (name == "direct") return Strategy::kDirect;
  if (name == "edm") return Strategy::kEdm;
  throw Error(ErrorCode::kInvalidArgument, "unknown strategy '" + name + "'");
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kSolutionInterpolation: return "solution-interpolation";
    case Strategy::kDirect: return "direct";
    case Strategy::kEdm: return "edm";
  }
  return "unknown";
}

double biorthogonality_defect(const ComplexMatrix& basis, const ComplexMatrix& adjoint,
                              const MassMatrix& mass) {
  ComplexMatrix eb(basis.rows(), basis.cols());
  for (Index j = 0; j < basis.cols(); ++j) eb.col(j) = mass.apply(basis.col(j));
  const ComplexMatrix g = adjoint.adjoint() * eb;
  return (g - ComplexMatrix::Identity(g.rows(), g.cols())).norm();
}

namespace {

// Appends the conjugate partner of every tracked mode with Im λ > 0.
void expand_conjugates(Rom& rom) {
  std::vector<Index> complex_cols;
  for (Index j = 0; j < rom.eigenvalues.size(); ++j) {
    if (rom.eigenvalues(j).imag() > 0.0) complex_cols.push_back(j);
  }
  if (complex_cols.empty()) return;
  const Index m = rom.order();
  const Index extra = static_cast<Index>(complex_cols.size());
  rom.basis.conservativeResize(Eigen::NoChange, m + extra);
  rom.adjoint.conservativeResize(Eigen::NoChange, m + extra);
  rom.eigenvalues.conservativeResize(m + extra);
  for (Index c = 0; c < extra; ++c) {
    const Index j = complex_cols[static_cast<std::size_t>(c)];
    rom.basis.col(m + c) = rom.basis.col(j).conjugate();
    rom.adjoint.col(m + c) = rom.adjoint.col(j).conjugate();
    rom.eigenvalues(m + c) = std::conj(rom.eigenvalues(j));
  }
}

void check_equilibrium(const RealVector& x, Index n) {
  if (x.size() != n) throw Error(ErrorCode::kDimensionMismatch, "equilibrium length differs from n");
}

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw Error(ErrorCode::kInvalidArgument, "empty time grid");
  for (std::size_t t = 1; t < times.size(); ++t) {
    if (!(times[t] > times[t - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "time grid must be strictly increasing");
    }
  }
}

Index find_sample(const modal::ModeDatabase& db, double mu) {
  for (Index k = 0; k < db.p(); ++k) {
    const double s = db.samples[static_cast<std::size_t>(k)].mu;
    if (std::abs(s - mu) <= 1e-12 * std::max(1.0, std::abs(mu))) return k;
  }
  return -1;
}

void check_order(const modal::ModeDatabase& db, Index m) {
  if (m < 1 || m > db.m) {
    std::ostringstream os;
    os << "ROM order " << m << " outside [1, " << db.m << "]";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

}  // namespace

Rom build_rom_at_sample(const modal::ModeDatabase& db, double mu, Index m,
                        const RealVector& equilibrium) {
  db.validate();
  check_order(db, m);
  check_equilibrium(equilibrium, db.n());
  const Index k = find_sample(db, mu);
  if (k < 0) {
    std::ostringstream os;
    os << "mu = " << mu << " is not a sampled parameter";
    throw Error(ErrorCode::kNotSampled, os.str());
  }
  const auto& s = db.samples[static_cast<std::size_t>(k)];
  Rom rom;
  rom.mu = s.mu;
  rom.basis = s.right.leftCols(m);
  rom.adjoint_aliased = !s.left.has_value();
  rom.adjoint = s.left ? s.left->leftCols(m) : rom.basis;
  rom.eigenvalues = s.eigenvalues.head(m);
  rom.equilibrium = equilibrium;
  rom.mass = db.mass;
  if (db.conjugates_implied) expand_conjugates(rom);
  rom.biorthogonality_defect = biorthogonality_defect(rom.basis, rom.adjoint, rom.mass);
  return rom;
}

Rom build_rom_interpolated(const modal::ModeDatabase& db,
                           const std::vector<edm::EdmBasis>* right_bases,
                           const std::vector<edm::EdmBasis>* left_bases, double mu, Index m,
                           Strategy strategy, const RomSchemes& schemes,
                           const RealVector& equilibrium) {
  check_order(db, m);
  check_equilibrium(equilibrium, db.n());
  if (strategy == Strategy::kSolutionInterpolation) {
    throw Error(ErrorCode::kInvalidArgument,
                "solution interpolation does not build a single ROM; use solution_interpolation");
  }
  const bool need_left = db.has_left();
  if (strategy == Strategy::kEdm) {
    auto covers = [m](const std::vector<edm::EdmBasis>* b) {
      return b != nullptr && static_cast<Index>(b->size()) >= m;
    };
    if (!covers(right_bases) || (need_left && !covers(left_bases))) {
      throw Error(ErrorCode::kInvalidArgument, "EDM strategy needs an EDM basis for every ROM mode");
    }
  }

  Rom rom;
  rom.mu = mu;
  rom.basis.resize(db.n(), m);
  if (need_left) rom.adjoint.resize(db.n(), m);
  for (Index i = 0; i < m; ++i) {
    if (strategy == Strategy::kDirect) {
      rom.basis.col(i) = edm::direct_interpolate(db, i, mu, schemes.modes);
      if (need_left) {
        rom.adjoint.col(i) = edm::direct_interpolate(db, i, mu, schemes.modes, edm::ModeSide::kLeft);
      }
    } else {
      const auto& rb = (*right_bases)[static_cast<std::size_t>(i)];
      if (rb.mode_index != i) throw Error(ErrorCode::kInvalidArgument, "EDM bases out of mode order");
      rom.basis.col(i) = edm::interpolate_mode(rb, mu, schemes.modes);
      if (need_left) {
        rom.adjoint.col(i) = edm::interpolate_mode((*left_bases)[static_cast<std::size_t>(i)], mu,
                                                   schemes.modes);
      }
    }
  }
  rom.adjoint_aliased = !need_left;
  if (!need_left) rom.adjoint = rom.basis;

  const auto mus = db.mus();
  const auto w = knot_weights(mus, mu, schemes.eigenvalues);
  rom.eigenvalues = ComplexVector::Zero(m);
  for (Index k : w.support) {
    rom.eigenvalues += w.weights[static_cast<std::size_t>(k)] *
                       db.samples[static_cast<std::size_t>(k)].eigenvalues.head(m);
  }
  rom.equilibrium = equilibrium;
  rom.mass = db.mass;
  if (db.conjugates_implied) expand_conjugates(rom);
  rom.biorthogonality_defect = biorthogonality_defect(rom.basis, rom.adjoint, rom.mass);
  return rom;
}

Trajectory simulate_rom(const Rom& rom, const RealVector& x0, const std::vector<double>& times) {
  if (x0.size() != rom.n()) throw Error(ErrorCode::kDimensionMismatch, "initial state length differs from n");
  check_times(times);
  const ComplexVector dx = (x0 - rom.equilibrium).cast<Complex>();
  const ComplexVector reduced0 = rom.adjoint.adjoint() * rom.mass.apply(dx);

  const Index steps = static_cast<Index>(times.size());
  ComplexMatrix reduced(rom.order(), steps);
  for (Index t = 0; t < steps; ++t) {
    const double tt = times[static_cast<std::size_t>(t)];
    for (Index j = 0; j < rom.order(); ++j) {
      reduced(j, t) = std::exp(rom.eigenvalues(j) * tt) * reduced0(j);
    }
  }
  Trajectory out;
  out.times = times;
  out.reduced = true;
  out.states.resize(rom.n(), steps);
  out.imaginary_residue = kernels::synthesize(rom.basis, reduced, rom.equilibrium, out.states);
  return out;
}

Trajectory integrate_crank_nicolson(const RealMatrix& mass, const RealMatrix& op,
                                    const RealVector& equilibrium, const RealVector& x0,
                                    const std::vector<double>& times, int steps) {
  check_times(times);
  if (steps < 1) throw Error(ErrorCode::kInvalidArgument, "integrator needs at least one step");
  const Index n = mass.rows();
  const double horizon = times.back() - times.front();
  const double dt_target = horizon > 0.0 ? horizon / steps : 1.0;

  Trajectory out;
  out.times = times;
  out.states.resize(n, static_cast<Index>(times.size()));
  RealVector z = x0 - equilibrium;
  out.states.col(0) = equilibrium + z;

  double cached_dt = -1.0;
  Eigen::PartialPivLU<RealMatrix> lhs;
  RealMatrix rhs;
  for (std::size_t t = 1; t < times.size(); ++t) {
    const double interval = times[t] - times[t - 1];
    const auto sub = static_cast<int>(std::max(1.0, std::ceil(interval / dt_target - 1e-9)));
    const double dt = interval / sub;
    if (std::abs(dt - cached_dt) > 1e-12 * dt) {
      lhs.compute(mass - 0.5 * dt * op);
      rhs = mass + 0.5 * dt * op;
      cached_dt = dt;
    }
    for (int s = 0; s < sub; ++s) z = lhs.solve(rhs * z);
    out.states.col(static_cast<Index>(t)) = equilibrium + z;
  }
  return out;
}

Trajectory simulate_full(const systems::FullOrderSystem& sys, double mu, const RealVector& x0,
                         const std::vector<double>& times, const FullSimulationOptions& options) {
  if (x0.size() != sys.n()) throw Error(ErrorCode::kDimensionMismatch, "initial state length differs from n");
  check_times(times);
  const RealMatrix a = sys.operator_at(mu);
  const RealVector xbar = systems::equilibrium(sys, mu);

  std::vector<numerics::SpectralPair> pairs;
  try {
    pairs = numerics::generalized_eig(a, sys.mass(), true);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingular) throw;
    Trajectory fallback =
        integrate_crank_nicolson(sys.mass(), a, xbar, x0, times, options.integrator_steps);
    fallback.warnings.push_back(std::string("spectral solution unavailable (") + e.what() +
                                "); used Crank-Nicolson");
    return fallback;
  }

  const Index n = sys.n();
  ComplexMatrix phi(n, n), psi(n, n);
  ComplexVector lambda(n);
  for (Index i = 0; i < n; ++i) {
    const auto& pr = pairs[static_cast<std::size_t>(i)];
    phi.col(i) = pr.right;
    psi.col(i) = *pr.left;
    lambda(i) = pr.eigenvalue;
  }
  const ComplexVector dx = (x0 - xbar).cast<Complex>();
  const ComplexVector c0 = psi.adjoint() * (sys.mass() * dx);

  const Index steps = static_cast<Index>(times.size());
  ComplexMatrix coeff(n, steps);
  for (Index t = 0; t < steps; ++t) {
    for (Index i = 0; i < n; ++i) {
      coeff(i, t) = std::exp(lambda(i) * times[static_cast<std::size_t>(t)]) * c0(i);
    }
  }
  Trajectory out;
  out.times = times;
  out.states.resize(n, steps);
  out.imaginary_residue = kernels::synthesize(phi, coeff, xbar, out.states);

  if (options.cross_check) {
    const Trajectory cn =
        integrate_crank_nicolson(sys.mass(), a, xbar, x0, times, options.integrator_steps);
    double scale = 0.0, worst = 0.0;
    for (Index t = 0; t < steps; ++t) {
      scale = std::max(scale, out.states.col(t).norm());
      worst = std::max(worst, (out.states.col(t) - cn.states.col(t)).norm());
    }
    const double discrepancy = scale > 0.0 ? worst / scale : worst;
    out.cross_check_discrepancy = discrepancy;
    if (discrepancy > 1e-5) {
      std::ostringstream os;
      os << "spectral and Crank-Nicolson solutions differ by " << discrepancy << " relative";
      out.warnings.push_back(os.str());
    }
  }
  return out;
}

Trajectory solution_interpolation(const std::vector<Rom>& roms, double mu, const RealVector& x0,
                                  const std::vector<double>& times, Scheme scheme,
                                  const std::optional<RealVector>& linearization) {
  if (roms.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two sampled ROMs");
  const Index n = roms.front().n();
  std::vector<double> mus;
  for (const auto& r : roms) {
    if (r.n() != n) throw Error(ErrorCode::kDimensionMismatch, "sampled ROMs differ in n");
    mus.push_back(r.mu);
  }
  const auto w = knot_weights(mus, mu, scheme);

  Trajectory out;
  out.times = times;
  out.states = RealMatrix::Zero(n, static_cast<Index>(times.size()));
  for (const auto& r : roms) {
    Rom local = r;
    if (linearization) local.equilibrium = *linearization;
    // every sampled ROM is simulated; the weights only select what is kept
    const Trajectory traj = simulate_rom(local, x0, times);
    const auto k = static_cast<std::size_t>(&r - roms.data());
    if (w.weights[k] != 0.0) out.states += w.weights[k] * traj.states;
    out.imaginary_residue = std::max(out.imaginary_residue, traj.imaginary_residue);
  }
  return out;
}

TrajectoryError trajectory_error(const Trajectory& reference, const Trajectory& test,
                                 const MassMatrix& mass) {
  if (reference.times != test.times || reference.states.rows() != test.states.rows() ||
      reference.states.cols() != test.states.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "trajectories do not share a time grid and state size");
  }
  if (reference.states.rows() != mass.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "mass matrix does not conform with the states");
  }
  const Index steps = reference.states.cols();
  double scale = 0.0;
  RealVector diff(steps);
  for (Index t = 0; t < steps; ++t) {
    scale = std::max(scale, mass.norm(reference.states.col(t).cast<Complex>()));
    diff(t) = mass.norm((reference.states.col(t) - test.states.col(t)).cast<Complex>());
  }
  if (!(scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "reference trajectory is identically zero");

  TrajectoryError out;
  out.instantaneous = diff / scale;
  const auto& tm = reference.times;
  const double horizon = tm.back() - tm.front();
  if (steps == 1 || horizon <= 0.0) {
    out.integrated = out.instantaneous(0);
    return out;
  }
  double area = 0.0;
  for (Index t = 1; t < steps; ++t) {
    area += 0.5 * (out.instantaneous(t) + out.instantaneous(t - 1)) *
            (tm[static_cast<std::size_t>(t)] - tm[static_cast<std::size_t>(t - 1)]);
  }
  out.integrated = area / horizon;
  return out;
}

double characteristic_horizon(const modal::ModeDatabase& db, double multiple) {
  const auto& first = db.samples.front();
  double slowest = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < first.eigenvalues.size(); ++i) {
    slowest = std::max(slowest, first.eigenvalues(i).real());
  }
  if (!(slowest < 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "slowest eigenvalue is not decaying; characteristic time undefined");
  }
  return multiple / std::abs(slowest);
}

std::vector<double> uniform_times(double horizon, Index count) {
  if (count < 2 || !(horizon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "need horizon > 0 and >= 2 times");
  std::vector<double> t(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) t[static_cast<std::size_t>(i)] = horizon * static_cast<double>(i) / static_cast<double>(count - 1);
  return t;
}

std::vector<BenchmarkRow> benchmark_strategies(const systems::FullOrderSystem& sys,
                                               const modal::ModeDatabase& db,
                                               const std::vector<edm::EdmBasis>& edm_bases,
                                               const std::vector<double>& validation_mus,
                                               const BenchmarkConfig& config) {
  using clock = std::chrono::steady_clock;
  const int reps = std::max(1, config.repetitions);
  const auto mus = db.mus();
  for (double mu : validation_mus) {
    if (!(mu >= mus.front() && mu <= mus.back())) {
      std::ostringstream os;
      os << "validation parameter " << mu << " outside the sampled interval";
      throw Error(ErrorCode::kOutOfDomain, os.str());
    }
  }

  std::vector<edm::EdmBasis> left_bases;
  if (db.has_left()) {
    Index r = edm_bases.empty() ? 0 : edm_bases.front().rank();
    left_bases = edm::compute_all_edm_bases(db, edm::ExplicitRank{r}, edm::ModeSide::kLeft);
  }

  std::vector<BenchmarkRow> rows;
  for (double mu : validation_mus) {
    const RealVector xbar = systems::equilibrium(sys, mu);
    const Trajectory reference = simulate_full(sys, mu, config.x0, config.times);
    if (config.time_full_order) {
      // timed without the integrator cross-check
      const auto t_ref0 = clock::now();
      simulate_full(sys, mu, config.x0, config.times, {false, 0});
      const double t_ref = std::chrono::duration<double>(clock::now() - t_ref0).count();
      rows.push_back({mu, "full", 0.0, t_ref, 0.0});
    }

    for (Strategy s : config.strategies) {
      Trajectory traj;
      double defect = 0.0;
      const auto start = clock::now();
      for (int rep = 0; rep < reps; ++rep) {
        if (s == Strategy::kSolutionInterpolation) {
          std::vector<Rom> roms;
          roms.reserve(mus.size());
          for (double mk : mus) {
            roms.push_back(build_rom_at_sample(db, mk, config.m, xbar));
          }
          traj = solution_interpolation(roms, mu, config.x0, config.times, config.schemes.modes, xbar);
        } else {
          const Rom r = build_rom_interpolated(db, &edm_bases, left_bases.empty() ? nullptr : &left_bases,
                                               mu, config.m, s, config.schemes, xbar);
          defect = r.biorthogonality_defect;
          traj = simulate_rom(r, config.x0, config.times);
        }
      }
      const double seconds = std::chrono::duration<double>(clock::now() - start).count() / reps;
      rows.push_back({mu, to_string(s), trajectory_error(reference, traj, db.mass).integrated,
                      seconds, defect});
    }
  }
  return rows;
}

}  // namespace eigdef::rom
