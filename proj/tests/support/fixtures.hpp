#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "eigdef/modal.hpp"
#include "eigdef/systems.hpp"

namespace eigdef::testing {

inline std::vector<double> linspace(double lo, double hi, Index count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        i == count - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

// Sampled, paired and aligned heat-rod database.
inline modal::ModeDatabase heat_rod_database(const std::vector<double>& mus, Index m,
                                             const systems::HeatRodParams& params = {}) {
  auto db = modal::sample_spectrum(systems::heat_rod(params), mus, m);
  db = modal::pair_modes(db).db;
  return modal::align(db).db;
}

inline modal::ModeDatabase prepared(modal::ModeDatabase db) {
  db = modal::pair_modes(db).db;
  return modal::align(db).db;
}

// Smooth synthetic family with diagonal E: each mode is a few random sine
// shapes mixed by slowly varying weights, then E-normalized.
inline modal::ModeDatabase synthetic_database(Index n, Index p, Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  RealVector weights(n);
  for (Index i = 0; i < n; ++i) weights(i) = unit(rng);

  modal::ModeDatabase db;
  db.mass = MassMatrix::diagonal(weights);
  db.m = m;
  db.paired = true;
  db.aligned = true;
  std::vector<std::vector<double>> freq(static_cast<std::size_t>(m), std::vector<double>(3));
  for (auto& f : freq) {
    for (auto& v : f) v = 1.0 + 6.0 * std::abs(unit(rng) - 0.5);
  }
  const auto mus = linspace(0.0, 1.0, p);
  for (double mu : mus) {
    modal::ModeSample s;
    s.mu = mu;
    s.eigenvalues.resize(m);
    s.right.resize(n, m);
    for (Index j = 0; j < m; ++j) {
      s.eigenvalues(j) = Complex(-static_cast<double>(j + 1) * (1.0 + mu), 0.0);
      const auto& f = freq[static_cast<std::size_t>(j)];
      const double a = std::cos(mu), b = 0.3 * std::sin(2.0 * mu), c = 0.1 * mu * mu;
      for (Index i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n - 1);
        s.right(i, j) = a * std::sin(M_PI * f[0] * (j + 1) * x) + b * std::sin(M_PI * f[1] * x) +
                        c * std::cos(M_PI * f[2] * x);
      }
      s.right.col(j) /= db.mass.norm(s.right.col(j));
    }
    db.samples.push_back(std::move(s));
  }
  return db;
}

}  // namespace eigdef::testing
