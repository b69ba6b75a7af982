#include "eigdef/edm.hpp"

#include <algorithm>
#include <exception>
#include <sstream>

#include "eigdef/error.hpp"
#include "eigdef/kernels.hpp"
#include "eigdef/numerics.hpp"

namespace eigdef::edm {

DataMatrix build_data_matrix(const modal::ModeDatabase& db, Index mode, ModeSide side) {
  db.validate();
  if (!db.paired || !db.aligned) {
    throw Error(ErrorCode::kNotAligned,
                "database must be paired and aligned before modes are averaged");
  }
  const ComplexMatrix snaps = db.snapshots(mode, side == ModeSide::kLeft);
  DataMatrix out{ComplexVector(db.n()), ComplexMatrix(db.n(), db.p())};
  kernels::center_columns(snaps, out.mean, out.deviations);
  return out;
}

EdmBasis compute_edms(const DataMatrix& data, const MassMatrix& mass, const RankSpec& rank,
                      const std::vector<double>& sample_mus) {
  const Index n = data.deviations.rows();
  const Index p = data.deviations.cols();
  if (mass.size() != n || data.mean.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "mass matrix does not conform with the data matrix");
  }
  if (static_cast<Index>(sample_mus.size()) != p) {
    throw Error(ErrorCode::kDimensionMismatch, "one sample parameter per data column expected");
  }
  const Index full = std::min(n, p);

  const ComplexMatrix weighted = mass.weigh(data.deviations);
  auto svd = numerics::truncated_svd(weighted, full);
  const RealVector& sigma = svd.singular_values;

  Index r = 0;
  if (const auto* explicit_rank = std::get_if<ExplicitRank>(&rank)) {
    r = explicit_rank->r;
    if (r < 0 || r > full) {
      std::ostringstream os;
      os << "rank " << r << " outside [0, " << full << "]";
      throw Error(ErrorCode::kRankOutOfRange, os.str());
    }
  } else {
    const double threshold = std::get<EnergyThreshold>(rank).fraction;
    r = sigma.sum() > 0.0 ? select_rank(sigma, threshold) : 0;
  }

  EdmBasis basis;
  basis.mean_mode = data.mean;
  basis.singular_values = sigma;
  basis.sample_mus = sample_mus;
  basis.edms = mass.unweigh(svd.left.leftCols(r));
  basis.coefficients = sigma.head(r).cast<Complex>().asDiagonal() * svd.right.leftCols(r).adjoint();
  return basis;
}

EdmBasis compute_edm_basis(const modal::ModeDatabase& db, Index mode, const RankSpec& rank,
                           ModeSide side) {
  EdmBasis basis = compute_edms(build_data_matrix(db, mode, side), db.mass, rank, db.mus());
  basis.mode_index = mode;
  basis.side = side;
  return basis;
}

std::vector<EdmBasis> compute_all_edm_bases(const modal::ModeDatabase& db, const RankSpec& rank,
                                            ModeSide side) {
  std::vector<EdmBasis> out(static_cast<std::size_t>(db.m));
  std::vector<std::exception_ptr> failures(out.size());
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < db.m; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = compute_edm_basis(db, i, rank, side);
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

double energy_fraction(const RealVector& sigma, Index r) {
  if (r < 0 || r > sigma.size()) {
    std::ostringstream os;
    os << "rank " << r << " outside [0, " << sigma.size() << "]";
    throw Error(ErrorCode::kRankOutOfRange, os.str());
  }
  const double total = sigma.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::kUndefinedFraction, "all singular values are zero");
  if (r == sigma.size()) return 1.0;
  return sigma.head(r).sum() / total;
}

Index select_rank(const RealVector& sigma, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "energy threshold must lie in (0, 1]");
  }
  for (Index r = 0; r <= sigma.size(); ++r) {
    if (energy_fraction(sigma, r) >= threshold) return r;
  }
  return sigma.size();
}

ComplexVector interpolate_mode(const EdmBasis& basis, double mu, Scheme scheme) {
  const auto w = knot_weights(basis.sample_mus, mu, scheme);
  ComplexVector coeff = ComplexVector::Zero(basis.rank());
  for (Index k : w.support) coeff += w.weights[static_cast<std::size_t>(k)] * basis.coefficients.col(k);
  ComplexVector out(basis.n());
  kernels::affine_combine(basis.mean_mode, basis.edms, coeff, out);
  return out;
}

ComplexVector direct_interpolate(const modal::ModeDatabase& db, Index mode, double mu,
                                 Scheme scheme, ModeSide side) {
  if (mode < 0 || mode >= db.m) throw Error(ErrorCode::kInvalidArgument, "mode index out of range");
  const bool left = side == ModeSide::kLeft;
  if (left && !db.has_left()) throw Error(ErrorCode::kInvalidArgument, "database holds no left modes");
  const auto mus = db.mus();
  const auto w = knot_weights(mus, mu, scheme);

  std::vector<kernels::ConstColumn> sources;
  std::vector<double> weights;
  sources.reserve(w.support.size());
  for (Index k : w.support) {
    const auto& s = db.samples[static_cast<std::size_t>(k)];
    const ComplexMatrix& block = left ? *s.left : s.right;
    sources.emplace_back(block.col(mode).data(), db.n());
    weights.push_back(w.weights[static_cast<std::size_t>(k)]);
  }
  ComplexVector out(db.n());
  kernels::blend(sources, weights, out);
  return out;
}

double interpolation_error(const ComplexVector& truth, const ComplexVector& predicted,
                           const MassMatrix& mass) {
  if (truth.size() != predicted.size() || truth.size() != mass.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "interpolation_error: vectors do not conform");
  }
  const double denom = mass.norm(truth);
  if (!(denom > 0.0)) throw Error(ErrorCode::kInvalidArgument, "reference mode has zero norm");
  return mass.norm(truth - predicted) / denom;
}

EdmBasis truncate(const EdmBasis& basis, Index r) {
  if (r < 0 || r > basis.rank()) {
    std::ostringstream os;
    os << "cannot truncate a rank-" << basis.rank() << " basis to " << r;
    throw Error(ErrorCode::kRankOutOfRange, os.str());
  }
  EdmBasis out = basis;
  out.edms = basis.edms.leftCols(r);
  out.coefficients = basis.coefficients.topRows(r);
  return out;
}

std::vector<SweepRow> error_sweep(const modal::ModeDatabase& db, Index mode,
                                  const std::vector<double>& mus, const std::vector<Index>& ranks,
                                  Scheme scheme,
                                  const std::function<ComplexVector(double)>& truth) {
  const Index full = std::min(db.n(), db.p());
  Index widest = 0;
  for (Index r : ranks) {
    if (r < 0 || r > full) {
      std::ostringstream os;
      os << "rank " << r << " outside [0, " << full << "]";
      throw Error(ErrorCode::kRankOutOfRange, os.str());
    }
    widest = std::max(widest, r);
  }
  const EdmBasis basis = compute_edm_basis(db, mode, ExplicitRank{widest});
  std::vector<EdmBasis> truncated;
  for (Index r : ranks) truncated.push_back(truncate(basis, r));

  std::vector<SweepRow> rows;
  for (double mu : mus) {
    const ComplexVector reference = truth(mu);
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      const double e = interpolation_error(reference, interpolate_mode(truncated[i], mu, scheme), db.mass);
      rows.push_back({mu, ranks[i], "edm", e});
    }
    const double d = interpolation_error(reference, direct_interpolate(db, mode, mu, scheme), db.mass);
    rows.push_back({mu, -1, "direct", d});
  }
  return rows;
}

std::vector<SweepRow> average_by_rank(const std::vector<SweepRow>& rows) {
  std::vector<SweepRow> out;
  std::vector<int> counts;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SweepRow& o) {
      return o.strategy == row.strategy && o.r == row.r;
    });
    if (it == out.end()) {
      out.push_back({0.0, row.r, row.strategy, 0.0});
      counts.push_back(0);
      it = out.end() - 1;
    }
    it->error += row.error;
    ++counts[static_cast<std::size_t>(it - out.begin())];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].error /= counts[i];
  return out;
}

}  // namespace eigdef::edm
