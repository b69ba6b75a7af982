#include "eigdef/modal.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>

#include "eigdef/error.hpp"
#include "eigdef/numerics.hpp"

namespace eigdef::modal {

std::vector<double> ModeDatabase::mus() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.mu);
  return out;
}

ComplexMatrix ModeDatabase::snapshots(Index mode, bool left) const {
  if (mode < 0 || mode >= m) {
    std::ostringstream os;
    os << "mode index " << mode + 1 << " outside 1.." << m;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  if (left && !has_left()) throw Error(ErrorCode::kInvalidArgument, "database holds no left modes");
  ComplexMatrix out(n(), p());
  for (Index k = 0; k < p(); ++k) {
    const auto& s = samples[static_cast<std::size_t>(k)];
    out.col(k) = left ? s.left->col(mode) : s.right.col(mode);
  }
  return out;
}

void ModeDatabase::validate() const {
  if (p() < 2) throw Error(ErrorCode::kShapeMismatch, "database needs at least two samples");
  if (m < 1) throw Error(ErrorCode::kShapeMismatch, "database needs at least one mode");
  const bool left = samples.front().left.has_value();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    if (k > 0 && !(s.mu > samples[k - 1].mu)) {
      throw Error(ErrorCode::kInvalidArgument, "sample parameters must be strictly increasing");
    }
    if (s.eigenvalues.size() != m || s.right.rows() != n() || s.right.cols() != m ||
        s.left.has_value() != left ||
        (left && (s.left->rows() != n() || s.left->cols() != m))) {
      std::ostringstream os;
      os << "sample " << k << " (mu = " << s.mu << ") does not match n = " << n() << ", m = " << m;
      throw Error(ErrorCode::kShapeMismatch, os.str());
    }
  }
  if (coordinates.size() != 0 && coordinates.size() != n()) {
    throw Error(ErrorCode::kShapeMismatch, "coordinate vector length differs from n");
  }
}

ModeDatabase sample_spectrum(const systems::FullOrderSystem& sys, const std::vector<double>& mus,
                             Index m, const SampleOptions& options) {
  const Index n = sys.n();
  const Index p = static_cast<Index>(mus.size());
  if (p < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two parameter samples");
  for (Index k = 1; k < p; ++k) {
    if (!(mus[k] > mus[k - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "parameter samples must be strictly increasing");
    }
  }
  if (m < 1 || m > n) {
    std::ostringstream os;
    os << "mode count " << m << " outside [1, " << n << "]";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }

  ModeDatabase db;
  db.mass = MassMatrix(sys.mass());
  db.m = m;
  db.generator = sys.metadata().generator;
  db.coordinates = sys.metadata().coordinates;
  db.samples.resize(static_cast<std::size_t>(p));

  const RealMatrix factor = db.mass.dense_factor();
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(p));

#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (Index k = 0; k < p; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    try {
      const RealMatrix a = sys.operator_at(mus[ks]);
      const bool symmetric = numerics::is_symmetric(a, 1e-12);
      auto pairs = numerics::generalized_eig(a, sys.mass(), factor, !symmetric);

      double scale = 0.0;
      for (const auto& pr : pairs) scale = std::max(scale, std::abs(pr.eigenvalue));
      const double imag_tol = 1e-12 * scale;

      ModeSample s;
      s.mu = mus[ks];
      s.eigenvalues.resize(m);
      s.right.resize(n, m);
      if (!symmetric) s.left = ComplexMatrix(n, m);
      Index kept = 0;
      for (const auto& pr : pairs) {
        if (kept == m) break;
        if (pr.eigenvalue.imag() < -imag_tol) continue;  // conjugate partner of a kept mode
        Complex lambda = pr.eigenvalue;
        if (std::abs(lambda.imag()) <= imag_tol) lambda.imag(0.0);
        s.eigenvalues(kept) = lambda;
        s.right.col(kept) = pr.right;
        if (s.left) s.left->col(kept) = *pr.left;
        ++kept;
      }
      if (kept < m) {
        std::ostringstream os;
        os << "only " << kept << " trackable eigenpairs, " << m << " requested";
        throw Error(ErrorCode::kInvalidArgument, os.str());
      }
      db.samples[ks] = std::move(s);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "spectrum at mu = " << mus[ks] << ": " << e.what();
      failures[ks] = std::make_exception_ptr(Error(e.code(), os.str()));
    } catch (...) {
      failures[ks] = std::current_exception();
    }
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  bool complex = false;
  for (const auto& s : db.samples) {
    for (Index i = 0; i < m; ++i) complex = complex || s.eigenvalues(i).imag() != 0.0;
  }
  if (!complex) {
    // Real spectrum: eigenvectors are real up to round-off from the inversion.
    for (auto& s : db.samples) {
      s.right = s.right.real().cast<Complex>();
      if (s.left) *s.left = s.left->real().cast<Complex>();
    }
  }
  db.is_complex = complex;
  db.conjugates_implied = complex;
  return db;
}

ModeDatabase traveling_bump_database(Index n, double width, const std::vector<double>& mus) {
  ModeDatabase db;
  db.mass = MassMatrix::identity(n);
  db.m = 1;
  for (double mu : mus) {
    ModeSample s;
    s.mu = mu;
    s.eigenvalues = ComplexVector::Constant(1, Complex(-1.0, 0.0));
    s.right = systems::traveling_bump(n, width, mu).cast<Complex>();
    db.samples.push_back(std::move(s));
  }
  db.paired = true;
  db.aligned = true;
  db.coordinates = RealVector::LinSpaced(n, 0.0, 1.0);
  db.generator = {{"kind", "traveling-bump"}, {"params", {{"n", n}, {"width", width}}}};
  db.validate();
  return db;
}

double mac(const ComplexVector& a, const ComplexVector& b, const MassMatrix& mass) {
  return std::norm(mass.inner(a, b));
}

namespace {

void permute_sample(ModeSample& s, const std::vector<Index>& source_of) {
  const Index m = static_cast<Index>(source_of.size());
  ModeSample out;
  out.mu = s.mu;
  out.eigenvalues.resize(m);
  out.right.resize(s.right.rows(), m);
  if (s.left) out.left = ComplexMatrix(s.left->rows(), m);
  for (Index i = 0; i < m; ++i) {
    const Index j = source_of[static_cast<std::size_t>(i)];
    out.eigenvalues(i) = s.eigenvalues(j);
    out.right.col(i) = s.right.col(j);
    if (s.left) out.left->col(i) = s.left->col(j);
  }
  s = std::move(out);
}

std::vector<Index> eigen_ranks(const ComplexVector& values) {
  std::vector<Complex> v(values.data(), values.data() + values.size());
  const auto order = numerics::spectral_permutation(v);
  std::vector<Index> rank(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[static_cast<std::size_t>(order[pos])] = static_cast<Index>(pos);
  return rank;
}

// Index of the largest-magnitude entry; near-ties resolve to the lowest index
// so that unit-modulus rescaling cannot move the choice.
Index dominant_component(const ComplexVector& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak * (1.0 - 1e-12)) return i;
  }
  return 0;
}

void scale_mode(ModeSample& s, Index i, Complex factor) {
  s.right.col(i) *= factor;
  if (s.left) s.left->col(i) *= factor;
}

}  // namespace

PairingResult pair_modes(const ModeDatabase& input) {
  input.validate();
  PairingResult result{input, {}, {}};
  ModeDatabase& db = result.db;
  const Index m = db.m;

  for (auto& s : db.samples) {
    std::vector<Complex> v(s.eigenvalues.data(), s.eigenvalues.data() + m);
    permute_sample(s, numerics::spectral_permutation(v));
  }

  for (Index k = 0; k + 1 < db.p(); ++k) {
    const auto& cur = db.samples[static_cast<std::size_t>(k)];
    auto& next = db.samples[static_cast<std::size_t>(k + 1)];

    RealMatrix score(m, m);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) score(i, j) = mac(cur.right.col(i), next.right.col(j), db.mass);
    }

    std::vector<bool> row_used(m, false), col_used(m, false);
    std::vector<Index> source_of(m, -1);
    for (Index step = 0; step < m; ++step) {
      double best = -1.0;
      Index bi = -1, bj = -1;
      for (Index i = 0; i < m; ++i) {
        if (row_used[i]) continue;
        for (Index j = 0; j < m; ++j) {
          if (!col_used[j] && score(i, j) > best) {
            best = score(i, j);
            bi = i;
            bj = j;
          }
        }
      }
      // Competing candidates share the winner's row or column.
      std::vector<std::pair<Index, Index>> rivals;
      for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) {
          if (row_used[i] || col_used[j] || (i != bi && j != bj)) continue;
          if (score(i, j) >= best - 0.01) rivals.emplace_back(i, j);
        }
      }
      if (rivals.size() > 1) {
        std::ostringstream os;
        os << "degenerate pairing between mu = " << cur.mu << " and mu = " << next.mu << ": "
           << rivals.size() << " candidates within 0.01 MAC of " << best
           << "; using eigenvalue proximity";
        result.warnings.push_back(os.str());
        double closest = std::numeric_limits<double>::infinity();
        for (const auto& [i, j] : rivals) {
          const double d = std::abs(cur.eigenvalues(i) - next.eigenvalues(j));
          if (d < closest) {
            closest = d;
            bi = i;
            bj = j;
          }
        }
      }
      row_used[bi] = true;
      col_used[bj] = true;
      source_of[static_cast<std::size_t>(bi)] = bj;
    }
    permute_sample(next, source_of);

    const auto rank_cur = eigen_ranks(cur.eigenvalues);
    const auto rank_next = eigen_ranks(next.eigenvalues);
    Crossing c{k, cur.mu, next.mu, {}};
    for (Index i = 0; i < m; ++i) {
      if (rank_cur[i] != rank_next[i]) c.chains.push_back(i);
    }
    if (!c.chains.empty()) result.crossings.push_back(std::move(c));
  }

  db.paired = true;
  db.aligned = false;
  db.warnings.insert(db.warnings.end(), result.warnings.begin(), result.warnings.end());
  return result;
}

AlignResult align_signs(const ModeDatabase& input) {
  input.validate();
  if (!input.paired) throw Error(ErrorCode::kInvalidArgument, "sign alignment needs a paired database");
  if (input.is_complex) {
    throw Error(ErrorCode::kInvalidArgument, "sign alignment applies to real modes only");
  }
  AlignResult result{input, {}};
  ModeDatabase& db = result.db;
  for (Index i = 0; i < db.m; ++i) {
    auto& first = db.samples.front();
    const Index peak = dominant_component(first.right.col(i));
    if (first.right(peak, i).real() < 0.0) scale_mode(first, i, -1.0);

    for (Index k = 0; k + 1 < db.p(); ++k) {
      const auto& cur = db.samples[static_cast<std::size_t>(k)];
      auto& next = db.samples[static_cast<std::size_t>(k + 1)];
      const double a = db.mass.inner(cur.right.col(i), next.right.col(i)).real();
      if (a < 0.0) {
        scale_mode(next, i, -1.0);
      } else if (a == 0.0) {
        std::ostringstream os;
        os << "mode " << i + 1 << ": neighbours at mu = " << cur.mu << " and mu = " << next.mu
           << " are E-orthogonal; sign kept";
        result.warnings.push_back(os.str());
      }
    }
  }
  db.aligned = true;
  db.warnings.insert(db.warnings.end(), result.warnings.begin(), result.warnings.end());
  return result;
}

double optimal_phase(const ComplexVector& reference, const ComplexVector& mode,
                     const MassMatrix& mass) {
  return -std::arg(mass.inner(reference, mode));
}

AlignResult align_phases(const ModeDatabase& input) {
  input.validate();
  if (!input.paired) throw Error(ErrorCode::kInvalidArgument, "phase alignment needs a paired database");
  AlignResult result{input, {}};
  ModeDatabase& db = result.db;
  for (Index i = 0; i < db.m; ++i) {
    auto& first = db.samples.front();
    const Index peak = dominant_component(first.right.col(i));
    const Complex lead = first.right(peak, i);
    if (std::abs(lead) > 0.0) scale_mode(first, i, std::conj(lead) / std::abs(lead));

    for (Index k = 1; k < db.p(); ++k) {
      auto& s = db.samples[static_cast<std::size_t>(k)];
      const Complex c = db.mass.inner(first.right.col(i), s.right.col(i));
      if (std::abs(c) == 0.0) {
        std::ostringstream os;
        os << "mode " << i + 1 << " at mu = " << s.mu
           << " is E-orthogonal to the first sample; phase kept";
        result.warnings.push_back(os.str());
        continue;
      }
      scale_mode(s, i, std::conj(c) / std::abs(c));  // e^{iθ}, θ = −arg c
    }
  }
  db.aligned = true;
  db.warnings.insert(db.warnings.end(), result.warnings.begin(), result.warnings.end());
  return result;
}

AlignResult align(const ModeDatabase& db) {
  return db.is_complex ? align_phases(db) : align_signs(db);
}

ComplexVector reference_mode(const systems::FullOrderSystem& sys, const ModeDatabase& db,
                             Index mode, double mu) {
  db.validate();
  if (mode < 0 || mode >= db.m) throw Error(ErrorCode::kInvalidArgument, "mode index out of range");
  std::size_t nearest = 0;
  for (std::size_t k = 1; k < db.samples.size(); ++k) {
    if (std::abs(db.samples[k].mu - mu) < std::abs(db.samples[nearest].mu - mu)) nearest = k;
  }
  const ComplexVector anchor = db.samples[nearest].right.col(mode);

  const auto pairs = numerics::generalized_eig(sys.operator_at(mu), sys.mass(), false);
  const Index candidates = std::min<Index>(static_cast<Index>(pairs.size()), 2 * db.m + 2);
  Index best = -1;
  double best_mac = -1.0;
  for (Index j = 0; j < candidates; ++j) {
    const auto& pr = pairs[static_cast<std::size_t>(j)];
    if (db.conjugates_implied && pr.eigenvalue.imag() < 0.0) continue;
    const double v = mac(anchor, pr.right, db.mass);
    if (v > best_mac) {
      best_mac = v;
      best = j;
    }
  }
  ComplexVector truth = pairs[static_cast<std::size_t>(best)].right;
  if (!db.is_complex) truth = truth.real().cast<Complex>();
  const Complex c = db.mass.inner(anchor, truth);
  if (std::abs(c) > 0.0) truth *= std::conj(c) / std::abs(c);
  return truth;
}

}  // namespace eigdef::modal
