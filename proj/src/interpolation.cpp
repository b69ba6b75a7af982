#include "eigdef/interpolation.hpp"

#include <algorithm>
#include <sstream>

#include <Eigen/LU>

#include "eigdef/error.hpp"

namespace eigdef {

Scheme parse_scheme(const std::string& name) {
  if (name == "linear") return Scheme::kLinear;
  if (name == "cubic" || name == "cubic-spline" || name == "spline") return Scheme::kCubicSpline;
  throw Error(ErrorCode::kInvalidArgument, "unknown interpolation scheme '" + name + "'");
}

const char* to_string(Scheme scheme) {
  return scheme == Scheme::kLinear ? "linear" : "cubic-spline";
}

namespace {

void validate_knots(std::span<const double> knots) {
  if (knots.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "interpolation needs at least two knots");
  }
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (!(knots[k] > knots[k - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "knots must be strictly increasing");
    }
  }
}

// Maps knot data to the spline's second derivatives at the knots (natural
// end conditions), as a dense p×p matrix.
RealMatrix second_derivative_map(std::span<const double> x) {
  const Index p = static_cast<Index>(x.size());
  RealMatrix s = RealMatrix::Zero(p, p);
  if (p < 3) return s;
  const Index m = p - 2;
  RealMatrix tri = RealMatrix::Zero(m, m);
  RealMatrix rhs = RealMatrix::Zero(m, p);
  for (Index i = 1; i <= m; ++i) {
    const double hl = x[i] - x[i - 1];
    const double hr = x[i + 1] - x[i];
    const Index r = i - 1;
    tri(r, r) = 2.0 * (hl + hr);
    if (r > 0) tri(r, r - 1) = hl;
    if (r + 1 < m) tri(r, r + 1) = hr;
    rhs(r, i - 1) += 6.0 / hl;
    rhs(r, i) -= 6.0 / hl + 6.0 / hr;
    rhs(r, i + 1) += 6.0 / hr;
  }
  s.middleRows(1, m) = tri.partialPivLu().solve(rhs);
  return s;
}

}  // namespace

KnotWeights knot_weights(std::span<const double> knots, double x, Scheme scheme) {
  validate_knots(knots);
  if (!(x >= knots.front() && x <= knots.back())) {
    std::ostringstream os;
    os << "parameter " << x << " outside sampled interval [" << knots.front() << ", "
       << knots.back() << "]";
    throw Error(ErrorCode::kOutOfDomain, os.str());
  }
  const std::size_t p = knots.size();
  auto it = std::upper_bound(knots.begin(), knots.end(), x);
  std::size_t j = static_cast<std::size_t>(it - knots.begin());
  j = (j == 0) ? 0 : j - 1;
  if (j > p - 2) j = p - 2;

  const double h = knots[j + 1] - knots[j];
  const double a = (knots[j + 1] - x) / h;
  const double b = 1.0 - a;

  KnotWeights out;
  out.weights.assign(p, 0.0);
  out.weights[j] = a;
  out.weights[j + 1] = b;

  if (scheme == Scheme::kCubicSpline && p >= 3 && a != 0.0 && b != 0.0) {
    const RealMatrix s = second_derivative_map(knots);
    const double ca = (a * a * a - a) * h * h / 6.0;
    const double cb = (b * b * b - b) * h * h / 6.0;
    for (std::size_t k = 0; k < p; ++k) {
      out.weights[k] += ca * s(static_cast<Index>(j), static_cast<Index>(k)) +
                        cb * s(static_cast<Index>(j + 1), static_cast<Index>(k));
    }
  }
  for (std::size_t k = 0; k < p; ++k) {
    if (out.weights[k] != 0.0) out.support.push_back(static_cast<Index>(k));
  }
  return out;
}

double spline_eval(std::span<const double> knots, std::span<const double> values, double x) {
  if (values.size() != knots.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "spline values and knots differ in length");
  }
  const auto w = knot_weights(knots, x, Scheme::kCubicSpline);
  double y = 0.0;
  for (Index k : w.support) y += w.weights[static_cast<std::size_t>(k)] * values[static_cast<std::size_t>(k)];
  return y;
}

}  // namespace eigdef
