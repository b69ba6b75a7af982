#pragma once

#include <span>
#include <string>
#include <vector>

#include "eigdef/types.hpp"

namespace eigdef {

enum class Scheme { kLinear, kCubicSpline };

Scheme parse_scheme(const std::string& name);
const char* to_string(Scheme scheme);

/// Interpolation in one parameter expressed as knot weights: the value at x is
/// Σ_k weights[k]·y_k for any data y attached to the knots. Linear weights
/// touch at most two knots; natural cubic spline weights are dense.
struct KnotWeights {
  std::vector<double> weights;
  std::vector<Index> support;  // knots with nonzero weight, ascending
};

/// Throws kOutOfDomain outside [knots.front(), knots.back()] and
/// kInvalidArgument unless knots are strictly increasing with size ≥ 2.
KnotWeights knot_weights(std::span<const double> knots, double x, Scheme scheme);

/// Natural cubic spline of scalar data, evaluated at x.
double spline_eval(std::span<const double> knots, std::span<const double> values, double x);

}  // namespace eigdef
