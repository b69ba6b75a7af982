#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Core>

namespace eigdef {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

}  // namespace eigdef
