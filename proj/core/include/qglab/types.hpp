#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qg {

using Real = double;
using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

inline constexpr Real kDefaultTol = 1e-9;

}  // namespace qg
