#pragma once

#include <complex>

#include <Eigen/Dense>

namespace biflab {

using cplx = std::complex<double>;

// Homogeneous coordinates on C^{k+1}, k <= 2. Fixed max storage keeps hot
// loops free of heap traffic.
using HVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, 3, 1>;
using HMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

// Affine chart coordinates on C^k.
using CVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, 2, 1>;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;

inline constexpr double kPi = 3.14159265358979323846;

inline CVec cvec(cplx a) {
  CVec v(1);
  v << a;
  return v;
}

inline CVec cvec(cplx a, cplx b) {
  CVec v(2);
  v << a, b;
  return v;
}

}  // namespace biflab
