#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace vhl {

using Index = Eigen::Index;
using cd = std::complex<double>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// The library works in double-precision complex throughout; the lift
// operators below stay generic over the scalar type.
using MatrixXcd = Mat<cd>;
using VectorXcd = Vec<cd>;
using MatrixXd = Mat<double>;
using VectorXd = Vec<double>;

/// s x n data matrix; column j holds the s-vector x_j.
using DataMatrix = MatrixXcd;
/// (s*n1) x n2 vectorized Hankel matrix.
using LiftedMatrix = MatrixXcd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace vhl
