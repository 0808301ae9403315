#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vhl/types.hpp"

namespace vhl {

/// Dimensions of the vectorized Hankel lift: an s x n matrix maps to an
/// (s*n1) x n2 matrix with n1 + n2 = n + 1.
struct LiftShape {
    Index n = 1;
    Index s = 1;
    Index n1 = 1;
    Index n2 = 1;

    LiftShape() = default;
    LiftShape(Index n_, Index s_, Index n1_) : n{n_}, s{s_}, n1{n1_}, n2{n_ + 1 - n1_} {
        if (n < 1 || s < 1)
            throw std::invalid_argument("LiftShape: n and s must be positive");
        if (n1 < 1 || n2 < 1)
            throw std::invalid_argument("LiftShape: need 1 <= n1 <= n");
    }

    /// n1 = floor((n+1)/2), n2 = n + 1 - n1. Square whenever n is odd.
    static LiftShape balanced(Index n, Index s) { return LiftShape(n, s, (n + 1) / 2); }

    Index rows() const { return s * n1; }
    Index cols() const { return n2; }

    friend bool operator==(const LiftShape&, const LiftShape&) = default;
};

/// Anti-diagonal multiplicities w_i = #{(j,k) : j + k = i}.
using WeightVector = Eigen::VectorXi;

inline WeightVector hankel_weights(const LiftShape& shape) {
    WeightVector w(shape.n);
    for (Index i = 0; i < shape.n; ++i) {
        // j ranges over max(0, i-n2+1) .. min(i, n1-1)
        const Index jmin = std::max<Index>(0, i - shape.n2 + 1);
        const Index jmax = std::min<Index>(i, shape.n1 - 1);
        w(i) = static_cast<int>(jmax - jmin + 1);
    }
    return w;
}

namespace detail {
inline void check_data(Index rows, Index cols, const LiftShape& shape, const char* who) {
    if (rows != shape.s || cols != shape.n)
        throw std::invalid_argument(std::string(who) + ": data matrix is " + std::to_string(rows) +
                                    "x" + std::to_string(cols) + ", shape expects " +
                                    std::to_string(shape.s) + "x" + std::to_string(shape.n));
}
inline void check_lifted(Index rows, Index cols, const LiftShape& shape, const char* who) {
    if (rows != shape.rows() || cols != shape.cols())
        throw std::invalid_argument(std::string(who) + ": lifted matrix has wrong size");
}
} // namespace detail

/// Vectorized Hankel lift. Block (j,k) (rows [j*s, (j+1)*s) of column k)
/// equals column j+k of X. With s = 1 this is the classical Hankel map.
template <typename Derived>
Mat<typename Derived::Scalar> vec_hankel(const Eigen::MatrixBase<Derived>& X, const LiftShape& shape) {
    detail::check_data(X.rows(), X.cols(), shape, "vec_hankel");
    const Index s = shape.s;
    Mat<typename Derived::Scalar> Z(shape.rows(), shape.cols());
    for (Index k = 0; k < shape.n2; ++k)
        for (Index j = 0; j < shape.n1; ++j)
            Z.block(j * s, k, s, 1) = X.col(j + k);
    return Z;
}

/// Adjoint of vec_hankel: column i is the sum of the blocks z_{j,k} with j + k = i.
template <typename Derived>
Mat<typename Derived::Scalar> vec_hankel_adjoint(const Eigen::MatrixBase<Derived>& Z,
                                                 const LiftShape& shape) {
    detail::check_lifted(Z.rows(), Z.cols(), shape, "vec_hankel_adjoint");
    const Index s = shape.s;
    Mat<typename Derived::Scalar> X = Mat<typename Derived::Scalar>::Zero(s, shape.n);
    for (Index k = 0; k < shape.n2; ++k)
        for (Index j = 0; j < shape.n1; ++j)
            X.col(j + k) += Z.block(j * s, k, s, 1);
    return X;
}

/// Scales column i by w_i^(power/2); power = +2 reproduces H*H.
template <typename Derived>
Mat<typename Derived::Scalar> apply_D(const Eigen::MatrixBase<Derived>& X, const WeightVector& w, int power) {
    if (power != 1 && power != -1 && power != 2 && power != -2)
        throw std::invalid_argument("apply_D: power must be one of +-1, +-2");
    if (w.size() != X.cols())
        throw std::invalid_argument("apply_D: weight vector length does not match column count");
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    Mat<typename Derived::Scalar> out = X;
    for (Index i = 0; i < X.cols(); ++i) {
        const Real wi = static_cast<Real>(w(i));
        Real f;
        switch (power) {
        case 2: f = wi; break;
        case -2: f = Real(1) / wi; break;
        case 1: f = std::sqrt(wi); break;
        default: f = Real(1) / std::sqrt(wi); break;
        }
        out.col(i) *= f;
    }
    return out;
}

/// G = H D^{-1}. Isometric: G*G = I.
template <typename Derived>
Mat<typename Derived::Scalar> apply_G(const Eigen::MatrixBase<Derived>& X, const LiftShape& shape) {
    return vec_hankel(apply_D(X, hankel_weights(shape), -1), shape);
}

/// G* = D^{-1} H*.
template <typename Derived>
Mat<typename Derived::Scalar> apply_G_adjoint(const Eigen::MatrixBase<Derived>& Z, const LiftShape& shape) {
    return apply_D(vec_hankel_adjoint(Z, shape), hankel_weights(shape), -1);
}

/// Normalized anti-diagonal indicator G_i (n1 x n2). {G_i} is an orthonormal
/// basis of the n1 x n2 Hankel matrices.
inline MatrixXd hankel_basis(Index i, const LiftShape& shape) {
    if (i < 0 || i >= shape.n)
        throw std::out_of_range("hankel_basis: index " + std::to_string(i) + " outside [0, n)");
    const double scale = 1.0 / std::sqrt(static_cast<double>(hankel_weights(shape)(i)));
    MatrixXd G = MatrixXd::Zero(shape.n1, shape.n2);
    for (Index j = 0; j < shape.n1; ++j) {
        const Index k = i - j;
        if (k >= 0 && k < shape.n2)
            G(j, k) = scale;
    }
    return G;
}

/// Two-fold lift for 2D data. X is s x n^2, read as n chunks X_l of n
/// columns each; the result is the n1 x n2 block-Hankel arrangement of
/// vec_hankel(X_{a+b}), of size (s*n1*n1) x (n2*n2). The same split is
/// used along both axes.
template <typename Derived>
Mat<typename Derived::Scalar> two_fold_lift(const Eigen::MatrixBase<Derived>& X, const LiftShape& shape) {
    const Index n = shape.n;
    if (X.rows() != shape.s || X.cols() != n * n)
        throw std::invalid_argument("two_fold_lift: expected an s x n^2 matrix");
    const Index br = shape.rows();
    const Index bc = shape.cols();
    Mat<typename Derived::Scalar> out(br * shape.n1, bc * shape.n2);
    for (Index b = 0; b < shape.n2; ++b)
        for (Index a = 0; a < shape.n1; ++a) {
            const Index chunk = a + b;
            out.block(a * br, b * bc, br, bc) = vec_hankel(X.middleCols(chunk * n, n), shape);
        }
    return out;
}

} // namespace vhl
