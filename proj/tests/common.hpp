#pragma once

#include <complex>
#include <random>

#include "vhl/types.hpp"

namespace vhl::test {

/// Complex matrix with i.i.d. standard normal real and imaginary parts.
inline MatrixXcd random_complex(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    MatrixXcd M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            M(i, j) = cd(g(rng), g(rng));
    return M;
}

inline Index uniform_index(Index lo, Index hi, std::mt19937_64& rng) {
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// <A, B> = trace(A^* B).
inline cd inner(const MatrixXcd& A, const MatrixXcd& B) {
    return A.conjugate().cwiseProduct(B).sum();
}

} // namespace vhl::test
