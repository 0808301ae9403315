#pragma once

#include <vector>

#include "vhl/lift.hpp"
#include "vhl/model.hpp"
#include "vhl/types.hpp"

namespace vhl {

/// Orthonormal basis U_perp of the noise subspace, m x (m - order).
struct NoiseSubspace {
    MatrixXcd basis;
    Index order = 0;

    Index steering_length() const { return basis.rows(); }
};

/// MUSIC via the vectorized Hankel matrix: left singular vectors of H(X)^T
/// beyond the first r. Steering length n2.
NoiseSubspace noise_subspace_vhm(const DataMatrix& X, Index r, const LiftShape& shape);

/// Single-snapshot MUSIC on one row of samples (the s = 1 case of the above).
NoiseSubspace noise_subspace_single(const VectorXcd& x, Index r, const LiftShape& shape);

/// Multiple-measurement-vector MUSIC: left singular vectors of X^T beyond
/// the first r. Requires r <= s. Steering length n.
NoiseSubspace noise_subspace_mmv(const DataMatrix& X, Index r);

/// Rows stacked as [H(x_1); ...; H(x_s)], each block n1 x n2 built from one
/// row of X. Equal to a row permutation of vec_hankel(X).
MatrixXcd stacked_hankel(const DataMatrix& X, const LiftShape& shape);

struct PseudospectrumCurve {
    std::vector<double> grid;
    std::vector<double> values;
};

/// points equally spaced samples i/points on [0,1).
std::vector<double> uniform_grid(Index points = 10000);

/// f(tau) = 1 / ||U_perp^* a_tau||^2 on the grid.
PseudospectrumCurve pseudospectrum(const NoiseSubspace& noise, const std::vector<double>& grid);

struct PeakPick {
    std::vector<double> taus;   // ordered by value descending, ties by tau ascending
    std::vector<Index> indices; // grid indices of taus
    bool padded = false;        // fewer than r strict local maxima were found
};

/// The r largest strict local maxima on the circular grid.
PeakPick pick_peaks(const PseudospectrumCurve& curve, Index r);

/// Off-grid polish: for each tau, the zero of d/dtau ||U_perp^* a_tau||^2
/// inside [tau - radius, tau + radius], found by bisection. A tau whose
/// bracket holds no sign change is returned unchanged. Results wrap to [0,1).
std::vector<double> refine_peaks(const NoiseSubspace& noise, const std::vector<double>& taus, double radius);

struct RecoveredSources {
    std::vector<double> taus;
    VectorXd amps;        // d_k >= 0
    MatrixXcd orients;    // s x r, unit-norm columns carry the phase
    double residual = 0.0;   // ||X - W A^T||_F
    double condition = 0.0;  // condition number of the steering matrix
    bool ill_conditioned = false;
};

inline constexpr double kIllConditioned = 1e12;

/// Least-squares fit X ~ W A^T with A = [a_{tau_1} ... a_{tau_r}] (n x r),
/// then d_k = ||w_k||, h_k = w_k / d_k.
RecoveredSources recover_amplitudes(const DataMatrix& X, const std::vector<double>& taus);

enum class Estimator { VHM, Single, MMV };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

struct FrequencyEstimate {
    NoiseSubspace noise;
    PseudospectrumCurve curve;
    PeakPick peaks;
};

/// Subspace, pseudospectrum and peak picking in one call. Single uses
/// row 0 of X.
FrequencyEstimate estimate_frequencies(const DataMatrix& X, Index r, Estimator est,
                                       const std::vector<double>& grid);

} // namespace vhl
