#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "vhl/lift.hpp"
#include "vhl/types.hpp"

namespace vhl {

/// Ground truth {d_k, tau_k, h_k}.
struct PointSourceModel {
    std::vector<double> taus;   // r frequencies in [0,1)
    VectorXcd amps;             // r nonzero complex amplitudes d_k
    MatrixXcd orients;          // s x r, unit-norm columns h_k

    Index r() const { return static_cast<Index>(taus.size()); }
    Index s() const { return orients.rows(); }

    /// Throws std::invalid_argument on a broken invariant.
    void validate() const;
};

enum class SubspaceDistribution { Gaussian, ComplexGaussian, Rademacher, DFTRows };

std::string_view to_string(SubspaceDistribution d);
SubspaceDistribution parse_distribution(std::string_view name);

/// The n x s matrix B with g_k = B h_k. Row j of B is b_j^*.
struct SubspaceMatrix {
    MatrixXcd entries;
    SubspaceDistribution distribution = SubspaceDistribution::Gaussian;
    std::uint64_t seed = 0;

    Index n() const { return entries.rows(); }
    Index s() const { return entries.cols(); }
};

enum class AmplitudeLaw {
    DynamicRange,   // (1 + 10^c) e^{-i psi}, c ~ U[0,1], psi ~ U[0, 2pi)
    UnitModulus,    // e^{-i psi}
};

enum class OrientationLaw { Gaussian, Bernoulli };

std::string_view to_string(OrientationLaw law);
OrientationLaw parse_orientation_law(std::string_view name);

struct ModelSampling {
    AmplitudeLaw amps = AmplitudeLaw::DynamicRange;
    OrientationLaw orients = OrientationLaw::Gaussian;
    /// Minimum wraparound separation. 0 still enforces distinctness at
    /// kDistinctTolerance.
    double min_separation = 0.0;
};

inline constexpr double kDistinctTolerance = 1e-9;

/// Wraparound distance on the unit torus.
double wrap_distance(double a, double b);

/// Minimum pairwise wraparound gap; +inf for fewer than two frequencies.
double min_wrap_separation(const std::vector<double>& taus);

/// exp(-2 pi i tau j), j = 0..m-1.
VectorXcd steering_vector(double tau, Index m);

/// Columns are steering vectors of length m for each tau.
MatrixXcd steering_matrix(const std::vector<double>& taus, Index m);

PointSourceModel sample_model(Index r, Index s, std::uint64_t seed, const ModelSampling& opts = {});

SubspaceMatrix sample_subspace(SubspaceDistribution dist, Index n, Index s, std::uint64_t seed);

/// X = sum_k d_k h_k a_{tau_k}^T, size s x n.
DataMatrix synthesize_data_matrix(const PointSourceModel& model, Index n);

/// y[j] = b_j^* x_j.
VectorXcd apply_A(const DataMatrix& X, const SubspaceMatrix& B);
/// Column j of the result is y[j] b_j.
DataMatrix apply_A_adjoint(const VectorXcd& y, const SubspaceMatrix& B);

struct VandermondeFactors {
    MatrixXcd E_L;    // n1 x r
    MatrixXcd E_R;    // n2 x r
    MatrixXcd E_hL;   // (s*n1) x r, Khatri-Rao product of E_L and H
};

/// Factors with H(X) = E_hL diag(d) E_R^T.
VandermondeFactors build_vandermonde_factors(const PointSourceModel& model, const LiftShape& shape);

/// Column-wise Kronecker product: column k is kron(A.col(k), B.col(k)).
MatrixXcd khatri_rao(const MatrixXcd& A, const MatrixXcd& B);

enum class NoiseKind { Complex, Real };

/// Adds i.i.d. zero-mean Gaussian noise with
/// sigma = ||X||_F / (sqrt(s n) 10^(snr/20)). Complex noise splits sigma^2
/// evenly between real and imaginary parts. An infinite SNR returns X.
DataMatrix add_noise(const DataMatrix& X, double snr_db, std::uint64_t seed,
                     NoiseKind kind = NoiseKind::Complex);

/// Noise level implied by the SNR definition above.
double noise_sigma(const DataMatrix& X, double snr_db);

struct IncoherenceReport {
    double sigma_min_left = 0.0;    // sigma_min(E_L^* E_L)
    double sigma_min_right = 0.0;   // sigma_min(E_R^* E_R)
    double mu1 = std::numeric_limits<double>::infinity();
};

IncoherenceReport incoherence_diagnostic(const PointSourceModel& model, const LiftShape& shape);

} // namespace vhl
