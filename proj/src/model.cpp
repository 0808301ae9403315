#include "vhl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace vhl {

void PointSourceModel::validate() const {
    const Index r = this->r();
    if (r < 1)
        throw std::invalid_argument("PointSourceModel: need at least one source");
    if (amps.size() != r || orients.cols() != r)
        throw std::invalid_argument("PointSourceModel: taus, amps and orients disagree on r");
    if (orients.rows() < 1)
        throw std::invalid_argument("PointSourceModel: orientation dimension must be positive");
    for (double t : taus)
        if (!(t >= 0.0 && t < 1.0))
            throw std::invalid_argument("PointSourceModel: frequency outside [0,1)");
    for (Index k = 0; k < r; ++k) {
        if (amps(k) == cd(0.0))
            throw std::invalid_argument("PointSourceModel: zero amplitude");
        if (std::abs(orients.col(k).norm() - 1.0) > 1e-10)
            throw std::invalid_argument("PointSourceModel: orientation is not unit norm");
    }
    if (min_wrap_separation(taus) <= kDistinctTolerance)
        throw std::invalid_argument("PointSourceModel: frequencies are not distinct");
}

std::string_view to_string(SubspaceDistribution d) {
    switch (d) {
    case SubspaceDistribution::Gaussian: return "gaussian";
    case SubspaceDistribution::ComplexGaussian: return "complex-gaussian";
    case SubspaceDistribution::Rademacher: return "rademacher";
    case SubspaceDistribution::DFTRows: return "dft";
    }
    return "unknown";
}

SubspaceDistribution parse_distribution(std::string_view name) {
    if (name == "gaussian") return SubspaceDistribution::Gaussian;
    if (name == "complex-gaussian") return SubspaceDistribution::ComplexGaussian;
    if (name == "rademacher") return SubspaceDistribution::Rademacher;
    if (name == "dft") return SubspaceDistribution::DFTRows;
    throw std::invalid_argument("unsupported subspace distribution '" + std::string(name) + "'");
}

std::string_view to_string(OrientationLaw law) {
    return law == OrientationLaw::Gaussian ? "gaussian" : "bernoulli";
}

OrientationLaw parse_orientation_law(std::string_view name) {
    if (name == "gaussian") return OrientationLaw::Gaussian;
    if (name == "bernoulli") return OrientationLaw::Bernoulli;
    throw std::invalid_argument("unsupported orientation law '" + std::string(name) + "'");
}

double wrap_distance(double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

double min_wrap_separation(const std::vector<double>& taus) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < taus.size(); ++i)
        for (std::size_t j = i + 1; j < taus.size(); ++j)
            best = std::min(best, wrap_distance(taus[i], taus[j]));
    return best;
}

VectorXcd steering_vector(double tau, Index m) {
    if (!(tau >= 0.0 && tau < 1.0))
        throw std::invalid_argument("steering_vector: tau outside [0,1)");
    VectorXcd a(m);
    for (Index j = 0; j < m; ++j)
        a(j) = std::polar(1.0, -kTwoPi * tau * static_cast<double>(j));
    return a;
}

MatrixXcd steering_matrix(const std::vector<double>& taus, Index m) {
    MatrixXcd A(m, static_cast<Index>(taus.size()));
    for (Index k = 0; k < A.cols(); ++k)
        A.col(k) = steering_vector(taus[static_cast<std::size_t>(k)], m);
    return A;
}

namespace {

std::vector<double> sample_frequencies(Index r, double delta, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> taus(static_cast<std::size_t>(r));
    if (delta <= 0.0) {
        // Plain uniform draws, rejected only on (near-)collisions.
        do {
            for (auto& t : taus)
                t = unif(rng);
        } while (r > 1 && min_wrap_separation(taus) <= kDistinctTolerance);
        return taus;
    }
    // Uniform over delta-separated configurations: draw r points in the
    // slack [0, 1 - r*delta), sort, spread by delta, rotate.
    const double slack = 1.0 - static_cast<double>(r) * delta;
    std::uniform_real_distribution<double> in_slack(0.0, slack);
    for (auto& t : taus)
        t = in_slack(rng);
    std::sort(taus.begin(), taus.end());
    const double shift = unif(rng);
    for (std::size_t k = 0; k < taus.size(); ++k) {
        double t = taus[k] + static_cast<double>(k) * delta + shift;
        t -= std::floor(t);
        taus[k] = t >= 1.0 ? 0.0 : t;
    }
    std::shuffle(taus.begin(), taus.end(), rng);
    return taus;
}

} // namespace

PointSourceModel sample_model(Index r, Index s, std::uint64_t seed, const ModelSampling& opts) {
    if (r < 1 || s < 1)
        throw std::invalid_argument("sample_model: need r >= 1 and s >= 1");
    if (opts.min_separation < 0.0)
        throw std::invalid_argument("sample_model: negative separation");
    if (static_cast<double>(r) * opts.min_separation > 1.0)
        throw std::invalid_argument("sample_model: separation infeasible (r * delta > 1)");

    std::mt19937_64 rng(seed);
    PointSourceModel m;
    m.taus = sample_frequencies(r, opts.min_separation, rng);

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    m.amps.resize(r);
    for (Index k = 0; k < r; ++k) {
        const double psi = kTwoPi * unif(rng);
        const double mag = opts.amps == AmplitudeLaw::DynamicRange ? 1.0 + std::pow(10.0, unif(rng)) : 1.0;
        m.amps(k) = std::polar(mag, -psi);
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    m.orients.resize(s, r);
    for (Index k = 0; k < r; ++k) {
        do {
            for (Index l = 0; l < s; ++l)
                m.orients(l, k) = opts.orients == OrientationLaw::Gaussian ? normal(rng) : (coin(rng) ? 1.0 : -1.0);
        } while (m.orients.col(k).norm() == 0.0);
        m.orients.col(k).normalize();
    }
    return m;
}

SubspaceMatrix sample_subspace(SubspaceDistribution dist, Index n, Index s, std::uint64_t seed) {
    if (s < 1 || n < s)
        throw std::invalid_argument("sample_subspace: need n >= s >= 1");
    std::mt19937_64 rng(seed);
    SubspaceMatrix B{MatrixXcd(n, s), dist, seed};
    switch (dist) {
    case SubspaceDistribution::Gaussian: {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Index j = 0; j < n; ++j)
            for (Index l = 0; l < s; ++l)
                B.entries(j, l) = normal(rng);
        break;
    }
    case SubspaceDistribution::ComplexGaussian: {
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        for (Index j = 0; j < n; ++j)
            for (Index l = 0; l < s; ++l) {
                const double re = normal(rng);
                B.entries(j, l) = cd(re, normal(rng));
            }
        break;
    }
    case SubspaceDistribution::Rademacher: {
        std::bernoulli_distribution coin(0.5);
        for (Index j = 0; j < n; ++j)
            for (Index l = 0; l < s; ++l)
                B.entries(j, l) = coin(rng) ? 1.0 : -1.0;
        break;
    }
    case SubspaceDistribution::DFTRows: {
        // b_j = sqrt(n) * (row m of the unitary DFT, first s entries); B stores b_j^*.
        std::uniform_int_distribution<Index> pick(0, n - 1);
        for (Index j = 0; j < n; ++j) {
            const Index row = pick(rng);
            for (Index l = 0; l < s; ++l) {
                const double phase = -kTwoPi * static_cast<double>((row * l) % n) / static_cast<double>(n);
                B.entries(j, l) = std::conj(std::polar(1.0, phase));
            }
        }
        break;
    }
    }
    return B;
}

DataMatrix synthesize_data_matrix(const PointSourceModel& model, Index n) {
    model.validate();
    // X = (H diag(d)) A^T with A = [a_{tau_1} ... a_{tau_r}]
    return model.orients * model.amps.asDiagonal() * steering_matrix(model.taus, n).transpose();
}

VectorXcd apply_A(const DataMatrix& X, const SubspaceMatrix& B) {
    if (B.entries.rows() != X.cols() || B.entries.cols() != X.rows())
        throw std::invalid_argument("apply_A: B must be n x s for an s x n data matrix");
    VectorXcd y(X.cols());
    for (Index j = 0; j < X.cols(); ++j)
        y(j) = B.entries.row(j).transpose().cwiseProduct(X.col(j)).sum();
    return y;
}

DataMatrix apply_A_adjoint(const VectorXcd& y, const SubspaceMatrix& B) {
    if (B.entries.rows() != y.size())
        throw std::invalid_argument("apply_A_adjoint: B row count must match y length");
    DataMatrix X(B.entries.cols(), y.size());
    for (Index j = 0; j < y.size(); ++j)
        X.col(j) = y(j) * B.entries.row(j).adjoint();
    return X;
}

MatrixXcd khatri_rao(const MatrixXcd& A, const MatrixXcd& B) {
    if (A.cols() != B.cols())
        throw std::invalid_argument("khatri_rao: column counts differ");
    MatrixXcd out(A.rows() * B.rows(), A.cols());
    for (Index k = 0; k < A.cols(); ++k)
        for (Index i = 0; i < A.rows(); ++i)
            out.block(i * B.rows(), k, B.rows(), 1) = A(i, k) * B.col(k);
    return out;
}

VandermondeFactors build_vandermonde_factors(const PointSourceModel& model, const LiftShape& shape) {
    model.validate();
    if (model.s() != shape.s)
        throw std::invalid_argument("build_vandermonde_factors: model s disagrees with shape");
    VandermondeFactors f;
    f.E_L = steering_matrix(model.taus, shape.n1);
    f.E_R = steering_matrix(model.taus, shape.n2);
    f.E_hL = khatri_rao(f.E_L, model.orients);
    return f;
}

double noise_sigma(const DataMatrix& X, double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0)
        return 0.0;
    const double sn = static_cast<double>(X.size());
    return X.norm() / (std::sqrt(sn) * std::pow(10.0, snr_db / 20.0));
}

DataMatrix add_noise(const DataMatrix& X, double snr_db, std::uint64_t seed, NoiseKind kind) {
    if (std::isnan(snr_db) || (std::isinf(snr_db) && snr_db < 0))
        throw std::invalid_argument("add_noise: SNR must be finite or +inf");
    const double sigma = noise_sigma(X, snr_db);
    if (sigma == 0.0)
        return X;
    std::mt19937_64 rng(seed);
    DataMatrix out = X;
    if (kind == NoiseKind::Complex) {
        std::normal_distribution<double> normal(0.0, sigma / std::sqrt(2.0));
        for (Index j = 0; j < out.cols(); ++j)
            for (Index i = 0; i < out.rows(); ++i) {
                const double re = normal(rng);
                out(i, j) += cd(re, normal(rng));
            }
    } else {
        std::normal_distribution<double> normal(0.0, sigma);
        for (Index j = 0; j < out.cols(); ++j)
            for (Index i = 0; i < out.rows(); ++i)
                out(i, j) += normal(rng);
    }
    return out;
}

namespace {
double smallest_gram_eigenvalue(const MatrixXcd& E) {
    const MatrixXcd gram = E.adjoint() * E;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    return std::max(0.0, eig.eigenvalues().minCoeff());
}
} // namespace

IncoherenceReport incoherence_diagnostic(const PointSourceModel& model, const LiftShape& shape) {
    const auto f = build_vandermonde_factors(model, shape);
    IncoherenceReport rep;
    rep.sigma_min_left = smallest_gram_eigenvalue(f.E_L);
    rep.sigma_min_right = smallest_gram_eigenvalue(f.E_R);
    const double eps = std::numeric_limits<double>::epsilon();
    const double r = static_cast<double>(model.r());
    const double n1 = static_cast<double>(shape.n1);
    const double n2 = static_cast<double>(shape.n2);
    // Rank-deficient Vandermonde factor (r > n1, or coincident frequencies).
    if (rep.sigma_min_left <= 64 * eps * n1 * r || rep.sigma_min_right <= 64 * eps * n2 * r)
        return rep;
    rep.mu1 = std::max(n1 / rep.sigma_min_left, n2 / rep.sigma_min_right);
    return rep;
}

} // namespace vhl
