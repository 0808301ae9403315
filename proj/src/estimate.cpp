#include "vhl/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

namespace vhl {

namespace {

// Columns r.. of the full left singular basis of M.
NoiseSubspace trailing_left_vectors(const MatrixXcd& M, Index r) {
    if (M.norm() == 0.0)
        throw std::invalid_argument("noise subspace: input matrix is zero");
    Eigen::BDCSVD<MatrixXcd> svd(M, Eigen::ComputeFullU);
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("noise subspace: SVD failed");
    NoiseSubspace ns;
    ns.order = r;
    ns.basis = svd.matrixU().rightCols(M.rows() - r);
    return ns;
}

} // namespace

NoiseSubspace noise_subspace_vhm(const DataMatrix& X, Index r, const LiftShape& shape) {
    if (r < 0 || r >= shape.n2)
        throw std::invalid_argument("noise_subspace_vhm: need 0 <= r < n2 (r = " + std::to_string(r) +
                                    ", n2 = " + std::to_string(shape.n2) + ")");
    return trailing_left_vectors(vec_hankel(X, shape).transpose(), r);
}

NoiseSubspace noise_subspace_single(const VectorXcd& x, Index r, const LiftShape& shape) {
    if (shape.s != 1)
        throw std::invalid_argument("noise_subspace_single: shape must have s = 1");
    return noise_subspace_vhm(x.transpose(), r, shape);
}

NoiseSubspace noise_subspace_mmv(const DataMatrix& X, Index r) {
    if (r < 0 || r > X.rows())
        throw std::invalid_argument("noise_subspace_mmv: needs r <= s (r = " + std::to_string(r) +
                                    ", s = " + std::to_string(X.rows()) + ")");
    if (r >= X.cols())
        throw std::invalid_argument("noise_subspace_mmv: needs r < n");
    return trailing_left_vectors(X.transpose(), r);
}

MatrixXcd stacked_hankel(const DataMatrix& X, const LiftShape& shape) {
    detail::check_data(X.rows(), X.cols(), shape, "stacked_hankel");
    const LiftShape scalar(shape.n, 1, shape.n1);
    MatrixXcd out(shape.rows(), shape.cols());
    for (Index l = 0; l < shape.s; ++l)
        out.middleRows(l * shape.n1, shape.n1) = vec_hankel(X.row(l), scalar);
    return out;
}

std::vector<double> uniform_grid(Index points) {
    if (points < 1)
        throw std::invalid_argument("uniform_grid: need at least one point");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (Index i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] = static_cast<double>(i) / static_cast<double>(points);
    return g;
}

PseudospectrumCurve pseudospectrum(const NoiseSubspace& noise, const std::vector<double>& grid) {
    const Index m = noise.steering_length();
    PseudospectrumCurve curve;
    curve.grid = grid;
    curve.values.resize(grid.size());
    const MatrixXcd Uh = noise.basis.adjoint();
    VectorXcd proj(Uh.rows());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        // Each grid point is evaluated on its own, so any chunking of the
        // grid gives identical values.
        const VectorXcd a = steering_vector(grid[i], m);
        proj.noalias() = Uh * a;
        const double q = proj.squaredNorm();
        curve.values[i] = q > 0.0 ? 1.0 / q : std::numeric_limits<double>::max();
    }
    return curve;
}

PeakPick pick_peaks(const PseudospectrumCurve& curve, Index r) {
    const auto len = static_cast<Index>(curve.values.size());
    if (r < 1)
        throw std::invalid_argument("pick_peaks: r must be positive");
    if (r > len)
        throw std::invalid_argument("pick_peaks: r exceeds grid length");
    const auto& f = curve.values;
    auto at = [&](Index i) { return f[static_cast<std::size_t>((i + len) % len)]; };

    std::vector<Index> maxima, rest;
    for (Index i = 0; i < len; ++i) {
        const bool is_max = len > 1 && at(i) > at(i - 1) && at(i) > at(i + 1);
        (is_max ? maxima : rest).push_back(i);
    }
    auto by_value = [&](Index a, Index b) {
        const double fa = at(a), fb = at(b);
        if (fa != fb)
            return fa > fb;
        return curve.grid[static_cast<std::size_t>(a)] < curve.grid[static_cast<std::size_t>(b)];
    };
    std::sort(maxima.begin(), maxima.end(), by_value);

    PeakPick pick;
    if (static_cast<Index>(maxima.size()) < r) {
        pick.padded = true;
        std::sort(rest.begin(), rest.end(), by_value);
        maxima.insert(maxima.end(), rest.begin(), rest.begin() + (r - static_cast<Index>(maxima.size())));
    }
    maxima.resize(static_cast<std::size_t>(r));
    for (Index i : maxima) {
        pick.indices.push_back(i);
        pick.taus.push_back(curve.grid[static_cast<std::size_t>(i)]);
    }
    return pick;
}

std::vector<double> refine_peaks(const NoiseSubspace& noise, const std::vector<double>& taus, double radius) {
    if (!(radius > 0.0) || radius >= 0.5)
        throw std::invalid_argument("refine_peaks: radius must lie in (0, 0.5)");
    const Index m = noise.steering_length();
    const MatrixXcd Uh = noise.basis.adjoint();
    VectorXcd ramp(m);
    for (Index j = 0; j < m; ++j)
        ramp(j) = cd(0.0, -kTwoPi * static_cast<double>(j));
    // Derivative of q(t) = ||U^* a_t||^2 is 2 Re <U^* a_t', U^* a_t>, with a_t' = ramp .* a_t.
    auto slope = [&](double t) {
        VectorXcd a(m);
        for (Index j = 0; j < m; ++j)
            a(j) = std::polar(1.0, -kTwoPi * t * static_cast<double>(j));
        const VectorXcd p = Uh * a;
        const VectorXcd dp = Uh * ramp.cwiseProduct(a);
        return 2.0 * dp.dot(p).real();
    };
    std::vector<double> out;
    out.reserve(taus.size());
    for (double t0 : taus) {
        double lo = t0 - radius, hi = t0 + radius;
        const double slo = slope(lo), shi = slope(hi);
        if (!(slo < 0.0 && shi > 0.0)) {
            out.push_back(t0);
            continue;
        }
        for (int it = 0; it < 100 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            if (slope(mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        double t = 0.5 * (lo + hi);
        t -= std::floor(t);
        out.push_back(t >= 1.0 ? 0.0 : t);
    }
    return out;
}

RecoveredSources recover_amplitudes(const DataMatrix& X, const std::vector<double>& taus) {
    const Index n = X.cols();
    const auto r = static_cast<Index>(taus.size());
    if (r < 1 || r > n)
        throw std::invalid_argument("recover_amplitudes: need 1 <= r <= n");
    if (min_wrap_separation(taus) <= 0.0)
        throw std::invalid_argument("recover_amplitudes: frequencies must be distinct");

    const MatrixXcd A = steering_matrix(taus, n);
    Eigen::JacobiSVD<MatrixXcd> svd(A);
    const auto& sv = svd.singularValues();

    RecoveredSources out;
    out.taus = taus;
    out.condition = sv(r - 1) > 0.0 ? sv(0) / sv(r - 1) : std::numeric_limits<double>::infinity();
    out.ill_conditioned = !(out.condition <= kIllConditioned);

    // X^T = A W^T in the least-squares sense.
    const MatrixXcd W = A.colPivHouseholderQr().solve(X.transpose()).transpose();
    out.residual = (X - W * A.transpose()).norm();
    out.amps.resize(r);
    out.orients.resize(X.rows(), r);
    for (Index k = 0; k < r; ++k) {
        const double d = W.col(k).norm();
        out.amps(k) = d;
        if (d > 0.0) {
            out.orients.col(k) = W.col(k) / d;
        } else {
            out.orients.col(k).setZero();
            out.orients(0, k) = 1.0;
        }
    }
    return out;
}

std::string_view to_string(Estimator e) {
    switch (e) {
    case Estimator::VHM: return "vhm";
    case Estimator::Single: return "single";
    case Estimator::MMV: return "mmv";
    }
    return "unknown";
}

Estimator parse_estimator(std::string_view name) {
    if (name == "vhm") return Estimator::VHM;
    if (name == "single") return Estimator::Single;
    if (name == "mmv") return Estimator::MMV;
    throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

FrequencyEstimate estimate_frequencies(const DataMatrix& X, Index r, Estimator est,
                                       const std::vector<double>& grid) {
    FrequencyEstimate fe;
    switch (est) {
    case Estimator::VHM:
        fe.noise = noise_subspace_vhm(X, r, LiftShape::balanced(X.cols(), X.rows()));
        break;
    case Estimator::Single:
        fe.noise = noise_subspace_single(X.row(0).transpose(), r, LiftShape::balanced(X.cols(), 1));
        break;
    case Estimator::MMV:
        fe.noise = noise_subspace_mmv(X, r);
        break;
    }
    fe.curve = pseudospectrum(fe.noise, grid);
    fe.peaks = pick_peaks(fe.curve, r);
    return fe;
}

} // namespace vhl
