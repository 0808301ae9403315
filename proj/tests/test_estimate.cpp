#include <doctest.h>

#include <random>

#include "common.hpp"
#include "vhl/bench.hpp"
#include "vhl/estimate.hpp"

using namespace vhl;
using vhl::test::random_complex;

namespace {

PointSourceModel separated_model(Index r, Index s, Index n, std::uint64_t seed) {
    ModelSampling opts;
    opts.min_separation = 1.0 / static_cast<double>(n);
    return sample_model(r, s, seed, opts);
}

bool orthonormal(const MatrixXcd& U) {
    return (U.adjoint() * U - MatrixXcd::Identity(U.cols(), U.cols())).norm() < 1e-10;
}

// Largest sine of the principal angles between the column spaces of A and B.
double subspace_gap(const MatrixXcd& A, const MatrixXcd& B) {
    const MatrixXcd QA = Eigen::HouseholderQR<MatrixXcd>(A).householderQ() * MatrixXcd::Identity(A.rows(), A.cols());
    const MatrixXcd QB = Eigen::HouseholderQR<MatrixXcd>(B).householderQ() * MatrixXcd::Identity(B.rows(), B.cols());
    return (QB - QA * (QA.adjoint() * QB)).norm();
}

} // namespace

TEST_CASE("noise_subspace_vhm on noiseless data") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Index n = 40, s = 3, r = 5;
        const auto model = separated_model(r, s, n, seed);
        const DataMatrix X = synthesize_data_matrix(model, n);
        const auto sh = LiftShape::balanced(n, s);
        const auto ns = noise_subspace_vhm(X, r, sh);
        CHECK(ns.basis.rows() == sh.n2);
        CHECK(ns.basis.cols() == sh.n2 - r);
        CHECK(orthonormal(ns.basis));
        for (double t : model.taus)
            CHECK((ns.basis.adjoint() * steering_vector(t, sh.n2)).norm() < 1e-8);
        const auto sv = Eigen::BDCSVD<MatrixXcd>(vec_hankel(X, sh).transpose()).singularValues();
        CHECK(sv(r) < 1e-8 * sv(0));
    }
    const auto sh = LiftShape::balanced(10, 2);
    CHECK_THROWS_AS(noise_subspace_vhm(MatrixXcd::Ones(2, 10), sh.n2, sh), std::invalid_argument);
    CHECK_THROWS_AS(noise_subspace_vhm(MatrixXcd::Zero(2, 10), 1, sh), std::invalid_argument);
}

TEST_CASE("single-snapshot MUSIC") {
    const Index n = 64;
    PointSourceModel m;
    m.taus = {0.3};
    m.amps = VectorXcd::Constant(1, cd(2.0, 1.0));
    m.orients = MatrixXcd::Ones(1, 1);
    const DataMatrix X = synthesize_data_matrix(m, n);
    const auto sh = LiftShape::balanced(n, 1);
    const auto ns = noise_subspace_single(X.row(0).transpose(), 1, sh);
    const auto grid = uniform_grid(10000);
    const auto peaks = pick_peaks(pseudospectrum(ns, grid), 1);
    CHECK(std::abs(peaks.taus[0] - 0.3) <= 1e-4);

    // Identical to the vectorized version when s = 1.
    const auto vhm = noise_subspace_vhm(X, 1, sh);
    CHECK(ns.basis == vhm.basis);

    CHECK_THROWS_AS(noise_subspace_single(VectorXcd::Zero(n), 1, sh), std::invalid_argument);
    CHECK_THROWS_AS(noise_subspace_single(X.row(0).transpose(), 1, LiftShape::balanced(n, 2)), std::invalid_argument);
}

TEST_CASE("MMV MUSIC") {
    const Index n = 32, s = 4, r = 4;
    const auto model = separated_model(r, s, n, 3);
    const DataMatrix X = synthesize_data_matrix(model, n);
    const auto ns = noise_subspace_mmv(X, r);
    CHECK(ns.basis.rows() == n);
    CHECK(orthonormal(ns.basis));
    const auto sv = Eigen::BDCSVD<MatrixXcd>(X.transpose()).singularValues();
    CHECK(sv.size() == r);   // r = s: rank is full, nothing beyond index r
    for (double t : model.taus)
        CHECK((ns.basis.adjoint() * steering_vector(t, n)).norm() < 1e-8);

    const auto fe = estimate_frequencies(X, r, Estimator::MMV, uniform_grid(10000));
    CHECK(hausdorff(model.taus, fe.peaks.taus, HausdorffMetric::Wraparound) <= 1e-4);

    CHECK_THROWS_AS(noise_subspace_mmv(X.topRows(3), 4), std::invalid_argument);
    CHECK_THROWS_AS(estimate_frequencies(X.topRows(3), 4, Estimator::MMV, uniform_grid(100)), std::invalid_argument);

    // With more snapshots than sources the (r+1)-th singular value vanishes.
    const auto model2 = separated_model(3, 5, n, 4);
    const auto sv2 = Eigen::BDCSVD<MatrixXcd>(synthesize_data_matrix(model2, n).transpose()).singularValues();
    CHECK(sv2(3) < 1e-8 * sv2(0));
}

TEST_CASE("pseudospectrum") {
    SUBCASE("grid") {
        const auto g = uniform_grid(10000);
        CHECK(g.size() == 10000);
        CHECK(g.front() == 0.0);
        CHECK(g[1] == doctest::Approx(1e-4));
        CHECK(g.back() < 1.0);
        CHECK_THROWS_AS(uniform_grid(0), std::invalid_argument);
    }
    SUBCASE("blows up at true frequencies") {
        const auto model = separated_model(4, 3, 64, 5);
        const DataMatrix X = synthesize_data_matrix(model, 64);
        const auto ns = noise_subspace_vhm(X, 4, LiftShape::balanced(64, 3));
        const auto curve = pseudospectrum(ns, model.taus);
        for (double v : curve.values)
            CHECK(v >= 1e12);
    }
    SUBCASE("r = 0 gives the constant 1/n2") {
        std::mt19937_64 rng(6);
        const auto sh = LiftShape::balanced(21, 2);
        const auto ns = noise_subspace_vhm(random_complex(2, 21, rng), 0, sh);
        CHECK(ns.basis.cols() == sh.n2);
        const auto curve = pseudospectrum(ns, uniform_grid(257));
        for (double v : curve.values)
            CHECK(v == doctest::Approx(1.0 / static_cast<double>(sh.n2)).epsilon(1e-12));
    }
    SUBCASE("independent of how the grid is split") {
        std::mt19937_64 rng(7);
        const auto ns = noise_subspace_vhm(random_complex(3, 30, rng), 4, LiftShape::balanced(30, 3));
        const auto grid = uniform_grid(1000);
        const auto whole = pseudospectrum(ns, grid);
        std::vector<double> pieces;
        for (std::size_t start = 0; start < grid.size(); start += 137) {
            const std::vector<double> chunk(grid.begin() + static_cast<long>(start),
                                            grid.begin() + static_cast<long>(std::min(grid.size(), start + 137)));
            const auto part = pseudospectrum(ns, chunk);
            pieces.insert(pieces.end(), part.values.begin(), part.values.end());
        }
        CHECK(pieces == whole.values);
        for (double v : whole.values) {
            CHECK(v > 0.0);
            CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("pick_peaks") {
    PseudospectrumCurve c;
    c.grid = uniform_grid(10);
    SUBCASE("single peak") {
        c.values = {1, 2, 3, 9, 3, 2, 1, 0.5, 0.2, 0.5};
        const auto p = pick_peaks(c, 1);
        CHECK(p.taus == std::vector<double>{0.3});
        CHECK(!p.padded);
    }
    SUBCASE("equal heights prefer the smaller tau") {
        c.values = {1, 1, 5, 1, 1, 1, 1, 5, 1, 1};
        CHECK(pick_peaks(c, 1).taus == std::vector<double>{0.2});
        const auto both = pick_peaks(c, 2);
        CHECK(both.taus == std::vector<double>{0.2, 0.7});
    }
    SUBCASE("sorted by value") {
        c.values = {0, 3, 0, 7, 0, 5, 0, 1, 0, 0};
        CHECK(pick_peaks(c, 3).indices == std::vector<Index>{3, 5, 1});
    }
    SUBCASE("circular neighbourhood") {
        c.values = {8, 1, 1, 1, 1, 1, 1, 1, 1, 7};
        const auto p = pick_peaks(c, 1);
        CHECK(p.indices == std::vector<Index>{0});
        c.values = {1, 1, 1, 1, 1, 1, 1, 1, 2, 7};   // index 9 neighbours index 0
        CHECK(pick_peaks(c, 1).indices == std::vector<Index>{9});
    }
    SUBCASE("padding when maxima run out") {
        c.values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 0};
        const auto p = pick_peaks(c, 3);
        CHECK(p.padded);
        CHECK(p.indices == std::vector<Index>{8, 7, 6});
        c.values.assign(10, 1.0);
        const auto flat = pick_peaks(c, 2);
        CHECK(flat.padded);
        CHECK(flat.indices == std::vector<Index>{0, 1});
    }
    SUBCASE("errors") {
        c.values.assign(10, 1.0);
        CHECK_THROWS_AS(pick_peaks(c, 11), std::invalid_argument);
        CHECK_THROWS_AS(pick_peaks(c, 0), std::invalid_argument);
    }
}

TEST_CASE("property: noiseless VHM pipeline hits every frequency within one grid step") {
    std::mt19937_64 rng(8);
    const auto grid = uniform_grid(10000);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = vhl::test::uniform_index(16, 64, rng);
        const Index s = vhl::test::uniform_index(1, 6, rng);
        const auto sh = LiftShape::balanced(n, s);
        const Index r = vhl::test::uniform_index(1, std::min<Index>(6, sh.n2 - 1), rng);
        const auto model = separated_model(r, s, n, rng());
        const auto fe = estimate_frequencies(synthesize_data_matrix(model, n), r, Estimator::VHM, grid);
        CHECK(!fe.peaks.padded);
        CHECK(hausdorff(model.taus, fe.peaks.taus, HausdorffMetric::Wraparound) <= 1e-4);
    }
}

TEST_CASE("stacked_hankel is a row permutation of the lift") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = vhl::test::uniform_index(2, 40, rng);
        const Index s = vhl::test::uniform_index(1, 6, rng);
        const auto sh = LiftShape::balanced(n, s);
        const MatrixXcd X = random_complex(s, n, rng);
        const MatrixXcd H = vec_hankel(X, sh);
        const MatrixXcd S = stacked_hankel(X, sh);
        const VectorXd a = Eigen::BDCSVD<MatrixXcd>(H).singularValues();
        const VectorXd b = Eigen::BDCSVD<MatrixXcd>(S).singularValues();
        REQUIRE((a - b).norm() <= 1e-10 * a(0));
        if (s == 1)
            REQUIRE(S == H);
        // Row spaces coincide.
        CHECK(subspace_gap(H.transpose(), S.transpose()) < 1e-8);
        // Explicit permutation: row l*n1 + j of S is row j*s + l of H.
        for (Index l = 0; l < s; ++l)
            for (Index j = 0; j < sh.n1; ++j)
                REQUIRE(S.row(l * sh.n1 + j) == H.row(j * s + l));
    }
}

TEST_CASE("recover_amplitudes") {
    const Index n = 64, s = 3, r = 4;
    const auto p = make_instance(n, s, r, 10);
    const auto src = recover_amplitudes(p.X, p.model.taus);
    const MatrixXcd W_true = p.model.orients * p.model.amps.asDiagonal();
    const MatrixXcd W_hat = src.orients * src.amps.asDiagonal();
    CHECK((W_hat - W_true).norm() / W_true.norm() < 1e-10);
    CHECK(src.residual < 1e-10 * p.X.norm());
    CHECK(!src.ill_conditioned);
    for (Index k = 0; k < r; ++k) {
        CHECK(src.amps(k) >= 0.0);
        CHECK(src.orients.col(k).norm() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(src.amps(k) == doctest::Approx(std::abs(p.model.amps(k))).epsilon(1e-10));
        // g_k = B h_k up to a unit-modulus factor.
        const VectorXcd g = p.B.entries * p.model.orients.col(k);
        const VectorXcd g_hat = p.B.entries * src.orients.col(k);
        const cd phase = g_hat.dot(g) / std::abs(g_hat.dot(g));
        CHECK((g - phase * g_hat).norm() < 1e-8 * g.norm());
    }

    const auto close = recover_amplitudes(p.X, {0.1, 0.1 + 1e-15});
    CHECK(close.ill_conditioned);
    CHECK_THROWS_AS(recover_amplitudes(p.X, {0.2, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(recover_amplitudes(p.X, {}), std::invalid_argument);
}

TEST_CASE("estimator names") {
    for (auto e : {Estimator::VHM, Estimator::Single, Estimator::MMV})
        CHECK(parse_estimator(to_string(e)) == e);
    CHECK_THROWS_AS(parse_estimator("esprit"), std::invalid_argument);
}
