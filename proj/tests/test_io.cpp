#include <doctest.h>

#include <cstring>
#include <random>

#include "common.hpp"
#include "vhl/io.hpp"

using namespace vhl;
using vhl::test::random_complex;

namespace {

bool bit_equal(const MatrixXcd& a, const MatrixXcd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(cd) * static_cast<std::size_t>(a.size())) == 0;
}

// Doubles spanning many magnitudes, including awkward ones.
MatrixXcd awkward_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    MatrixXcd M = random_complex(rows, cols, rng);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (Index i = 0; i < M.size(); ++i)
        M.data()[i] *= std::ldexp(1.0, expo(rng));
    if (M.size() > 2) {
        M.data()[0] = cd(0.1, -0.0);
        M.data()[1] = cd(std::numeric_limits<double>::denorm_min(), std::numeric_limits<double>::max());
    }
    return M;
}

} // namespace

TEST_CASE("format_double and parse_double round-trip") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < 10000; ++i) {
        double v;
        const std::uint64_t b = bits(rng);
        std::memcpy(&v, &b, sizeof v);
        if (!std::isfinite(v))
            continue;
        const double back = io::parse_double(io::format_double(v));
        REQUIRE(std::memcmp(&v, &back, sizeof v) == 0);
    }
    CHECK(io::parse_double(" 1.5 ") == 1.5);
    CHECK(io::parse_double("+2") == 2.0);
    CHECK(std::isinf(io::parse_double("inf")));
    CHECK_THROWS_AS(io::parse_double(""), io::ParseError);
    CHECK_THROWS_AS(io::parse_double("1.5x"), io::ParseError);
    CHECK_THROWS_AS(io::parse_double("abc"), io::ParseError);
}

TEST_CASE("property: matrix CSV round-trip is bit exact") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const MatrixXcd M = awkward_matrix(vhl::test::uniform_index(1, 6, rng), vhl::test::uniform_index(1, 40, rng), rng);
        REQUIRE(bit_equal(io::matrix_from_csv(io::matrix_to_csv(M)), M));
        const VectorXcd y = awkward_matrix(vhl::test::uniform_index(1, 40, rng), 1, rng);
        REQUIRE(bit_equal(io::vector_from_csv(io::vector_to_csv(y)), y));
    }
}

TEST_CASE("CSV headers") {
    MatrixXcd M(2, 2);
    M << cd(1, 2), cd(3, 4), cd(5, 6), cd(7, 8);
    CHECK(io::matrix_to_csv(M) == "re_0,im_0,re_1,im_1\n1,2,3,4\n5,6,7,8\n");
    const VectorXcd y = (VectorXcd(2) << cd(1, -1), cd(0.5, 0)).finished();
    CHECK(io::vector_to_csv(y) == "j,re_y,im_y\n0,1,-1\n1,0.5,0\n");
    PseudospectrumCurve c{{0.0, 0.5}, {1.0, 2.5}};
    CHECK(io::curve_to_csv(c) == "tau,f\n0,1\n0.5,2.5\n");
}

TEST_CASE("malformed CSV is rejected") {
    const std::string good = "re_0,im_0,re_1,im_1\n1,2,3,4\n5,6,7,8\n";
    CHECK_NOTHROW(io::matrix_from_csv(good));
    CHECK_THROWS_AS(io::matrix_from_csv(""), io::ParseError);
    CHECK_THROWS_AS(io::matrix_from_csv("re_0,im_0\n"), io::ParseError);
    CHECK_THROWS_AS(io::matrix_from_csv("a,b\n1,2\n"), io::ParseError);
    CHECK_THROWS_AS(io::matrix_from_csv("re_0,im_0,re_1,im_1\n1,2,3,4\n5,6,7"), io::ParseError);
    CHECK_THROWS_AS(io::matrix_from_csv("re_0,im_0\n1,x\n"), io::ParseError);

    // Every proper prefix that cuts a line short must fail.
    const std::string yv = io::vector_to_csv((VectorXcd(3) << cd(1.25, 2), cd(3, 4), cd(5, 6)).finished());
    for (std::size_t len = 0; len < yv.size(); ++len) {
        const std::string prefix = yv.substr(0, len);
        if (!prefix.empty() && prefix.back() == '\n' && prefix.find('\n') != prefix.size() - 1)
            continue;   // ends on a line boundary after the header: a shorter, valid file
        if (yv[len] == '\n')
            continue;   // only a trailing newline is missing
        CAPTURE(prefix);
        CHECK_THROWS_AS(io::vector_from_csv(prefix), io::ParseError);
    }
    CHECK_THROWS_AS(io::vector_from_csv("j,re_y,im_y\n1,0,0\n"), io::ParseError);
}

TEST_CASE("model JSON round-trip is bit exact") {
    for (auto dist : {SubspaceDistribution::Gaussian, SubspaceDistribution::ComplexGaussian,
                      SubspaceDistribution::Rademacher, SubspaceDistribution::DFTRows}) {
        const auto model = sample_model(4, 3, 17);
        const auto B = sample_subspace(dist, 30, 3, 99);
        const io::ModelDocument doc{30, model, B};
        const std::string text = io::model_to_json(doc).dump(2);
        const auto back = io::model_from_json(io::parse_json(text));
        CHECK(back.n == 30);
        CHECK(back.model.taus == model.taus);
        CHECK(bit_equal(back.model.amps, model.amps));
        CHECK(bit_equal(back.model.orients, model.orients));
        CHECK(bit_equal(back.B.entries, B.entries));
        CHECK(back.B.distribution == dist);
        CHECK(back.B.seed == 99);
        CHECK(io::model_to_json(back).dump(2) == text);
    }
}

TEST_CASE("model JSON validation") {
    const auto doc = io::ModelDocument{8, sample_model(2, 2, 1), sample_subspace(SubspaceDistribution::Gaussian, 8, 2, 1)};
    auto j = io::model_to_json(doc);
    CHECK_NOTHROW(io::model_from_json(j));

    auto bad = j;
    bad["r"] = 3;
    CHECK_THROWS_AS(io::model_from_json(bad), io::ParseError);
    bad = j;
    bad.erase("B");
    CHECK_THROWS_AS(io::model_from_json(bad), io::ParseError);
    bad = j;
    bad["taus"][0] = 1.5;
    CHECK_THROWS_AS(io::model_from_json(bad), io::ParseError);
    bad = j;
    bad["distribution"] = "uniform";
    CHECK_THROWS_AS(io::model_from_json(bad), io::ParseError);
    bad = j;
    bad["amps"][0] = 3.0;
    CHECK_THROWS_AS(io::model_from_json(bad), io::ParseError);
    CHECK_THROWS_AS(io::parse_json("{\"n\": "), io::ParseError);
}

TEST_CASE("report JSON round-trip") {
    std::mt19937_64 rng(3);
    SolveReport rep;
    rep.X_hat = awkward_matrix(3, 10, rng);
    rep.iters = 123;
    rep.converged = true;
    rep.primal_residual = 1.25e-8;
    rep.dual_residual = 3e-9;
    rep.nuclear_norm = 42.5;
    const auto j = io::report_to_json(rep, 1e-9);
    CHECK(j.at("relative_error").get<double>() == 1e-9);
    const auto back = io::report_from_json(io::parse_json(j.dump()));
    CHECK(bit_equal(back.X_hat, rep.X_hat));
    CHECK(back.iters == 123);
    CHECK(back.converged);
    CHECK(back.primal_residual == rep.primal_residual);
    CHECK(back.dual_residual == rep.dual_residual);
    CHECK(back.nuclear_norm == rep.nuclear_norm);
    CHECK(!io::report_to_json(rep).contains("relative_error"));
}

TEST_CASE("grid and sweep CSV") {
    TrialGrid g;
    g.rows = {"r", {1, 2}};
    g.cols = {"s", {1, 4, 8}};
    g.trials = 5;
    g.successes = {5, 4, 3, 2, 1, 0};
    const std::string csv = io::grid_to_csv(g);
    CHECK(csv == "r,s,count\n1,1,5\n1,4,4\n1,8,3\n2,1,2\n2,4,1\n2,8,0\n");

    SweepResult res;
    res.snrs = {0.0, std::numeric_limits<double>::infinity()};
    res.series = {{Estimator::VHM, 6}, {Estimator::MMV, 6}};
    res.trials = 1;
    res.mean_errors = {{0.5, 0.0}, {0.25, 1e-5}};
    res.failures = {{0, 0}, {0, 0}};
    CHECK(io::sweep_to_csv(res) == "snr,estimator,mean_error\n0,vhm-6,0.5\n0,mmv-6,0.25\ninf,vhm-6,0\ninf,mmv-6,1e-05\n");

    const std::string svg = io::sweep_svg(res);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("viewBox=\"0 0 800 600\"") != std::string::npos);
    const std::string heat = io::heatmap_svg(g);
    CHECK(heat.find("viewBox=\"0 0 800 600\"") != std::string::npos);
    CHECK(heat.find("</svg>") != std::string::npos);
    PseudospectrumCurve c{uniform_grid(100), std::vector<double>(100, 1.0)};
    c.values[30] = 1e6;
    const std::string ps = io::pseudospectrum_svg(c, {0.3}, {0.3});
    CHECK(ps.find("</svg>") != std::string::npos);
    CHECK(ps.find("href") == std::string::npos);   // self-contained
}

TEST_CASE("file I/O errors") {
    CHECK_THROWS_AS(io::read_text("/nonexistent/dir/file.csv"), io::IoError);
    CHECK_THROWS_AS(io::write_text("/nonexistent/dir/file.csv", "x"), io::IoError);
}
