// Command-line front end: synthesis, recovery, MUSIC and the Monte Carlo
// harnesses. All numerics live in the vhl library; this file only parses
// flags, loads/stores files and maps failures to exit codes.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vhl/bench.hpp"
#include "vhl/estimate.hpp"
#include "vhl/io.hpp"
#include "vhl/model.hpp"
#include "vhl/solver.hpp"

namespace fs = std::filesystem;
using namespace vhl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitIo = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string out_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw io::IoError("cannot create output directory '" + dir + "': " + ec.message());
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// "r=1,2,4,8"
Axis parse_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw UsageError("axis must look like name=v1,v2,... (got '" + spec + "')");
    Axis axis{spec.substr(0, eq), {}};
    for (const auto& v : split(spec.substr(eq + 1), ',')) {
        try {
            std::size_t used = 0;
            axis.values.push_back(std::stoi(v, &used));
            if (used != v.size())
                throw std::invalid_argument(v);
        } catch (const std::exception&) {
            throw UsageError("bad axis value '" + v + "' in '" + spec + "'");
        }
    }
    return axis;
}

std::vector<double> parse_snrs(const std::string& spec) {
    std::vector<double> out;
    for (const auto& v : split(spec, ',')) {
        if (v == "inf" || v == "+inf")
            out.push_back(std::numeric_limits<double>::infinity());
        else
            try {
                out.push_back(io::parse_double(v));
            } catch (const io::ParseError&) {
                throw UsageError("bad SNR value '" + v + "'");
            }
    }
    return out;
}

// "vhm:1,vhm:6,mmv:6"
std::vector<SweepSeries> parse_series(const std::string& spec) {
    std::vector<SweepSeries> out;
    for (const auto& item : split(spec, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2)
            throw UsageError("series must look like estimator:rows (got '" + item + "')");
        SweepSeries se;
        se.estimator = parse_estimator(parts[0]);
        try {
            se.rows = std::stoi(parts[1]);
        } catch (const std::exception&) {
            throw UsageError("bad row count in '" + item + "'");
        }
        out.push_back(se);
    }
    return out;
}

void print_progress(std::size_t done, std::size_t total, const std::string& msg) {
    std::cerr << "[" << done << "/" << total << "] " << msg << "\n";
}

// Turns {"n": 64, "snr": [0, 10]} into {"--n", "64", "--snr", "0,10"}.
std::vector<std::string> config_args(const std::string& path) {
    const auto j = io::parse_json(io::read_text(path));
    if (!j.is_object())
        throw io::ParseError("config file must hold a JSON object");
    auto scalar = [](const io::json& v) -> std::string {
        if (v.is_string())
            return v.get<std::string>();
        if (v.is_number_integer())
            return std::to_string(v.get<long long>());
        if (v.is_number())
            return io::format_double(v.get<double>());
        throw io::ParseError("config values must be strings, numbers, booleans or arrays");
    };
    std::vector<std::string> args;
    for (const auto& [key, value] : j.items()) {
        if (value.is_boolean()) {
            if (value.get<bool>())
                args.push_back("--" + key);
            continue;
        }
        std::string text;
        if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i)
                text += (i ? "," : "") + scalar(value[i]);
        } else {
            text = scalar(value);
        }
        args.push_back("--" + key);
        args.push_back(text);
    }
    return args;
}

struct SynthOpts {
    int n = 64, s = 3, r = 4;
    std::uint64_t seed = 0;
    std::string distribution = "gaussian";
    std::string law = "gaussian";
    double delta = 0.0;
    std::string out = ".";
};

int cmd_synth(const SynthOpts& o) {
    if (o.n < 1 || o.s < 1 || o.r < 1)
        throw UsageError("synth: n, s and r must be positive");
    ModelSampling sampling;
    sampling.orients = parse_orientation_law(o.law);
    sampling.min_separation = o.delta;
    const auto p = make_instance(o.n, o.s, o.r, o.seed, parse_distribution(o.distribution), sampling);
    const auto inc = incoherence_diagnostic(p.model, LiftShape::balanced(o.n, o.s));

    ensure_dir(o.out);
    io::write_text(out_path(o.out, "model.json"), io::model_to_json({o.n, p.model, p.B}).dump(2) + "\n");
    io::write_text(out_path(o.out, "X.csv"), io::matrix_to_csv(p.X));
    io::write_text(out_path(o.out, "y.csv"), io::vector_to_csv(p.y));
    std::cout << "n=" << o.n << " s=" << o.s << " r=" << o.r << " mu1=" << inc.mu1 << "\n";
    return kExitOk;
}

struct SolveOpts {
    std::string model, y, truth, out = ".";
    double rho = 1.0, tol = 1e-7;
    int max_iters = 5000;
    int rank_cap = 0;
};

int cmd_solve(const SolveOpts& o) {
    const auto doc = io::model_from_json(io::parse_json(io::read_text(o.model)));
    const VectorXcd y = io::vector_from_csv(io::read_text(o.y));
    if (y.size() != doc.n)
        throw io::ParseError("y.csv length does not match n in the model file");
    SolverConfig cfg;
    cfg.rho = o.rho;
    cfg.tol_rel = o.tol;
    cfg.max_iters = o.max_iters;
    if (o.rank_cap > 0)
        cfg.svt_rank_cap = o.rank_cap;

    const auto rep = solve_vhl(y, doc.B, LiftShape::balanced(doc.n, doc.B.s()), cfg);
    std::optional<double> rel;
    if (!o.truth.empty())
        rel = relative_error(rep.X_hat, io::matrix_from_csv(io::read_text(o.truth)));

    ensure_dir(o.out);
    io::write_text(out_path(o.out, "report.json"), io::report_to_json(rep, rel).dump(2) + "\n");
    io::write_text(out_path(o.out, "Xhat.csv"), io::matrix_to_csv(rep.X_hat));
    std::cout << "iters=" << rep.iters << " converged=" << (rep.converged ? "yes" : "no")
              << " nuclear_norm=" << rep.nuclear_norm;
    if (rel)
        std::cout << " relative_error=" << *rel;
    std::cout << "\n";
    return rep.converged ? kExitOk : kExitNotConverged;
}

struct MusicOpts {
    std::string x, model, out = ".";
    int r = 0;
    std::string estimator = "vhm";
    int row = 0;
    int rows = 0;
    int grid = 10000;
    bool svg = false;
    bool refine = false;
};

int cmd_music(const MusicOpts& o) {
    const DataMatrix X = io::matrix_from_csv(io::read_text(o.x));
    if (o.r < 1)
        throw UsageError("music: r must be positive");
    const Estimator est = parse_estimator(o.estimator);
    DataMatrix used;
    if (est == Estimator::Single) {
        if (o.row < 0 || o.row >= X.rows())
            throw UsageError("music: --row outside the data matrix");
        used = X.row(o.row);
    } else {
        const Index k = o.rows > 0 ? o.rows : X.rows();
        if (k > X.rows())
            throw UsageError("music: --rows exceeds the number of rows in X");
        used = X.topRows(k);
    }
    const auto fe = estimate_frequencies(used, o.r, est, uniform_grid(o.grid));
    const double step = 1.0 / static_cast<double>(o.grid);
    const auto taus = o.refine ? refine_peaks(fe.noise, fe.peaks.taus, step) : fe.peaks.taus;
    const auto src = recover_amplitudes(X, taus);

    std::optional<MatrixXcd> psf;
    std::vector<double> truth;
    if (!o.model.empty()) {
        const auto doc = io::model_from_json(io::parse_json(io::read_text(o.model)));
        truth = doc.model.taus;
        if (doc.B.s() == src.orients.rows() && doc.B.n() == X.cols())
            psf = doc.B.entries * src.orients;
    }

    ensure_dir(o.out);
    io::write_text(out_path(o.out, "pseudospectrum.csv"), io::curve_to_csv(fe.curve));
    io::write_text(out_path(o.out, "sources.json"), io::sources_to_json(src, psf).dump(2) + "\n");
    if (o.svg)
        io::write_text(out_path(o.out, "pseudospectrum.svg"), io::pseudospectrum_svg(fe.curve, fe.peaks.taus, truth));
    std::cout << "taus:";
    for (double t : taus)
        std::cout << " " << t;
    if (fe.peaks.padded)
        std::cout << " (padded: fewer local maxima than r)";
    std::cout << "\n";
    return kExitOk;
}

struct PhaseOpts {
    std::string rows = "r=1,2,4,8", cols = "s=1,2,4,8";
    int n = 64, r = 4, s = 4, trials = 20;
    double threshold = 1e-3, delta = 0.0;
    std::uint64_t seed = 0;
    std::string distribution = "gaussian";
    double rho = 1.0, tol = 1e-7;
    int max_iters = 5000;
    std::string out = ".";
};

int cmd_phase_transition(const PhaseOpts& o, unsigned threads) {
    PhaseTransitionConfig cfg;
    cfg.rows = parse_axis(o.rows);
    cfg.cols = parse_axis(o.cols);
    cfg.n = o.n;
    cfg.r = o.r;
    cfg.s = o.s;
    cfg.trials = o.trials;
    cfg.threshold = o.threshold;
    cfg.min_separation = o.delta;
    cfg.base_seed = o.seed;
    cfg.distribution = parse_distribution(o.distribution);
    cfg.solver.rho = o.rho;
    cfg.solver.tol_rel = o.tol;
    cfg.solver.max_iters = o.max_iters;
    cfg.threads = threads;
    cfg.validate();

    ensure_dir(o.out);
    const auto grid = run_phase_transition(cfg, print_progress);
    io::write_text(out_path(o.out, "grid.csv"), io::grid_to_csv(grid));
    io::write_text(out_path(o.out, "grid.svg"), io::heatmap_svg(grid));
    return kExitOk;
}

struct SweepOpts {
    int n = 64, r = 4, s = 6, trials = 100, grid = 10000;
    std::string snr = "0,10,20,30,40";
    std::string series = "vhm:1,vhm:2,vhm:4,vhm:6";
    std::string law = "gaussian", metric = "plain", noise = "complex";
    double delta = -1.0;
    std::uint64_t seed = 0;
    std::string out = ".";
};

int cmd_snr_sweep(const SweepOpts& o, unsigned threads) {
    SweepConfig cfg;
    cfg.n = o.n;
    cfg.r = o.r;
    cfg.s = o.s;
    cfg.trials = o.trials;
    cfg.grid_points = o.grid;
    cfg.snrs = parse_snrs(o.snr);
    cfg.series = parse_series(o.series);
    cfg.law = parse_orientation_law(o.law);
    cfg.metric = parse_metric(o.metric);
    if (o.noise != "complex" && o.noise != "real")
        throw UsageError("noise must be complex or real");
    cfg.noise = o.noise == "complex" ? NoiseKind::Complex : NoiseKind::Real;
    cfg.min_separation = o.delta >= 0.0 ? o.delta : 1.0 / o.n;
    cfg.base_seed = o.seed;
    cfg.threads = threads;
    cfg.validate();

    ensure_dir(o.out);
    const auto res = run_snr_sweep(cfg, print_progress);
    io::write_text(out_path(o.out, "sweep.csv"), io::sweep_to_csv(res));
    io::write_text(out_path(o.out, "sweep.svg"), io::sweep_svg(res));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind super-resolution via the vectorized Hankel lift"};
    app.require_subcommand(1);
    app.fallthrough();
    // Config-file values are injected ahead of the real flags; the last
    // occurrence wins, so flags override the file.
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string config_path;
    unsigned threads = 1;
    app.add_option("--config", config_path, "JSON file with default flag values");
    app.add_option("--threads", threads, "Worker threads for the experiment harnesses")->check(CLI::Range(1u, 1024u));

    std::function<int()> run;

    SynthOpts so;
    auto* synth = app.add_subcommand("synth", "Sample a model and write model.json, X.csv, y.csv");
    synth->add_option("--n", so.n, "Number of samples");
    synth->add_option("--s", so.s, "Subspace dimension");
    synth->add_option("--r", so.r, "Number of point sources");
    synth->add_option("--seed", so.seed, "RNG seed");
    synth->add_option("--distribution", so.distribution, "gaussian | complex-gaussian | rademacher | dft");
    synth->add_option("--law", so.law, "Orientation law: gaussian | bernoulli");
    synth->add_option("--delta", so.delta, "Minimum wraparound separation");
    synth->add_option("--out", so.out, "Output directory");
    synth->callback([&] { run = [&] { return cmd_synth(so); }; });

    SolveOpts sv;
    auto* solve = app.add_subcommand("solve", "Recover X from y and B; writes report.json, Xhat.csv");
    solve->add_option("--model", sv.model, "model.json holding B")->required();
    solve->add_option("--y", sv.y, "Measurement CSV")->required();
    solve->add_option("--truth", sv.truth, "Optional ground-truth X.csv for the relative error");
    solve->add_option("--rho", sv.rho, "ADMM penalty");
    solve->add_option("--tol", sv.tol, "Relative residual tolerance");
    solve->add_option("--max-iters", sv.max_iters, "Iteration limit");
    solve->add_option("--rank-cap", sv.rank_cap, "Keep at most this many singular values per SVT (0 = off)");
    solve->add_option("--out", sv.out, "Output directory");
    solve->callback([&] { run = [&] { return cmd_solve(sv); }; });

    MusicOpts mo;
    auto* music = app.add_subcommand("music", "Estimate frequencies; writes pseudospectrum.csv, sources.json");
    music->add_option("--x", mo.x, "Data matrix CSV")->required();
    music->add_option("--r", mo.r, "Model order")->required();
    music->add_option("--estimator", mo.estimator, "vhm | single | mmv");
    music->add_option("--row", mo.row, "Row used by the single-snapshot estimator");
    music->add_option("--rows,--s", mo.rows, "Use only the first k rows (vhm, mmv)");
    music->add_option("--grid", mo.grid, "Number of grid points on [0,1)");
    music->add_option("--model", mo.model, "Optional model.json: marks true frequencies, adds g_k = B h_k");
    music->add_flag("--svg", mo.svg, "Also write pseudospectrum.svg");
    music->add_flag("--refine", mo.refine, "Polish peaks off the grid before the amplitude fit");
    music->add_option("--out", mo.out, "Output directory");
    music->callback([&] { run = [&] { return cmd_music(mo); }; });

    PhaseOpts po;
    auto* phase = app.add_subcommand("phase-transition", "Monte Carlo recovery grid; writes grid.csv, grid.svg");
    phase->add_option("--rows", po.rows, "Row axis, e.g. r=1,2,4,8");
    phase->add_option("--cols", po.cols, "Column axis, e.g. s=1,2,4,8");
    phase->add_option("--n", po.n, "Fixed n when not swept");
    phase->add_option("--r", po.r, "Fixed r when not swept");
    phase->add_option("--s", po.s, "Fixed s when not swept");
    phase->add_option("--trials", po.trials, "Trials per cell");
    phase->add_option("--threshold", po.threshold, "Success threshold on the relative error");
    phase->add_option("--delta", po.delta, "Minimum frequency separation");
    phase->add_option("--seed", po.seed, "Base seed");
    phase->add_option("--distribution", po.distribution, "Subspace distribution");
    phase->add_option("--rho", po.rho, "ADMM penalty");
    phase->add_option("--tol", po.tol, "Relative residual tolerance");
    phase->add_option("--max-iters", po.max_iters, "Iteration limit");
    phase->add_option("--out", po.out, "Output directory");
    phase->callback([&] { run = [&] { return cmd_phase_transition(po, threads); }; });

    SweepOpts wo;
    auto* sweep = app.add_subcommand("snr-sweep", "Noisy frequency estimation sweep; writes sweep.csv, sweep.svg");
    sweep->add_option("--n", wo.n, "Number of samples");
    sweep->add_option("--r", wo.r, "Number of sources");
    sweep->add_option("--s", wo.s, "Rows of the synthesized data matrix");
    sweep->add_option("--snr", wo.snr, "Comma-separated SNR list in dB; 'inf' for noiseless");
    sweep->add_option("--series", wo.series, "Comma-separated estimator:rows list, e.g. vhm:1,vhm:6,mmv:6");
    sweep->add_option("--law", wo.law, "Orientation law: gaussian | bernoulli");
    sweep->add_option("--metric", wo.metric, "Hausdorff metric: plain | wraparound");
    sweep->add_option("--noise", wo.noise, "complex | real");
    sweep->add_option("--delta", wo.delta, "Minimum separation (default 1/n)");
    sweep->add_option("--trials", wo.trials, "Trials per SNR");
    sweep->add_option("--grid", wo.grid, "Pseudospectrum grid points");
    sweep->add_option("--seed", wo.seed, "Base seed");
    sweep->add_option("--out", wo.out, "Output directory");
    sweep->callback([&] { run = [&] { return cmd_snr_sweep(wo, threads); }; });

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            std::string path;
            if (args[i] == "--config" && i + 1 < args.size())
                path = args[i + 1];
            else if (args[i].rfind("--config=", 0) == 0)
                path = args[i].substr(9);
            if (path.empty())
                continue;
            // Insert right after the subcommand name.
            const auto sub = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
                return a == "synth" || a == "solve" || a == "music" || a == "phase-transition" || a == "snr-sweep";
            });
            if (sub == args.end())
                break;
            const auto extra = config_args(path);
            args.insert(sub + 1, extra.begin(), extra.end());
            break;
        }
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        return run();
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const io::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
