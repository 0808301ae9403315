#include "vhl/bench.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace vhl {

double relative_error(const DataMatrix& X_hat, const DataMatrix& X_ref) {
    if (X_hat.rows() != X_ref.rows() || X_hat.cols() != X_ref.cols())
        throw std::invalid_argument("relative_error: shape mismatch");
    const double diff = (X_hat - X_ref).norm();
    const double ref = X_ref.norm();
    if (ref == 0.0)
        return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / ref;
}

std::string_view to_string(HausdorffMetric m) {
    return m == HausdorffMetric::Plain ? "plain" : "wraparound";
}

HausdorffMetric parse_metric(std::string_view name) {
    if (name == "plain") return HausdorffMetric::Plain;
    if (name == "wraparound") return HausdorffMetric::Wraparound;
    throw std::invalid_argument("unknown Hausdorff metric '" + std::string(name) + "'");
}

double hausdorff(const std::vector<double>& truth, const std::vector<double>& estimate, HausdorffMetric metric) {
    if (truth.empty() || estimate.empty())
        throw std::invalid_argument("hausdorff: both sets must be nonempty");
    auto dist = [metric](double a, double b) {
        return metric == HausdorffMetric::Plain ? std::abs(a - b) : wrap_distance(a, b);
    };
    auto directed = [&](const std::vector<double>& from, const std::vector<double>& to) {
        double worst = 0.0;
        for (double a : from) {
            double best = std::numeric_limits<double>::infinity();
            for (double b : to)
                best = std::min(best, dist(a, b));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(truth, estimate), directed(estimate, truth));
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t trial) {
    return splitmix64(splitmix64(splitmix64(base) ^ cell) ^ trial);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
}

ProblemInstance make_instance(Index n, Index s, Index r, std::uint64_t seed, SubspaceDistribution dist,
                              const ModelSampling& sampling) {
    ProblemInstance p;
    p.model = sample_model(r, s, derive_seed(seed, 0), sampling);
    p.B = sample_subspace(dist, n, s, derive_seed(seed, 1));
    p.X = synthesize_data_matrix(p.model, n);
    p.y = apply_A(p.X, p.B);
    return p;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(err_mutex);
                        if (!first_error)
                            first_error = std::current_exception();
                    }
                }
            });
    }
    if (first_error)
        std::rethrow_exception(first_error);
}

namespace {

void check_axis(const Axis& axis) {
    if (axis.name != "n" && axis.name != "r" && axis.name != "s")
        throw std::invalid_argument("axis name must be one of n, r, s (got '" + axis.name + "')");
    if (axis.values.empty())
        throw std::invalid_argument("axis '" + axis.name + "' has no values");
    for (int v : axis.values)
        if (v < 1)
            throw std::invalid_argument("axis '" + axis.name + "' values must be positive");
}

} // namespace

void PhaseTransitionConfig::validate() const {
    check_axis(rows);
    check_axis(cols);
    if (rows.name == cols.name)
        throw std::invalid_argument("phase transition axes must differ");
    if (n < 1 || r < 1 || s < 1)
        throw std::invalid_argument("phase transition: n, r, s must be positive");
    if (trials < 1)
        throw std::invalid_argument("phase transition: trials must be at least 1");
    if (!(threshold > 0.0))
        throw std::invalid_argument("phase transition: threshold must be positive");
    solver.validate();
}

std::vector<int> TrialGrid::successes_at(double thr) const {
    std::vector<int> out(rows.values.size() * cols.values.size(), 0);
    const auto t = static_cast<std::size_t>(trials);
    for (std::size_t c = 0; c < out.size(); ++c)
        for (std::size_t k = 0; k < t; ++k)
            if (errors[c * t + k] < thr)
                ++out[c];
    return out;
}

TrialOutcome run_recovery_trial(int n, int r, int s, std::uint64_t seed, const PhaseTransitionConfig& config) {
    TrialOutcome out;
    try {
        ModelSampling sampling;
        sampling.min_separation = config.min_separation;
        const auto p = make_instance(n, s, r, seed, config.distribution, sampling);
        const auto rep = solve_vhl(p.y, p.B, LiftShape::balanced(n, s), config.solver);
        out.relative_error = relative_error(rep.X_hat, p.X);
        out.solver_converged = rep.converged;
    } catch (const std::exception&) {
        out.failed = true;
        out.relative_error = std::numeric_limits<double>::infinity();
    }
    return out;
}

TrialGrid run_phase_transition(const PhaseTransitionConfig& config, const ProgressFn& progress) {
    config.validate();
    TrialGrid grid;
    grid.rows = config.rows;
    grid.cols = config.cols;
    grid.trials = config.trials;
    grid.threshold = config.threshold;
    grid.base_seed = config.base_seed;

    const std::size_t nr = config.rows.values.size();
    const std::size_t nc = config.cols.values.size();
    const auto trials = static_cast<std::size_t>(config.trials);
    const std::size_t total = nr * nc * trials;
    grid.errors.assign(total, 0.0);

    std::mutex progress_mutex;
    std::size_t done = 0;
    parallel_for(total, config.threads, [&](std::size_t task) {
        const std::size_t cell = task / trials;
        const std::size_t t = task % trials;
        int dims[3] = {config.n, config.r, config.s};
        auto set = [&](const std::string& name, int v) { dims[name == "n" ? 0 : name == "r" ? 1 : 2] = v; };
        set(config.rows.name, config.rows.values[cell / nc]);
        set(config.cols.name, config.cols.values[cell % nc]);

        const auto outcome = run_recovery_trial(dims[0], dims[1], dims[2], trial_seed(config.base_seed, cell, t), config);
        grid.errors[task] = outcome.relative_error;
        if (progress) {
            std::ostringstream msg;
            msg << "n=" << dims[0] << " r=" << dims[1] << " s=" << dims[2] << " trial " << t
                << " rel_err=" << outcome.relative_error;
            std::lock_guard lock(progress_mutex);
            progress(++done, total, msg.str());
        }
    });

    grid.successes = grid.successes_at(config.threshold);
    return grid;
}

std::string SweepSeries::label() const {
    return std::string(to_string(estimator)) + "-" + std::to_string(rows);
}

void SweepConfig::validate() const {
    if (n < 2 || r < 1 || s < 1)
        throw std::invalid_argument("snr sweep: need n >= 2, r >= 1, s >= 1");
    if (trials < 1)
        throw std::invalid_argument("snr sweep: trials must be at least 1");
    if (snrs.empty() || series.empty())
        throw std::invalid_argument("snr sweep: need at least one SNR and one estimator");
    for (double v : snrs)
        if (std::isnan(v) || v == -std::numeric_limits<double>::infinity())
            throw std::invalid_argument("snr sweep: SNR must be finite or +inf");
    if (static_cast<double>(r) * min_separation > 1.0)
        throw std::invalid_argument("snr sweep: separation infeasible (r * delta > 1)");
    if (grid_points < r)
        throw std::invalid_argument("snr sweep: grid smaller than r");
    const LiftShape shape = LiftShape::balanced(n, 1);
    for (const auto& se : series) {
        if (se.rows < 1 || se.rows > s)
            throw std::invalid_argument("snr sweep: series " + se.label() + " uses rows outside [1, s]");
        if (se.estimator == Estimator::MMV && se.rows < r)
            throw std::invalid_argument("snr sweep: MMV needs rows >= r (" + se.label() + ")");
        if (se.estimator == Estimator::Single && se.rows != 1)
            throw std::invalid_argument("snr sweep: single-snapshot series must use one row");
        if (se.estimator != Estimator::MMV && r >= shape.n2)
            throw std::invalid_argument("snr sweep: r must be below n2 for Hankel MUSIC");
    }
}

SweepResult run_snr_sweep(const SweepConfig& config, const ProgressFn& progress) {
    config.validate();
    const std::size_t ns = config.snrs.size();
    const std::size_t ne = config.series.size();
    const auto trials = static_cast<std::size_t>(config.trials);
    const std::vector<double> grid = uniform_grid(config.grid_points);

    // errors[(snr * trials + t) * ne + e]
    std::vector<double> errors(ns * trials * ne, 0.0);
    std::vector<char> failed(errors.size(), 0);

    std::mutex progress_mutex;
    std::size_t done = 0;
    const std::size_t total = ns * trials;
    parallel_for(total, config.threads, [&](std::size_t task) {
        const std::size_t si = task / trials;
        const std::size_t t = task % trials;
        const std::uint64_t seed = trial_seed(config.base_seed, si, t);

        ModelSampling sampling;
        sampling.orients = config.law;
        sampling.min_separation = config.min_separation;
        const auto model = sample_model(config.r, config.s, derive_seed(seed, 0), sampling);
        const DataMatrix clean = synthesize_data_matrix(model, config.n);
        const DataMatrix X = add_noise(clean, config.snrs[si], derive_seed(seed, 2), config.noise);

        for (std::size_t e = 0; e < ne; ++e) {
            const auto& se = config.series[e];
            const std::size_t slot = task * ne + e;
            try {
                const auto fe = estimate_frequencies(X.topRows(se.rows), config.r, se.estimator, grid);
                errors[slot] = hausdorff(model.taus, fe.peaks.taus, config.metric);
            } catch (const std::exception&) {
                // Largest possible distance on [0,1).
                errors[slot] = 1.0;
                failed[slot] = 1;
            }
        }
        if (progress) {
            std::ostringstream msg;
            msg << "snr=" << config.snrs[si] << " trial " << t;
            std::lock_guard lock(progress_mutex);
            progress(++done, total, msg.str());
        }
    });

    SweepResult res;
    res.snrs = config.snrs;
    res.series = config.series;
    res.trials = config.trials;
    res.mean_errors.assign(ne, std::vector<double>(ns, 0.0));
    res.failures.assign(ne, std::vector<int>(ns, 0));
    for (std::size_t e = 0; e < ne; ++e)
        for (std::size_t si = 0; si < ns; ++si) {
            double sum = 0.0;
            for (std::size_t t = 0; t < trials; ++t) {
                const std::size_t slot = (si * trials + t) * ne + e;
                sum += errors[slot];
                res.failures[e][si] += failed[slot];
            }
            res.mean_errors[e][si] = sum / static_cast<double>(trials);
        }
    return res;
}

} // namespace vhl
