#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vhl/estimate.hpp"
#include "vhl/model.hpp"
#include "vhl/solver.hpp"

namespace vhl {

/// ||X_hat - X_ref||_F / ||X_ref||_F. 0 if both vanish, +inf if only X_ref does.
double relative_error(const DataMatrix& X_hat, const DataMatrix& X_ref);

enum class HausdorffMetric { Plain, Wraparound };

std::string_view to_string(HausdorffMetric m);
HausdorffMetric parse_metric(std::string_view name);

double hausdorff(const std::vector<double>& truth, const std::vector<double>& estimate,
                 HausdorffMetric metric = HausdorffMetric::Plain);

/// Stable per-trial seed derived from (base, cell, trial).
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t trial);

/// Sub-stream of a trial seed (model, subspace, noise, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// A synthesized recovery problem: ground truth, subspace, data and measurements.
struct ProblemInstance {
    PointSourceModel model;
    SubspaceMatrix B;
    DataMatrix X;
    VectorXcd y;
};

/// Draws the model from derive_seed(seed, 0) and B from derive_seed(seed, 1).
ProblemInstance make_instance(Index n, Index s, Index r, std::uint64_t seed,
                              SubspaceDistribution dist = SubspaceDistribution::Gaussian,
                              const ModelSampling& sampling = {});

/// Runs task(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; callers write results into slot i.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

/// Called after each finished trial with (done, total, message).
using ProgressFn = std::function<void(std::size_t, std::size_t, const std::string&)>;

struct Axis {
    std::string name;   // one of "n", "r", "s"
    std::vector<int> values;
};

struct PhaseTransitionConfig {
    Axis rows{"r", {1, 2, 4, 8}};
    Axis cols{"s", {1, 2, 4, 8}};
    // Values for whichever of (n, r, s) is not swept.
    int n = 64;
    int r = 4;
    int s = 4;
    int trials = 20;
    double threshold = 1e-3;
    std::uint64_t base_seed = 0;
    SubspaceDistribution distribution = SubspaceDistribution::Gaussian;
    double min_separation = 0.0;
    SolverConfig solver;
    unsigned threads = 1;

    void validate() const;
};

struct TrialGrid {
    Axis rows;
    Axis cols;
    int trials = 0;
    double threshold = 0.0;
    std::uint64_t base_seed = 0;
    std::vector<int> successes;   // row-major, rows.values.size() x cols.values.size()
    std::vector<double> errors;   // relative error per trial, cell-major; +inf on failure

    int count(std::size_t i, std::size_t j) const { return successes[i * cols.values.size() + j]; }
    /// Success counts re-evaluated at another threshold from the stored errors.
    std::vector<int> successes_at(double threshold) const;
};

/// Outcome of one recovery trial at (n, r, s) with the given seed.
struct TrialOutcome {
    double relative_error = 0.0;
    bool solver_converged = false;
    bool failed = false;   // exception or invalid parameters
};

TrialOutcome run_recovery_trial(int n, int r, int s, std::uint64_t seed, const PhaseTransitionConfig& config);

TrialGrid run_phase_transition(const PhaseTransitionConfig& config, const ProgressFn& progress = {});

struct SweepSeries {
    Estimator estimator = Estimator::VHM;
    int rows = 1;   // use the first `rows` rows of X

    std::string label() const;
};

struct SweepConfig {
    int n = 64;
    int r = 4;
    int s = 6;
    std::vector<double> snrs{0, 10, 20, 30, 40};
    std::vector<SweepSeries> series{{Estimator::VHM, 1}, {Estimator::VHM, 2}, {Estimator::VHM, 4}, {Estimator::VHM, 6}};
    OrientationLaw law = OrientationLaw::Gaussian;
    double min_separation = 1.0 / 64.0;
    int trials = 100;
    std::uint64_t base_seed = 0;
    Index grid_points = 10000;
    NoiseKind noise = NoiseKind::Complex;
    HausdorffMetric metric = HausdorffMetric::Plain;
    unsigned threads = 1;

    void validate() const;
};

struct SweepResult {
    std::vector<double> snrs;
    std::vector<SweepSeries> series;
    int trials = 0;
    std::vector<std::vector<double>> mean_errors;   // [series][snr]
    std::vector<std::vector<int>> failures;         // [series][snr]
};

SweepResult run_snr_sweep(const SweepConfig& config, const ProgressFn& progress = {});

} // namespace vhl
