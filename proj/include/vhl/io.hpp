#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vhl/bench.hpp"
#include "vhl/estimate.hpp"
#include "vhl/model.hpp"
#include "vhl/solver.hpp"

namespace vhl::io {

using json = nlohmann::json;

/// Malformed file contents.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& content);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

// --- JSON -----------------------------------------------------------------

/// Model plus measurement subspace, as written by `synth`.
struct ModelDocument {
    Index n = 0;
    PointSourceModel model;
    SubspaceMatrix B;
};

json model_to_json(const ModelDocument& doc);
ModelDocument model_from_json(const json& j);

json complex_array(const MatrixXcd& M);   // column-major [re, im] pairs
MatrixXcd complex_matrix(const json& j, Index rows, Index cols);

json report_to_json(const SolveReport& rep, std::optional<double> relative_error = std::nullopt);
SolveReport report_from_json(const json& j);

/// psf: optional g_k = B h_k estimates, one column per source.
json sources_to_json(const RecoveredSources& src, const std::optional<MatrixXcd>& psf = std::nullopt);

json parse_json(const std::string& text);

// --- CSV ------------------------------------------------------------------
// Complex values occupy two adjacent columns re_<name>, im_<name>.

/// One line per matrix row; header re_0,im_0,...,re_{c-1},im_{c-1}.
std::string matrix_to_csv(const MatrixXcd& M);
MatrixXcd matrix_from_csv(const std::string& text);

/// Header j,re_y,im_y; one line per entry.
std::string vector_to_csv(const VectorXcd& y);
VectorXcd vector_from_csv(const std::string& text);

/// Header tau,f.
std::string curve_to_csv(const PseudospectrumCurve& curve);

/// Header <row axis>,<col axis>,count; one line per cell in row-major order.
std::string grid_to_csv(const TrialGrid& grid);

/// Header snr,estimator,mean_error; one line per (snr, series).
std::string sweep_to_csv(const SweepResult& res);

// --- SVG (800 x 600, inline styles) ----------------------------------------

std::string heatmap_svg(const TrialGrid& grid);
std::string sweep_svg(const SweepResult& res);
std::string pseudospectrum_svg(const PseudospectrumCurve& curve, const std::vector<double>& peaks,
                               const std::vector<double>& truth = {});

} // namespace vhl::io
