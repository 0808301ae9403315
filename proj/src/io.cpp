#include "vhl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace vhl::io {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("failed reading '" + path + "'");
    return text;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ParseError("not a number: '" + std::string(text) + "'");
    return v;
}

// --- JSON -----------------------------------------------------------------

json complex_array(const MatrixXcd& M) {
    json arr = json::array();
    for (Index k = 0; k < M.cols(); ++k)
        for (Index i = 0; i < M.rows(); ++i)
            arr.push_back({M(i, k).real(), M(i, k).imag()});
    return arr;
}

MatrixXcd complex_matrix(const json& j, Index rows, Index cols) {
    if (!j.is_array() || static_cast<Index>(j.size()) != rows * cols)
        throw ParseError("complex array has wrong length (expected " + std::to_string(rows * cols) + ")");
    MatrixXcd M(rows, cols);
    std::size_t idx = 0;
    for (Index k = 0; k < cols; ++k)
        for (Index i = 0; i < rows; ++i) {
            const json& e = j[idx++];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw ParseError("complex entries must be [re, im] pairs");
            M(i, k) = cd(e[0].get<double>(), e[1].get<double>());
        }
    return M;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

json model_to_json(const ModelDocument& doc) {
    json j;
    j["n"] = doc.n;
    j["s"] = doc.model.s();
    j["r"] = doc.model.r();
    j["taus"] = doc.model.taus;
    j["amps"] = complex_array(doc.model.amps);
    j["orients"] = complex_array(doc.model.orients);
    j["B"] = complex_array(doc.B.entries);
    j["distribution"] = std::string(to_string(doc.B.distribution));
    j["seed"] = doc.B.seed;
    return j;
}

ModelDocument model_from_json(const json& j) {
    try {
        ModelDocument doc;
        doc.n = j.at("n").get<Index>();
        const auto s = j.at("s").get<Index>();
        const auto r = j.at("r").get<Index>();
        if (doc.n < 1 || s < 1 || r < 1)
            throw ParseError("model: n, s, r must be positive");
        doc.model.taus = j.at("taus").get<std::vector<double>>();
        if (static_cast<Index>(doc.model.taus.size()) != r)
            throw ParseError("model: taus length differs from r");
        doc.model.amps = complex_matrix(j.at("amps"), r, 1);
        doc.model.orients = complex_matrix(j.at("orients"), s, r);
        doc.B.entries = complex_matrix(j.at("B"), doc.n, s);
        doc.B.distribution = parse_distribution(j.at("distribution").get<std::string>());
        doc.B.seed = j.at("seed").get<std::uint64_t>();
        doc.model.validate();
        return doc;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
}

json report_to_json(const SolveReport& rep, std::optional<double> rel) {
    json j;
    j["iters"] = rep.iters;
    j["converged"] = rep.converged;
    j["primal_residual"] = rep.primal_residual;
    j["dual_residual"] = rep.dual_residual;
    j["nuclear_norm"] = rep.nuclear_norm;
    if (rel)
        j["relative_error"] = *rel;
    j["rows"] = rep.X_hat.rows();
    j["cols"] = rep.X_hat.cols();
    j["X_hat"] = complex_array(rep.X_hat);
    return j;
}

SolveReport report_from_json(const json& j) {
    try {
        SolveReport rep;
        rep.iters = j.at("iters").get<int>();
        rep.converged = j.at("converged").get<bool>();
        rep.primal_residual = j.at("primal_residual").get<double>();
        rep.dual_residual = j.at("dual_residual").get<double>();
        rep.nuclear_norm = j.at("nuclear_norm").get<double>();
        rep.X_hat = complex_matrix(j.at("X_hat"), j.at("rows").get<Index>(), j.at("cols").get<Index>());
        return rep;
    } catch (const json::exception& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
}

json sources_to_json(const RecoveredSources& src, const std::optional<MatrixXcd>& psf) {
    json j;
    j["r"] = src.taus.size();
    j["s"] = src.orients.rows();
    j["taus"] = src.taus;
    j["amps"] = std::vector<double>(src.amps.data(), src.amps.data() + src.amps.size());
    j["orients"] = complex_array(src.orients);
    j["residual"] = src.residual;
    j["condition"] = src.condition;
    j["ill_conditioned"] = src.ill_conditioned;
    if (psf) {
        j["psf_rows"] = psf->rows();
        j["psf"] = complex_array(*psf);
    }
    return j;
}

// --- CSV ------------------------------------------------------------------

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

} // namespace

std::string matrix_to_csv(const MatrixXcd& M) {
    std::string out;
    for (Index k = 0; k < M.cols(); ++k) {
        if (k)
            out += ',';
        out += "re_" + std::to_string(k) + ",im_" + std::to_string(k);
    }
    out += '\n';
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index k = 0; k < M.cols(); ++k) {
            if (k)
                out += ',';
            out += format_double(M(i, k).real());
            out += ',';
            out += format_double(M(i, k).imag());
        }
        out += '\n';
    }
    return out;
}

MatrixXcd matrix_from_csv(const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.empty())
        throw ParseError("matrix CSV: empty input");
    const auto header = split_fields(lines[0]);
    if (header.size() % 2 != 0)
        throw ParseError("matrix CSV: header must list re_/im_ column pairs");
    const auto cols = static_cast<Index>(header.size() / 2);
    for (Index k = 0; k < cols; ++k)
        if (header[2 * k] != "re_" + std::to_string(k) || header[2 * k + 1] != "im_" + std::to_string(k))
            throw ParseError("matrix CSV: unexpected header field '" + std::string(header[2 * k]) + "'");
    const auto rows = static_cast<Index>(lines.size() - 1);
    if (rows < 1)
        throw ParseError("matrix CSV: no data rows");
    MatrixXcd M(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const auto fields = split_fields(lines[static_cast<std::size_t>(i + 1)]);
        if (fields.size() != header.size())
            throw ParseError("matrix CSV: line " + std::to_string(i + 2) + " has " + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(header.size()));
        for (Index k = 0; k < cols; ++k)
            M(i, k) = cd(parse_double(fields[2 * k]), parse_double(fields[2 * k + 1]));
    }
    return M;
}

std::string vector_to_csv(const VectorXcd& y) {
    std::string out = "j,re_y,im_y\n";
    for (Index j = 0; j < y.size(); ++j)
        out += std::to_string(j) + ',' + format_double(y(j).real()) + ',' + format_double(y(j).imag()) + '\n';
    return out;
}

VectorXcd vector_from_csv(const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "j,re_y,im_y")
        throw ParseError("vector CSV: expected header j,re_y,im_y");
    if (lines.size() < 2)
        throw ParseError("vector CSV: no data rows");
    VectorXcd y(static_cast<Index>(lines.size() - 1));
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_fields(lines[i]);
        if (fields.size() != 3)
            throw ParseError("vector CSV: line " + std::to_string(i + 1) + " needs 3 fields");
        if (parse_double(fields[0]) != static_cast<double>(i - 1))
            throw ParseError("vector CSV: index column out of sequence at line " + std::to_string(i + 1));
        y(static_cast<Index>(i - 1)) = cd(parse_double(fields[1]), parse_double(fields[2]));
    }
    return y;
}

std::string curve_to_csv(const PseudospectrumCurve& curve) {
    std::string out = "tau,f\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out += format_double(curve.grid[i]) + ',' + format_double(curve.values[i]) + '\n';
    return out;
}

std::string grid_to_csv(const TrialGrid& grid) {
    std::string out = grid.rows.name + ',' + grid.cols.name + ",count\n";
    for (std::size_t i = 0; i < grid.rows.values.size(); ++i)
        for (std::size_t j = 0; j < grid.cols.values.size(); ++j)
            out += std::to_string(grid.rows.values[i]) + ',' + std::to_string(grid.cols.values[j]) + ',' +
                   std::to_string(grid.count(i, j)) + '\n';
    return out;
}

std::string sweep_to_csv(const SweepResult& res) {
    std::string out = "snr,estimator,mean_error\n";
    for (std::size_t si = 0; si < res.snrs.size(); ++si)
        for (std::size_t e = 0; e < res.series.size(); ++e)
            out += format_double(res.snrs[si]) + ',' + res.series[e].label() + ',' +
                   format_double(res.mean_errors[e][si]) + '\n';
    return out;
}

// --- SVG ------------------------------------------------------------------

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 90, kRight = 40, kTop = 50, kBottom = 70;

std::string svg_open(const std::string& title) {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" style=\"fill:#ffffff\"/>\n"
      << "<text x=\"400\" y=\"28\" style=\"font-family:sans-serif;font-size:18px;text-anchor:middle\">" << title
      << "</text>\n";
    return o.str();
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream o;
    o.precision(prec);
    o << v;
    return o.str();
}

std::string axis_labels(const std::string& xlabel, const std::string& ylabel) {
    std::ostringstream o;
    o << "<text x=\"" << (kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\"" << (kHeight - 20)
      << "\" style=\"font-family:sans-serif;font-size:15px;text-anchor:middle\">" << xlabel << "</text>\n"
      << "<text x=\"24\" y=\"" << (kTop + (kHeight - kTop - kBottom) / 2) << "\" transform=\"rotate(-90 24 "
      << (kTop + (kHeight - kTop - kBottom) / 2)
      << ")\" style=\"font-family:sans-serif;font-size:15px;text-anchor:middle\">" << ylabel << "</text>\n";
    return o.str();
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

} // namespace

std::string heatmap_svg(const TrialGrid& grid) {
    // 8-step ramp from black (no successes) to white (all trials succeed).
    static const char* ramp[8] = {"#000000", "#242424", "#494949", "#6d6d6d",
                                  "#929292", "#b6b6b6", "#dbdbdb", "#ffffff"};
    const auto nr = grid.rows.values.size();
    const auto nc = grid.cols.values.size();
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const double cw = pw / static_cast<double>(nc);
    const double ch = ph / static_cast<double>(nr);

    std::ostringstream o;
    o << svg_open("Successful recoveries out of " + std::to_string(grid.trials) + " trials");
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) {
            const int c = grid.count(i, j);
            const int level = std::clamp(c * 8 / std::max(1, grid.trials), 0, 7);
            // first row at the bottom
            const double x = kLeft + static_cast<double>(j) * cw;
            const double y = kTop + static_cast<double>(nr - 1 - i) * ch;
            o << "<rect x=\"" << fmt(x, 6) << "\" y=\"" << fmt(y, 6) << "\" width=\"" << fmt(cw, 6)
              << "\" height=\"" << fmt(ch, 6) << "\" style=\"fill:" << ramp[level]
              << ";stroke:#808080;stroke-width:1\"/>\n";
            o << "<text x=\"" << fmt(x + cw / 2, 6) << "\" y=\"" << fmt(y + ch / 2 + 5, 6)
              << "\" style=\"font-family:sans-serif;font-size:14px;text-anchor:middle;fill:"
              << (level >= 4 ? "#000000" : "#ffffff") << "\">" << c << "</text>\n";
        }
    for (std::size_t j = 0; j < nc; ++j)
        o << "<text x=\"" << fmt(kLeft + (static_cast<double>(j) + 0.5) * cw, 6) << "\" y=\""
          << (kTop + ph + 20) << "\" style=\"font-family:sans-serif;font-size:13px;text-anchor:middle\">"
          << grid.cols.values[j] << "</text>\n";
    for (std::size_t i = 0; i < nr; ++i)
        o << "<text x=\"" << (kLeft - 8) << "\" y=\""
          << fmt(kTop + (static_cast<double>(nr - 1 - i) + 0.5) * ch + 5, 6)
          << "\" style=\"font-family:sans-serif;font-size:13px;text-anchor:end\">" << grid.rows.values[i]
          << "</text>\n";
    o << axis_labels(grid.cols.name, grid.rows.name) << "</svg>\n";
    return o.str();
}

std::string sweep_svg(const SweepResult& res) {
    const double pw = kWidth - kLeft - kRight - 120;   // room for the legend
    const double ph = kHeight - kTop - kBottom;
    // Infinite SNR is drawn one step past the largest finite value.
    std::vector<double> xs;
    double lo = 0, hi = 1;
    bool first = true;
    for (double v : res.snrs)
        if (std::isfinite(v)) {
            lo = first ? v : std::min(lo, v);
            hi = first ? v : std::max(hi, v);
            first = false;
        }
    const double step = hi > lo ? (hi - lo) / std::max<double>(1, static_cast<double>(res.snrs.size()) - 1) : 1.0;
    for (double v : res.snrs)
        xs.push_back(std::isfinite(v) ? v : hi + step);
    const double xmin = *std::min_element(xs.begin(), xs.end());
    double xmax = *std::max_element(xs.begin(), xs.end());
    if (xmax == xmin)
        xmax = xmin + 1;

    double ymin = std::numeric_limits<double>::infinity(), ymax = 0;
    for (const auto& row : res.mean_errors)
        for (double v : row)
            if (v > 0) {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
    if (!std::isfinite(ymin)) {
        ymin = 1e-6;
        ymax = 1;
    }
    const double lmin = std::floor(std::log10(ymin)), lmax = std::max(lmin + 1, std::ceil(std::log10(ymax)));
    auto X = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double v) {
        const double lv = v > 0 ? std::log10(v) : lmin;
        return kTop + (lmax - lv) / (lmax - lmin) * ph;
    };

    std::ostringstream o;
    o << svg_open("Mean Hausdorff error over " + std::to_string(res.trials) + " trials");
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" style=\"fill:none;stroke:#000000\"/>\n";
    for (double d = lmin; d <= lmax; d += 1)
        o << "<text x=\"" << (kLeft - 6) << "\" y=\"" << fmt(kTop + (lmax - d) / (lmax - lmin) * ph + 4, 6)
          << "\" style=\"font-family:sans-serif;font-size:12px;text-anchor:end\">1e" << d << "</text>\n";
    for (std::size_t si = 0; si < res.snrs.size(); ++si)
        o << "<text x=\"" << fmt(X(xs[si]), 6) << "\" y=\"" << (kTop + ph + 18)
          << "\" style=\"font-family:sans-serif;font-size:12px;text-anchor:middle\">"
          << (std::isfinite(res.snrs[si]) ? fmt(res.snrs[si]) : std::string("inf")) << "</text>\n";
    for (std::size_t e = 0; e < res.series.size(); ++e) {
        const char* color = kPalette[e % std::size(kPalette)];
        o << "<polyline style=\"fill:none;stroke:" << color << ";stroke-width:2\" points=\"";
        for (std::size_t si = 0; si < res.snrs.size(); ++si)
            o << fmt(X(xs[si]), 6) << ',' << fmt(Y(res.mean_errors[e][si]), 6) << ' ';
        o << "\"/>\n";
        const double ly = kTop + 20 + 22 * static_cast<double>(e);
        o << "<line x1=\"" << (kWidth - 140) << "\" y1=\"" << ly << "\" x2=\"" << (kWidth - 110) << "\" y2=\"" << ly
          << "\" style=\"stroke:" << color << ";stroke-width:2\"/>\n"
          << "<text x=\"" << (kWidth - 104) << "\" y=\"" << (ly + 4)
          << "\" style=\"font-family:sans-serif;font-size:13px\">" << res.series[e].label() << "</text>\n";
    }
    o << axis_labels("SNR (dB)", "mean Hausdorff error") << "</svg>\n";
    return o.str();
}

std::string pseudospectrum_svg(const PseudospectrumCurve& curve, const std::vector<double>& peaks,
                               const std::vector<double>& truth) {
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
    for (double v : curve.values) {
        const double lv = std::log10(std::max(v, 1e-300));
        lmin = std::min(lmin, lv);
        lmax = std::max(lmax, lv);
    }
    if (!(lmax > lmin)) {
        lmin -= 1;
        lmax += 1;
    }
    lmin = std::floor(lmin);
    lmax = std::ceil(lmax);
    auto X = [&](double t) { return kLeft + t * pw; };
    auto Y = [&](double v) { return kTop + (lmax - std::log10(std::max(v, 1e-300))) / (lmax - lmin) * ph; };

    std::ostringstream o;
    o << svg_open("MUSIC pseudospectrum");
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" style=\"fill:none;stroke:#000000\"/>\n";
    for (double t : truth)
        o << "<line x1=\"" << fmt(X(t), 6) << "\" y1=\"" << kTop << "\" x2=\"" << fmt(X(t), 6) << "\" y2=\""
          << (kTop + ph) << "\" style=\"stroke:#2ca02c;stroke-dasharray:4,4\"/>\n";
    o << "<polyline style=\"fill:none;stroke:#1f77b4;stroke-width:1\" points=\"";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        o << fmt(X(curve.grid[i]), 6) << ',' << fmt(Y(curve.values[i]), 6) << ' ';
    o << "\"/>\n";
    for (double t : peaks) {
        const auto it = std::lower_bound(curve.grid.begin(), curve.grid.end(), t);
        const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - curve.grid.begin()),
                                                       curve.grid.size() - 1);
        o << "<circle cx=\"" << fmt(X(t), 6) << "\" cy=\"" << fmt(Y(curve.values[idx]), 6)
          << "\" r=\"5\" style=\"fill:none;stroke:#d62728;stroke-width:2\"/>\n";
    }
    for (int k = 0; k <= 10; ++k)
        o << "<text x=\"" << fmt(X(k / 10.0), 6) << "\" y=\"" << (kTop + ph + 18)
          << "\" style=\"font-family:sans-serif;font-size:12px;text-anchor:middle\">" << fmt(k / 10.0) << "</text>\n";
    for (double d = lmin; d <= lmax; d += std::max(1.0, std::ceil((lmax - lmin) / 10)))
        o << "<text x=\"" << (kLeft - 6) << "\" y=\"" << fmt(Y(std::pow(10.0, d)) + 4, 6)
          << "\" style=\"font-family:sans-serif;font-size:12px;text-anchor:end\">1e" << d << "</text>\n";
    o << axis_labels("tau", "f(tau)") << "</svg>\n";
    return o.str();
}

} // namespace vhl::io
