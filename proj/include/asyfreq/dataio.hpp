#pragma once

// Branching-fraction datasets: CSV/JSON loading, synthetic generation and
// plot-series CSV output.
//
// Dataset CSV:  optional "# label: ..." / "# provenance: ..." lines, then the
// header conc,y_mid,y_lo,y_hi and one row per point, conc strictly increasing.
// Plot CSV:     series,x,y

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "asyfreq/errors.hpp"
#include "asyfreq/fitting.hpp"

namespace asyfreq {

struct Dataset {
    std::string label;
    std::vector<DataPoint> points;
    std::string provenance;

    bool operator==(const Dataset&) const = default;
};

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

namespace dataio {

inline void validate_dataset(const Dataset& ds) {
    for (std::size_t i = 0; i < ds.points.size(); ++i) {
        validate_point(ds.points[i], i);
        if (i > 0 && !(ds.points[i].conc > ds.points[i - 1].conc))
            throw ValidationError("dataset must be sorted by strictly increasing conc (point " + std::to_string(i) +
                                  ")");
    }
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& field, std::size_t line, const char* column) {
    const std::string t = trim(field);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size())
        throw ValidationError("line " + std::to_string(line) + ": " + column + " is not a number: '" + t + "'");
    if (std::isnan(v)) throw ValidationError("line " + std::to_string(line) + ": " + column + " is NaN");
    return v;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace detail

/// Parses the CSV format. Errors name the 1-based line.
inline Dataset parse_csv(std::istream& in, std::string label = "") {
    Dataset ds;
    ds.label = std::move(label);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::vector<std::size_t> row_line;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const std::string body = detail::trim(t.substr(1));
            for (const char* key : {"label:", "provenance:"}) {
                if (body.rfind(key, 0) == 0) {
                    const std::string value = detail::trim(body.substr(std::string(key).size()));
                    (key[0] == 'l' ? ds.label : ds.provenance) = value;
                }
            }
            continue;
        }
        if (!header) {
            std::string compact;
            for (char c : t)
                if (c != ' ' && c != '\t') compact += c;
            if (compact != "conc,y_mid,y_lo,y_hi")
                throw ValidationError("line " + std::to_string(lineno) + ": expected header conc,y_mid,y_lo,y_hi");
            header = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(t);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!t.empty() && t.back() == ',') fields.emplace_back();
        if (fields.size() != 4)
            throw ValidationError("line " + std::to_string(lineno) + ": expected 4 fields, got " +
                                  std::to_string(fields.size()));
        ds.points.push_back({detail::parse_number(fields[0], lineno, "conc"),
                             detail::parse_number(fields[1], lineno, "y_mid"),
                             detail::parse_number(fields[2], lineno, "y_lo"),
                             detail::parse_number(fields[3], lineno, "y_hi")});
        row_line.push_back(lineno);
    }
    if (!header) throw ValidationError("missing header conc,y_mid,y_lo,y_hi");
    for (std::size_t i = 0; i < ds.points.size(); ++i) {
        try {
            validate_point(ds.points[i], i);
            if (i > 0 && !(ds.points[i].conc > ds.points[i - 1].conc))
                throw ValidationError("dataset must be sorted by strictly increasing conc");
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(row_line[i]) + ": " + e.what());
        }
    }
    return ds;
}

/// Accepts an array of points or {"label", "provenance", "points": [...]}.
inline Dataset parse_json(const nlohmann::json& j, std::string label = "") {
    Dataset ds;
    ds.label = std::move(label);
    const nlohmann::json* rows = &j;
    if (j.is_object()) {
        if (!j.contains("points")) throw ValidationError("dataset JSON object needs a 'points' array");
        ds.label = j.value("label", ds.label);
        ds.provenance = j.value("provenance", std::string());
        rows = &j.at("points");
    }
    if (!rows->is_array()) throw ValidationError("dataset JSON must be an array of points");
    for (std::size_t i = 0; i < rows->size(); ++i) {
        const auto& r = (*rows)[i];
        DataPoint p;
        try {
            p = {r.at("conc").get<double>(), r.at("y_mid").get<double>(), r.at("y_lo").get<double>(),
                 r.at("y_hi").get<double>()};
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("row " + std::to_string(i) + ": " + e.what());
        }
        ds.points.push_back(p);
    }
    validate_dataset(ds);
    return ds;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset '" + path.string() + "'");
    const std::string label = path.stem().string();
    if (path.extension() == ".json") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(path.string() + ": " + e.what());
        }
        return parse_json(j, label);
    }
    try {
        return parse_csv(in, label);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

inline void write_csv(const Dataset& ds, std::ostream& out) {
    if (!ds.label.empty()) out << "# label: " << ds.label << '\n';
    if (!ds.provenance.empty()) out << "# provenance: " << ds.provenance << '\n';
    out << "conc,y_mid,y_lo,y_hi\n";
    for (const auto& p : ds.points)
        out << detail::fmt(p.conc) << ',' << detail::fmt(p.y_mid) << ',' << detail::fmt(p.y_lo) << ','
            << detail::fmt(p.y_hi) << '\n';
}

inline void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    validate_dataset(ds);
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    write_csv(ds, out);
}

/// n log-spaced values from lo to hi inclusive.
inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ValidationError("log_spaced needs 0 < lo < hi and n >= 2");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    v.back() = hi;
    return v;
}

struct SyntheticOptions {
    double halfwidth = 0.0;  // interval half-width relative to r
    bool jitter = false;     // shift midpoints uniformly within the half-width
    std::uint64_t seed = 1;
    double monomer_conc = 1.0;
    std::uint32_t n0 = 3;
    std::string label = "synthetic";
};

/// y_mid is the analytical branching fraction at each concentration.
inline Dataset generate_synthetic(const Theta& theta, const Family& family, const std::vector<double>& concs,
                                  const SyntheticOptions& opt = {}) {
    if (concs.empty()) throw ValidationError("generate_synthetic needs at least one concentration");
    if (!(opt.halfwidth >= 0.0) || !std::isfinite(opt.halfwidth))
        throw ValidationError("noise half-width must be a nonnegative fraction");
    FitProblem p;
    p.family = family;
    p.monomer_conc = opt.monomer_conc;
    p.n0 = opt.n0;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    Dataset ds;
    ds.label = opt.label;
    std::ostringstream prov;
    prov << "synthetic: analytical CRP curve, theta=(";
    for (std::size_t k = 0; k < param_count; ++k) prov << (k ? " " : "") << param_names[k] << "=" << theta[k];
    prov << "), halfwidth=" << opt.halfwidth << ", jitter=" << (opt.jitter ? "on" : "off") << ", seed=" << opt.seed;
    ds.provenance = prov.str();

    for (double c : concs) {
        const double r = fitting::forward_model(theta, c, p);
        const double h = opt.halfwidth * r;
        const double mid = std::clamp(opt.jitter ? r + h * unit(rng) : r, 0.0, 1.0);
        ds.points.push_back({c, mid, std::max(0.0, mid - h), std::min(1.0, mid + h)});
    }
    validate_dataset(ds);
    return ds;
}

/// Writes tidy series,x,y CSV. Refuses to create a file when there is nothing
/// to plot.
inline void write_plot_csv(const std::vector<PlotSeries>& series, const std::filesystem::path& path) {
    std::size_t n = 0;
    for (const auto& s : series) n += s.points.size();
    if (n == 0) throw ValidationError("no plot data: the result set is empty");
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << "series,x,y\n";
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) out << s.label << ',' << detail::fmt(x) << ',' << detail::fmt(y) << '\n';
}

/// Data midpoints and bounds plus the model curve on a log grid spanning the data.
inline std::vector<PlotSeries> fit_curve_series(const FitProblem& problem, const Theta& theta,
                                                std::size_t grid_points = 100) {
    if (problem.data.empty()) throw ValidationError("fit curve needs data points");
    std::vector<PlotSeries> out{{"data", {}}, {"data_lo", {}}, {"data_hi", {}}, {"model", {}}};
    for (const auto& p : problem.data) {
        out[0].points.emplace_back(p.conc, p.y_mid);
        out[1].points.emplace_back(p.conc, p.y_lo);
        out[2].points.emplace_back(p.conc, p.y_hi);
    }
    double lo = problem.data.front().conc, hi = problem.data.back().conc;
    std::vector<double> grid;
    if (lo == 0.0) {
        grid.push_back(0.0);
        lo = problem.data.size() > 1 ? problem.data[1].conc : 1.0;
    }
    if (hi > lo) {
        for (double c : log_spaced(lo, hi, grid_points)) grid.push_back(c);
    } else {
        grid.push_back(lo);
    }
    FitProblem analytic = problem;
    analytic.engine = EngineKind::Analytical;
    for (double c : grid) out[3].points.emplace_back(c, fitting::forward_model(theta, c, analytic));
    return out;
}

/// Single-constraint picture with exponential clocks: the closed-form n2/n1
/// as a line over the run index and one simulated ratio per run.
inline std::vector<PlotSeries> mc_scatter_series(std::uint32_t n0, const std::vector<double>& rate_ratios,
                                                 std::uint64_t events, std::size_t runs, std::uint64_t seed) {
    if (rate_ratios.empty() || runs == 0) throw ValidationError("mc scatter needs rate ratios and runs");
    std::vector<PlotSeries> out;
    for (double q : rate_ratios) {
        const auto free_clock = DensitySpec::exponential_rate(1.0);
        const auto constrained = DensitySpec::exponential_rate(q);
        const double exact = asymptotics::solve_single_constraint(free_clock, constrained, n0).ratios.at({1, 0});
        std::ostringstream tag;
        tag << "c2/c1=" << q;
        PlotSeries line{"analytic " + tag.str(), {}}, dots{"mc " + tag.str(), {}};
        const auto model = single_constraint_model(free_clock, constrained, n0);
        for (std::size_t k = 0; k < runs; ++k) {
            const auto res = simulator::run(SimConfig{model, events, simulator::substream_seed(seed, k)});
            line.points.emplace_back(static_cast<double>(k + 1), exact);
            dots.points.emplace_back(static_cast<double>(k + 1), res.ratios.at({1, 0}));
        }
        out.push_back(std::move(line));
        out.push_back(std::move(dots));
    }
    return out;
}

/// Cumulative wall time against iteration for both engines.
inline std::vector<PlotSeries> timing_series(const fitting::BenchmarkReport& report) {
    std::vector<PlotSeries> out{{"analytical", {}}, {"monte_carlo", {}}};
    for (std::size_t i = 0; i < report.analytical.cumulative_seconds.size(); ++i)
        out[0].points.emplace_back(static_cast<double>(i + 1), report.analytical.cumulative_seconds[i]);
    for (std::size_t i = 0; i < report.monte_carlo.cumulative_seconds.size(); ++i)
        out[1].points.emplace_back(static_cast<double>(i + 1), report.monte_carlo.cumulative_seconds[i]);
    return out;
}

}  // namespace dataio
}  // namespace asyfreq
