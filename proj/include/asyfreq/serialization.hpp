#pragma once

// JSON forms of densities, models, results and fit problems.
//
//   density   {"kind": "exp", "tau": 1}  or  {"kind": "linexp", "b": 0.2, "tau": 1}
//   model     {"outcomes": [...], "constraints": [[...]], "clocks": [density...],
//              "ratios": [["r", "p"], ...]}   (ratio pairs by name or index)
//   bounds    an upper bound of null means +infinity

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asyfreq/asymptotics.hpp"
#include "asyfreq/dataio.hpp"
#include "asyfreq/densities.hpp"
#include "asyfreq/errors.hpp"
#include "asyfreq/fitting.hpp"
#include "asyfreq/model.hpp"
#include "asyfreq/simulator.hpp"
#include "asyfreq/winprob.hpp"

namespace asyfreq::io {

using nlohmann::json;

namespace detail {

template <class T>
T get(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ValidationError(where + ": missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + ": '" + key + "' has the wrong type");
    }
}

inline double number_or_inf(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    if (!j.is_number()) throw ValidationError("expected a number or null");
    return j.get<double>();
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

inline DensityKind kind_from(const std::string& s) {
    if (s == "exp" || s == "exponential") return DensityKind::Exponential;
    if (s == "linexp") return DensityKind::LinearExponential;
    throw ValidationError("unknown density kind '" + s + "' (expected exp or linexp)");
}

inline json to_json(const DensitySpec& d) {
    if (d.kind == DensityKind::Exponential) return {{"kind", "exp"}, {"tau", d.tau}};
    return {{"kind", "linexp"}, {"b", d.b}, {"tau", d.tau}};
}

inline DensitySpec density_from(const json& j, const std::string& where = "density") {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    const auto kind = kind_from(detail::get<std::string>(j, "kind", where));
    const double tau = detail::get<double>(j, "tau", where);
    try {
        if (kind == DensityKind::Exponential) {
            if (j.contains("b") && detail::get<double>(j, "b", where) != 0.0)
                throw ValidationError(where + ": exponential density has no b");
            return DensitySpec::exponential(tau);
        }
        return DensitySpec::linexp(detail::get<double>(j, "b", where), tau);
    } catch (const DomainError& e) {
        throw ValidationError(where + ": " + e.what());
    }
}

inline json to_json(const EventModel& m) {
    json clocks = json::array();
    for (const auto& c : m.clocks) clocks.push_back(to_json(c));
    json ratios = json::array();
    for (const auto& [i, k] : m.ratios) ratios.push_back({m.outcomes.at(i), m.outcomes.at(k)});
    return {{"outcomes", m.outcomes}, {"constraints", m.constraints}, {"clocks", clocks}, {"ratios", ratios}};
}

inline EventModel model_from(const json& j) {
    if (!j.is_object()) throw ValidationError("model: expected an object");
    EventModel m;
    m.outcomes = detail::get<std::vector<std::string>>(j, "outcomes", "model");
    m.constraints = detail::get<ConstraintMatrix>(j, "constraints", "model");
    const auto clocks = detail::get<json>(j, "clocks", "model");
    if (!clocks.is_array()) throw ValidationError("model: 'clocks' must be an array");
    for (std::size_t i = 0; i < clocks.size(); ++i)
        m.clocks.push_back(density_from(clocks[i], "model clock " + std::to_string(i)));
    if (j.contains("ratios")) {
        for (const auto& pr : j.at("ratios")) {
            if (!pr.is_array() || pr.size() != 2) throw ValidationError("model: ratio pairs must have two entries");
            auto index = [&](const json& e) -> std::size_t {
                if (e.is_string()) return m.index_of(e.get<std::string>());
                if (e.is_number_unsigned()) return e.get<std::size_t>();
                throw ValidationError("model: ratio entries are outcome names or indices");
            };
            m.ratios.emplace_back(index(pr[0]), index(pr[1]));
        }
    }
    require_valid(m);
    return m;
}

inline json ratio_entry(const std::vector<std::string>& names, const OutcomePair& pr) {
    return {{"numerator", names.at(pr.first)}, {"denominator", names.at(pr.second)}};
}

inline json to_json(const AsymptoticResult& r) {
    json ratios = json::array();
    for (const auto& [pr, v] : r.ratios) {
        auto e = ratio_entry(r.outcomes, pr);
        e["value"] = v;
        ratios.push_back(e);
    }
    return {{"outcomes", r.outcomes}, {"fractions", r.fractions}, {"ratios", ratios}};
}

/// Simulation output without wall-clock fields, so equal inputs give equal files.
inline json to_json(const ReplicateSummary& s, const SimConfig& cfg) {
    const auto& names = cfg.model.outcomes;
    json runs = json::array();
    for (const auto& r : s.runs) {
        json counts = json::object();
        for (std::size_t i = 0; i < names.size(); ++i) counts[names[i]] = r.counts[i];
        json ratios = json::array();
        for (const auto& [pr, v] : r.ratios) {
            auto e = ratio_entry(names, pr);
            e["value"] = detail::finite_or_null(v);
            ratios.push_back(e);
        }
        runs.push_back({{"seed", r.seed}, {"counts", counts}, {"ratios", ratios}});
    }
    json summary = json::array();
    for (const auto& [pr, v] : s.ratios) {
        auto e = ratio_entry(names, pr);
        e["mean"] = detail::finite_or_null(v.mean);
        e["std_dev"] = v.std_dev ? detail::finite_or_null(*v.std_dev) : json(nullptr);
        e["standard_error"] = v.standard_error ? detail::finite_or_null(*v.standard_error) : json(nullptr);
        summary.push_back(e);
    }
    return {{"events", cfg.events}, {"replicates", cfg.replicates}, {"seed", cfg.seed},
            {"runs", runs},          {"summary", summary}};
}

inline json to_json(const Theta& t) {
    json j = json::object();
    for (std::size_t k = 0; k < param_count; ++k) j[param_names[k]] = t[k];
    return j;
}

inline json to_json(const std::vector<DataPoint>& pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back({{"conc", p.conc}, {"y_mid", p.y_mid}, {"y_lo", p.y_lo}, {"y_hi", p.y_hi}});
    return a;
}

inline json to_json(const Dataset& ds) {
    return {{"label", ds.label}, {"provenance", ds.provenance}, {"points", to_json(ds.points)}};
}

inline Family family_from(const json& j) {
    Family f;
    f.prop = kind_from(detail::get<std::string>(j, "prop", "family"));
    f.deact = kind_from(detail::get<std::string>(j, "deact", "family"));
    f.back = kind_from(detail::get<std::string>(j, "back", "family"));
    return f;
}

inline json to_json(const Family& f) {
    auto name = [](DensityKind k) { return std::string(to_string(k)); };
    return {{"prop", name(f.prop)}, {"deact", name(f.deact)}, {"back", name(f.back)}};
}

/// Fit problem from a fully populated config object (see the CLI defaults).
/// Data come from the inline "data" array or, when that is empty, from the
/// "dataset" file.
inline FitProblem fit_problem_from(const json& j) {
    FitProblem p;
    const auto inline_data = detail::get<json>(j, "data", "fit config");
    if (!inline_data.empty()) {
        p.data = dataio::parse_json(inline_data).points;
    } else {
        const auto path = detail::get<std::string>(j, "dataset", "fit config");
        if (path.empty()) throw ValidationError("fit config: set 'dataset' or provide inline 'data'");
        p.data = dataio::load_dataset(path).points;
    }
    p.family = family_from(detail::get<json>(j, "family", "fit config"));
    const auto params = detail::get<json>(j, "params", "fit config");
    for (std::size_t k = 0; k < param_count; ++k) {
        const std::string name = param_names[k];
        const auto e = detail::get<json>(params, name.c_str(), "params");
        try {
            p.params[k].value = detail::get<double>(e, "value", name);
            p.params[k].lower = detail::number_or_inf(e.at("lower"));
            p.params[k].upper = detail::number_or_inf(e.at("upper"));
            p.params[k].free = detail::get<bool>(e, "free", name);
        } catch (const json::exception&) {
            throw ValidationError("params." + name + ": needs value, lower, upper and free");
        }
    }
    p.monomer_conc = detail::get<double>(j, "monomer_conc", "fit config");
    p.n0 = detail::get<std::uint32_t>(j, "n0", "fit config");

    const auto engine = detail::get<json>(j, "engine", "fit config");
    const auto ekind = detail::get<std::string>(engine, "kind", "engine");
    if (ekind == "analytical") p.engine = EngineKind::Analytical;
    else if (ekind == "monte-carlo") p.engine = EngineKind::MonteCarlo;
    else throw ValidationError("engine.kind must be analytical or monte-carlo");
    p.mc.events = detail::get<std::uint64_t>(engine, "events", "engine");
    p.mc.replicates = detail::get<std::uint32_t>(engine, "replicates", "engine");
    p.mc.seed = detail::get<std::uint64_t>(engine, "seed", "engine");

    const auto opt = detail::get<json>(j, "optimizer", "fit config");
    const auto okind = detail::get<std::string>(opt, "kind", "optimizer");
    if (okind == "nelder-mead") p.optimizer = OptimizerKind::NelderMead;
    else if (okind == "genetic") p.optimizer = OptimizerKind::Genetic;
    else throw ValidationError("optimizer.kind must be nelder-mead or genetic");
    const auto nm = detail::get<json>(opt, "nelder_mead", "optimizer");
    auto& n = p.nelder_mead;
    n.reflection = detail::get<double>(nm, "reflection", "nelder_mead");
    n.expansion = detail::get<double>(nm, "expansion", "nelder_mead");
    n.contraction = detail::get<double>(nm, "contraction", "nelder_mead");
    n.shrink = detail::get<double>(nm, "shrink", "nelder_mead");
    n.initial_step = detail::get<double>(nm, "initial_step", "nelder_mead");
    n.diameter_tol = detail::get<double>(nm, "diameter_tol", "nelder_mead");
    n.spread_tol = detail::get<double>(nm, "spread_tol", "nelder_mead");
    n.max_iterations = detail::get<std::size_t>(nm, "max_iterations", "nelder_mead");
    n.max_restarts = detail::get<std::size_t>(nm, "max_restarts", "nelder_mead");
    const auto ga = detail::get<json>(opt, "genetic", "optimizer");
    auto& g = p.genetic;
    g.population = detail::get<std::size_t>(ga, "population", "genetic");
    g.generations = detail::get<std::size_t>(ga, "generations", "genetic");
    g.crossover_rate = detail::get<double>(ga, "crossover_rate", "genetic");
    g.blend_alpha = detail::get<double>(ga, "blend_alpha", "genetic");
    g.mutation_rate = detail::get<double>(ga, "mutation_rate", "genetic");
    g.mutation_scale = detail::get<double>(ga, "mutation_scale", "genetic");
    g.tournament = detail::get<std::size_t>(ga, "tournament", "genetic");
    g.elitism = detail::get<std::size_t>(ga, "elitism", "genetic");
    g.stagnation = detail::get<std::size_t>(ga, "stagnation", "genetic");
    g.seed = detail::get<std::uint64_t>(ga, "seed", "genetic");
    p.validate();
    return p;
}

inline json to_json(const FitResult& r, const FitProblem& p) {
    json trace = json::array();
    for (const auto& t : r.trace) trace.push_back({{"iteration", t.iteration}, {"J", t.J}, {"theta", to_json(t.theta)}});
    json per_point = json::array();
    for (std::size_t i = 0; i < p.data.size(); ++i)
        per_point.push_back({{"conc", p.data[i].conc}, {"y_mid", p.data[i].y_mid}, {"model", r.per_point.at(i)}});
    return {{"theta_opt", to_json(r.theta_opt)},
            {"J_opt", r.J_opt},
            {"iterations", r.iterations},
            {"evaluations", r.evaluations},
            {"converged", r.converged},
            {"stop_reason", r.stop_reason},
            {"per_point", per_point},
            {"trace", trace}};
}

inline json to_json(const fitting::EngineTiming& e) {
    return {{"wall_seconds", e.wall_seconds}, {"evaluations", e.evaluations},
            {"cumulative_seconds", e.cumulative_seconds}};
}

inline json to_json(const fitting::BenchmarkReport& b) {
    return {{"iterations", b.iterations},
            {"events", b.events},
            {"speedup", b.speedup},
            {"speedup_per_evaluation", b.speedup_per_evaluation},
            {"engines", {{"analytical", to_json(b.analytical)}, {"monte_carlo", to_json(b.monte_carlo)}}}};
}

inline fitting::BenchmarkReport benchmark_from(const json& j) {
    fitting::BenchmarkReport b;
    try {
        b.iterations = j.at("iterations").get<std::size_t>();
        b.events = j.at("events").get<std::uint64_t>();
        b.speedup = j.at("speedup").get<double>();
        for (auto [name, e] : {std::pair{"analytical", &b.analytical}, std::pair{"monte_carlo", &b.monte_carlo}}) {
            const auto& src = j.at("engines").at(name);
            e->wall_seconds = src.at("wall_seconds").get<double>();
            e->evaluations = src.at("evaluations").get<std::size_t>();
            e->cumulative_seconds = src.at("cumulative_seconds").get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bench report: ") + e.what());
    }
    return b;
}

}  // namespace asyfreq::io
