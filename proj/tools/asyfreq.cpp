// asyfreq: asymptotic event frequencies of constrained stochastic processes.
//
// Exit codes: 0 ok, 1 validation or usage error, 2 numerical failure,
// 3 fit did not converge (the result is still written).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "asyfreq/asymptotics.hpp"
#include "asyfreq/dataio.hpp"
#include "asyfreq/fitting.hpp"
#include "asyfreq/serialization.hpp"
#include "asyfreq/simulator.hpp"
#include "asyfreq/winprob.hpp"
#include "config.hpp"

namespace {

using namespace asyfreq;
using nlohmann::json;

enum Exit { ok = 0, validation = 1, numerical = 2, not_converged = 3 };

struct Common {
    std::string config;
    std::string output;
    std::vector<std::string> set;
    std::optional<std::uint64_t> seed;
    int workers = -1;
};

// Solution-polymerisation row of the reference parameter table.
const json table_clocks = json::array({{{"kind", "linexp"}, {"b", 1.74e-1}, {"tau", 9.1e-1}},
                                       {{"kind", "linexp"}, {"b", 2.28e-4}, {"tau", 3.58e-2}},
                                       {{"kind", "linexp"}, {"b", 6.53}, {"tau", 1.31}}});

json crp_model_defaults() {
    return {{"outcomes", {"p", "d", "r"}},
            {"constraints", {{0, 0, 0}, {0, 0, 0}, {3, 0, 0}}},
            {"clocks", table_clocks},
            {"ratios", json::array({{"r", "p"}})}};
}

json param(double value, double lower, double upper) {
    return {{"value", value}, {"lower", lower}, {"upper", upper}, {"free", true}};
}

json fit_defaults() {
    return {{"dataset", ""},
            {"data", json::array()},
            {"family", {{"prop", "linexp"}, {"deact", "linexp"}, {"back", "linexp"}}},
            {"params",
             {{"b_p", param(1.74e-1, 0.0, 2.0)},
              {"tau_p", param(9.1e-1, 1e-2, 10.0)},
              {"b_r", param(6.53, 0.0, 50.0)},
              {"tau_r", param(1.31, 1e-2, 100.0)},
              {"b_d", param(2.28e-4, 0.0, 1.0)},
              {"tau_d", param(3.58e-2, 1e-4, 10.0)}}},
            {"monomer_conc", 1.0},
            {"n0", 3},
            {"engine", {{"kind", "analytical"}, {"events", 10000}, {"replicates", 1}, {"seed", 1}}},
            {"optimizer",
             {{"kind", "nelder-mead"},
              {"nelder_mead",
               {{"reflection", 1.0},
                {"expansion", 2.0},
                {"contraction", 0.5},
                {"shrink", 0.5},
                {"initial_step", 0.1},
                {"diameter_tol", 1e-8},
                {"spread_tol", 1e-10},
                {"max_iterations", 5000},
                {"max_restarts", 5}}},
              {"genetic",
               {{"population", 60},
                {"generations", 400},
                {"crossover_rate", 0.9},
                {"blend_alpha", 0.5},
                {"mutation_rate", 0.1},
                {"mutation_scale", 0.1},
                {"tournament", 3},
                {"elitism", 2},
                {"stagnation", 60},
                {"seed", 1}}}}}};
}

WinProbMethod method_from(const std::string& s) {
    if (s == "exact") return WinProbMethod::Exact;
    if (s == "quadrature") return WinProbMethod::Quadrature;
    throw ValidationError("method must be exact or quadrature");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

void write_json(const Common& c, const json& j) {
    if (!c.output.empty()) write_text(c.output, j.dump(2) + "\n");
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

int cmd_solve(const Common& c) {
    const json cfg = cli::resolve({{"model", crp_model_defaults()}, {"method", "exact"}}, c.config, c.set);
    const auto model = io::model_from(cfg.at("model"));
    const auto res = asymptotics::solve(model, method_from(cfg.at("method")));
    for (std::size_t i = 0; i < res.outcomes.size(); ++i)
        std::cout << "fraction " << res.outcomes[i] << " = " << num(res.fractions[i]) << "\n";
    for (const auto& [pr, v] : res.ratios)
        std::cout << "ratio " << res.outcomes[pr.first] << "/" << res.outcomes[pr.second] << " = " << num(v) << "\n";
    write_json(c, io::to_json(res));
    return ok;
}

int cmd_winprob(const Common& c) {
    const json cfg = cli::resolve({{"clocks", table_clocks}, {"method", "exact"}}, c.config, c.set);
    ClockSet clocks;
    for (std::size_t i = 0; i < cfg.at("clocks").size(); ++i)
        clocks.push_back(io::density_from(cfg.at("clocks")[i], "clock " + std::to_string(i)));
    const auto p = winprob::win_probabilities(clocks, method_from(cfg.at("method")));
    for (std::size_t i = 0; i < p.size(); ++i) std::cout << "P(T" << i << " first) = " << num(p[i]) << "\n";
    write_json(c, {{"clocks", cfg.at("clocks")}, {"method", cfg.at("method")}, {"probabilities", p}});
    return ok;
}

int cmd_simulate(const Common& c) {
    json defaults{{"model", crp_model_defaults()}, {"events", 10000}, {"replicates", 1}, {"seed", 1}};
    json cfg = cli::resolve(defaults, c.config, c.set);
    if (c.seed) cfg["seed"] = *c.seed;
    SimConfig sim{io::model_from(cfg.at("model")), cfg.at("events").get<std::uint64_t>(),
                  cfg.at("seed").get<std::uint64_t>(), cfg.at("replicates").get<std::uint32_t>()};
    sim.workers = cli::workers_from(c.workers);
    const auto summary = simulator::run_replicates(sim);
    for (const auto& [pr, s] : summary.ratios) {
        std::cout << "ratio " << sim.model.outcomes[pr.first] << "/" << sim.model.outcomes[pr.second] << " = "
                  << num(s.mean);
        if (s.standard_error) std::cout << " +- " << num(*s.standard_error) << " (SE, " << sim.replicates << " runs)";
        std::cout << "\n";
    }
    write_json(c, io::to_json(summary, sim));
    return ok;
}

json resolve_fit(const Common& c, json defaults) {
    json cfg = cli::resolve(std::move(defaults), c.config, c.set);
    if (c.seed) {
        cfg["engine"]["seed"] = *c.seed;
        cfg["optimizer"]["genetic"]["seed"] = *c.seed;
    }
    return cfg;
}

int cmd_fit(const Common& c) {
    const json cfg = resolve_fit(c, fit_defaults());
    auto problem = io::fit_problem_from(cfg);
    problem.workers = cli::workers_from(c.workers);
    const auto res = fitting::fit(problem);
    std::cout << "J_opt = " << num(res.J_opt) << " after " << res.iterations << " iterations, " << res.evaluations
              << " evaluations (" << res.stop_reason << ")\n";
    for (std::size_t k = 0; k < param_count; ++k) std::cout << param_names[k] << " = " << num(res.theta_opt[k]) << "\n";
    json out = io::to_json(res, problem);
    out["config"] = cfg;
    write_json(c, out);
    if (!res.converged) {
        std::cerr << "fit did not converge: " << res.stop_reason << "\n";
        return not_converged;
    }
    return ok;
}

int cmd_bench(const Common& c, std::optional<std::size_t> iterations) {
    json defaults = fit_defaults();
    defaults["iterations"] = 100;
    defaults["repeats"] = 1;
    json cfg = resolve_fit(c, defaults);
    if (iterations) cfg["iterations"] = *iterations;
    json fit_cfg = cfg;
    fit_cfg.erase("iterations");
    fit_cfg.erase("repeats");
    auto problem = io::fit_problem_from(fit_cfg);
    problem.workers = cli::workers_from(c.workers);
    const auto rep = fitting::benchmark(problem, cfg.at("iterations").get<std::size_t>(),
                                        cfg.at("repeats").get<std::size_t>());
    std::cout << "iterations " << rep.iterations << ", MC sample size G = " << rep.events << "\n"
              << "analytical  " << num(rep.analytical.wall_seconds) << " s (" << rep.analytical.evaluations
              << " evaluations)\n"
              << "monte carlo " << num(rep.monte_carlo.wall_seconds) << " s (" << rep.monte_carlo.evaluations
              << " evaluations)\n"
              << "speedup " << num(rep.speedup) << " (per evaluation " << num(rep.speedup_per_evaluation) << ")\n";
    write_json(c, io::to_json(rep));
    return ok;
}

int cmd_synth(const Common& c) {
    json defaults{{"theta", io::to_json(Theta{1.74e-1, 9.1e-1, 6.53, 1.31, 2.28e-4, 3.58e-2})},
                  {"family", {{"prop", "linexp"}, {"deact", "linexp"}, {"back", "linexp"}}},
                  {"concs", json::array()},
                  {"conc_min", 0.01},
                  {"conc_max", 1.0},
                  {"conc_count", 10},
                  {"halfwidth", 0.0},
                  {"jitter", false},
                  {"seed", 1},
                  {"label", "synthetic"},
                  {"monomer_conc", 1.0},
                  {"n0", 3}};
    json cfg = cli::resolve(defaults, c.config, c.set);
    if (c.seed) cfg["seed"] = *c.seed;
    Theta theta{};
    for (std::size_t k = 0; k < param_count; ++k) theta[k] = cfg.at("theta").at(param_names[k]).get<double>();
    auto concs = cfg.at("concs").get<std::vector<double>>();
    if (concs.empty())
        concs = dataio::log_spaced(cfg.at("conc_min").get<double>(), cfg.at("conc_max").get<double>(),
                                   cfg.at("conc_count").get<std::size_t>());
    dataio::SyntheticOptions opt;
    opt.halfwidth = cfg.at("halfwidth").get<double>();
    opt.jitter = cfg.at("jitter").get<bool>();
    opt.seed = cfg.at("seed").get<std::uint64_t>();
    opt.label = cfg.at("label").get<std::string>();
    opt.monomer_conc = cfg.at("monomer_conc").get<double>();
    opt.n0 = cfg.at("n0").get<std::uint32_t>();
    const auto ds = dataio::generate_synthetic(theta, io::family_from(cfg.at("family")), concs, opt);
    std::cout << ds.label << ": " << ds.points.size() << " points, r from " << num(ds.points.front().y_mid) << " to "
              << num(ds.points.back().y_mid) << "\n";
    if (!c.output.empty()) {
        if (std::filesystem::path(c.output).extension() == ".json")
            write_text(c.output, io::to_json(ds).dump(2) + "\n");
        else
            dataio::write_csv(ds, c.output);
    } else {
        dataio::write_csv(ds, std::cout);
    }
    return ok;
}

int cmd_plot(const Common& c) {
    json defaults{{"kind", "mc_scatter"}, {"n0", 3},          {"rate_ratios", {1.0, 0.2}}, {"events", 10000},
                  {"runs", 5},            {"seed", 1},        {"fit_config", ""},          {"fit_result", ""},
                  {"bench_report", ""},   {"grid_points", 100}};
    json cfg = cli::resolve(defaults, c.config, c.set);
    if (c.seed) cfg["seed"] = *c.seed;
    if (c.output.empty()) throw ValidationError("plot needs --output for the CSV file");
    const auto kind = cfg.at("kind").get<std::string>();
    std::vector<PlotSeries> series;
    if (kind == "mc_scatter") {
        series = dataio::mc_scatter_series(cfg.at("n0").get<std::uint32_t>(),
                                           cfg.at("rate_ratios").get<std::vector<double>>(),
                                           cfg.at("events").get<std::uint64_t>(), cfg.at("runs").get<std::size_t>(),
                                           cfg.at("seed").get<std::uint64_t>());
    } else if (kind == "fit_curve") {
        const auto fit_path = cfg.at("fit_config").get<std::string>();
        if (fit_path.empty()) throw ValidationError("fit_curve needs 'fit_config' (a fit config file)");
        json fit_cfg = fit_defaults();
        cli::overlay(fit_cfg, cli::read_json_file(fit_path));
        const auto problem = io::fit_problem_from(fit_cfg);
        Theta theta = problem.initial();
        const auto result_path = cfg.at("fit_result").get<std::string>();
        if (!result_path.empty()) {
            const auto result = cli::read_json_file(result_path);
            if (!result.contains("theta_opt")) throw ValidationError(result_path + ": no theta_opt");
            for (std::size_t k = 0; k < param_count; ++k)
                theta[k] = result.at("theta_opt").at(param_names[k]).get<double>();
        }
        series = dataio::fit_curve_series(problem, theta, cfg.at("grid_points").get<std::size_t>());
    } else if (kind == "timing") {
        const auto path = cfg.at("bench_report").get<std::string>();
        if (path.empty()) throw ValidationError("timing needs 'bench_report' (output of bench)");
        series = dataio::timing_series(io::benchmark_from(cli::read_json_file(path)));
    } else {
        throw ValidationError("plot kind must be mc_scatter, fit_curve or timing");
    }
    dataio::write_plot_csv(series, c.output);
    std::size_t rows = 0;
    for (const auto& s : series) rows += s.points.size();
    std::cout << kind << ": " << series.size() << " series, " << rows << " rows -> " << c.output << "\n";
    return ok;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("-o,--output", c.output, "result file (JSON, or CSV for synth and plot)");
    sub->add_option("--set", c.set, "override a config key, e.g. --set engine.events=1000")->take_all();
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("-j,--workers", c.workers, "worker threads (default $ASYFREQ_WORKERS, else all cores)")
        ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymptotic event frequencies of constrained stochastic processes"};
    app.require_subcommand(1);
    Common common;
    std::optional<std::size_t> iterations;

    struct Entry {
        const char* name;
        const char* help;
    };
    const Entry entries[] = {{"solve", "closed-form event fractions of a model"},
                             {"simulate", "constrained kinetic Monte Carlo"},
                             {"winprob", "win probabilities of a clock set"},
                             {"fit", "fit clock parameters to branching-fraction data"},
                             {"bench", "time optimizer iterations with both engines"},
                             {"synth", "generate a synthetic dataset"},
                             {"plot", "emit plot series as CSV"}};
    std::vector<CLI::App*> subs;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        add_common(sub, common);
        if (std::string(e.name) == "bench") sub->add_option("--iterations", iterations, "optimizer iterations");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return validation;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (name == "solve") return cmd_solve(common);
        if (name == "simulate") return cmd_simulate(common);
        if (name == "winprob") return cmd_winprob(common);
        if (name == "fit") return cmd_fit(common);
        if (name == "bench") return cmd_bench(common, iterations);
        if (name == "synth") return cmd_synth(common);
        return cmd_plot(common);
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return validation;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return numerical;
    }
}
