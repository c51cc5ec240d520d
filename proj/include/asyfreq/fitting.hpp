#pragma once

// Fitting CRP clock parameters to measured branching fractions.
//
// theta = (b_p, tau_p, b_r, tau_r, b_d, tau_d) at unit concentrations. At a
// control-agent concentration [CA] the propagation clock is time-scaled by
// 1/[M] and the deactivation clock by 1/[CA]; backbiting is intramolecular and
// keeps its own time axis. The cost is half-width weighted least squares at
// interval midpoints.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "asyfreq/asymptotics.hpp"
#include "asyfreq/densities.hpp"
#include "asyfreq/errors.hpp"
#include "asyfreq/model.hpp"
#include "asyfreq/parallel.hpp"
#include "asyfreq/simulator.hpp"

namespace asyfreq {

struct DataPoint {
    double conc = 0.0;  // control-agent concentration, relative units
    double y_mid = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;

    /// Residual scale: interval half-width, or 1 for a degenerate interval.
    double weight() const {
        const double half = 0.5 * (y_hi - y_lo);
        return half > 0.0 ? half : 1.0;
    }

    bool operator==(const DataPoint&) const = default;
};

/// Throws ValidationError naming the point index.
inline void validate_point(const DataPoint& p, std::size_t index) {
    const auto fail = [&](const std::string& what) {
        throw ValidationError("point " + std::to_string(index) + ": " + what);
    };
    for (double v : {p.conc, p.y_mid, p.y_lo, p.y_hi})
        if (!std::isfinite(v)) fail("values must be finite");
    if (p.conc < 0.0) fail("concentration must be nonnegative");
    if (p.y_lo > p.y_hi) fail("y_lo > y_hi");
    if (p.y_mid < p.y_lo || p.y_mid > p.y_hi) fail("y_mid outside [y_lo, y_hi]");
    if (p.y_lo < 0.0 || p.y_hi > 1.0) fail("branching fractions must lie in [0, 1]");
}

inline constexpr std::size_t param_count = 6;
using Theta = std::array<double, param_count>;

enum Param : std::size_t { b_p, tau_p, b_r, tau_r, b_d, tau_d };

inline constexpr std::array<const char*, param_count> param_names{"b_p", "tau_p", "b_r", "tau_r", "b_d", "tau_d"};

inline bool is_tau(std::size_t k) { return k % 2 == 1; }

inline std::size_t param_index(const std::string& name) {
    for (std::size_t k = 0; k < param_count; ++k)
        if (name == param_names[k]) return k;
    throw ValidationError("unknown parameter '" + name + "'");
}

struct ParamBound {
    double value = 1.0;
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    bool free = true;
};

/// Density family per CRP outcome. Exponential outcomes ignore their b.
struct Family {
    DensityKind prop = DensityKind::LinearExponential;
    DensityKind deact = DensityKind::LinearExponential;
    DensityKind back = DensityKind::LinearExponential;
};

enum class EngineKind { Analytical, MonteCarlo };
enum class OptimizerKind { NelderMead, Genetic };

struct MonteCarloOptions {
    std::uint64_t events = 10'000;  // G
    std::uint32_t replicates = 1;
    std::uint64_t seed = 1;
};

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double initial_step = 0.1;  // log units for tau, relative for b
    double diameter_tol = 1e-8;
    double spread_tol = 1e-10;
    std::size_t max_iterations = 5'000;
    std::size_t max_restarts = 5;
};

struct GeneticOptions {
    std::size_t population = 60;
    std::size_t generations = 400;
    double crossover_rate = 0.9;
    double blend_alpha = 0.5;     // BLX-alpha
    double mutation_rate = 0.1;   // per gene
    double mutation_scale = 0.1;  // fraction of the search range
    std::size_t tournament = 3;
    std::size_t elitism = 2;
    std::size_t stagnation = 60;  // generations without improvement before stopping
    std::uint64_t seed = 1;
};

struct FitProblem {
    std::vector<DataPoint> data;
    Family family;
    std::array<ParamBound, param_count> params;
    double monomer_conc = 1.0;
    std::uint32_t n0 = 3;
    EngineKind engine = EngineKind::Analytical;
    MonteCarloOptions mc;
    OptimizerKind optimizer = OptimizerKind::NelderMead;
    NelderMeadOptions nelder_mead;
    GeneticOptions genetic;
    unsigned workers = 0;

    DensityKind kind_of(std::size_t k) const {
        switch (k / 2) {
            case 0: return family.prop;
            case 1: return family.back;
            default: return family.deact;
        }
    }

    Theta initial() const {
        Theta t{};
        for (std::size_t k = 0; k < param_count; ++k) t[k] = params[k].value;
        return t;
    }

    void validate() const {
        if (data.empty()) throw ValidationError("fit needs at least one data point");
        for (std::size_t i = 0; i < data.size(); ++i) validate_point(data[i], i);
        if (!(monomer_conc > 0.0) || !std::isfinite(monomer_conc))
            throw ValidationError("monomer_conc must be positive");
        if (mc.events < 1 || mc.replicates < 1) throw ValidationError("Monte Carlo G and replicates must be >= 1");
        for (std::size_t k = 0; k < param_count; ++k) {
            const auto& p = params[k];
            const std::string name = param_names[k];
            if (std::isnan(p.value) || std::isnan(p.lower) || std::isnan(p.upper))
                throw ValidationError(name + ": NaN in value or bounds");
            if (is_tau(k) && !(p.lower > 0.0)) throw ValidationError(name + ": lower bound must be positive");
            if (!is_tau(k) && p.lower < 0.0) throw ValidationError(name + ": lower bound must be nonnegative");
            if (p.lower > p.upper) throw ValidationError(name + ": lower bound exceeds upper bound");
            if (p.value < p.lower || p.value > p.upper)
                throw ValidationError(name + ": value " + std::to_string(p.value) + " outside bounds");
            if (!is_tau(k) && kind_of(k) == DensityKind::Exponential && p.free)
                throw ValidationError(name + " is free but its clock is exponential");
            if (p.free && optimizer == OptimizerKind::Genetic && !std::isfinite(p.upper))
                throw ValidationError(name + ": the genetic optimizer needs a finite upper bound");
        }
        if (optimizer == OptimizerKind::Genetic && (genetic.population < 2 || genetic.tournament < 1 ||
                                                   genetic.elitism >= genetic.population))
            throw ValidationError("genetic: population >= 2, tournament >= 1 and elitism < population");
    }
};

struct TraceEntry {
    std::size_t iteration = 0;
    double J = 0.0;
    Theta theta{};
};

struct FitResult {
    Theta theta_opt{};
    double J_opt = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    std::vector<TraceEntry> trace;
    std::vector<double> per_point;
    bool converged = false;
    std::string stop_reason;
};

namespace fitting {

/// Cost returned for out-of-bounds theta or a failed forward evaluation.
inline constexpr double penalty_cost = 1e30;

struct CrpClocks {
    DensitySpec prop, deact, back;
};

inline DensitySpec scaled_clock(DensityKind kind, double b, double tau, double scale) {
    if (kind == DensityKind::Exponential) return DensitySpec::exponential(tau / scale);
    return DensitySpec::linexp(b / scale, tau / scale);
}

/// Clocks at control-agent concentration conc. For conc = 0 the deactivation
/// clock is meaningless and is returned unscaled.
inline CrpClocks clocks_at(const Theta& theta, double conc, const FitProblem& problem) {
    const double m = problem.monomer_conc;
    return {scaled_clock(problem.family.prop, theta[b_p], theta[tau_p], m),
            scaled_clock(problem.family.deact, theta[b_d], theta[tau_d], conc > 0.0 ? conc : 1.0),
            scaled_clock(problem.family.back, theta[b_r], theta[tau_r], 1.0)};
}

/// Model branching fraction r = n_r / n_p at one concentration. Without
/// control agent only propagation and backbiting compete.
inline double forward_model(const Theta& theta, double conc, const FitProblem& problem) {
    const auto c = clocks_at(theta, conc, problem);
    if (problem.engine == EngineKind::Analytical) {
        if (conc == 0.0)
            return asymptotics::solve_single_constraint(c.prop, c.back, problem.n0).ratios.at({1, 0});
        return asymptotics::crp_branching_fraction(c.prop, c.deact, c.back, problem.n0);
    }
    SimConfig cfg{conc == 0.0 ? single_constraint_model(c.prop, c.back, problem.n0)
                              : crp_model(c.prop, c.deact, c.back, problem.n0),
                  problem.mc.events, problem.mc.seed, problem.mc.replicates};
    cfg.workers = problem.workers;
    const auto summary = simulator::run_replicates(cfg);
    return summary.ratios.at(conc == 0.0 ? OutcomePair{1, 0} : OutcomePair{2, 0}).mean;
}

inline bool within_bounds(const Theta& theta, const FitProblem& problem) {
    for (std::size_t k = 0; k < param_count; ++k) {
        const auto& p = problem.params[k];
        if (!(theta[k] >= p.lower && theta[k] <= p.upper)) return false;
    }
    return true;
}

/// J = sum_k ((r_k - y_mid_k) / w_k)^2, or penalty_cost when theta is out of
/// bounds or the forward model fails.
inline double cost(const Theta& theta, const FitProblem& problem) {
    if (!within_bounds(theta, problem)) return penalty_cost;
    double J = 0.0;
    try {
        for (const auto& pt : problem.data) {
            const double r = forward_model(theta, pt.conc, problem);
            if (!std::isfinite(r)) return penalty_cost;
            const double z = (r - pt.y_mid) / pt.weight();
            J += z * z;
        }
    } catch (const NumericalFailure&) {
        return penalty_cost;
    } catch (const DomainError&) {
        return penalty_cost;
    }
    return std::isfinite(J) ? std::min(J, penalty_cost) : penalty_cost;
}

/// Optimizer coordinates: free parameters only, tau in log space, b as is.
/// Points outside the box are clamped back in, so every decoded theta is
/// within bounds.
class Coordinates {
public:
    explicit Coordinates(const FitProblem& problem) : base_(problem.initial()) {
        for (std::size_t k = 0; k < param_count; ++k) {
            const auto& p = problem.params[k];
            if (!p.free) continue;
            index_.push_back(k);
            lower_.push_back(encode(k, p.lower));
            upper_.push_back(encode(k, p.upper));
            box_.push_back({p.lower, p.upper});
        }
    }

    std::size_t size() const { return index_.size(); }
    std::size_t param(std::size_t i) const { return index_[i]; }
    double lower(std::size_t i) const { return lower_[i]; }
    double upper(std::size_t i) const { return upper_[i]; }

    std::vector<double> encode(const Theta& theta) const {
        std::vector<double> x(size());
        for (std::size_t i = 0; i < size(); ++i) x[i] = encode(index_[i], theta[index_[i]]);
        return x;
    }

    void clamp(std::vector<double>& x) const {
        for (std::size_t i = 0; i < size(); ++i) x[i] = std::clamp(x[i], lower_[i], upper_[i]);
    }

    Theta decode(const std::vector<double>& x) const {
        Theta t = base_;
        for (std::size_t i = 0; i < size(); ++i) {
            const std::size_t k = index_[i];
            const double v = std::clamp(x[i], lower_[i], upper_[i]);
            // exp(log(tau)) may land one ulp outside the box.
            t[k] = is_tau(k) ? std::clamp(std::exp(v), box_[i].first, box_[i].second) : v;
        }
        return t;
    }

private:
    static double encode(std::size_t k, double v) { return is_tau(k) ? std::log(v) : v; }

    Theta base_;
    std::vector<std::size_t> index_;
    std::vector<double> lower_, upper_;
    std::vector<std::pair<double, double>> box_;
};

using Objective = std::function<double(const std::vector<double>&)>;
/// Called after each iteration with (iteration, best J, best x).
using IterationHook = std::function<void(std::size_t, double, const std::vector<double>&)>;

struct OptimizerOutcome {
    std::vector<double> x;
    double J = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    std::string stop_reason;
};

/// Nelder-Mead on a box, restarted around the incumbent after each
/// convergence until a restart stops improving. With stop_on_convergence
/// false it runs exactly max_iterations iterations (benchmarking).
inline OptimizerOutcome nelder_mead(const Objective& f, const Coordinates& coords, std::vector<double> x0,
                                    const NelderMeadOptions& opt, const IterationHook& hook,
                                    bool stop_on_convergence = true) {
    const std::size_t n = coords.size();
    OptimizerOutcome out;
    auto eval = [&](std::vector<double>& x) {
        coords.clamp(x);
        ++out.evaluations;
        return f(x);
    };
    if (n == 0) {
        out.x = x0;
        out.J = eval(out.x);
        out.converged = true;
        out.stop_reason = "no free parameters";
        return out;
    }

    std::vector<std::vector<double>> s(n + 1);
    std::vector<double> fs(n + 1);
    auto build = [&](const std::vector<double>& centre) {
        s[0] = centre;
        fs[0] = eval(s[0]);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = coords.param(i);
            double step = opt.initial_step;
            if (!is_tau(k)) {
                const double range = coords.upper(i) - coords.lower(i);
                step = centre[i] != 0.0 ? opt.initial_step * std::abs(centre[i])
                                        : opt.initial_step * std::min(range, 1.0);
            }
            auto v = centre;
            v[i] = centre[i] + step > coords.upper(i) ? centre[i] - step : centre[i] + step;
            s[i + 1] = v;
            fs[i + 1] = eval(s[i + 1]);
        }
    };

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fs[a] < fs[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s2[i] = std::move(s[order[i]]);
            f2[i] = fs[order[i]];
        }
        s.swap(s2);
        fs.swap(f2);
    };
    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(s[i][j] - s[0][j]));
        return d;
    };
    auto affine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
        std::vector<double> r(n);
        for (std::size_t j = 0; j < n; ++j) r[j] = a[j] + t * (b[j] - a[j]);
        return r;
    };

    build(x0);
    std::size_t restarts = 0;
    double previous_best = std::numeric_limits<double>::infinity();
    std::vector<double> centroid(n);

    for (;;) {
        sort_simplex();
        if (stop_on_convergence) {
            const bool small = diameter() < opt.diameter_tol;
            const bool flat = fs[n] - fs[0] < opt.spread_tol;
            if (small || flat) {
                const bool improved = fs[0] < previous_best - opt.spread_tol;
                if (!improved || restarts >= opt.max_restarts) {
                    out.converged = true;
                    out.stop_reason = small ? "simplex diameter below tolerance" : "cost spread below tolerance";
                    break;
                }
                previous_best = fs[0];
                ++restarts;
                const auto best = s[0];
                build(best);
                sort_simplex();
            }
        }
        if (out.iterations >= opt.max_iterations) {
            out.stop_reason = "iteration budget exhausted";
            out.converged = !stop_on_convergence;
            break;
        }
        ++out.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += s[i][j] / static_cast<double>(n);

        auto xr = affine(centroid, s[n], -opt.reflection);
        const double fr = eval(xr);
        if (fr < fs[0]) {
            auto xe = affine(centroid, xr, opt.expansion);
            const double fe = eval(xe);
            if (fe < fr) {
                s[n] = std::move(xe);
                fs[n] = fe;
            } else {
                s[n] = std::move(xr);
                fs[n] = fr;
            }
        } else if (fr < fs[n - 1]) {
            s[n] = std::move(xr);
            fs[n] = fr;
        } else {
            const bool outside = fr < fs[n];
            auto xc = outside ? affine(centroid, xr, opt.contraction) : affine(centroid, s[n], opt.contraction);
            const double fc = eval(xc);
            if (outside ? fc <= fr : fc < fs[n]) {
                s[n] = std::move(xc);
                fs[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    s[i] = affine(s[0], s[i], opt.shrink);
                    fs[i] = eval(s[i]);
                }
            }
        }
        if (hook) {
            const auto best = std::min_element(fs.begin(), fs.end()) - fs.begin();
            hook(out.iterations, fs[best], s[best]);
        }
    }
    sort_simplex();
    out.x = s[0];
    out.J = fs[0];
    return out;
}

/// Real-coded genetic algorithm: tournament selection, BLX-alpha crossover,
/// Gaussian mutation and elitism. All random draws happen on the calling
/// thread, so results do not depend on the worker count.
inline OptimizerOutcome genetic(const Objective& f, const Coordinates& coords, const GeneticOptions& opt,
                                unsigned workers, const IterationHook& hook, bool stop_on_convergence = true) {
    const std::size_t n = coords.size();
    const std::size_t N = opt.population;
    OptimizerOutcome out;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::vector<double>> pop(N, std::vector<double>(n));
    std::vector<double> fit(N);
    for (auto& x : pop)
        for (std::size_t i = 0; i < n; ++i) x[i] = coords.lower(i) + unit(rng) * (coords.upper(i) - coords.lower(i));

    auto evaluate = [&](std::size_t from) {
        parallel_for(N - from, workers, [&](std::size_t k) { fit[from + k] = f(pop[from + k]); });
        out.evaluations += N - from;
    };
    auto tournament = [&]() -> const std::vector<double>& {
        std::uniform_int_distribution<std::size_t> pick(0, N - 1);
        std::size_t best = pick(rng);
        for (std::size_t t = 1; t < opt.tournament; ++t) {
            const std::size_t c = pick(rng);
            if (fit[c] < fit[best]) best = c;
        }
        return pop[best];
    };

    evaluate(0);
    double stall_best = std::numeric_limits<double>::infinity();
    std::size_t stall = 0;
    std::vector<std::size_t> rank(N);

    for (;;) {
        std::iota(rank.begin(), rank.end(), 0);
        std::stable_sort(rank.begin(), rank.end(), [&](auto a, auto b) { return fit[a] < fit[b]; });
        const double best = fit[rank[0]];
        if (out.iterations > 0 && hook) hook(out.iterations, best, pop[rank[0]]);

        if (!std::isfinite(stall_best) || stall_best - best > 1e-9 * stall_best) {
            stall_best = best;
            stall = 0;
        } else {
            ++stall;
        }
        if (stop_on_convergence && stall >= opt.stagnation) {
            out.stop_reason = "stagnation window reached";
            break;
        }
        if (out.iterations >= opt.generations) {
            out.stop_reason = "generation budget exhausted";
            break;
        }
        ++out.iterations;

        std::vector<std::vector<double>> next;
        std::vector<double> next_fit;
        next.reserve(N);
        for (std::size_t e = 0; e < opt.elitism; ++e) {
            next.push_back(pop[rank[e]]);
            next_fit.push_back(fit[rank[e]]);
        }
        while (next.size() < N) {
            const auto& a = tournament();
            const auto& b = tournament();
            std::vector<double> child = a;
            if (unit(rng) < opt.crossover_rate) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double lo = std::min(a[i], b[i]), hi = std::max(a[i], b[i]);
                    const double spread = opt.blend_alpha * (hi - lo);
                    child[i] = lo - spread + unit(rng) * (hi - lo + 2.0 * spread);
                }
            }
            for (std::size_t i = 0; i < n; ++i)
                if (unit(rng) < opt.mutation_rate)
                    child[i] += gauss(rng) * opt.mutation_scale * (coords.upper(i) - coords.lower(i));
            coords.clamp(child);
            next.push_back(std::move(child));
        }
        pop.swap(next);
        std::copy(next_fit.begin(), next_fit.end(), fit.begin());
        evaluate(opt.elitism);
    }
    out.converged = true;
    out.x = pop[rank[0]];
    out.J = fit[rank[0]];
    return out;
}

inline std::vector<double> curve(const Theta& theta, const FitProblem& problem) {
    std::vector<double> r;
    r.reserve(problem.data.size());
    for (const auto& pt : problem.data) r.push_back(forward_model(theta, pt.conc, problem));
    return r;
}

namespace detail {

/// Runs the configured optimizer. With stop_on_convergence false it performs
/// exactly `iterations` iterations.
inline OptimizerOutcome optimize(const FitProblem& problem, const Coordinates& coords, const IterationHook& hook,
                                 bool stop_on_convergence, std::size_t iterations) {
    const Objective f = [&](const std::vector<double>& x) { return cost(coords.decode(x), problem); };
    if (problem.optimizer == OptimizerKind::NelderMead) {
        auto opt = problem.nelder_mead;
        if (!stop_on_convergence) opt.max_iterations = iterations;
        return nelder_mead(f, coords, coords.encode(problem.initial()), opt, hook, stop_on_convergence);
    }
    auto opt = problem.genetic;
    if (!stop_on_convergence) opt.generations = iterations;
    return genetic(f, coords, opt, problem.workers, hook, stop_on_convergence);
}

}  // namespace detail

/// Runs the configured optimizer from the problem's initial values. A
/// budget-exhausted Nelder-Mead run returns its best point with converged
/// set to false.
inline FitResult fit(const FitProblem& problem) {
    problem.validate();
    const Coordinates coords(problem);
    FitResult result;
    const IterationHook hook = [&](std::size_t it, double J, const std::vector<double>& x) {
        result.trace.push_back({it, J, coords.decode(x)});
    };
    const auto o = detail::optimize(problem, coords, hook, true, 0);
    result.theta_opt = coords.decode(o.x);
    result.J_opt = o.J;
    result.iterations = o.iterations;
    result.evaluations = o.evaluations;
    result.converged = o.converged;
    result.stop_reason = o.stop_reason;
    result.per_point = curve(result.theta_opt, problem);
    return result;
}

struct EngineTiming {
    EngineKind engine = EngineKind::Analytical;
    double wall_seconds = 0.0;  // best of the repeats
    std::size_t evaluations = 0;
    std::vector<double> cumulative_seconds;  // after each iteration, from the best repeat
};

struct BenchmarkReport {
    std::size_t iterations = 0;
    std::uint64_t events = 0;  // MC sample size G
    EngineTiming analytical;
    EngineTiming monte_carlo;
    double speedup = 0.0;                 // MC wall time / analytical wall time
    double speedup_per_evaluation = 0.0;  // same, normalised by cost evaluations
};

/// Times a fixed number of optimizer iterations with each engine, taking the
/// fastest of `repeats` runs per engine.
inline BenchmarkReport benchmark(const FitProblem& problem, std::size_t iterations, std::size_t repeats = 1) {
    if (iterations < 1) throw ValidationError("benchmark needs at least one iteration");
    if (repeats < 1) throw ValidationError("benchmark needs at least one repeat");
    using clock = std::chrono::steady_clock;
    auto time_engine = [&](EngineKind kind) {
        FitProblem p = problem;
        p.engine = kind;
        EngineTiming best;
        best.engine = kind;
        best.wall_seconds = std::numeric_limits<double>::infinity();
        for (std::size_t rep = 0; rep < repeats; ++rep) {
            std::vector<double> marks;
            marks.reserve(iterations);
            p.validate();
            const Coordinates coords(p);
            const auto start = clock::now();
            const IterationHook hook = [&](std::size_t, double, const std::vector<double>&) {
                marks.push_back(std::chrono::duration<double>(clock::now() - start).count());
            };
            const auto o = detail::optimize(p, coords, hook, false, iterations);
            const double wall = std::chrono::duration<double>(clock::now() - start).count();
            if (wall < best.wall_seconds) {
                best.wall_seconds = wall;
                best.evaluations = o.evaluations;
                best.cumulative_seconds = std::move(marks);
            }
        }
        return best;
    };

    BenchmarkReport report;
    report.iterations = iterations;
    report.events = problem.mc.events;
    report.analytical = time_engine(EngineKind::Analytical);
    report.monte_carlo = time_engine(EngineKind::MonteCarlo);
    report.speedup = report.monte_carlo.wall_seconds / report.analytical.wall_seconds;
    report.speedup_per_evaluation =
        (report.monte_carlo.wall_seconds / static_cast<double>(report.monte_carlo.evaluations)) /
        (report.analytical.wall_seconds / static_cast<double>(report.analytical.evaluations));
    return report;
}

}  // namespace fitting
}  // namespace asyfreq
