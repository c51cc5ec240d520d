// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "asyfreq/asymptotics.hpp"
#include "asyfreq/dataio.hpp"
#include "asyfreq/fitting.hpp"
#include "asyfreq/simulator.hpp"
#include "asyfreq/winprob.hpp"
#include "oracles.hpp"

using namespace asyfreq;
namespace fs = std::filesystem;

namespace {

const fs::path source_dir = ASYFREQ_SOURCE_DIR;

const Theta solution_row{1.74e-1, 9.1e-1, 6.53, 1.31, 2.28e-4, 3.58e-2};
const Theta bulk_row{2.8e-1, 8.53e-1, 1.58e-1, 11.54, 1.57e-2, 3.43e-2};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

struct Criterion {
    int number;
    const char* title;
    double time_limit_seconds;
    std::function<void(Outcome&)> body;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// 1. Single constraint with exponential clocks, n0 = 3.
void single_constraint(Outcome& out) {
    double worst_exact = 0.0, worst_z = 0.0;
    for (const auto& [q, expected] : {std::pair{1.0, 0.25}, std::pair{0.2, 0.125}}) {
        const auto free_clock = DensitySpec::exponential_rate(1.0);
        const auto constrained = DensitySpec::exponential_rate(q);
        const double r = asymptotics::solve_single_constraint(free_clock, constrained, 3).ratios.at({1, 0});
        worst_exact = std::max(worst_exact, std::abs(r - expected));
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            SimConfig cfg;
            cfg.model = single_constraint_model(free_clock, constrained, 3);
            cfg.events = 10'000;
            cfg.seed = seed;
            const auto run = simulator::run(cfg);
            const double se = simulator::binomial_ratio_se(run.counts[1], run.counts[0]);
            worst_z = std::max(worst_z, std::abs(run.ratios.at({1, 0}) - expected) / se);
        }
    }
    out.require(worst_exact <= 1e-12, "closed form off by " + fmt(worst_exact));
    out.require(worst_z <= 4.0, "MC run beyond 4 SE");
    out.detail << "max |r - exact| " << fmt(worst_exact) << ", worst MC deviation " << fmt(worst_z) << " SE";
}

// 2. Win probabilities against closed form and argmin sampling.
void win_probability_oracle(Outcome& out) {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> size(2, 5);
    std::uniform_real_distribution<double> log_rate(std::log(1e-2), std::log(1e2));

    double worst_exp = 0.0;
    for (int set = 0; set < 50; ++set) {
        std::vector<DensitySpec> clocks;
        double total = 0.0;
        std::vector<double> rates(size(rng));
        for (auto& c : rates) {
            c = std::exp(log_rate(rng));
            total += c;
            clocks.push_back(DensitySpec::exponential_rate(c));
        }
        const auto p = winprob::win_probabilities_quadrature_raw(clocks).values;
        for (std::size_t k = 0; k < p.size(); ++k) worst_exp = std::max(worst_exp, std::abs(p[k] - rates[k] / total));
    }

    double worst_sum = 0.0, worst_z = 0.0;
    constexpr std::size_t draws = 1'000'000;
    for (int set = 0; set < 50; ++set) {
        const auto clocks = oracle::random_mixed_clocks(rng, size(rng));
        const auto raw = winprob::win_probabilities_quadrature_raw(clocks).values;
        double sum = 0.0;
        for (double v : raw) sum += v;
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        const auto p = winprob::win_probabilities_quadrature(clocks);
        const auto freq = oracle::argmin_frequencies(clocks, draws, 7000 + static_cast<std::uint64_t>(set));
        for (std::size_t k = 0; k < p.size(); ++k)
            worst_z = std::max(worst_z, std::abs(freq[k] - p[k]) / oracle::binomial_se(p[k], draws));
    }
    out.require(worst_exp <= 1e-8, "exponential sets off by " + fmt(worst_exp));
    out.require(worst_sum <= 1e-8, "raw sum off by " + fmt(worst_sum));
    out.require(worst_z <= 4.0, "argmin sampling beyond 4 SE");
    out.detail << "exp max err " << fmt(worst_exp) << ", max |sum - 1| " << fmt(worst_sum) << ", worst sampling deviation "
               << fmt(worst_z) << " SE";
}

// 3. With exponential clocks r does not depend on deactivation.
void deactivation_invariance(Outcome& out) {
    const double c_p = 1.0, c_r = 0.3;
    const std::uint32_t n0 = 3;
    const double expected = c_r / (c_p + n0 * c_r);
    double worst = 0.0;
    for (const double c_d : dataio::log_spaced(1e-2, 1e2, 20)) {
        const auto res = asymptotics::solve_crp(DensitySpec::exponential_rate(c_p), DensitySpec::exponential_rate(c_d),
                                                DensitySpec::exponential_rate(c_r), n0);
        worst = std::max(worst, std::abs(asymptotics::branching_fraction(res) - expected));
    }
    out.require(worst <= 1e-10, "r drifts by " + fmt(worst));
    out.detail << "max |r - c_r/(c_p + n0 c_r)| " << fmt(worst) << " over c_d in [1e-2, 1e2]";
}

// 4. solve_crp against event-level simulation.
void analytical_vs_simulation(Outcome& out) {
    std::vector<Theta> sets{solution_row};
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> log_param(std::log(0.2), std::log(2.0));
    for (int i = 0; i < 10; ++i) {
        Theta t;
        for (auto& v : t) v = std::exp(log_param(rng));
        sets.push_back(t);
    }
    double worst_z = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto& t = sets[i];
        const auto prop = DensitySpec::linexp(t[b_p], t[tau_p]);
        const auto back = DensitySpec::linexp(t[b_r], t[tau_r]);
        const auto deact = DensitySpec::linexp(t[b_d], t[tau_d]);
        const double r = asymptotics::branching_fraction(asymptotics::solve_crp(prop, deact, back));
        SimConfig cfg;
        cfg.model = crp_model(prop, deact, back);
        cfg.events = 100'000;
        cfg.replicates = 20;
        cfg.seed = 9000 + i;
        const auto summary = simulator::run_replicates(cfg);
        const auto& s = summary.ratios.at({2, 0});
        const double z = std::abs(s.mean - r) / *s.standard_error;
        worst_z = std::max(worst_z, z);
        if (!(z <= 3.0)) out.require(false, "set " + std::to_string(i) + " at " + fmt(z) + " SE");
    }
    out.detail << sets.size() << " parameter sets, worst deviation " << fmt(worst_z) << " SE of the MC mean";
}

FitProblem bundled_problem(const char* file, const Theta& truth) {
    FitProblem p;
    p.data = dataio::load_dataset(source_dir / "data" / file).points;
    for (std::size_t k = 0; k < param_count; ++k) {
        p.params[k].lower = is_tau(k) ? truth[k] / 4.0 : 0.0;
        p.params[k].upper = truth[k] * 4.0;
        p.params[k].value = truth[k] * (k % 3 == 0 ? 1.1 : 0.9);
    }
    return p;
}

// 5. Benchmark of the two engines over a fixed number of optimizer iterations.
void speedup(Outcome& out) {
    auto p = bundled_problem("solution-synth.csv", solution_row);
    std::vector<std::pair<double, double>> by_events;
    for (const std::uint64_t events : {100, 1'000, 10'000}) {
        p.mc.events = events;
        const auto rep = fitting::benchmark(p, 100);
        by_events.emplace_back(static_cast<double>(events), rep.speedup);
        out.detail << "G=" << events << ": " << fmt(rep.speedup) << "x (" << fmt(rep.speedup_per_evaluation)
                   << "x per evaluation); ";
    }
    out.require(by_events.back().second >= 1e3, "speedup at G=1e4 below 1e3");
    for (std::size_t i = 0; i < by_events.size(); ++i)
        for (std::size_t j = i + 1; j < by_events.size(); ++j) {
            const double ratio = (by_events[j].second / by_events[i].second) / (by_events[j].first / by_events[i].first);
            if (!(ratio >= 0.2 && ratio <= 5.0))
                out.require(false, "scaling between G=" + fmt(by_events[i].first) + " and G=" +
                                       fmt(by_events[j].first) + " is " + fmt(ratio) + " of linear");
        }
}

double max_curve_error(const FitProblem& p, const FitResult& r) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.data.size(); ++i) worst = std::max(worst, std::abs(r.per_point[i] - p.data[i].y_mid));
    return worst;
}

// 6. Recovery of zero-noise synthetic curves.
void fit_recovery(Outcome& out) {
    for (const auto& [file, truth] : {std::pair{"solution-synth.csv", solution_row}, std::pair{"bulk-synth.csv", bulk_row}}) {
        auto p = bundled_problem(file, truth);
        using clock = std::chrono::steady_clock;

        p.optimizer = OptimizerKind::NelderMead;
        auto start = clock::now();
        const auto nm = fitting::fit(p);
        const double nm_seconds = std::chrono::duration<double>(clock::now() - start).count();
        const double nm_err = max_curve_error(p, nm);

        p.optimizer = OptimizerKind::Genetic;
        start = clock::now();
        const auto ga = fitting::fit(p);
        const double ga_seconds = std::chrono::duration<double>(clock::now() - start).count();
        const double ga_err = max_curve_error(p, ga);

        const std::string tag(file);
        out.require(nm.J_opt < 1e-10, tag + " NM J " + fmt(nm.J_opt));
        out.require(nm_err < 1e-4, tag + " NM curve error " + fmt(nm_err));
        out.require(ga_err < 1e-3, tag + " GA curve error " + fmt(ga_err));
        out.require(nm_seconds < 300.0 && ga_seconds < 300.0, tag + " optimizer over 5 min");
        out.detail << tag << ": NM J " << fmt(nm.J_opt) << " |dr| " << fmt(nm_err) << " (" << fmt(nm_seconds)
                   << " s), GA J " << fmt(ga.J_opt) << " |dr| " << fmt(ga_err) << " (" << fmt(ga_seconds) << " s); ";
    }
}

double integrate_density(const DensitySpec& s, double upper) {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double t) { return density(s, t); };
    double total = 0.0, lo = 0.0;
    if (!s.is_exponential() && s.b > 0.0) {
        const double mid = std::min(s.b, upper);
        total += gauss_kronrod<double, 61>::integrate(f, 0.0, mid, 15, 1e-14);
        lo = mid;
    }
    if (upper > lo) total += gauss_kronrod<double, 61>::integrate(f, lo, upper, 15, 1e-14);
    return total;
}

// 7. Density layer.
void density_layer(Outcome& out) {
    const std::vector<DensitySpec> specs{DensitySpec::exponential(1.0),         DensitySpec::exponential(2.5),
                                         DensitySpec::linexp(1.0, 1.0),         DensitySpec::linexp(0.174, 0.91),
                                         DensitySpec::linexp(6.53, 1.31),       DensitySpec::linexp(2.28e-4, 0.0358),
                                         DensitySpec::linexp(0.158, 11.54)};
    std::mt19937_64 rng(777);
    double norm = 0.0, cdf_err = 0.0, round_trip = 0.0, limit = 0.0, worst_ks = 0.0;
    constexpr std::size_t ks_n = 100'000;
    const double ks_critical = 1.628 / std::sqrt(static_cast<double>(ks_n));

    for (const auto& s : specs) {
        norm = std::max(norm, std::abs(integrate_density(s, s.b + 50.0 * s.tau) - 1.0));

        std::uniform_real_distribution<double> t_dist(0.0, s.b + 10.0 * s.tau);
        for (int i = 0; i < 100; ++i) {
            const double t = t_dist(rng);
            cdf_err = std::max(cdf_err, std::abs(cdf(s, t) - integrate_density(s, t)));
        }

        for (int i = 1; i <= 99; ++i) {
            const double u = i / 100.0;
            round_trip = std::max(round_trip, std::abs(cdf(s, quantile(s, u)) - u));
        }

        std::vector<double> xs(ks_n);
        for (auto& x : xs) x = sample(s, rng);
        std::sort(xs.begin(), xs.end());
        double d = 0.0;
        for (std::size_t i = 0; i < ks_n; ++i) {
            const double f = cdf(s, xs[i]);
            d = std::max({d, f - static_cast<double>(i) / ks_n, static_cast<double>(i + 1) / ks_n - f});
        }
        worst_ks = std::max(worst_ks, d);
    }

    for (const double tau : {0.5, 1.0, 3.0})
        for (const double b : {1e-12, 1e-14}) {
            const auto le = DensitySpec::linexp(b, tau);
            const auto ex = DensitySpec::exponential(tau);
            for (const double t : dataio::log_spaced(1e-6, 30.0 * tau, 200)) {
                limit = std::max(limit, std::abs(density(le, t) - density(ex, t)));
                limit = std::max(limit, std::abs(cdf(le, t) - cdf(ex, t)));
            }
        }

    out.require(norm < 1e-10, "normalization " + fmt(norm));
    out.require(cdf_err < 1e-9, "cdf vs quadrature " + fmt(cdf_err));
    out.require(round_trip < 1e-10, "round trip " + fmt(round_trip));
    out.require(limit < 1e-8, "exponential limit " + fmt(limit));
    out.require(worst_ks < ks_critical, "KS distance " + fmt(worst_ks));
    out.detail << "norm " << fmt(norm) << ", cdf " << fmt(cdf_err) << ", round trip " << fmt(round_trip) << ", b->0 "
               << fmt(limit) << ", KS " << fmt(worst_ks) << " < " << fmt(ks_critical);
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "single-constraint closed form and MC scatter", 10.0, single_constraint},
        {2, "win-probability oracle", 60.0, win_probability_oracle},
        {3, "deactivation invariance with exponential clocks", 5.0, deactivation_invariance},
        {4, "analytical vs MC branching fraction on CRP", 300.0, analytical_vs_simulation},
        {5, "analytical engine speedup", 600.0, speedup},
        {6, "fit recovery on zero-noise synthetic data", 1200.0, fit_recovery},
        {7, "density layer", 30.0, density_layer},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.number)) continue;
        Outcome out;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(out);
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.require(seconds < c.time_limit_seconds, "runtime over " + fmt(c.time_limit_seconds) + " s");
        if (!out.pass) ++failures;
        std::string detail = out.detail.str();
        while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
        std::printf("%s criterion %d (%s): %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", c.number, c.title,
                    detail.c_str(), seconds);
        std::fflush(stdout);
    }
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
