#pragma once

// Constrained kinetic Monte Carlo.
//
// At every step the possible outcomes are those whose occurrence counters
// satisfy their constraint row. One fresh clock is drawn per possible outcome
// and the minimum fires. Firing outcome f resets f's own counters and
// advances every counter that tracks f. With the CRP model this is the
// propagation/deactivation/backbiting loop with a single propagation counter
// that only backbiting resets.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "asyfreq/densities.hpp"
#include "asyfreq/errors.hpp"
#include "asyfreq/model.hpp"
#include "asyfreq/parallel.hpp"

namespace asyfreq {

struct SimConfig {
    EventModel model;
    std::uint64_t events = 10'000;  // G, total events fired
    std::uint64_t seed = 1;
    std::uint32_t replicates = 1;
    bool log_events = false;
    unsigned workers = 0;  // 0: hardware concurrency

    void validate() const {
        require_valid(model);
        if (events < 1) throw ValidationError("sample size G must be at least 1");
        if (replicates < 1) throw ValidationError("replicates must be at least 1");
    }
};

struct SimResult {
    std::vector<std::uint64_t> counts;
    std::map<OutcomePair, double> ratios;  // NaN when the denominator count is zero
    std::uint64_t seed = 0;
    std::chrono::duration<double> wall_time{0.0};
    std::vector<std::uint32_t> event_log;  // only with SimConfig::log_events

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
};

struct RatioSummary {
    double mean = 0.0;
    std::optional<double> std_dev;         // sample standard deviation
    std::optional<double> standard_error;  // std_dev / sqrt(replicates)
};

struct ReplicateSummary {
    std::vector<SimResult> runs;
    std::map<OutcomePair, RatioSummary> ratios;
};

namespace simulator {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of replicate k, a pure function of (master seed, k).
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t k) {
    return mix64(mix64(master) ^ mix64(k + 0x632be59bd9b4e019ULL));
}

/// Standard error of n_i / n_k treating n_i among n_i + n_k as binomial.
inline double binomial_ratio_se(std::uint64_t n_i, std::uint64_t n_k) {
    const double m = static_cast<double>(n_i + n_k);
    if (n_k == 0 || m == 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double p = static_cast<double>(n_i) / m;
    return std::sqrt(p * (1.0 - p) / m) / ((1.0 - p) * (1.0 - p));
}

namespace detail {

struct ConstraintTerm {
    std::size_t required;
    std::uint32_t count;
};

inline std::map<OutcomePair, double> ratios_of(const std::vector<std::uint64_t>& counts,
                                               const std::vector<OutcomePair>& pairs) {
    std::map<OutcomePair, double> out;
    for (const auto& [i, k] : pairs)
        out[{i, k}] = counts[k] == 0 ? std::numeric_limits<double>::quiet_NaN()
                                     : static_cast<double>(counts[i]) / static_cast<double>(counts[k]);
    return out;
}

}  // namespace detail

/// One run of G events. The model must be valid; progress is guaranteed
/// because at least one outcome is unconstrained.
template <class URBG>
SimResult run(const SimConfig& config, URBG& rng) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    const EventModel& model = config.model;
    const std::size_t n = model.size();

    // Per outcome: nonzero constraint entries; counters[i][j] counts j since i fired.
    std::vector<std::vector<detail::ConstraintTerm>> terms(n);
    std::vector<std::vector<std::size_t>> trackers(n);  // trackers[j]: outcomes i with c_ij > 0
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (model.constraints[i][j] > 0) {
                terms[i].push_back({j, model.constraints[i][j]});
                trackers[j].push_back(i);
            }
    std::vector<std::vector<std::uint32_t>> counters(n, std::vector<std::uint32_t>(n, 0));

    SimResult result;
    result.counts.assign(n, 0);
    if (config.log_events) result.event_log.reserve(config.events);

    for (std::uint64_t step = 0; step < config.events; ++step) {
        std::size_t winner = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            bool possible = true;
            for (const auto& term : terms[i]) possible = possible && counters[i][term.required] >= term.count;
            if (!possible) continue;
            const double t = sample(model.clocks[i], rng);
            if (winner == n || t < best) {
                best = t;
                winner = i;
            }
        }
        ++result.counts[winner];
        if (config.log_events) result.event_log.push_back(static_cast<std::uint32_t>(winner));
        for (const auto& term : terms[winner]) counters[winner][term.required] = 0;
        for (std::size_t i : trackers[winner])
            counters[i][winner] = std::min(counters[i][winner] + 1, model.constraints[i][winner]);
    }

    result.ratios = detail::ratios_of(result.counts, default_ratio_pairs(model));
    result.seed = config.seed;
    result.wall_time = std::chrono::steady_clock::now() - started;
    return result;
}

/// Convenience overload seeding the engine from config.seed.
inline SimResult run(const SimConfig& config) {
    Engine rng(config.seed);
    return run(config, rng);
}

/// Replicate k runs on the substream seeded by substream_seed(seed, k).
/// Results are ordered by replicate index, so output does not depend on the
/// worker count.
inline ReplicateSummary run_replicates(const SimConfig& config) {
    config.validate();
    const std::size_t reps = config.replicates;
    ReplicateSummary summary;
    summary.runs.resize(reps);

    auto one = [&](std::size_t k) {
        SimConfig c = config;
        c.seed = substream_seed(config.seed, k);
        Engine rng(c.seed);
        summary.runs[k] = run(c, rng);
    };

    parallel_for(reps, config.workers, one);

    for (const auto& [pair, _] : summary.runs.front().ratios) {
        double sum = 0.0;
        for (const auto& r : summary.runs) sum += r.ratios.at(pair);
        RatioSummary s;
        s.mean = sum / static_cast<double>(reps);
        if (reps > 1) {
            double sq = 0.0;
            for (const auto& r : summary.runs) sq += std::pow(r.ratios.at(pair) - s.mean, 2);
            s.std_dev = std::sqrt(sq / static_cast<double>(reps - 1));
            s.standard_error = *s.std_dev / std::sqrt(static_cast<double>(reps));
        }
        summary.ratios[pair] = s;
    }
    return summary;
}

/// Replays an event log and reports the first step at which an outcome fired
/// before its constraint row was satisfied, or nullopt if the log is clean.
inline std::optional<std::size_t> first_constraint_violation(const EventModel& model,
                                                             const std::vector<std::uint32_t>& log) {
    const std::size_t n = model.size();
    std::vector<std::vector<std::uint64_t>> since(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t step = 0; step < log.size(); ++step) {
        const std::size_t f = log[step];
        for (std::size_t j = 0; j < n; ++j)
            if (since[f][j] < model.constraints[f][j]) return step;
        for (std::size_t j = 0; j < n; ++j) since[f][j] = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != f) ++since[i][f];
    }
    return std::nullopt;
}

}  // namespace simulator
}  // namespace asyfreq
