#pragma once

// Test-only oracles, independent of the library's analytical routes.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "asyfreq/densities.hpp"

namespace oracle {

/// Frequency with which each clock realises the minimum over `draws` tuples.
inline std::vector<double> argmin_frequencies(const std::vector<asyfreq::DensitySpec>& clocks,
                                              std::size_t draws, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> counts(clocks.size(), 0.0);
    for (std::size_t i = 0; i < draws; ++i) {
        std::size_t best = 0;
        double best_t = asyfreq::sample(clocks[0], rng);
        for (std::size_t k = 1; k < clocks.size(); ++k) {
            const double t = asyfreq::sample(clocks[k], rng);
            if (t < best_t) {
                best_t = t;
                best = k;
            }
        }
        counts[best] += 1.0;
    }
    for (auto& c : counts) c /= static_cast<double>(draws);
    return counts;
}

inline double binomial_se(double p, std::size_t n) {
    return std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(n));
}

/// Random clock set mixing exponential and linexp densities with
/// log-uniform parameters in [0.05, 3].
template <class URBG>
std::vector<asyfreq::DensitySpec> random_mixed_clocks(URBG& rng, std::size_t n) {
    std::uniform_real_distribution<double> log_param(std::log(0.05), std::log(3.0));
    std::bernoulli_distribution linexp(0.6);
    std::vector<asyfreq::DensitySpec> clocks;
    for (std::size_t k = 0; k < n; ++k) {
        const double tau = std::exp(log_param(rng));
        if (linexp(rng))
            clocks.push_back(asyfreq::DensitySpec::linexp(std::exp(log_param(rng)), tau));
        else
            clocks.push_back(asyfreq::DensitySpec::exponential(tau));
    }
    return clocks;
}

}  // namespace oracle

namespace oracle {

/// Literal transcription of the CRP Monte Carlo loop with a single
/// propagation counter. Clocks are drawn in (p, d, r) order so that a shared
/// seed reproduces the generic engine's stream.
struct CrpCounts {
    std::uint64_t p = 0, d = 0, r = 0;
};

inline CrpCounts crp_loop(const asyfreq::DensitySpec& prop, const asyfreq::DensitySpec& deact,
                          const asyfreq::DensitySpec& back, std::uint64_t events, std::uint32_t n0,
                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CrpCounts n;
    std::uint32_t since_backbite = 0;
    for (std::uint64_t i = 0; i < events; ++i) {
        if (since_backbite < n0) {
            const double tp = asyfreq::sample(prop, rng);
            const double td = asyfreq::sample(deact, rng);
            if (tp <= td) {
                ++n.p;
                ++since_backbite;
            } else {
                ++n.d;
            }
        } else {
            const double tp = asyfreq::sample(prop, rng);
            const double td = asyfreq::sample(deact, rng);
            const double tr = asyfreq::sample(back, rng);
            if (tp <= td && tp <= tr) {
                ++n.p;
            } else if (td < tp && td <= tr) {
                ++n.d;
            } else {
                ++n.r;
                since_backbite = 0;
            }
        }
    }
    return n;
}

}  // namespace oracle
