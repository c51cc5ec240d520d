#pragma once

// Asymptotic event fractions of constrained processes.
//
// Events are partitioned by which outcomes are currently possible. Within a
// partition the winner is the clock with the smallest realisation, so
// n_i = sum_over_partitions P_i(partition) * n(partition). The partition sizes
// follow from balance relations for the two topologies with a single nonzero
// constraint (two outcomes, and three outcomes as in CRP backbiting).

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asyfreq/densities.hpp"
#include "asyfreq/errors.hpp"
#include "asyfreq/model.hpp"
#include "asyfreq/winprob.hpp"

namespace asyfreq {

struct AsymptoticResult {
    std::vector<std::string> outcomes;
    std::vector<double> fractions;           // n_i / n_T
    std::map<OutcomePair, double> ratios;    // n_i / n_k

    double ratio(std::size_t i, std::size_t k) const { return fractions[i] / fractions[k]; }
};

/// Model shape that the closed-form solver cannot handle; use the simulator.
class UnsupportedTopology : public ValidationError {
public:
    using ValidationError::ValidationError;
};

namespace asymptotics {

/// Outcome 1 is free, outcome 2 needs n0 occurrences of 1 since its last firing.
/// n2/n1 = P(T2<T1) / (P(T1<T2) + n0 P(T2<T1)).
inline AsymptoticResult solve_single_constraint(const DensitySpec& free_clock,
                                                const DensitySpec& constrained_clock, std::uint32_t n0,
                                                WinProbMethod method = WinProbMethod::Exact) {
    const ClockSet both{free_clock, constrained_clock};
    const auto p = winprob::win_probabilities(both, method);
    const double p1 = p[0], p2 = p[1];
    const double n0d = static_cast<double>(n0);
    const double denom = p1 + n0d * p2;
    if (!(denom > 0.0)) throw ModelDegeneracy("free outcome never fires: n2/n1 is undefined");

    AsymptoticResult out;
    out.outcomes = {"free", "constrained"};
    out.fractions = {denom / (1.0 + n0d * p2), p2 / (1.0 + n0d * p2)};
    out.ratios[{1, 0}] = p2 / denom;
    return out;
}

/// CRP: propagation and deactivation are always possible, backbiting needs n0
/// propagations since the previous backbiting. Deactivation does not touch
/// that counter. Returns fractions in the order (p, d, r) with the branching
/// fraction r = n_r / n_p stored under ratio (2, 0).
inline AsymptoticResult solve_crp(const DensitySpec& prop, const DensitySpec& deact, const DensitySpec& back,
                                  std::uint32_t n0 = 3, WinProbMethod method = WinProbMethod::Exact) {
    const ClockSet pd{prop, deact};
    const ClockSet pdr{prop, deact, back};
    const auto two = winprob::win_probabilities(pd, method);
    const auto three = winprob::win_probabilities(pdr, method);
    const double p_pd = two[0], p_dp = two[1];
    const double p_p = three[0], p_d = three[1], p_r = three[2];
    if (!(p_pd > 0.0))
        throw ModelDegeneracy("propagation never wins against deactivation: P(Tp < Td) = 0");

    const double n0d = static_cast<double>(n0);
    const double denom = p_pd + n0d * p_r;
    // Partition sizes per event: backbiting impossible (110) and possible (111).
    const double blocked = n0d * p_r / denom;
    const double open = p_pd / denom;

    AsymptoticResult out;
    out.outcomes = {"p", "d", "r"};
    out.fractions = {p_pd * blocked + p_p * open, p_dp * blocked + p_d * open, p_r * open};
    const double branching = p_r / (p_p + n0d * p_r);
    out.ratios[{2, 0}] = branching;
    return out;
}

inline double branching_fraction(const AsymptoticResult& crp) { return crp.ratios.at({2, 0}); }

/// r = n_r / n_p alone, from the three-clock win probabilities. This is the
/// inner loop of fitting, so it skips the full fraction bookkeeping.
inline double crp_branching_fraction(const DensitySpec& prop, const DensitySpec& deact, const DensitySpec& back,
                                     std::uint32_t n0 = 3, WinProbMethod method = WinProbMethod::Exact) {
    const std::array<DensitySpec, 3> pdr{prop, deact, back};
    const auto three = winprob::win_probabilities(pdr, method);
    if (!(three[0] > 0.0)) {
        // P(Tp < Td) >= P(Tp < Td, Tr), so only an underflowed three-way value needs the pairwise check.
        const std::array<DensitySpec, 2> pd{prop, deact};
        if (!(winprob::win_probabilities(pd, method)[0] > 0.0))
            throw ModelDegeneracy("propagation never wins against deactivation: P(Tp < Td) = 0");
    }
    return three[2] / (three[0] + static_cast<double>(n0) * three[2]);
}

/// Solve a validated EventModel. Supported shapes: no constraints at all (one
/// partition, fractions are the win probabilities), or exactly one nonzero
/// entry with two or three outcomes. Anything else throws UnsupportedTopology.
inline AsymptoticResult solve(const EventModel& model, WinProbMethod method = WinProbMethod::Exact) {
    require_valid(model);
    const std::size_t n = model.size();
    std::vector<OutcomePair> nonzero;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (model.constraints[i][j] != 0) nonzero.emplace_back(i, j);

    AsymptoticResult out;
    out.outcomes = model.outcomes;
    out.fractions.assign(n, 0.0);

    if (nonzero.empty()) {
        out.fractions = winprob::win_probabilities(model.clocks, method);
    } else if (nonzero.size() == 1 && (n == 2 || n == 3)) {
        const auto [constrained, required] = nonzero.front();
        const std::uint32_t n0 = model.constraints[constrained][required];
        if (n == 2) {
            auto r = solve_single_constraint(model.clocks[required], model.clocks[constrained], n0, method);
            out.fractions[required] = r.fractions[0];
            out.fractions[constrained] = r.fractions[1];
        } else {
            const std::size_t other = 3 - constrained - required;
            auto r = solve_crp(model.clocks[required], model.clocks[other], model.clocks[constrained], n0, method);
            out.fractions[required] = r.fractions[0];
            out.fractions[other] = r.fractions[1];
            out.fractions[constrained] = r.fractions[2];
        }
    } else {
        throw UnsupportedTopology(
            "closed-form solving supports unconstrained models or a single nonzero constraint with 2 or 3 "
            "outcomes; simulate this model instead");
    }

    for (const auto& pr : default_ratio_pairs(model)) out.ratios[pr] = out.ratio(pr.first, pr.second);
    return out;
}

}  // namespace asymptotics
}  // namespace asyfreq
