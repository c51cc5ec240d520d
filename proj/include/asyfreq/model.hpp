#pragma once

// Constrained event model: outcome i may fire only once at least c_ij
// occurrences of outcome j have happened since i last fired.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "asyfreq/densities.hpp"
#include "asyfreq/errors.hpp"

namespace asyfreq {

using ConstraintMatrix = std::vector<std::vector<std::uint32_t>>;
using OutcomePair = std::pair<std::size_t, std::size_t>;

struct EventModel {
    std::vector<std::string> outcomes;
    ConstraintMatrix constraints;
    std::vector<DensitySpec> clocks;
    std::vector<OutcomePair> ratios;  // requested n_i / n_k pairs

    std::size_t size() const { return outcomes.size(); }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < outcomes.size(); ++i)
            if (outcomes[i] == name) return i;
        throw ValidationError("unknown outcome '" + name + "'");
    }
};

struct Violation {
    enum class Kind { Shape, SelfConstraint, NoFreeOutcome, BadClock, BadRatio };
    Kind kind;
    std::optional<std::size_t> row;
    std::optional<std::size_t> col;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }

    std::string summary() const {
        std::string s;
        for (const auto& v : violations) {
            if (!s.empty()) s += "; ";
            s += v.message;
        }
        return s;
    }
};

/// Checks the shape of the model and the two well-posedness conditions:
/// no outcome constrains itself, and at least one outcome is unconstrained.
inline ValidationReport validate_model(const EventModel& model) {
    ValidationReport report;
    using K = Violation::Kind;
    const std::size_t n = model.size();
    if (n == 0) {
        report.violations.push_back({K::Shape, {}, {}, "model has no outcomes"});
        return report;
    }
    std::set<std::string> names(model.outcomes.begin(), model.outcomes.end());
    if (names.size() != n)
        report.violations.push_back({K::Shape, {}, {}, "outcome names must be unique"});
    if (model.clocks.size() != n)
        report.violations.push_back({K::Shape, {}, {}, "expected one clock per outcome"});
    if (model.constraints.size() != n) {
        report.violations.push_back({K::Shape, {}, {}, "constraint matrix must be N x N"});
        return report;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (model.constraints[i].size() != n) {
            report.violations.push_back(
                {K::Shape, i, {}, "constraint row " + std::to_string(i) + " has wrong length"});
            return report;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (model.constraints[i][i] != 0)
            report.violations.push_back({K::SelfConstraint, i, i,
                                         "outcome '" + model.outcomes[i] + "' constrains itself at (" +
                                             std::to_string(i) + "," + std::to_string(i) + ")"});
    }
    bool any_free = false;
    for (std::size_t i = 0; i < n; ++i) {
        bool free = true;
        for (std::size_t j = 0; j < n; ++j) free = free && model.constraints[i][j] == 0;
        any_free = any_free || free;
    }
    if (!any_free)
        report.violations.push_back(
            {K::NoFreeOutcome, {}, {}, "no outcome is free to occur (every constraint row is nonzero)"});
    for (std::size_t i = 0; i < model.clocks.size(); ++i) {
        try {
            model.clocks[i].validate();
        } catch (const DomainError& e) {
            report.violations.push_back({K::BadClock, i, {}, "clock " + std::to_string(i) + ": " + e.what()});
        }
    }
    for (const auto& [a, b] : model.ratios) {
        if (a >= n || b >= n)
            report.violations.push_back({K::BadRatio, a, b, "ratio pair refers to a missing outcome"});
    }
    return report;
}

inline void require_valid(const EventModel& model) {
    auto report = validate_model(model);
    if (!report.ok()) throw ValidationError("invalid event model: " + report.summary());
}

/// The model's requested ratio pairs, or (constrained, required) for every
/// nonzero constraint when none were requested.
inline std::vector<OutcomePair> default_ratio_pairs(const EventModel& model) {
    if (!model.ratios.empty()) return model.ratios;
    std::vector<OutcomePair> pairs;
    for (std::size_t i = 0; i < model.constraints.size(); ++i)
        for (std::size_t j = 0; j < model.constraints[i].size(); ++j)
            if (model.constraints[i][j] != 0) pairs.emplace_back(i, j);
    if (pairs.empty() && model.size() > 1) pairs.emplace_back(1, 0);
    return pairs;
}

/// Two outcomes; "constrained" needs n0 occurrences of "free" between its own firings.
inline EventModel single_constraint_model(const DensitySpec& free_clock, const DensitySpec& constrained_clock,
                                          std::uint32_t n0) {
    return {{"free", "constrained"}, {{0, 0}, {n0, 0}}, {free_clock, constrained_clock}, {{1, 0}}};
}

/// Propagation (p), deactivation (d) and backbiting (r); backbiting needs n0
/// propagations since the previous backbiting.
inline EventModel crp_model(const DensitySpec& prop, const DensitySpec& deact, const DensitySpec& back,
                            std::uint32_t n0 = 3) {
    return {{"p", "d", "r"}, {{0, 0, 0}, {0, 0, 0}, {n0, 0, 0}}, {prop, deact, back}, {{2, 0}}};
}

}  // namespace asyfreq
