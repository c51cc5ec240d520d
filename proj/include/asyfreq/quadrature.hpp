#pragma once

// Globally adaptive Gauss-Kronrod (G7/K15) integration of vector-valued
// integrands over finite intervals. All components share the same panel
// tree; the panel with the largest component error is bisected next.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include "asyfreq/errors.hpp"

namespace asyfreq::quadrature {

struct Options {
    double abs_tol = 1e-10;         // per component, summed over panels
    std::size_t max_panels = 4000;  // subdivision budget
};

struct VectorResult {
    std::vector<double> values;
    std::vector<double> errors;  // per-component error estimate
    std::size_t evaluations = 0;

    double max_error() const {
        return errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
    }
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a = 0.0;
    double b = 0.0;
    std::vector<double> value;
    std::vector<double> error;
    double worst = 0.0;

    bool operator<(const Panel& other) const { return worst < other.worst; }
};

// f(t, out) writes all components of the integrand at t into out.
template <class F>
Panel gauss_kronrod_15(F& f, double a, double b, std::size_t n, std::vector<double>& scratch,
                       std::size_t& evaluations) {
    Panel p{a, b, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0};
    std::vector<double> gauss(n, 0.0);
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    scratch.assign(n, 0.0);

    auto accumulate = [&](double x, double wk, double wg) {
        f(x, std::span<double>(scratch));
        ++evaluations;
        for (std::size_t c = 0; c < n; ++c) {
            p.value[c] += wk * scratch[c];
            gauss[c] += wg * scratch[c];
        }
    };

    accumulate(centre, kronrod_weights[7], gauss_weights[3]);
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double wg = (j % 2 == 1) ? gauss_weights[j / 2] : 0.0;
        accumulate(centre - dx, kronrod_weights[j], wg);
        accumulate(centre + dx, kronrod_weights[j], wg);
    }
    for (std::size_t c = 0; c < n; ++c) {
        p.value[c] *= half;
        gauss[c] *= half;
        p.error[c] = std::abs(p.value[c] - gauss[c]);
        p.worst = std::max(p.worst, p.error[c]);
    }
    return p;
}

}  // namespace detail

/// Integrate an n-component integrand over each consecutive pair of `cuts`.
/// Throws NumericalFailure if the budget runs out before every component's
/// summed error estimate drops below opts.abs_tol.
template <class F>
VectorResult integrate(F&& f, std::span<const double> cuts, std::size_t n, const Options& opts = {}) {
    VectorResult out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0};
    if (cuts.size() < 2) return out;

    std::vector<double> scratch(n);
    std::priority_queue<detail::Panel> queue;
    std::vector<double> total(n, 0.0), err(n, 0.0);

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        queue.push(detail::gauss_kronrod_15(f, cuts[i], cuts[i + 1], n, scratch, out.evaluations));
    }

    auto tally = [&] {
        std::fill(total.begin(), total.end(), 0.0);
        std::fill(err.begin(), err.end(), 0.0);
        auto copy = queue;
        while (!copy.empty()) {
            const auto& p = copy.top();
            for (std::size_t c = 0; c < n; ++c) {
                total[c] += p.value[c];
                err[c] += p.error[c];
            }
            copy.pop();
        }
    };

    // Running error sums are updated per split; tally() recomputes them exactly.
    tally();
    std::vector<double> run_err = err;
    auto converged = [&] {
        return std::all_of(run_err.begin(), run_err.end(),
                           [&](double e) { return e <= opts.abs_tol; });
    };

    while (!converged()) {
        if (queue.size() >= opts.max_panels) {
            tally();
            throw NumericalFailure("adaptive quadrature exceeded its subdivision budget",
                                   *std::max_element(err.begin(), err.end()));
        }
        detail::Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            tally();
            throw NumericalFailure("adaptive quadrature reached machine resolution",
                                   *std::max_element(err.begin(), err.end()));
        }
        auto left = detail::gauss_kronrod_15(f, worst.a, mid, n, scratch, out.evaluations);
        auto right = detail::gauss_kronrod_15(f, mid, worst.b, n, scratch, out.evaluations);
        for (std::size_t c = 0; c < n; ++c)
            run_err[c] += left.error[c] + right.error[c] - worst.error[c];
        queue.push(std::move(left));
        queue.push(std::move(right));
    }

    tally();
    out.values = total;
    out.errors = err;
    return out;
}

/// Scalar convenience wrapper over a single interval.
template <class F>
double integrate_scalar(F&& f, double a, double b, const Options& opts = {}, double* error = nullptr) {
    const std::array<double, 2> cuts{a, b};
    auto r = integrate([&](double t, std::span<double> out) { out[0] = f(t); },
                       std::span<const double>(cuts), 1, opts);
    if (error) *error = r.errors[0];
    return r.values[0];
}

}  // namespace asyfreq::quadrature
