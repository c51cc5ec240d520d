#pragma once

// Win probabilities for independent event clocks:
//
//   p_k = P(T_k < T_j for all j != k) = int_0^inf f_k(t) prod_{j != k} S_j(t) dt
//
// Three routes are provided:
//   * exponential closed form, p_k = c_k / sum_j c_j;
//   * adaptive Gauss-Kronrod quadrature, valid for any density;
//   * exact piecewise integration for the exponential/linexp families, where
//     the integrand on each panel between breakpoints is a polynomial times an
//     exponential.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "asyfreq/densities.hpp"
#include "asyfreq/errors.hpp"
#include "asyfreq/quadrature.hpp"

namespace asyfreq {

using ClockSet = std::vector<DensitySpec>;

enum class WinProbMethod { Exact, Quadrature };

inline const char* to_string(WinProbMethod m) {
    return m == WinProbMethod::Exact ? "exact" : "quadrature";
}

namespace winprob {

inline constexpr double sum_tolerance = 1e-8;
inline constexpr double tail_cutoff = 1e-14;

struct QuadratureOptions {
    double abs_tol = 1e-10;
    std::size_t max_panels = 4000;
};

namespace detail {

inline void check_clocks(std::span<const DensitySpec> clocks) {
    if (clocks.empty()) throw DomainError("win probabilities need at least one clock");
    for (const auto& c : clocks) c.validate();
}

inline double survival_product(std::span<const DensitySpec> clocks, double t) {
    double p = 1.0;
    for (const auto& c : clocks) p *= survival(c, t);
    return p;
}

inline std::vector<double> sorted_breakpoints(std::span<const DensitySpec> clocks) {
    std::vector<double> bps;
    for (const auto& c : clocks)
        if (c.breakpoint() > 0.0) bps.push_back(c.breakpoint());
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    return bps;
}

inline void renormalize(std::vector<double>& p) {
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(std::abs(sum - 1.0) <= sum_tolerance))
        throw NumericalFailure("win probabilities do not sum to one", std::abs(sum - 1.0));
    for (auto& v : p) v /= sum;
}

// Smallest time (to bisection precision) past which the survival product of
// all clocks is below `cutoff`; every component's neglected tail is bounded by it.
inline double truncation_point(std::span<const DensitySpec> clocks, double cutoff) {
    double lo = 0.0;
    double max_tau = 0.0;
    for (const auto& c : clocks) {
        lo = std::max(lo, c.breakpoint());
        max_tau = std::max(max_tau, c.tau);
    }
    if (survival_product(clocks, lo) < cutoff) {
        double hi = lo;
        lo = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (survival_product(clocks, mid) < cutoff ? hi : lo) = mid;
        }
        return hi;
    }
    double step = max_tau;
    double hi = lo + step;
    while (survival_product(clocks, hi) >= cutoff) {
        lo = hi;
        step *= 2.0;
        hi += step;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (survival_product(clocks, mid) < cutoff ? hi : lo) = mid;
    }
    return hi;
}

// I_m = int_0^L s^m exp(-lambda s) ds for m = 0..out.size()-1; L may be +inf.
inline void exp_moments(double lambda, double length, std::span<double> out) {
    const std::size_t count = out.size();
    if (count == 0) return;
    if (std::isinf(length)) {
        double v = 1.0 / lambda;
        for (std::size_t m = 0; m < count; ++m) {
            out[m] = v;
            v *= static_cast<double>(m + 1) / lambda;
        }
        return;
    }
    if (lambda == 0.0) {
        double lp = length;
        for (std::size_t m = 0; m < count; ++m) {
            out[m] = lp / static_cast<double>(m + 1);
            lp *= length;
        }
        return;
    }
    const double x = lambda * length;
    const double ex = std::exp(-x);
    const double top = static_cast<double>(count);
    if (x >= 0.5 * top) {
        // Upward recursion I_m = (m I_{m-1} - L^m e^{-x}) / lambda. Relative
        // error growth is Gamma(m+1) / gamma(m+1, x), a few units at most here.
        out[0] = -std::expm1(-x) / lambda;
        double lpow_ex = ex;  // L^m e^{-x}
        for (std::size_t m = 1; m < count; ++m) {
            lpow_ex *= length;
            out[m] = (static_cast<double>(m) * out[m - 1] - lpow_ex) / lambda;
        }
        return;
    }
    // Positive series for the highest order, then the stable downward recursion
    // I_{m-1} = (lambda I_m + L^m e^{-x}) / m.
    double term = 1.0 / top, sum = term;
    for (int k = 1; k < 400 && term > 1e-17 * sum; ++k) {
        term *= x / (top + k);
        sum += term;
    }
    double lpow = std::pow(length, top);  // L^count
    out[count - 1] = lpow * ex * sum;
    for (std::size_t m = count - 1; m > 0; --m) {
        lpow /= length;
        out[m - 1] = (lambda * out[m] + lpow * ex) / static_cast<double>(m);
    }
}

// On a panel starting at a, clock j's survival and density are
// poly(s) * exp(-rate s) with s = t - a. Polynomials have at most 3 terms.
struct PanelFactor {
    std::array<double, 3> surv{};
    std::array<double, 2> dens{};
    std::size_t surv_terms = 1;
    std::size_t dens_terms = 1;
    double rate = 0.0;
};

inline PanelFactor panel_factor(const DensitySpec& c, double a) {
    PanelFactor f;
    if (c.is_exponential()) {
        const double scale = std::exp(-a / c.tau);
        f.surv[0] = scale;
        f.dens[0] = scale / c.tau;
        f.rate = 1.0 / c.tau;
        return f;
    }
    const double span = c.b + 2.0 * c.tau;
    if (a < c.b) {
        const double z = c.b * span;
        f.surv = {1.0 - a * a / z, -2.0 * a / z, -1.0 / z};
        f.dens = {2.0 * a / z, 2.0 / z};
        f.surv_terms = 3;
        f.dens_terms = 2;
        return f;
    }
    const double decay = std::exp(-(a - c.b) / c.tau);
    f.surv[0] = 2.0 * c.tau / span * decay;
    f.dens[0] = 2.0 / span * decay;
    f.rate = 1.0 / c.tau;
    return f;
}

// acc[0..len) *= factor[0..terms); returns the new length.
inline std::size_t poly_multiply(std::span<double> acc, std::size_t len, const double* factor, std::size_t terms) {
    if (terms == 1) {
        for (std::size_t i = 0; i < len; ++i) acc[i] *= factor[0];
        return len;
    }
    const std::size_t out_len = len + terms - 1;
    for (std::size_t i = out_len; i-- > 0;) {
        double v = 0.0;
        for (std::size_t j = 0; j < terms; ++j)
            if (i >= j && i - j < len) v += acc[i - j] * factor[j];
        acc[i] = v;
    }
    return out_len;
}

}  // namespace detail

/// p_k = c_k / sum(c). Rates must be positive.
inline std::vector<double> win_probabilities_exponential(std::span<const double> rates) {
    if (rates.empty()) throw DomainError("win probabilities need at least one rate");
    for (double r : rates)
        if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("rates must be positive and finite");
    const double total = std::accumulate(rates.begin(), rates.end(), 0.0);
    std::vector<double> p(rates.size());
    for (std::size_t k = 0; k < rates.size(); ++k) p[k] = rates[k] / total;
    return p;
}

/// Adaptive quadrature route, valid for any density in the library. The
/// domain is split at every linexp breakpoint and truncated where the
/// survival product falls below 1e-14. Values are the raw integrals, before
/// any renormalisation.
inline quadrature::VectorResult win_probabilities_quadrature_raw(std::span<const DensitySpec> clocks,
                                                                 const QuadratureOptions& opts = {}) {
    detail::check_clocks(clocks);
    const std::size_t n = clocks.size();
    if (n == 1) return {{1.0}, {0.0}, 0};

    const double upper = detail::truncation_point(clocks, tail_cutoff);
    std::vector<double> cuts{0.0};
    for (double bp : detail::sorted_breakpoints(clocks))
        if (bp < upper) cuts.push_back(bp);
    cuts.push_back(upper);

    std::vector<double> surv(n), dens(n), prefix(n + 1), suffix(n + 1);
    auto integrand = [&](double t, std::span<double> out) {
        for (std::size_t j = 0; j < n; ++j) {
            surv[j] = survival(clocks[j], t);
            dens[j] = density(clocks[j], t);
        }
        prefix[0] = 1.0;
        for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * surv[j];
        suffix[n] = 1.0;
        for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] * surv[j];
        for (std::size_t k = 0; k < n; ++k) out[k] = dens[k] * prefix[k] * suffix[k + 1];
    };

    return quadrature::integrate(integrand, std::span<const double>(cuts), n, {opts.abs_tol, opts.max_panels});
}

/// Quadrature route; throws NumericalFailure unless the raw values sum to one
/// within 1e-8, then removes the residual.
inline std::vector<double> win_probabilities_quadrature(std::span<const DensitySpec> clocks,
                                                        const QuadratureOptions& opts = {}) {
    auto result = win_probabilities_quadrature_raw(clocks, opts);
    detail::renormalize(result.values);
    return result.values;
}

namespace detail {

// Exact route with caller-provided workspace: cuts (n + 2), poly and moments
// (2 n each), factors (n). Accumulates into p.
inline void exact_into(std::span<const DensitySpec> clocks, std::span<double> p, std::span<double> cuts,
                       std::span<double> poly, std::span<double> moments, std::span<PanelFactor> factors) {
    const std::size_t n = clocks.size();
    std::size_t ncuts = 0;
    cuts[ncuts++] = 0.0;
    for (const auto& c : clocks)
        if (c.breakpoint() > 0.0) cuts[ncuts++] = c.breakpoint();
    std::sort(cuts.begin() + 1, cuts.begin() + static_cast<std::ptrdiff_t>(ncuts));
    ncuts = static_cast<std::size_t>(std::unique(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(ncuts)) -
                                     cuts.begin());
    cuts[ncuts++] = std::numeric_limits<double>::infinity();

    const std::size_t max_terms = 2 * n;  // degree <= 1 + 2 (n - 1)
    std::fill(p.begin(), p.end(), 0.0);
    for (std::size_t panel = 0; panel + 1 < ncuts; ++panel) {
        const double a = cuts[panel];
        const double length = cuts[panel + 1] - a;
        double rate = 0.0;
        std::size_t top_terms = 2;
        for (std::size_t j = 0; j < n; ++j) {
            factors[j] = panel_factor(clocks[j], a);
            rate += factors[j].rate;
            top_terms += factors[j].surv_terms - 1;
        }
        // A clock's density and survival share its rate, so every component's
        // integrand decays at the same total rate on this panel.
        exp_moments(rate, length, moments.first(std::min(top_terms, max_terms)));
        for (std::size_t k = 0; k < n; ++k) {
            std::copy(factors[k].dens.begin(), factors[k].dens.begin() + factors[k].dens_terms, poly.begin());
            std::size_t len = factors[k].dens_terms;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) len = poly_multiply(poly, len, factors[j].surv.data(), factors[j].surv_terms);
            double sum = 0.0;
            for (std::size_t m = 0; m < len; ++m) sum += poly[m] * moments[m];
            p[k] += sum;
        }
    }
}

}  // namespace detail

/// Exact route for exponential and linexp clocks: each panel between sorted
/// breakpoints is integrated in closed form.
inline std::vector<double> win_probabilities_exact(std::span<const DensitySpec> clocks) {
    detail::check_clocks(clocks);
    const std::size_t n = clocks.size();
    if (n == 1) return {1.0};

    std::vector<double> p(n);
    constexpr std::size_t small = 8;
    if (n <= small) {
        std::array<double, small + 2> cuts;
        std::array<double, 2 * small> poly, moments;
        std::array<detail::PanelFactor, small> factors;
        detail::exact_into(clocks, p, cuts, poly, moments, std::span(factors).first(n));
    } else {
        std::vector<double> cuts(n + 2), poly(2 * n), moments(2 * n);
        std::vector<detail::PanelFactor> factors(n);
        detail::exact_into(clocks, p, cuts, poly, moments, factors);
    }
    detail::renormalize(p);
    return p;
}

/// Dispatch to the exact piecewise route or to adaptive quadrature.
inline std::vector<double> win_probabilities(std::span<const DensitySpec> clocks,
                                             WinProbMethod method = WinProbMethod::Quadrature) {
    detail::check_clocks(clocks);
    if (method == WinProbMethod::Exact) return win_probabilities_exact(clocks);
    return win_probabilities_quadrature(clocks);
}

}  // namespace winprob
}  // namespace asyfreq
