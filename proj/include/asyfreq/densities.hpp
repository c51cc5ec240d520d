#pragma once

// Inter-event time densities: exponential and linear-exponential ("linexp").
//
// The linexp density rises linearly on [0, b) and decays exponentially with
// scale tau afterwards:
//
//   f(t) = 2 t / (b^2 + 2 b tau)                      0 <= t < b
//   f(t) = 2 b / (b^2 + 2 b tau) * exp(-(t - b)/tau)   t >= b
//
// which gives the piecewise CDF
//
//   F(t) = t^2 / (b^2 + 2 b tau)                       0 <= t < b
//   F(t) = 1 - 2 tau / (b + 2 tau) * exp(-(t - b)/tau)  t >= b
//
// b = 0 is the exponential limit and is evaluated as Exponential(tau).

#include <cmath>
#include <random>
#include <string>

#include "asyfreq/errors.hpp"

namespace asyfreq {

enum class DensityKind { Exponential, LinearExponential };

struct DensitySpec {
    DensityKind kind = DensityKind::Exponential;
    double b = 0.0;    // linexp breakpoint; zero for Exponential
    double tau = 1.0;  // exponential tail scale (mean for Exponential)

    static DensitySpec exponential(double tau) {
        DensitySpec s{DensityKind::Exponential, 0.0, tau};
        s.validate();
        return s;
    }

    static DensitySpec exponential_rate(double rate) {
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw DomainError("exponential rate must be positive and finite");
        return exponential(1.0 / rate);
    }

    static DensitySpec linexp(double b, double tau) {
        DensitySpec s{DensityKind::LinearExponential, b, tau};
        s.validate();
        return s;
    }

    void validate() const {
        if (!(tau > 0.0) || !std::isfinite(tau))
            throw DomainError("density tau must be positive and finite, got " + std::to_string(tau));
        if (!(b >= 0.0) || !std::isfinite(b))
            throw DomainError("density b must be nonnegative and finite, got " + std::to_string(b));
        if (kind == DensityKind::Exponential && b != 0.0)
            throw DomainError("exponential density has no breakpoint (b must be 0)");
    }

    /// True when the density is evaluated by the exponential formulas.
    bool is_exponential() const { return kind == DensityKind::Exponential || b == 0.0; }

    /// Time at which the density changes branch (0 for exponential).
    double breakpoint() const { return is_exponential() ? 0.0 : b; }

    friend bool operator==(const DensitySpec&, const DensitySpec&) = default;
};

inline const char* to_string(DensityKind k) {
    return k == DensityKind::Exponential ? "exp" : "linexp";
}

namespace detail {
inline void check_time(double t) {
    if (!(t >= 0.0)) throw DomainError("time must be nonnegative, got " + std::to_string(t));
}
}  // namespace detail

inline double density(const DensitySpec& s, double t) {
    detail::check_time(t);
    if (s.is_exponential()) return std::exp(-t / s.tau) / s.tau;
    const double span = s.b + 2.0 * s.tau;
    if (t < s.b) return 2.0 * t / (s.b * span);
    return 2.0 / span * std::exp(-(t - s.b) / s.tau);
}

/// P(T > t), evaluated directly so the tail keeps full relative precision.
inline double survival(const DensitySpec& s, double t) {
    detail::check_time(t);
    if (s.is_exponential()) return std::exp(-t / s.tau);
    const double span = s.b + 2.0 * s.tau;
    if (t < s.b) return 1.0 - t * t / (s.b * span);
    return 2.0 * s.tau / span * std::exp(-(t - s.b) / s.tau);
}

inline double cdf(const DensitySpec& s, double t) {
    detail::check_time(t);
    if (s.is_exponential()) return -std::expm1(-t / s.tau);
    const double span = s.b + 2.0 * s.tau;
    if (t < s.b) return t * t / (s.b * span);
    return 1.0 - 2.0 * s.tau / span * std::exp(-(t - s.b) / s.tau);
}

/// Inverse CDF on [0, 1).
inline double quantile(const DensitySpec& s, double u) {
    if (!(u >= 0.0 && u < 1.0)) throw DomainError("quantile argument must lie in [0, 1)");
    if (s.is_exponential()) return -s.tau * std::log1p(-u);
    const double span = s.b + 2.0 * s.tau;
    if (u < s.b / span) return std::sqrt(u * s.b * span);
    return s.b - s.tau * std::log((1.0 - u) * span / (2.0 * s.tau));
}

/// Exact draw by inverse transform. The caller owns the stream.
template <class URBG>
double sample(const DensitySpec& s, URBG& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return quantile(s, unit(rng));
}

}  // namespace asyfreq
