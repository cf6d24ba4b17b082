#pragma once

#include <cmath>
#include <cstdint>

#include "sirlat/params.hpp"

namespace sirlat {

namespace detail {

// Sequential-search inversion; expected cost O(n p).
template <class Uniform>
std::int64_t binomial_inversion(std::int64_t n, double p, Uniform& uniform)
{
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = (static_cast<double>(n) + 1.0) * s;
    const double r0 = std::exp(static_cast<double>(n) * std::log1p(-p));
    for (;;) {
        double r = r0;
        double u = uniform();
        std::int64_t x = 0;
        while (u > r) {
            u -= r;
            ++x;
            if (x > n) {
                break;  // rounding left mass beyond n; redraw
            }
            r *= a / static_cast<double>(x) - s;
        }
        if (x <= n) {
            return x;
        }
    }
}

// Transformed rejection with squeeze (Hormann 1993, algorithm BTRS); exact for
// n p >= 10 with p <= 1/2.
template <class Uniform>
std::int64_t binomial_btrs(std::int64_t n, double p, Uniform& uniform)
{
    const double nd = static_cast<double>(n);
    const double q = 1.0 - p;
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const double m = std::floor((nd + 1.0) * p);
    const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);
    for (;;) {
        const double u = uniform() - 0.5;
        double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + c);
        if (k < 0.0 || k > nd) {
            continue;
        }
        if (us >= 0.07 && v <= v_r) {
            return static_cast<std::int64_t>(k);
        }
        v = std::log(v * alpha / (a / (us * us) + b));
        if (v <= h - std::lgamma(k + 1.0) - std::lgamma(nd - k + 1.0) + (k - m) * lpq) {
            return static_cast<std::int64_t>(k);
        }
    }
}

}  // namespace detail

/// Exact Binomial(n, p) variate; `uniform()` must return values in (0, 1).
/// Inversion when n min(p, 1-p) <= 30, BTRS otherwise.
template <class Uniform>
std::int64_t sample_binomial(std::int64_t n, double p, Uniform& uniform)
{
    if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
        throw DomainError("sample_binomial: need n >= 0 and p in [0, 1]");
    }
    if (n == 0 || p == 0.0) {
        return 0;
    }
    if (p == 1.0) {
        return n;
    }
    const bool flip = p > 0.5;
    const double pp = flip ? 1.0 - p : p;
    const std::int64_t k = static_cast<double>(n) * pp <= 30.0 ? detail::binomial_inversion(n, pp, uniform)
                                                               : detail::binomial_btrs(n, pp, uniform);
    return flip ? n - k : k;
}

/// log of the Binomial(n, p) probability mass at k.
inline double binomial_log_pmf(std::int64_t n, double p, std::int64_t k)
{
    if (k < 0 || k > n) {
        return -INFINITY;
    }
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    double lp = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
    if (k > 0) {
        lp += kd * std::log(p);
    }
    if (k < n) {
        lp += (nd - kd) * std::log1p(-p);
    }
    return lp;
}

}  // namespace sirlat
