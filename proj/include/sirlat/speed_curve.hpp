#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <vector>

#include "sirlat/detail/csv.hpp"
#include "sirlat/entropy.hpp"
#include "sirlat/params.hpp"

namespace sirlat {

/// Direction ratio a(phi) = min(|sin|, |cos|) / (|sin| + |cos|), in [0, 1/2].
inline double direction_ratio_a(double phi)
{
    const double s = std::abs(std::sin(phi));
    const double c = std::abs(std::cos(phi));
    return std::min(s, c) / (s + c);
}

namespace detail {

// Integrand of the speed functional at fixed (v, a): lazy-walk entropy of
// spending a fraction t of the steps moving, with displacement v.
inline double speed_integrand(double t, double v, double a)
{
    const double r = std::clamp(0.5 - v / (2.0 * t), 0.0, 1.0);
    const double s = std::clamp(0.5 - (1.0 - 2.0 * a) * v / (2.0 * t), 0.0, 1.0);
    return entropy_h(t) + t * (entropy_h(r) + entropy_h(s));
}

}  // namespace detail

/// G as a function of (v, a) with a = a(phi) already reduced to [0, 1/2].
///
/// The infimum over t in [v, 1] is bracketed on a 2000-point grid and refined
/// by golden-section search down to an interval of width 1e-12.
inline double rate_G_from_ratio(double v, double a)
{
    if (!(v > 0.0 && v <= 1.0)) {
        throw DomainError("G: v must lie in (0, 1]");
    }
    if (v == 1.0) {
        return detail::speed_integrand(1.0, 1.0, a);
    }
    constexpr int kGrid = 2000;
    const double step = (1.0 - v) / kGrid;
    int best = 0;
    double best_val = detail::speed_integrand(v, v, a);
    for (int k = 1; k <= kGrid; ++k) {
        const double t = k == kGrid ? 1.0 : v + k * step;
        const double val = detail::speed_integrand(t, v, a);
        if (val < best_val) {
            best_val = val;
            best = k;
        }
    }
    double lo = v + std::max(best - 1, 0) * step;
    double hi = std::min(1.0, v + std::min(best + 1, kGrid) * step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = detail::speed_integrand(x1, v, a);
    double f2 = detail::speed_integrand(x2, v, a);
    while (hi - lo > 1e-12) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = detail::speed_integrand(x1, v, a);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = detail::speed_integrand(x2, v, a);
        }
    }
    return std::min({best_val, f1, f2});
}

/// Large-deviation speed functional G(v, phi) for v in (0, 1].
inline double rate_G(double v, double phi)
{
    return rate_G_from_ratio(v, direction_ratio_a(phi));
}

/// Spreading speed as a function of the direction ratio a in [0, 1/2].
inline double upsilon_from_ratio(double theta, double a)
{
    const double target = std::log(limit_rate(theta));
    if (entropy_h(a) <= target) {
        return 1.0;
    }
    constexpr double eps = 1e-9;
    double lo = eps;
    double hi = 1.0 - eps;
    // G increases in v from log(1/5) at 0+ to h(a) at 1; a root within eps
    // of 1 is reported as 1
    if (rate_G_from_ratio(hi, a) <= target) {
        return 1.0;
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (rate_G_from_ratio(mid, a) > target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Asymptotic l1 spreading speed in direction phi.
inline double upsilon(double theta, double phi)
{
    return upsilon_from_ratio(theta, direction_ratio_a(phi));
}

struct ShapeSample {
    double phi;
    double upsilon;
};

/// Sampled limiting shape phi -> upsilon(theta, phi).
struct ShapeCurve {
    double theta = 0.0;
    std::vector<ShapeSample> samples;
};

/// `n_samples` equally spaced directions in [0, 2 pi).
inline ShapeCurve shape_curve(double theta, int n_samples)
{
    limit_rate(theta);
    if (n_samples < 8) {
        throw DomainError("shape_curve: need at least 8 samples");
    }
    ShapeCurve curve;
    curve.theta = theta;
    curve.samples.reserve(n_samples);
    // upsilon depends on phi only through a(phi); the lattice symmetry makes
    // most samples share a value
    std::map<long long, double> memo;
    for (int k = 0; k < n_samples; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / n_samples;
        const double a = direction_ratio_a(phi);
        const long long key = std::llround(a * 1e12);
        auto it = memo.find(key);
        if (it == memo.end()) {
            it = memo.emplace(key, upsilon_from_ratio(theta, a)).first;
        }
        curve.samples.push_back({phi, it->second});
    }
    return curve;
}

inline void write_csv(std::ostream& out, const ShapeCurve& curve)
{
    out << "phi,upsilon\n";
    for (const auto& s : curve.samples) {
        out << detail::fmt_double(s.phi) << ',' << detail::fmt_double(s.upsilon) << '\n';
    }
}

/// Frontier overlay: the points T * upsilon(theta, phi) on the l1 sphere.
inline void write_overlay_csv(std::ostream& out, const ShapeCurve& curve, double T)
{
    out << "phi,x,y\n";
    for (const auto& s : curve.samples) {
        const double c = std::cos(s.phi);
        const double sn = std::sin(s.phi);
        const double r = T * s.upsilon / (std::abs(c) + std::abs(sn));
        out << detail::fmt_double(s.phi) << ',' << detail::fmt_double(r * c) << ','
            << detail::fmt_double(r * sn) << '\n';
    }
}

}  // namespace sirlat
