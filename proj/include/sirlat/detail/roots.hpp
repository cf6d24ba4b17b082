#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "sirlat/params.hpp"

namespace sirlat::detail {

/// Bracketed bisection followed by at most five Newton steps.
///
/// `f` must change sign on [lo, hi]. Bisection stops once the bracket is
/// narrower than `abs_width + rel_width * hi`; a Newton step is kept only if it
/// stays inside the final bracket and lowers |f|.
template <class F, class DF>
double bracketed_root(F&& f, DF&& df, double lo, double hi, double abs_width = 1e-14,
                      double rel_width = 0.0)
{
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) {
        return lo;
    }
    if (f_hi == 0.0) {
        return hi;
    }
    if ((f_lo < 0.0) == (f_hi < 0.0)) {
        throw DomainError("root is not bracketed");
    }
    const bool increasing = f_lo < 0.0;
    for (int it = 0; it < 4000; ++it) {
        if (hi - lo <= abs_width + rel_width * std::abs(hi)) {
            break;
        }
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double f_mid = f(mid);
        if (f_mid == 0.0) {
            return mid;
        }
        if ((f_mid < 0.0) == increasing) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    double x = 0.5 * (lo + hi);
    double fx = f(x);
    for (int it = 0; it < 5 && fx != 0.0; ++it) {
        const double d = df(x);
        if (!(std::abs(d) > 0.0) || !std::isfinite(d)) {
            break;
        }
        const double cand = x - fx / d;
        if (!(cand >= lo && cand <= hi)) {
            break;
        }
        const double fc = f(cand);
        if (!(std::abs(fc) < std::abs(fx))) {
            break;
        }
        x = cand;
        fx = fc;
    }
    return x;
}

}  // namespace sirlat::detail
