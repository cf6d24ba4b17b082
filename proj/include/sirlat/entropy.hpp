#pragma once

#include <cmath>

#include "sirlat/params.hpp"

namespace sirlat {

/// Binary entropy h(t) = t log t + (1-t) log(1-t) with 0 log 0 = 0.
inline double entropy_h(double t)
{
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("entropy_h: argument outside [0,1]");
    }
    double v = 0.0;
    if (t > 0.0) {
        v += t * std::log(t);
    }
    if (t < 1.0) {
        v += (1.0 - t) * std::log1p(-t);
    }
    return v;
}

}  // namespace sirlat
