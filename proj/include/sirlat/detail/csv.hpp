#pragma once

#include <cstdio>
#include <string>

namespace sirlat::detail {

/// Round-trippable text for a double.
inline std::string fmt_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace sirlat::detail
