#pragma once

#include <cmath>
#include <string>

#include "sirlat/field.hpp"
#include "sirlat/params.hpp"

namespace sirlat {

enum class IcKind {
    unit,         ///< one infected individual at the origin (stochastic only)
    gamma_point,  ///< a fraction gamma of the origin village
    diag_line,    ///< gamma at every site (k, -k), |k| <= half_length
    custom,       ///< arbitrary density field
};

inline std::string to_string(IcKind k)
{
    switch (k) {
    case IcKind::unit: return "unit";
    case IcKind::gamma_point: return "gamma";
    case IcKind::diag_line: return "diag-line";
    case IcKind::custom: return "custom";
    }
    return "?";
}

/// Initial infected configuration; susceptibles fill the rest of each village.
struct InitialCondition {
    IcKind kind = IcKind::unit;
    double gamma = 1.0;
    int half_length = 0;
    RealField custom_field;

    static InitialCondition unit() { return {}; }

    static InitialCondition gamma_point(double gamma)
    {
        InitialCondition ic;
        ic.kind = IcKind::gamma_point;
        ic.gamma = gamma;
        ic.validate();
        return ic;
    }

    /// The infinite line x + y = 0 is truncated to |k| <= half_length; the
    /// field at (x, y) after t steps matches the infinite line whenever
    /// |x - y| / 2 + t <= half_length.
    static InitialCondition diag_line(double gamma, int half_length)
    {
        InitialCondition ic;
        ic.kind = IcKind::diag_line;
        ic.gamma = gamma;
        ic.half_length = half_length;
        ic.validate();
        return ic;
    }

    static InitialCondition custom(RealField f)
    {
        InitialCondition ic;
        ic.kind = IcKind::custom;
        ic.custom_field = std::move(f);
        ic.validate();
        return ic;
    }

    void validate() const
    {
        if (kind == IcKind::gamma_point || kind == IcKind::diag_line) {
            if (!(gamma > 0.0 && gamma <= 1.0)) {
                throw DomainError("initial condition: gamma must lie in (0, 1]");
            }
        }
        if (kind == IcKind::diag_line && half_length < 0) {
            throw DomainError("initial condition: negative half_length");
        }
        if (kind == IcKind::custom) {
            for (double v : custom_field.values()) {
                if (!(v >= 0.0 && v <= 1.0)) {
                    throw DomainError("initial condition: custom values must lie in [0, 1]");
                }
            }
        }
    }

    /// Infected proportions at time 0 for the large-N limit.
    RealField density() const
    {
        validate();
        switch (kind) {
        case IcKind::unit:
            throw DomainError("initial condition: a single individual has no large-N density");
        case IcKind::gamma_point: {
            RealField f(Window::point(0, 0));
            f.ref(0, 0) = gamma;
            return f;
        }
        case IcKind::diag_line: {
            RealField f(Window::square(half_length));
            for (int k = -half_length; k <= half_length; ++k) {
                f.ref(k, -k) = gamma;
            }
            return f;
        }
        case IcKind::custom:
            return custom_field;
        }
        return {};
    }

    /// Infected counts at time 0 in villages of size N: gamma * N rounded,
    /// and at least one individual wherever the density is positive.
    CountField counts(int N) const
    {
        validate();
        if (N < 1) {
            throw DomainError("initial condition: N must be positive");
        }
        if (kind == IcKind::unit) {
            CountField f(Window::point(0, 0));
            f.ref(0, 0) = 1;
            return f;
        }
        const RealField d = density();
        CountField f(d.window());
        for (std::size_t i = 0; i < d.values().size(); ++i) {
            const double v = d.values()[i];
            if (v > 0.0) {
                f.values()[i] = std::max(1, static_cast<int>(std::lround(v * N)));
            }
        }
        return f;
    }
};

}  // namespace sirlat
