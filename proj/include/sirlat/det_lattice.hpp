#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <vector>

#include "sirlat/detail/parallel.hpp"
#include "sirlat/field.hpp"
#include "sirlat/fixed_points.hpp"
#include "sirlat/initial_condition.hpp"
#include "sirlat/params.hpp"

namespace sirlat {

/// Infected and recovered proportions of the large-N limit at time t.
/// Invariant: 0 <= I, R and I + R <= 1 sitewise.
struct DetState {
    int t = 0;
    RealField I;
    RealField R;
};

struct DetOptions {
    int max_window_side = 1 << 13;
    int threads = 1;
};

inline DetState det_initial(const InitialCondition& ic)
{
    DetState s;
    s.I = ic.density();
    s.R = RealField(s.I.window());
    return s;
}

/// One step of I' = S (1 - exp(-(1+theta)/5 * I~)), R' = I + R, S = 1 - I - R,
/// where I~ is the five-point neighbourhood sum. The window grows by one.
inline DetState det_step(const DetState& s, double theta, const DetOptions& opt = {})
{
    const double c = limit_rate(theta);
    const Window w = s.I.window().dilated(1);
    if (w.width() > opt.max_window_side || w.height() > opt.max_window_side) {
        throw ResourceError("det_step: window side " + std::to_string(std::max(w.width(), w.height())) +
                            " exceeds the maximum " + std::to_string(opt.max_window_side));
    }
    DetState out;
    out.t = s.t + 1;
    out.I = RealField(w);
    out.R = RealField(w);
    detail::parallel_for(w.y_lo, w.y_hi + 1, opt.threads, [&](int y) {
        for (int x = w.x_lo; x <= w.x_hi; ++x) {
            const double i_old = s.I.at(x, y);
            const double r_new = std::min(1.0, i_old + s.R.at(x, y));
            out.R.ref(x, y) = r_new;
            const double tilde = neighbourhood_sum(s.I, x, y);
            if (tilde > 0.0) {
                const double sus = std::max(0.0, 1.0 - r_new);
                out.I.ref(x, y) = sus * -std::expm1(-c * tilde);
            }
        }
    });
    return out;
}

/// Runs T steps, calling observe(state) for t = 0..T, and returns the final state.
template <std::invocable<const DetState&> Observer>
DetState det_run(const InitialCondition& ic, double theta, int T, Observer&& observe, const DetOptions& opt = {})
{
    if (T < 0) {
        throw DomainError("det_run: T must be nonnegative");
    }
    limit_rate(theta);
    DetState s = det_initial(ic);
    observe(static_cast<const DetState&>(s));
    for (int t = 0; t < T; ++t) {
        s = det_step(s, theta, opt);
        observe(static_cast<const DetState&>(s));
    }
    return s;
}

inline DetState det_run(const InitialCondition& ic, double theta, int T, const DetOptions& opt = {})
{
    return det_run(ic, theta, T, [](const DetState&) {}, opt);
}

/// Layer profiles y[i-1][n] = y_n^(i) of the line initial condition gamma on
/// x + y = 0: the value at time n on the antidiagonal n + 1 - i. Entries with
/// n < i - 1 are NaN.
struct LayerMatrix {
    double theta = 0.0;
    double gamma = 0.0;
    std::vector<std::vector<double>> y;

    double at(int i, int n) const { return y[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(n)]; }
};

/// The layer recursions
///   y_0^(1) = gamma,
///   y_{i-1}^(i) = (1 - sum_{j<i} y_{j-1}^(j)) (1 - exp(-c (4 y_{i-2}^(i-2) + y_{i-2}^(i-1)))),
///   y_{n+1}^(i) = (1 - sum_{j<i} y_{n+1-i+j}^(j)) (1 - exp(-c (2 y_n^(i) + y_n^(i-1) + 2 y_n^(i-2)))),
/// with c = (1+theta)/5 and y^(0) = y^(-1) = 0.
inline LayerMatrix frontier_layer_sequences(double theta, double gamma, int i_max, int n_max)
{
    const double c = limit_rate(theta);
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw DomainError("frontier_layer_sequences: gamma must lie in (0, 1]");
    }
    if (i_max < 1 || n_max < 0) {
        throw DomainError("frontier_layer_sequences: need i_max >= 1 and n_max >= 0");
    }
    LayerMatrix m;
    m.theta = theta;
    m.gamma = gamma;
    m.y.assign(static_cast<std::size_t>(i_max),
               std::vector<double>(static_cast<std::size_t>(n_max) + 1, std::numeric_limits<double>::quiet_NaN()));
    auto y = [&](int i, int n) -> double { return i < 1 ? 0.0 : m.y[i - 1][n]; };

    for (int n = 0; n <= n_max; ++n) {
        for (int i = 1; i <= std::min(i_max, n + 1); ++i) {
            double used = 0.0;
            double v = 0.0;
            if (n == i - 1) {
                if (i == 1) {
                    v = gamma;
                } else {
                    for (int j = 1; j < i; ++j) {
                        used += y(j, j - 1);
                    }
                    const double a = (i >= 3 ? 4.0 * y(i - 2, i - 2) : 0.0) + y(i - 1, i - 2);
                    v = (1.0 - used) * -std::expm1(-c * a);
                }
            } else {
                const int p = n - 1;
                for (int j = 1; j < i; ++j) {
                    used += y(j, p + 1 - i + j);
                }
                const double a = 2.0 * y(i, p) + (i >= 2 ? y(i - 1, p) : 0.0) + (i >= 3 ? 2.0 * y(i - 2, p) : 0.0);
                v = (1.0 - used) * -std::expm1(-c * a);
            }
            m.y[i - 1][n] = std::max(0.0, v);
        }
    }
    return m;
}

/// D' = I0 + (1 - I0)(1 - exp(-(1+theta)/5 * D~)). Starting from D_0 = I0 the
/// iterates are the cumulative infections D_n = R_{n+1} of det_run.
inline RealField cumulative_step(const RealField& D, const RealField& I0, double theta)
{
    const double c = limit_rate(theta);
    const Window w = D.window().dilated(1).united(I0.window());
    RealField out(w);
    for (int y = w.y_lo; y <= w.y_hi; ++y) {
        for (int x = w.x_lo; x <= w.x_hi; ++x) {
            const double i0 = I0.at(x, y);
            const double tilde = neighbourhood_sum(D, x, y);
            out.ref(x, y) = i0 + (1.0 - i0) * -std::expm1(-c * tilde);
        }
    }
    return out;
}

struct RInfinityOptions {
    double tol = 1e-9;
    int max_sweeps = 100000;
};

/// Solution of f = I0 + (1 - I0)(1 - exp(-(1+theta)/5 * f~)) on a finite box.
struct RInfinityResult {
    Window box;
    RealField lower;  ///< limit of the monotone pass from I0
    RealField upper;  ///< limit of the monotone pass from 1
    RealField f;      ///< midpoint of the two passes
    double gap = 0.0;
    double boundary_deviation = 0.0;  ///< max over the outer ring of |f - iota|
    int sweeps = 0;
    double iota = 0.0;
};

namespace detail {

// Gauss-Seidel sweep of the fixed-point map; neighbours outside the box read the
// nearest box site. Orientation k in 0..3 selects the raster direction, which
// keeps the iterates monotone whatever the order. Returns the largest change.
inline double r_inf_sweep(RealField& f, const RealField& I0, double c, int k)
{
    const Window& w = f.window();
    auto val = [&](int x, int y) {
        return f.ref(std::clamp(x, w.x_lo, w.x_hi), std::clamp(y, w.y_lo, w.y_hi));
    };
    const bool fwd_x = (k & 1) == 0;
    const bool fwd_y = (k & 2) == 0;
    double change = 0.0;
    for (int yi = 0; yi < w.height(); ++yi) {
        const int y = fwd_y ? w.y_lo + yi : w.y_hi - yi;
        for (int xi = 0; xi < w.width(); ++xi) {
            const int x = fwd_x ? w.x_lo + xi : w.x_hi - xi;
            const double i0 = I0.at(x, y);
            const double tilde = val(x, y) + val(x + 1, y) + val(x - 1, y) + val(x, y + 1) + val(x, y - 1);
            const double nv = i0 + (1.0 - i0) * -std::expm1(-c * tilde);
            double& cur = f.ref(x, y);
            change = std::max(change, std::abs(nv - cur));
            cur = nv;
        }
    }
    return change;
}

inline double ring_deviation(const RealField& f, double iota)
{
    const Window& w = f.window();
    double dev = 0.0;
    for (int x = w.x_lo; x <= w.x_hi; ++x) {
        dev = std::max({dev, std::abs(f.ref(x, w.y_lo) - iota), std::abs(f.ref(x, w.y_hi) - iota)});
    }
    for (int y = w.y_lo; y <= w.y_hi; ++y) {
        dev = std::max({dev, std::abs(f.ref(w.x_lo, y) - iota), std::abs(f.ref(w.x_hi, y) - iota)});
    }
    return dev;
}

}  // namespace detail

/// Ultimate infected proportions on `box` by two monotone passes, one from I0
/// and one from 1. Converged when the passes agree to tol and the outer ring
/// lies within 2 tol of iota; otherwise ConvergenceError.
inline RInfinityResult solve_R_infinity(const RealField& I0, double theta, const Window& box,
                                        const RInfinityOptions& opt = {})
{
    const double c = limit_rate(theta);
    if (box.empty() || box.width() < 3 || box.height() < 3) {
        throw DomainError("solve_R_infinity: box must be at least 3 x 3");
    }
    bool nontrivial = false;
    for (double v : I0.values()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("solve_R_infinity: initial values must lie in [0, 1]");
        }
        nontrivial = nontrivial || v > 0.0;
    }
    if (!nontrivial) {
        throw DomainError("solve_R_infinity: initial condition is identically zero");
    }

    RInfinityResult res;
    res.box = box;
    res.iota = solve_iota(theta);
    res.lower = RealField(box);
    res.upper = RealField(box);
    for (int y = box.y_lo; y <= box.y_hi; ++y) {
        for (int x = box.x_lo; x <= box.x_hi; ++x) {
            res.lower.ref(x, y) = I0.at(x, y);
            res.upper.ref(x, y) = 1.0;
        }
    }

    bool converged = false;
    for (int s = 0; s < opt.max_sweeps; ++s) {
        const double du = detail::r_inf_sweep(res.lower, I0, c, s % 4);
        const double dv = detail::r_inf_sweep(res.upper, I0, c, s % 4);
        res.sweeps = s + 1;
        double gap = 0.0;
        for (std::size_t k = 0; k < res.lower.values().size(); ++k) {
            gap = std::max(gap, res.upper.values()[k] - res.lower.values()[k]);
        }
        res.gap = gap;
        res.boundary_deviation = std::max(detail::ring_deviation(res.lower, res.iota),
                                          detail::ring_deviation(res.upper, res.iota));
        if (gap <= opt.tol && res.boundary_deviation <= 2.0 * opt.tol) {
            converged = true;
            break;
        }
        if (du == 0.0 && dv == 0.0) {
            break;  // both passes are at floating-point fixed points
        }
    }
    if (!converged) {
        throw ConvergenceError("solve_R_infinity: gap " + std::to_string(res.gap) + ", boundary deviation " +
                               std::to_string(res.boundary_deviation) + " after " + std::to_string(res.sweeps) +
                               " sweeps; enlarge the box or loosen tol");
    }
    res.f = RealField(box);
    for (std::size_t k = 0; k < res.f.values().size(); ++k) {
        res.f.values()[k] = 0.5 * (res.lower.values()[k] + res.upper.values()[k]);
    }
    return res;
}

/// Lower bound, in log scale, for eta = (f - I0)/(1 - I0) - iota at each box site.
///
/// With e = f - iota one has eta = (1 - iota)(1 - exp(-c e~)) and
/// e = I0 (1 - iota) + (1 - I0) eta. Iterating this monotone map from eta = 0,
/// with eta = 0 outside the box, gives a nondecreasing sequence below every
/// nonnegative fixed point. Values are carried as logarithms because eta underflows a double a
/// few dozen sites from the source. A finite entry certifies eta > 0 there.
inline RealField log_excess_lower_bound(const RealField& I0, double theta, const Window& box, int sweeps = 8)
{
    const double c = limit_rate(theta);
    const double iota = solve_iota(theta);
    const double log_c = std::log(c);
    const double log_room = std::log1p(-iota);
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    auto lse = [](double a, double b) {
        if (a == ninf) {
            return b;
        }
        if (b == ninf) {
            return a;
        }
        const double m = std::max(a, b);
        return m + std::log1p(std::exp(-std::abs(a - b)));
    };

    RealField log_eta(box);
    std::fill(log_eta.values().begin(), log_eta.values().end(), ninf);
    auto log_e = [&](int x, int y) {
        if (!box.contains(x, y)) {
            return ninf;
        }
        const double i0 = I0.at(x, y);
        const double a = i0 > 0.0 ? std::log(i0) + log_room : ninf;
        const double b = i0 < 1.0 ? std::log1p(-i0) + log_eta.ref(x, y) : ninf;
        return lse(a, b);
    };
    for (int s = 0; s < sweeps; ++s) {
        const bool fwd_x = (s & 1) == 0;
        const bool fwd_y = (s & 2) == 0;
        for (int yi = 0; yi < box.height(); ++yi) {
            const int y = fwd_y ? box.y_lo + yi : box.y_hi - yi;
            for (int xi = 0; xi < box.width(); ++xi) {
                const int x = fwd_x ? box.x_lo + xi : box.x_hi - xi;
                double lt = log_e(x, y);
                lt = lse(lt, log_e(x + 1, y));
                lt = lse(lt, log_e(x - 1, y));
                lt = lse(lt, log_e(x, y + 1));
                lt = lse(lt, log_e(x, y - 1));
                if (lt == ninf) {
                    continue;
                }
                // log(1 - exp(-z)) with z = c e~; for tiny z it is log z to
                // within z/2
                const double lz = log_c + lt;
                const double l1m = lz < -30.0 ? lz : std::log(-std::expm1(-std::exp(lz)));
                log_eta.ref(x, y) = log_room + l1m;
            }
        }
    }
    return log_eta;
}

/// g(m, n) = (log alpha)^(m+n) C(m+n, m) with log alpha = (1+theta)/5, kept as
/// logarithms so m + n may reach 10^6.
struct DerivativeField {
    double theta = 0.0;
    int m_max = 0;
    int n_max = 0;
    std::vector<double> log_g;  ///< row-major over m = 0..m_max, n = 0..n_max

    double log_at(int m, int n) const
    {
        return log_g[static_cast<std::size_t>(m) * static_cast<std::size_t>(n_max + 1) + static_cast<std::size_t>(n)];
    }
    double at(int m, int n) const { return std::exp(log_at(m, n)); }
};

inline double log_derivative_entry(double theta, int m, int n)
{
    const double c = limit_rate(theta);
    const double s = static_cast<double>(m) + n;
    return s * std::log(c) + std::lgamma(s + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n + 1.0);
}

inline DerivativeField frontier_derivative_field(double theta, int m_max, int n_max)
{
    if (m_max < 0 || n_max < 0) {
        throw DomainError("frontier_derivative_field: negative size");
    }
    DerivativeField g;
    g.theta = theta;
    g.m_max = m_max;
    g.n_max = n_max;
    g.log_g.resize(static_cast<std::size_t>(m_max + 1) * static_cast<std::size_t>(n_max + 1));
    for (int m = 0; m <= m_max; ++m) {
        for (int n = 0; n <= n_max; ++n) {
            g.log_g[static_cast<std::size_t>(m) * static_cast<std::size_t>(n_max + 1) + static_cast<std::size_t>(n)] =
                log_derivative_entry(theta, m, n);
        }
    }
    return g;
}

}  // namespace sirlat
