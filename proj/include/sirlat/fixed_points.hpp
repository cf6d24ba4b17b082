#pragma once

#include <cmath>
#include <vector>

#include "sirlat/detail/roots.hpp"
#include "sirlat/entropy.hpp"
#include "sirlat/params.hpp"

namespace sirlat {

/// Survival probability of a Poisson(1+theta) Galton-Watson tree: the root in
/// (0,1) of 1 - iota = exp(-(1+theta) iota).
inline double solve_iota(double theta)
{
    if (!(theta > 0.0)) {
        throw DomainError("solve_iota: theta must be positive");
    }
    const double r = 1.0 + theta;
    auto f = [r](double x) { return x + std::expm1(-r * x); };
    auto df = [r](double x) { return 1.0 - r * std::exp(-r * x); };
    return detail::bracketed_root(f, df, 1e-12, 1.0 - 1e-12);
}

/// Half-aperture parameter of the speed-one cone.
///
/// For theta in (1.5, 4) the root in (0, 1/2] of
/// kappa^kappa (1-kappa)^(1-kappa) = (1+theta)/5; zero for theta >= 4.
inline double solve_kappa(double theta)
{
    if (!(theta > 1.5)) {
        throw DomainError("solve_kappa: no speed-one cone for theta <= 1.5");
    }
    if (theta >= 4.0) {
        return 0.0;
    }
    const double target = std::log((1.0 + theta) / 5.0);
    auto f = [target](double k) { return entropy_h(k) - target; };
    auto df = [](double k) { return std::log(k / (1.0 - k)); };
    return detail::bracketed_root(f, df, 1e-12, 0.5);
}

/// Limiting frontier density: the positive root of l = 1 - exp(-2 l (1+theta)/5),
/// or 0 when theta <= 1.5 (only the trivial root exists).
inline double solve_ell1(double theta)
{
    const double c = limit_rate(theta);
    if (theta <= 1.5) {
        return 0.0;
    }
    auto f = [c](double x) { return x + std::expm1(-2.0 * c * x); };
    auto df = [c](double x) { return 1.0 - 2.0 * c * std::exp(-2.0 * c * x); };
    return detail::bracketed_root(f, df, 1e-12, 1.0 - 1e-12);
}

/// Layer densities behind a speed-one frontier.
struct EllTable {
    double theta = 0.0;
    std::vector<double> values;        ///< l^(1), ..., l^(M)
    std::vector<double> partial_sums;  ///< s_k = l^(1) + ... + l^(k)
    double iota = 0.0;
};

/// Residual of the layer equation for entry `i` (1-based) of a table.
inline double ell_residual(const EllTable& table, std::size_t i)
{
    const double c = limit_rate(table.theta);
    const auto& v = table.values;
    const double prev1 = i >= 2 ? v[i - 2] : 0.0;
    const double prev2 = i >= 3 ? v[i - 3] : 0.0;
    const double s_before = i >= 2 ? table.partial_sums[i - 2] : 0.0;
    const double x = v[i - 1];
    return x + (1.0 - s_before) * std::expm1(-c * (2.0 * x + prev1 + 2.0 * prev2));
}

/// Solves l^(i) = (1 - s_{i-1}) (1 - exp(-(1+theta)/5 (2 l^(i) + l^(i-1) + 2 l^(i-2))))
/// for i = 1..M, with l^(0) = l^(-1) = 0.
inline EllTable ell_sequence(double theta, int M)
{
    if (!(theta > 1.5)) {
        throw DomainError("ell_sequence: layer densities vanish for theta <= 1.5");
    }
    if (M < 1) {
        throw DomainError("ell_sequence: M must be positive");
    }
    const double c = limit_rate(theta);
    EllTable table;
    table.theta = theta;
    table.values.reserve(M);
    table.partial_sums.reserve(M);

    double prev1 = 0.0;
    double prev2 = 0.0;
    double sum = 0.0;
    for (int i = 1; i <= M; ++i) {
        const double room = 1.0 - sum;
        const double b = prev1 + 2.0 * prev2;
        auto f = [=](double x) { return x + room * std::expm1(-c * (2.0 * x + b)); };
        auto df = [=](double x) { return 1.0 - 2.0 * c * room * std::exp(-c * (2.0 * x + b)); };
        double x = 0.0;
        if (i == 1) {
            // the first layer also has the trivial root 0; stay away from it
            x = detail::bracketed_root(f, df, 1e-12, 1.0 - 1e-12);
        } else if (room > 0.0 && b > 0.0) {
            // later layers decay geometrically below any fixed absolute floor,
            // so the bracket starts at 0 and terminates on relative width
            x = detail::bracketed_root(f, df, 0.0, room, 1e-300, 1e-15);
        }
        table.values.push_back(x);
        sum += x;
        table.partial_sums.push_back(sum);
        prev2 = prev1;
        prev1 = x;
    }
    table.iota = solve_iota(theta);
    return table;
}

/// Fixed point in (0,1) of psi(x) = 1 - alpha^(-x), alpha = exp((1+theta)/5).
/// Exists only when alpha > e, i.e. theta > 4.
inline double solve_gamma1(double theta)
{
    if (!(theta > 4.0)) {
        throw DomainError("solve_gamma1: psi has no interior fixed point for theta <= 4");
    }
    const double c = limit_rate(theta);
    auto f = [c](double x) { return x + std::expm1(-c * x); };
    auto df = [c](double x) { return 1.0 - c * std::exp(-c * x); };
    return detail::bracketed_root(f, df, 1e-12, 1.0 - 1e-12);
}

/// Root in (0,1) of x = 1 - alpha^(-(a + x)) for a > 0 and alpha > e.
inline double solve_boundary_step(double theta, double a)
{
    const double c = limit_rate(theta);
    auto f = [c, a](double x) { return x + std::expm1(-c * (a + x)); };
    auto df = [c, a](double x) { return 1.0 - c * std::exp(-c * (a + x)); };
    return detail::bracketed_root(f, df, 0.0, 1.0 - 1e-12);
}

/// Limits of the frontier densities next to the axis for theta > 4:
/// l_0 = gamma1, l_{k+1} = 1 - alpha^(-(l_k + l_{k+1})). Returns l_0..l_K.
inline std::vector<double> ell_boundary_sequence(double theta, int K)
{
    if (!(theta > 4.0)) {
        throw DomainError("ell_boundary_sequence: requires theta > 4");
    }
    if (K < 0) {
        throw DomainError("ell_boundary_sequence: K must be nonnegative");
    }
    std::vector<double> seq;
    seq.reserve(static_cast<std::size_t>(K) + 1);
    seq.push_back(solve_gamma1(theta));
    for (int k = 0; k < K; ++k) {
        seq.push_back(solve_boundary_step(theta, seq.back()));
    }
    return seq;
}

}  // namespace sirlat
