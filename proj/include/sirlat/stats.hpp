#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "sirlat/params.hpp"

namespace sirlat {

/// Point estimate with a normal-approximation 95% half-width.
struct Estimate {
    double value = 0.0;
    double ci95 = 0.0;
    std::int64_t n = 0;
};

inline Estimate proportion_estimate(std::int64_t successes, std::int64_t n)
{
    if (n <= 0) {
        return {};
    }
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    return {p, 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

inline Estimate mean_estimate(const std::vector<double>& xs)
{
    const auto n = static_cast<std::int64_t>(xs.size());
    if (n == 0) {
        return {};
    }
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    if (n == 1) {
        return {mean, 0.0, 1};
    }
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return {mean, 1.96 * sd / std::sqrt(static_cast<double>(n)), n};
}

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    int cells = 0;  ///< after pooling

    bool passes(double alpha) const { return p_value >= alpha; }
};

/// Goodness of fit of observed counts to category probabilities. Categories are
/// taken in the given order and adjacent ones merged until each pooled cell
/// expects at least `min_expected`; a short last cell joins its predecessor.
inline ChiSquareResult chi_square_gof(const std::vector<std::int64_t>& observed, const std::vector<double>& probs,
                                      double min_expected = 5.0)
{
    if (observed.size() != probs.size() || observed.empty()) {
        throw DomainError("chi_square_gof: size mismatch");
    }
    const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
    const double mass = std::accumulate(probs.begin(), probs.end(), 0.0);
    std::vector<double> obs;
    std::vector<double> exp;
    double o = 0.0;
    double e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o += static_cast<double>(observed[i]);
        e += total * probs[i] / mass;
        if (e >= min_expected) {
            obs.push_back(o);
            exp.push_back(e);
            o = e = 0.0;
        }
    }
    if (e > 0.0 || o > 0.0) {
        if (exp.empty()) {
            obs.push_back(o);
            exp.push_back(e);
        } else {
            obs.back() += o;
            exp.back() += e;
        }
    }
    ChiSquareResult r;
    r.cells = static_cast<int>(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (exp[i] > 0.0) {
            r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
        } else if (obs[i] > 0.0) {
            r.statistic = INFINITY;
        }
    }
    r.dof = r.cells - 1;
    if (r.dof < 1) {
        r.p_value = 1.0;
    } else if (!std::isfinite(r.statistic)) {
        r.p_value = 0.0;
    } else {
        r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
    }
    return r;
}

/// Two-sample homogeneity test on categorical outcomes keyed by K. Categories
/// are ordered by combined frequency, and the rarest are pooled until every
/// cell expects at least `min_expected` in both samples.
template <class K>
ChiSquareResult chi_square_homogeneity(const std::map<K, std::int64_t>& a, const std::map<K, std::int64_t>& b,
                                       double min_expected = 5.0)
{
    std::map<K, std::pair<double, double>> joint;
    for (const auto& [k, v] : a) {
        joint[k].first += static_cast<double>(v);
    }
    for (const auto& [k, v] : b) {
        joint[k].second += static_cast<double>(v);
    }
    std::vector<std::pair<double, double>> cells;
    for (const auto& [k, v] : joint) {
        cells.push_back(v);
    }
    std::sort(cells.begin(), cells.end(),
              [](const auto& x, const auto& y) { return x.first + x.second > y.first + y.second; });
    double na = 0.0;
    double nb = 0.0;
    for (const auto& c : cells) {
        na += c.first;
        nb += c.second;
    }
    const double n = na + nb;
    ChiSquareResult r;
    if (na == 0.0 || nb == 0.0) {
        return r;
    }
    const double threshold = min_expected * n / std::min(na, nb);
    std::vector<std::pair<double, double>> pooled;
    std::pair<double, double> tail{0.0, 0.0};
    for (const auto& c : cells) {
        if (c.first + c.second >= threshold) {
            pooled.push_back(c);
        } else {
            tail.first += c.first;
            tail.second += c.second;
        }
    }
    if (tail.first + tail.second > 0.0) {
        if (tail.first + tail.second >= threshold || pooled.empty()) {
            pooled.push_back(tail);
        } else {
            pooled.back().first += tail.first;
            pooled.back().second += tail.second;
        }
    }
    r.cells = static_cast<int>(pooled.size());
    for (const auto& c : pooled) {
        const double col = c.first + c.second;
        const double ea = col * na / n;
        const double eb = col * nb / n;
        r.statistic += (c.first - ea) * (c.first - ea) / ea + (c.second - eb) * (c.second - eb) / eb;
    }
    r.dof = r.cells - 1;
    r.p_value = r.dof < 1 ? 1.0
                          : boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
    return r;
}

}  // namespace sirlat
