#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sirlat/detail/csv.hpp"
#include "sirlat/params.hpp"
#include "sirlat/speed_curve.hpp"

namespace sirlat {

using BigInt = boost::multiprecision::cpp_int;

/// Exact path count with its natural logarithm (-inf for zero).
struct PathCount {
    BigInt value;
    double log_value = -std::numeric_limits<double>::infinity();
};

namespace detail {

inline double log_of(const BigInt& v)
{
    if (v <= 0) {
        return -std::numeric_limits<double>::infinity();
    }
    const auto bits = boost::multiprecision::msb(v);
    if (bits < 960) {
        return std::log(v.convert_to<double>());
    }
    const auto shift = bits - 900;
    const BigInt top = v >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

inline PathCount make_count(BigInt v)
{
    PathCount c;
    c.log_value = log_of(v);
    c.value = std::move(v);
    return c;
}

inline BigInt binomial(std::int64_t n, std::int64_t k)
{
    if (k < 0 || k > n || n < 0) {
        return 0;
    }
    k = std::min(k, n - k);
    BigInt r = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

inline double log_binomial(double n, double k)
{
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Number of +-1 walks of length n from 0 to x, i.e. C(n, (n+x)/2).
inline BigInt walks_to(std::int64_t n, std::int64_t x)
{
    if (((n + x) % 2 + 2) % 2 != 0) {
        return 0;
    }
    return binomial(n, (n + x) / 2);
}

inline void check_n(std::int64_t n)
{
    if (n < 0) {
        throw DomainError("path count: negative number of steps");
    }
}

}  // namespace detail

/// Simple random walk paths of n steps from the origin to (m, l):
/// C(n, (n-(m+l))/2) C(n, (n-(m-l))/2), zero off the reachable parity class.
inline PathCount count_srw(std::int64_t m, std::int64_t l, std::int64_t n)
{
    detail::check_n(n);
    if (std::abs(m) + std::abs(l) > n || ((n - (m + l)) % 2 + 2) % 2 != 0) {
        return {};
    }
    return detail::make_count(detail::binomial(n, (n - (m + l)) / 2) * detail::binomial(n, (n - (m - l)) / 2));
}

/// Lazy random walk paths (stay or move to one of four neighbours):
/// sum over the number i of moving steps of C(n, i) times the SRW count.
inline PathCount count_lrw(std::int64_t m, std::int64_t l, std::int64_t n)
{
    detail::check_n(n);
    const std::int64_t d = std::abs(m) + std::abs(l);
    BigInt total = 0;
    for (std::int64_t i = d; i <= n; i += 2) {
        total += detail::binomial(n, i) * count_srw(m, l, i).value;
    }
    return detail::make_count(std::move(total));
}

/// log of count_srw through log-gamma.
inline double log_count_srw(std::int64_t m, std::int64_t l, std::int64_t n)
{
    detail::check_n(n);
    if (std::abs(m) + std::abs(l) > n || ((n - (m + l)) % 2 + 2) % 2 != 0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double nd = static_cast<double>(n);
    return detail::log_binomial(nd, static_cast<double>((n - (m + l)) / 2)) +
           detail::log_binomial(nd, static_cast<double>((n - (m - l)) / 2));
}

/// log of count_lrw by a log-sum-exp over the moving-step count.
inline double log_count_lrw(std::int64_t m, std::int64_t l, std::int64_t n)
{
    detail::check_n(n);
    const std::int64_t d = std::abs(m) + std::abs(l);
    std::vector<double> terms;
    for (std::int64_t i = d; i <= n; i += 2) {
        terms.push_back(detail::log_binomial(static_cast<double>(n), static_cast<double>(i)) + log_count_srw(m, l, i));
    }
    if (terms.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    double mx = terms[0];
    for (double t : terms) {
        mx = std::max(mx, t);
    }
    double s = 0.0;
    for (double t : terms) {
        s += std::exp(t - mx);
    }
    return mx + std::log(s);
}

/// Transfer-matrix path counts: the kernel (stay, four moves) or (four moves)
/// convolved n times over an integer grid indexed [-n, n]^2.
class PathDp {
public:
    PathDp(int n, bool lazy) : n_(n), side_(2 * n + 1), cur_(static_cast<std::size_t>(side_) * side_, 0)
    {
        if (n < 0) {
            throw DomainError("PathDp: negative number of steps");
        }
        cur_[idx(0, 0)] = 1;
        for (int step = 0; step < n; ++step) {
            std::vector<BigInt> next(cur_.size(), 0);
            for (int y = -step; y <= step; ++y) {
                for (int x = -step; x <= step; ++x) {
                    const BigInt& v = cur_[idx(x, y)];
                    if (v == 0) {
                        continue;
                    }
                    if (lazy) {
                        next[idx(x, y)] += v;
                    }
                    next[idx(x + 1, y)] += v;
                    next[idx(x - 1, y)] += v;
                    next[idx(x, y + 1)] += v;
                    next[idx(x, y - 1)] += v;
                }
            }
            cur_.swap(next);
        }
    }

    const BigInt& at(int m, int l) const
    {
        static const BigInt zero = 0;
        if (std::abs(m) > n_ || std::abs(l) > n_) {
            return zero;
        }
        return cur_[idx(m, l)];
    }

    BigInt total() const
    {
        BigInt s = 0;
        for (const auto& v : cur_) {
            s += v;
        }
        return s;
    }

private:
    std::size_t idx(int x, int y) const
    {
        return static_cast<std::size_t>(y + n_) * static_cast<std::size_t>(side_) + static_cast<std::size_t>(x + n_);
    }

    int n_;
    int side_;
    std::vector<BigInt> cur_;
};

/// +-1 walks of n steps from 0 to m that stay inside (-k, k), counted by the
/// full image series sum_j [W(m + 4jk) - W(2k - m + 4jk)] with W(x) = C(n, (n+x)/2).
inline PathCount count_oriented_strip(std::int64_t m, std::int64_t n, std::int64_t k)
{
    detail::check_n(n);
    if (k <= 0 || std::abs(m) >= k) {
        throw DomainError("count_oriented_strip: need |m| < k");
    }
    BigInt total = 0;
    // images beyond |x| > n contribute nothing
    const std::int64_t jmax = n / (4 * k) + 2;
    for (std::int64_t j = -jmax; j <= jmax; ++j) {
        total += detail::walks_to(n, m + 4 * j * k);
        total -= detail::walks_to(n, 2 * k - m + 4 * j * k);
    }
    return detail::make_count(std::move(total));
}

/// The five-term truncation
///   C(n,(n+m)/2) - C(n,(n+2k+m)/2) - C(n,(n+2k-m)/2) + C(n,(n+4k+m)/2) + C(n,(n+4k-m)/2)
/// of the image series. It equals count_oriented_strip when no path of length n
/// can reach a third reflection, i.e. when 6k - |m| > n; otherwise it can be
/// wrong (k = 1, n = 6, m = 0 gives 2 where the true count is 0).
inline BigInt oriented_strip_five_terms(std::int64_t m, std::int64_t n, std::int64_t k)
{
    using detail::walks_to;
    return walks_to(n, m) - walks_to(n, 2 * k + m) - walks_to(n, 2 * k - m) + walks_to(n, 4 * k + m) +
           walks_to(n, 4 * k - m);
}

/// Strip count by dynamic programming over the allowed positions.
inline BigInt strip_dp(std::int64_t m, std::int64_t n, std::int64_t k)
{
    if (k <= 0 || std::abs(m) >= k || n < 0) {
        throw DomainError("strip_dp: need |m| < k and n >= 0");
    }
    const std::int64_t w = 2 * k - 1;
    std::vector<BigInt> cur(static_cast<std::size_t>(w), 0);
    cur[static_cast<std::size_t>(k - 1)] = 1;
    for (std::int64_t s = 0; s < n; ++s) {
        std::vector<BigInt> next(cur.size(), 0);
        for (std::int64_t i = 0; i < w; ++i) {
            if (i > 0) {
                next[static_cast<std::size_t>(i - 1)] += cur[static_cast<std::size_t>(i)];
            }
            if (i + 1 < w) {
                next[static_cast<std::size_t>(i + 1)] += cur[static_cast<std::size_t>(i)];
            }
        }
        cur.swap(next);
    }
    return cur[static_cast<std::size_t>(m + k - 1)];
}

/// One row of the path-growth comparison.
struct GrowthRow {
    int n = 0;
    std::int64_t m = 0;
    std::int64_t l = 0;
    double lhs = 0.0;  ///< (1/n) log g_n(m, l), g_n = ((1+theta)/5)^n #_L(m, l; n)
    double rhs = 0.0;  ///< log((1+theta)/5) - G((|m|+|l|)/n, phi)
    double gap = 0.0;
};

/// For each n, the lattice point (m, l) nearest to n v (dm, dl) / (|dm| + |dl|)
/// is compared with the large-deviation prediction at its actual speed and angle.
inline std::vector<GrowthRow> growth_rate_check(double theta, std::int64_t dm, std::int64_t dl, double v,
                                                const std::vector<int>& ns)
{
    const double c = limit_rate(theta);
    if (dm == 0 && dl == 0) {
        throw DomainError("growth_rate_check: zero direction");
    }
    if (!(v > 0.0 && v <= 1.0)) {
        throw DomainError("growth_rate_check: v must lie in (0, 1]");
    }
    const double norm = static_cast<double>(std::abs(dm) + std::abs(dl));
    std::vector<GrowthRow> rows;
    for (int n : ns) {
        if (n < 1) {
            throw DomainError("growth_rate_check: n must be positive");
        }
        GrowthRow r;
        r.n = n;
        r.m = std::llround(n * v * static_cast<double>(dm) / norm);
        r.l = std::llround(n * v * static_cast<double>(dl) / norm);
        const double speed = static_cast<double>(std::abs(r.m) + std::abs(r.l)) / n;
        const double phi = std::atan2(static_cast<double>(r.l), static_cast<double>(r.m));
        r.lhs = std::log(c) + log_count_lrw(r.m, r.l, n) / n;
        r.rhs = std::log(c) - rate_G(speed, phi);
        r.gap = std::abs(r.lhs - r.rhs);
        rows.push_back(r);
    }
    return rows;
}

inline void write_growth_csv(std::ostream& out, const std::vector<GrowthRow>& rows)
{
    out << "n,lhs,rhs,gap\n";
    for (const auto& r : rows) {
        out << r.n << ',' << detail::fmt_double(r.lhs) << ',' << detail::fmt_double(r.rhs) << ','
            << detail::fmt_double(r.gap) << '\n';
    }
}

}  // namespace sirlat
