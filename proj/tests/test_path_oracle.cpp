#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sirlat/path_oracle.hpp"

using namespace sirlat;

namespace {

// Brute force: enumerate all step sequences of a 2d walk.
BigInt enumerate_walks(int m, int l, int n, bool lazy)
{
    const int moves[5][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {0, 0}};
    const int kinds = lazy ? 5 : 4;
    BigInt hits = 0;
    std::int64_t total = 1;
    for (int i = 0; i < n; ++i) {
        total *= kinds;
    }
    for (std::int64_t code = 0; code < total; ++code) {
        std::int64_t c = code;
        int x = 0;
        int y = 0;
        for (int i = 0; i < n; ++i) {
            x += moves[c % kinds][0];
            y += moves[c % kinds][1];
            c /= kinds;
        }
        if (x == m && y == l) {
            ++hits;
        }
    }
    return hits;
}

}  // namespace

TEST(CountSrw, SmallValues)
{
    EXPECT_EQ(count_srw(0, 0, 2).value, 4);
    EXPECT_EQ(count_srw(1, 1, 2).value, 2);
    EXPECT_EQ(count_srw(0, 0, 1).value, 0);
    EXPECT_EQ(count_srw(0, 0, 1).log_value, -std::numeric_limits<double>::infinity());
    EXPECT_EQ(count_srw(5, 0, 3).value, 0);
    EXPECT_THROW(count_srw(0, 0, -1), DomainError);
}

TEST(CountSrw, MatchesBruteForce)
{
    for (int n = 0; n <= 6; ++n) {
        for (int m = -n; m <= n; ++m) {
            for (int l = -n; l <= n; ++l) {
                EXPECT_EQ(count_srw(m, l, n).value, enumerate_walks(m, l, n, false)) << m << ' ' << l << ' ' << n;
            }
        }
    }
}

TEST(CountSrw, Symmetries)
{
    for (int n = 0; n <= 15; ++n) {
        for (int m = -n; m <= n; ++m) {
            for (int l = -n; l <= n; ++l) {
                const BigInt v = count_srw(m, l, n).value;
                EXPECT_EQ(count_srw(-m, l, n).value, v);
                EXPECT_EQ(count_srw(m, -l, n).value, v);
                EXPECT_EQ(count_srw(-m, -l, n).value, v);
                EXPECT_EQ(count_srw(l, m, n).value, v);
            }
        }
    }
}

TEST(CountLrw, SmallValues)
{
    EXPECT_EQ(count_lrw(0, 0, 1).value, 1);
    EXPECT_EQ(count_lrw(1, 0, 1).value, 1);
    EXPECT_EQ(count_lrw(0, 0, 0).value, 1);
    EXPECT_EQ(count_lrw(3, 0, 2).value, 0);
    EXPECT_THROW(count_lrw(0, 0, -2), DomainError);
    for (int n = 0; n <= 5; ++n) {
        for (int m = -n; m <= n; ++m) {
            for (int l = -n; l <= n; ++l) {
                EXPECT_EQ(count_lrw(m, l, n).value, enumerate_walks(m, l, n, true));
            }
        }
    }
}

TEST(CountLrw, TotalMassIsFiveToTheN)
{
    BigInt five_n = 1;
    for (int n = 0; n <= 20; ++n) {
        BigInt total = 0;
        for (int m = -n; m <= n; ++m) {
            for (int l = -(n - std::abs(m)); l <= n - std::abs(m); ++l) {
                total += count_lrw(m, l, n).value;
            }
        }
        EXPECT_EQ(total, five_n) << "n=" << n;
        five_n *= 5;
    }
}

TEST(PathDp, ClosedFormsEqualTransferMatrix)
{
    for (int n = 0; n <= 12; ++n) {
        const PathDp lazy(n, true);
        const PathDp simple(n, false);
        for (int m = -n; m <= n; ++m) {
            for (int l = -n; l <= n; ++l) {
                if (std::abs(m) + std::abs(l) > n) {
                    EXPECT_EQ(lazy.at(m, l), 0);
                    continue;
                }
                EXPECT_EQ(count_lrw(m, l, n).value, lazy.at(m, l)) << m << ' ' << l << ' ' << n;
                EXPECT_EQ(count_srw(m, l, n).value, simple.at(m, l)) << m << ' ' << l << ' ' << n;
            }
        }
    }
}

TEST(PathDp, Totals)
{
    EXPECT_EQ(PathDp(7, true).total(), BigInt(78125));
    EXPECT_EQ(PathDp(7, false).total(), BigInt(16384));
}

TEST(CountLrw, BallisticSinglePath)
{
    for (int n : {1, 10, 60, 400}) {
        EXPECT_EQ(count_lrw(n, 0, n).value, 1);
        EXPECT_EQ(count_lrw(n, 0, n).log_value, 0.0);
        EXPECT_EQ(log_count_lrw(n, 0, n), 0.0);
    }
}

TEST(LogSpace, AgreesWithExactIntegers)
{
    for (int n : {1, 5, 17, 40, 60, 120}) {
        for (int m = 0; m <= n; m += std::max(1, n / 7)) {
            for (int l = -(n - m); l <= n - m; l += std::max(1, n / 9)) {
                const PathCount exact = count_lrw(m, l, n);
                const double lg = log_count_lrw(m, l, n);
                ASSERT_TRUE(exact.value > 0);
                EXPECT_NEAR(lg, exact.log_value, 1e-10 * std::max(1.0, std::abs(exact.log_value)));
                const PathCount s = count_srw(m, l, n);
                if (s.value > 0) {
                    EXPECT_NEAR(log_count_srw(m, l, n), s.log_value, 1e-10 * std::max(1.0, std::abs(s.log_value)));
                } else {
                    EXPECT_EQ(log_count_srw(m, l, n), -std::numeric_limits<double>::infinity());
                }
            }
        }
    }
}

TEST(PathCount, LogValueOfHugeIntegers)
{
    BigInt v = 1;
    for (int i = 0; i < 2000; ++i) {
        v *= 5;
    }
    const PathCount c = detail::make_count(v);
    EXPECT_NEAR(c.log_value, 2000 * std::log(5.0), 1e-12 * 2000 * std::log(5.0));
}

TEST(Strip, BasicCases)
{
    EXPECT_EQ(count_oriented_strip(0, 0, 3).value, 1);
    EXPECT_EQ(count_oriented_strip(0, 2, 2).value, strip_dp(0, 2, 2));
    EXPECT_EQ(count_oriented_strip(0, 2, 2).value, 2);
    EXPECT_EQ(count_oriented_strip(1, 2, 2).value, 0);
    EXPECT_THROW(count_oriented_strip(2, 4, 2), DomainError);
    EXPECT_THROW(count_oriented_strip(0, 4, 0), DomainError);
    // k > n: no reflection can bite
    for (int n = 0; n <= 10; ++n) {
        for (int m = -n; m <= n; m += 2) {
            EXPECT_EQ(count_oriented_strip(m, n, n + 1).value, detail::binomial(n, (n + m) / 2));
        }
    }
}

TEST(Strip, FullImageSeriesEqualsDp)
{
    for (int k = 1; k <= 7; ++k) {
        for (int n = 0; n <= 14; ++n) {
            for (int m = -(k - 1); m <= k - 1; ++m) {
                EXPECT_EQ(count_oriented_strip(m, n, k).value, strip_dp(m, n, k)) << m << ' ' << n << ' ' << k;
            }
        }
    }
}

TEST(Strip, FiveTermFormulaHoldsUntilThirdReflection)
{
    for (int k = 1; k <= 7; ++k) {
        for (int n = 0; n <= 14; ++n) {
            for (int m = -(k - 1); m <= k - 1; ++m) {
                if (6 * k - std::abs(m) > n) {
                    EXPECT_EQ(oriented_strip_five_terms(m, n, k), strip_dp(m, n, k)) << m << ' ' << n << ' ' << k;
                }
            }
        }
    }
    EXPECT_EQ(oriented_strip_five_terms(0, 6, 1), 2);
    EXPECT_EQ(strip_dp(0, 6, 1), 0);
}

TEST(Strip, LongWalksStayNonnegative)
{
    for (int k : {1, 2, 5}) {
        for (int n = 0; n <= 80; ++n) {
            for (int m = -(k - 1); m <= k - 1; ++m) {
                EXPECT_GE(count_oriented_strip(m, n, k).value, 0);
            }
        }
    }
    EXPECT_EQ(count_oriented_strip(0, 60, 3).value, strip_dp(0, 60, 3));
}

TEST(Growth, DiagonalGapSmallAndShrinking)
{
    const auto rows = growth_rate_check(2.0, 1, 1, 0.5, {100, 200, 400});
    ASSERT_EQ(rows.size(), 3U);
    EXPECT_EQ(rows[2].m, 100);
    EXPECT_EQ(rows[2].l, 100);
    EXPECT_LT(rows[2].gap, 0.05);
    EXPECT_GT(rows[0].gap, rows[1].gap);
    EXPECT_GT(rows[1].gap, rows[2].gap);
}

TEST(Growth, BallisticAxis)
{
    const auto rows = growth_rate_check(2.0, 1, 0, 1.0, {50, 400});
    for (const auto& r : rows) {
        EXPECT_EQ(r.m, r.n);
        EXPECT_NEAR(r.lhs, std::log(3.0 / 5.0), 1e-14);
        EXPECT_NEAR(r.rhs, r.lhs, 1e-9);
    }
}

TEST(Growth, CsvAndErrors)
{
    std::ostringstream out;
    write_growth_csv(out, growth_rate_check(2.0, 1, 1, 0.5, {10}));
    EXPECT_EQ(out.str().rfind("n,lhs,rhs,gap\n10,", 0), 0U);
    EXPECT_THROW(growth_rate_check(2.0, 0, 0, 0.5, {10}), DomainError);
    EXPECT_THROW(growth_rate_check(2.0, 1, 1, 1.5, {10}), DomainError);
}
