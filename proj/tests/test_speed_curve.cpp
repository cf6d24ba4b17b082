#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "sirlat/fixed_points.hpp"
#include "sirlat/speed_curve.hpp"

using namespace sirlat;

namespace {

constexpr double kPi = std::numbers::pi;

double plain_h(double t)
{
    if (t <= 0.0 || t >= 1.0) {
        return 0.0;
    }
    return t * std::log(t) + (1.0 - t) * std::log(1.0 - t);
}

}  // namespace

TEST(DirectionRatio, AxesDiagonalAndSymmetry)
{
    EXPECT_NEAR(direction_ratio_a(0.0), 0.0, 1e-15);
    EXPECT_NEAR(direction_ratio_a(kPi / 2), 0.0, 1e-15);
    EXPECT_NEAR(direction_ratio_a(kPi / 4), 0.5, 1e-15);
    for (double phi : {0.1, 0.4, 0.7, 1.2}) {
        const double a = direction_ratio_a(phi);
        EXPECT_NEAR(direction_ratio_a(-phi), a, 1e-15);
        EXPECT_NEAR(direction_ratio_a(kPi / 2 - phi), a, 1e-15);
        EXPECT_NEAR(direction_ratio_a(kPi + phi), a, 1e-15);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 0.5);
    }
}

TEST(RateG, UnitSpeedReducesToEntropyOfRatio)
{
    for (double phi : {0.0, 0.2, 0.5, kPi / 4}) {
        EXPECT_NEAR(rate_G(1.0, phi), plain_h(direction_ratio_a(phi)), 1e-12) << phi;
    }
}

TEST(RateG, SmallSpeedOnDiagonalTendsToLogOneFifth)
{
    EXPECT_NEAR(rate_G(1e-6, kPi / 4), std::log(0.2), 1e-5);
}

TEST(RateG, MatchesDenseGridMinimum)
{
    const double v = 0.5;
    for (double a : {0.0, 0.2, 0.5}) {
        constexpr int kPoints = 1000000;
        double best = 1e300;
        for (int k = 0; k <= kPoints; ++k) {
            const double t = v + (1.0 - v) * k / kPoints;
            const double r = 0.5 - v / (2.0 * t);
            const double s = 0.5 - (1.0 - 2.0 * a) * v / (2.0 * t);
            best = std::min(best, plain_h(t) + t * (plain_h(r) + plain_h(s)));
        }
        const double g = rate_G_from_ratio(v, a);
        EXPECT_LE(g, best + 1e-12) << a;
        EXPECT_NEAR(g, best, 1e-9) << a;
    }
}

TEST(RateG, IncreasingInSpeed)
{
    for (double a : {0.0, 0.15, 0.35}) {
        double prev = -1e300;
        for (int k = 1; k <= 40; ++k) {
            const double g = rate_G_from_ratio(k / 40.0, a);
            EXPECT_GT(g, prev) << a << ' ' << k;
            prev = g;
        }
    }
}

TEST(RateG, RejectsSpeedOutsideUnitInterval)
{
    EXPECT_THROW(rate_G(0.0, 0.1), DomainError);
    EXPECT_THROW(rate_G(1.5, 0.1), DomainError);
}

TEST(Upsilon, BelowOneEverywhereForWeakTransmission)
{
    for (double theta : {0.5, 1.0, 1.4}) {
        for (double phi : {0.0, 0.3, kPi / 4}) {
            const double u = upsilon(theta, phi);
            EXPECT_GT(u, 0.0);
            EXPECT_LT(u, 1.0) << theta << ' ' << phi;
        }
    }
}

TEST(Upsilon, OneEverywhereForStrongTransmission)
{
    for (double theta : {4.0, 6.0}) {
        for (double phi : {0.0, 0.3, kPi / 4}) {
            EXPECT_EQ(upsilon(theta, phi), 1.0) << theta << ' ' << phi;
        }
    }
}

TEST(Upsilon, SpeedOneExactlyInsideTheCone)
{
    const double theta = 2.0;
    const double kappa = solve_kappa(theta);
    EXPECT_EQ(upsilon_from_ratio(theta, kappa + 1e-6), 1.0);
    EXPECT_EQ(upsilon_from_ratio(theta, 0.5), 1.0);
    EXPECT_LT(upsilon_from_ratio(theta, kappa - 1e-3), 1.0);
    EXPECT_LT(upsilon_from_ratio(theta, 0.0), 1.0);
    EXPECT_GT(upsilon_from_ratio(theta, 0.0), 0.5);
}

TEST(Upsilon, RootSatisfiesSpeedEquation)
{
    const double theta = 1.0;
    for (double a : {0.0, 0.25, 0.5}) {
        const double u = upsilon_from_ratio(theta, a);
        EXPECT_NEAR(rate_G_from_ratio(u, a), std::log(0.4), 1e-8) << a;
    }
}

TEST(Upsilon, MonotoneInTheta)
{
    for (double phi : {0.0, 0.4}) {
        double prev = 0.0;
        for (double theta : {0.2, 0.8, 1.5, 2.5, 3.5}) {
            const double u = upsilon(theta, phi);
            EXPECT_GE(u, prev) << theta;
            prev = u;
        }
    }
}

TEST(ShapeCurve, SamplesShareLatticeSymmetry)
{
    const auto curve = shape_curve(2.0, 64);
    ASSERT_EQ(curve.samples.size(), 64u);
    // phi_k and phi_{16 - k} are reflections about the diagonal
    for (int k = 0; k <= 16; ++k) {
        EXPECT_EQ(curve.samples[k].upsilon, curve.samples[16 - k].upsilon) << k;
        EXPECT_EQ(curve.samples[k].upsilon, curve.samples[k + 32].upsilon) << k;
    }
    EXPECT_THROW(shape_curve(2.0, 4), DomainError);
}

TEST(ShapeCurve, CsvWriters)
{
    const auto curve = shape_curve(1.0, 8);
    std::ostringstream a;
    write_csv(a, curve);
    EXPECT_EQ(a.str().substr(0, 12), "phi,upsilon\n");
    std::ostringstream b;
    write_overlay_csv(b, curve, 10.0);
    std::string line;
    std::istringstream in(b.str());
    std::getline(in, line);
    EXPECT_EQ(line, "phi,x,y");
    std::getline(in, line);
    // phi = 0 lies on the positive x axis at distance T * upsilon
    const double x = std::stod(line.substr(line.find(',') + 1));
    EXPECT_NEAR(x, 10.0 * curve.samples[0].upsilon, 1e-12);
}
