// Acceptance runner: one [PASS]/[FAIL] line per criterion, with its runtime
// against the budget. Exit status is 0 iff every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <boost/rational.hpp>

#include "sirlat/det_lattice.hpp"
#include "sirlat/experiments.hpp"
#include "sirlat/fixed_points.hpp"
#include "sirlat/montecarlo.hpp"
#include "sirlat/path_oracle.hpp"
#include "sirlat/speed_curve.hpp"

using namespace sirlat;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* format, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, x);
    return buf;
}

int threads()
{
    return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

Outcome herd_immunity_numbers()
{
    const double iota = solve_iota(2.0);
    const boost::rational<int> herd = boost::rational<int>(1) - boost::rational<int>(1, 1 + 2);
    const bool exact = herd == boost::rational<int>(2, 3) && herd_immunity(2.0) == 2.0 / 3.0;
    return {iota >= 0.935 && iota <= 0.945 && exact,
            "iota(2)=" + fmt("%.6f", iota) + ", 1-1/3 = 2/3 " + (exact ? "exactly" : "NOT exactly")};
}

Outcome speed_phase_transitions()
{
    const int samples = 720;
    const auto c1 = shape_curve(1.0, samples);
    double max1 = 0.0;
    for (const auto& s : c1.samples) {
        max1 = std::max(max1, s.upsilon);
    }

    // theta = 2: upsilon == 1 exactly iff a(phi) >= kappa, except within one
    // grid cell of the cone edge
    const double kappa = solve_kappa(2.0);
    const auto c2 = shape_curve(2.0, samples);
    int mismatches = 0;
    int cone = 0;
    for (int k = 0; k < samples; ++k) {
        const double a = direction_ratio_a(c2.samples[static_cast<std::size_t>(k)].phi);
        const bool inside = a >= kappa;
        const bool one = c2.samples[static_cast<std::size_t>(k)].upsilon == 1.0;
        cone += one;
        if (inside != one) {
            const double a_prev = direction_ratio_a(c2.samples[static_cast<std::size_t>((k + samples - 1) % samples)].phi);
            const double a_next = direction_ratio_a(c2.samples[static_cast<std::size_t>((k + 1) % samples)].phi);
            const bool at_edge = (a_prev >= kappa) != inside || (a_next >= kappa) != inside;
            mismatches += !at_edge;
        }
    }

    const auto c5 = shape_curve(5.0, samples);
    int not_one = 0;
    for (const auto& s : c5.samples) {
        not_one += s.upsilon != 1.0;
    }
    return {max1 < 1.0 && mismatches == 0 && not_one == 0,
            "theta=1 max " + fmt("%.6f", max1) + "; theta=2 " + std::to_string(cone) + "/720 at speed one, " +
                std::to_string(mismatches) + " off the cone rule; theta=5 " + std::to_string(not_one) +
                " samples below one"};
}

Outcome g_endpoints()
{
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / 64;
        worst = std::max(worst, std::abs(rate_G(1.0, phi) - entropy_h(direction_ratio_a(phi))));
    }
    const double small = std::abs(rate_G(1e-6, std::numbers::pi / 4) - std::log(0.2));
    return {worst < 1e-10 && small < 1e-3,
            "max |G(1,phi)-h(a)| " + fmt("%.2e", worst) + ", |G(1e-6,pi/4)-log(1/5)| " + fmt("%.2e", small)};
}

Outcome ell_sum_identity()
{
    bool ok = true;
    std::string detail;
    for (double th : {1.6, 2.0, 3.0, 5.0}) {
        const EllTable t = ell_sequence(th, 200);
        const double sum = t.partial_sums.back();
        const bool good = std::abs(sum - t.iota) < 1e-6 && sum > th / (1.0 + th);
        ok = ok && good;
        detail += "theta=" + fmt("%g", th) + " |sum-iota| " + fmt("%.1e", std::abs(sum - t.iota)) + "; ";
    }
    return {ok, detail};
}

Outcome deterministic_frontier()
{
    const LayerMatrix lm = frontier_layer_sequences(2.0, 0.2, 5, 200);
    const EllTable ell = ell_sequence(2.0, 5);
    double worst = 0.0;
    for (int i = 1; i <= 5; ++i) {
        worst = std::max(worst, std::abs(lm.at(i, 200) - ell.values[static_cast<std::size_t>(i - 1)]));
    }
    const double sub = frontier_layer_sequences(1.0, 0.2, 1, 200).at(1, 200);
    return {worst < 1e-6 && sub < 1e-6,
            "theta=2 max |y_200^(i)-ell^(i)| " + fmt("%.2e", worst) + "; theta=1 y_200^(1) " + fmt("%.2e", sub)};
}

Outcome cone_dichotomy()
{
    const double theta = 2.0;
    const int n = 400;
    const double eps = 0.05;
    DetOptions opt;
    opt.threads = threads();
    const DetState s = det_run(InitialCondition::gamma_point(0.2), theta, n, opt);
    const double kappa = solve_kappa(theta);
    const double ell = solve_ell1(theta);
    double inside = 0.0;
    double outside = 0.0;
    for (int m = 0; m <= n; ++m) {
        const double frac = static_cast<double>(m) / n;
        const double v = s.I.at(m, n - m);
        if (frac > kappa + eps && frac < 1.0 - kappa - eps) {
            inside = std::max(inside, std::abs(v - ell));
        }
        if (frac < kappa - eps || frac > 1.0 - kappa + eps) {
            outside = std::max(outside, v);
        }
    }
    return {inside < 0.01 && outside < 0.01,
            "inside max |I-ell| " + fmt("%.2e", inside) + ", outside max " + fmt("%.2e", outside)};
}

Outcome final_size_equation()
{
    const double theta = 2.0;
    const int radius = 400;
    const Window box = Window::square(radius);
    const RealField I0 = InitialCondition::gamma_point(0.2).density();
    RInfinityOptions opt;
    opt.tol = 1e-9;
    const RInfinityResult res = solve_R_infinity(I0, theta, box, opt);
    double far = 0.0;
    for (int y = -radius; y <= radius; ++y) {
        for (int x = -radius; x <= radius; ++x) {
            if (std::abs(x) + std::abs(y) >= 300) {
                far = std::max(far, std::abs(res.f.ref(x, y) - res.iota));
            }
        }
    }
    // a finite log lower bound on (f - I0)/(1 - I0) - iota certifies strict excess
    const RealField lb = log_excess_lower_bound(I0, theta, box);
    int uncertified = 0;
    for (double v : lb.values()) {
        uncertified += !std::isfinite(v);
    }
    return {res.gap <= 1e-8 && far < 0.02 && uncertified == 0,
            "gap " + fmt("%.2e", res.gap) + ", max |f-iota| at radius>=300 " + fmt("%.2e", far) + ", " +
                std::to_string(uncertified) + " sites without certified excess"};
}

Outcome survival_probability()
{
    const ModelParams params(2.0, 500);
    const auto rep = estimate_survival(params, InitialCondition::unit(), 200, 2000, 1000, {1, threads()});
    const double p = rep.get("survival").value;
    const double iota = solve_iota(2.0);
    return {std::abs(p - iota) <= 0.03,
            "survival " + fmt("%.4f", p) + " +- " + fmt("%.4f", rep.get("survival").ci95) + " vs iota " +
                fmt("%.4f", iota)};
}

Outcome stochastic_layers()
{
    const ModelParams params(2.0, 1000);
    const auto rep = layer_profile(params, InitialCondition::gamma_point(0.2), 300, 4, 0.05, 1, {1, threads()});
    bool ok = true;
    std::string detail;
    for (int i = 1; i <= 4; ++i) {
        const double m = rep.get("layer" + std::to_string(i)).value;
        const double l = rep.get("ell" + std::to_string(i)).value;
        ok = ok && rep.get("layer" + std::to_string(i)).n > 0 && std::abs(m - l) < 0.05;
        detail += "layer" + std::to_string(i) + " " + fmt("%.4f", m) + " vs " + fmt("%.4f", l) + "; ";
    }
    return {ok, detail};
}

Outcome delay_distribution_check()
{
    const ModelParams params(2.0, 2000);
    const auto rep = delay_distribution(params, 1000, 60, 4, {1, threads()});
    const double p0 = rep.get("P(K=0)").value;
    const double l1 = rep.get("ell1").value;
    return {std::abs(p0 - l1) < 0.05, "P(K=0) " + fmt("%.4f", p0) + " vs ell1 " + fmt("%.4f", l1) +
                                          " (given survival " + fmt("%.4f", rep.get("P(K=0|survival)").value) +
                                          ")"};
}

Outcome path_exactness()
{
    const auto checks = path_exactness_checks(12, 20, 14, 7);
    bool ok = true;
    std::string detail;
    for (const auto& c : checks) {
        ok = ok && c.passed;
        detail += c.name + " " + c.detail + "; ";
    }
    return {ok, detail};
}

Outcome growth_rate()
{
    const auto rows = growth_rate_check(2.0, 1, 1, 0.5, {400});
    return {rows[0].gap < 0.05, "gap " + fmt("%.4f", rows[0].gap) + " at n=400"};
}

Outcome percolation_equivalence()
{
    const auto checks = percolation_checks(2.0, 20000, 0.001, 1, threads());
    int failed = 0;
    std::string worst;
    for (const auto& c : checks) {
        failed += !c.passed;
        if (!c.passed) {
            worst += c.name + " ";
        }
    }
    return {failed == 0, std::to_string(checks.size() - static_cast<std::size_t>(failed)) + "/" +
                             std::to_string(checks.size()) + " checks pass" + (failed ? ": failed " + worst : "")};
}

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "herd-immunity numbers", 0.001, herd_immunity_numbers},
        {2, "speed-curve phase transitions", 5, speed_phase_transitions},
        {3, "rate-function endpoints", 1, g_endpoints},
        {4, "layer-sum identity", 1, ell_sum_identity},
        {5, "deterministic frontier convergence", 1, deterministic_frontier},
        {6, "deterministic cone dichotomy", 120, cone_dichotomy},
        {7, "final-size equation", 300, final_size_equation},
        {8, "stochastic survival probability", 600, survival_probability},
        {9, "stochastic frontier layers", 600, stochastic_layers},
        {10, "delay distribution", 900, delay_distribution_check},
        {11, "path-count exactness", 30, path_exactness},
        {12, "rate-function consistency", 10, growth_rate},
        {13, "percolation equivalence", 120, percolation_equivalence},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = o.passed && in_time;
        failures += !pass;
        std::printf("[%s] %2d %s: %s (%.3f s, budget %g s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", OVER BUDGET");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
