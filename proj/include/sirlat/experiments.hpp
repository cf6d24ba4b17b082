#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sirlat/config.hpp"
#include "sirlat/det_lattice.hpp"
#include "sirlat/detail/csv.hpp"
#include "sirlat/fixed_points.hpp"
#include "sirlat/manifest.hpp"
#include "sirlat/montecarlo.hpp"
#include "sirlat/oracles.hpp"
#include "sirlat/path_oracle.hpp"
#include "sirlat/percolation.hpp"
#include "sirlat/speed_curve.hpp"
#include "sirlat/stoch_sim.hpp"

namespace sirlat {

/// Flags shared by every command; command-line values override the config.
struct RunFlags {
    std::uint64_t seed = 1;
    int threads = 1;
    std::filesystem::path out = "out";
    bool paper_scale = false;
};

/// One named pass/fail check with a short explanation.
struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct CommandResult {
    RunManifest manifest;
    std::vector<Check> checks;
    std::vector<std::string> warnings;

    bool all_passed() const
    {
        for (const auto& c : checks) {
            if (!c.passed) {
                return false;
            }
        }
        return true;
    }
};

namespace detail {

inline std::string fmt_short(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

inline std::string fmt_sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// Opens dir/name for writing and registers it in the manifest.
inline std::ofstream open_output(CommandResult& r, const std::filesystem::path& dir, const std::string& name)
{
    std::filesystem::create_directories(dir);
    r.manifest.outputs.push_back(name);
    std::ofstream out(dir / name);
    if (!out) {
        throw std::runtime_error("cannot write " + (dir / name).string());
    }
    return out;
}

inline void write_checks(std::ostream& out, const std::vector<Check>& checks)
{
    out << "check,passed,detail\n";
    for (const auto& c : checks) {
        out << c.name << ',' << (c.passed ? "true" : "false") << ",\"" << c.detail << "\"\n";
    }
}

inline InitialCondition make_ic(const std::string& kind, double gamma, int half_length)
{
    if (kind == "unit") {
        return InitialCondition::unit();
    }
    if (kind == "gamma") {
        return InitialCondition::gamma_point(gamma);
    }
    return InitialCondition::diag_line(gamma, half_length);
}

inline std::string describe(const InitialCondition& ic)
{
    std::string s = to_string(ic.kind);
    if (ic.kind != IcKind::unit) {
        s += " gamma=" + fmt_short(ic.gamma);
    }
    if (ic.kind == IcKind::diag_line) {
        s += " half_length=" + std::to_string(ic.half_length);
    }
    return s;
}

inline void finish(CommandResult& r, const RunFlags& flags, const Stopwatch& clock)
{
    r.manifest.note("seed", std::to_string(flags.seed));
    r.manifest.note("threads", std::to_string(flags.threads));
    r.manifest.wall_clock_seconds = clock.seconds();
    r.manifest.write(flags.out);
}

}  // namespace detail

// ---------------------------------------------------------------- solve

struct SolveConfig {
    double theta_min = 0.1;
    double theta_max = 10.0;
    double theta_step = 0.1;
    std::vector<double> thetas;  ///< overrides the grid when nonempty
    int layers = 5;

    void bind(SectionBinder& b)
    {
        auto positive = [](double x) { return x > 0.0; };
        b.real("theta_min", theta_min, positive, "theta_min > 0")
            .real("theta_max", theta_max, positive, "theta_max > 0")
            .real("theta_step", theta_step, positive, "theta_step > 0")
            .reals("thetas", thetas)
            .integer("layers", layers, 1, 1000);
    }

    std::vector<double> grid() const
    {
        if (!thetas.empty()) {
            return thetas;
        }
        std::vector<double> g;
        const auto steps = std::llround(std::floor((theta_max - theta_min) / theta_step + 1e-9));
        for (long long k = 0; k <= steps; ++k) {
            // snap to a decimal grid so 0.1 + 2 * 0.1 prints as 0.3
            g.push_back(std::round((theta_min + static_cast<double>(k) * theta_step) * 1e9) / 1e9);
        }
        return g;
    }
};

/// Herd-immunity threshold 1 - 1/R0 with R0 = 1 + theta.
inline double herd_immunity(double theta) { return theta / (1.0 + theta); }

/// Constants table: theta,iota,kappa,gamma1,ell1..ellM,herd_immunity. Cells of
/// constants undefined at that theta are left empty.
inline void write_constants_csv(std::ostream& out, const std::vector<double>& thetas, int layers)
{
    out << "theta,iota,kappa,gamma1";
    for (int i = 1; i <= layers; ++i) {
        out << ",ell" << i;
    }
    out << ",herd_immunity\n";
    for (double th : thetas) {
        if (!(th > 0.0)) {
            throw DomainError("solve: theta must be positive");
        }
        out << detail::fmt_short(th) << ',' << detail::fmt_double(solve_iota(th)) << ',';
        if (th > 1.5) {
            out << detail::fmt_double(solve_kappa(th));
        }
        out << ',';
        if (th > 4.0) {
            out << detail::fmt_double(solve_gamma1(th));
        }
        if (th > 1.5) {
            const EllTable t = ell_sequence(th, layers);
            for (double v : t.values) {
                out << ',' << detail::fmt_double(v);
            }
        } else {
            for (int i = 0; i < layers; ++i) {
                out << ',';
            }
        }
        // 1 - 1/(1+theta) written as theta/(1+theta): one rounding, so theta = 2 gives the double nearest 2/3
        out << ',' << detail::fmt_double(herd_immunity(th)) << '\n';
    }
}

inline CommandResult cmd_solve(const SolveConfig& cfg, const RunFlags& flags)
{
    const Stopwatch clock;
    CommandResult r;
    r.manifest.command = "solve";
    const auto grid = cfg.grid();
    if (grid.empty()) {
        throw DomainError("solve: empty theta grid");
    }
    {
        auto out = detail::open_output(r, flags.out, "solve.csv");
        write_constants_csv(out, grid, cfg.layers);
    }
    r.manifest.note("thetas", std::to_string(grid.size()) + " values from " + detail::fmt_short(grid.front()) +
                                  " to " + detail::fmt_short(grid.back()));
    r.manifest.note("layers", std::to_string(cfg.layers));
    detail::finish(r, flags, clock);
    return r;
}

// ---------------------------------------------------------------- shape

struct ShapeConfig {
    std::vector<double> thetas{1.0, 2.0, 5.0};
    int samples = 720;
    double overlay_T = 0.0;  ///< also write T * upsilon overlay points when positive

    void bind(SectionBinder& b)
    {
        b.reals("thetas", thetas)
            .integer("samples", samples, 8, 1000000)
            .real("overlay_T", overlay_T, [](double x) { return x >= 0.0; }, "overlay_T >= 0");
    }
};

inline CommandResult cmd_shape(const ShapeConfig& cfg, const RunFlags& flags)
{
    const Stopwatch clock;
    CommandResult r;
    r.manifest.command = "shape";
    for (double th : cfg.thetas) {
        const ShapeCurve curve = shape_curve(th, cfg.samples);
        {
            auto out = detail::open_output(r, flags.out, "shape_theta" + detail::fmt_short(th) + ".csv");
            write_csv(out, curve);
        }
        if (cfg.overlay_T > 0.0) {
            auto out = detail::open_output(
                r, flags.out, "overlay_theta" + detail::fmt_short(th) + "_T" + detail::fmt_short(cfg.overlay_T) + ".csv");
            write_overlay_csv(out, curve, cfg.overlay_T);
        }
    }
    r.manifest.note("samples", std::to_string(cfg.samples));
    detail::finish(r, flags, clock);
    return r;
}

// ---------------------------------------------------------------- simulate

struct SimulateConfig {
    double theta = 2.0;
    int N = 200;
    int T = 300;
    std::string ic = "unit";
    double gamma = 0.2;
    int half_length = 0;  ///< diag-line truncation; 0 means T
    std::vector<int> snapshots;  ///< times to export; the final time is always exported
    std::int64_t replicate = 0;
    int max_window_side = 1 << 13;

    void bind(SectionBinder& b)
    {
        b.real("theta", theta, [](double x) { return x > 0.0; }, "theta > 0")
            .integer("N", N, 1, 1 << 30)
            .integer("T", T, 0, 1 << 20)
            .text("ic", ic, {"unit", "gamma", "diag"})
            .real("gamma", gamma, [](double x) { return x > 0.0 && x <= 1.0; }, "0 < gamma <= 1")
            .integer("half_length", half_length, 0, 1 << 20)
            .integers("snapshots", snapshots)
            .integer("replicate", replicate, 0, INT64_MAX)
            .integer("max_window_side", max_window_side, 1, 1 << 16);
    }
};

/// Mean, min and max of (I+R)/N over sites with |x| + |y| <= radius.
struct Plateau {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    int radius = 0;
};

inline Plateau plateau_statistic(const CountField& I, const CountField& R, int N, int radius)
{
    Plateau p;
    p.radius = radius;
    p.min = 1.0;
    p.max = 0.0;
    double sum = 0.0;
    int count = 0;
    for (int y = -radius; y <= radius; ++y) {
        for (int x = -(radius - std::abs(y)); x <= radius - std::abs(y); ++x) {
            const double v = static_cast<double>(I.at(x, y) + R.at(x, y)) / N;
            sum += v;
            p.min = std::min(p.min, v);
            p.max = std::max(p.max, v);
            ++count;
        }
    }
    p.mean = sum / count;
    return p;
}

inline CommandResult cmd_simulate(SimulateConfig cfg, const RunFlags& flags)
{
    const Stopwatch clock;
    CommandResult r;
    r.manifest.command = "simulate";
    if (flags.paper_scale) {
        cfg.N = 1000;
        cfg.T = 1000;
        r.warnings.push_back("--paper-scale: N=1000, T=1000; expect a long run and a 2001x2001 window");
    }
    const ModelParams params(cfg.theta, cfg.N);
    const InitialCondition ic = detail::make_ic(cfg.ic, cfg.gamma, cfg.half_length > 0 ? cfg.half_length : cfg.T);
    SimOptions opt;
    opt.record = RecordPolicy::at(cfg.snapshots);
    opt.max_window_side = cfg.max_window_side;
    const SimRun run = sim_run(params, ic, cfg.T, flags.seed, static_cast<std::uint64_t>(cfg.replicate), opt);

    const double scale = 1.0 / cfg.N;
    for (const auto& s : run.slices) {
        const std::string t = std::to_string(s.t);
        {
            auto out = detail::open_output(r, flags.out, "I_t" + t + ".csv");
            write_field_csv(out, s.I);
        }
        {
            auto out = detail::open_output(r, flags.out, "R_t" + t + ".csv");
            write_field_csv(out, s.R);
        }
        {
            auto out = detail::open_output(r, flags.out, "I_t" + t + ".pgm");
            write_field_pgm(out, s.I, scale);
        }
        {
            auto out = detail::open_output(r, flags.out, "R_t" + t + ".pgm");
            write_field_pgm(out, s.R, scale);
        }
    }
    {
        auto out = detail::open_output(r, flags.out, "overlay_T" + std::to_string(cfg.T) + ".csv");
        write_overlay_csv(out, shape_curve(cfg.theta, 720), cfg.T);
    }

    const SimSlice* last = run.slice_at(run.t_final);
    const double iota = solve_iota(cfg.theta);
    const Plateau pl = plateau_statistic(last->I, last->R, cfg.N, std::max(1, cfg.T / 4));
    {
        auto out = detail::open_output(r, flags.out, "summary.csv");
        out << "key,value\n";
        out << "survived," << (run.survived() ? "true" : "false") << '\n';
        out << "extinct_at," << (run.extinct_at ? std::to_string(*run.extinct_at) : "") << '\n';
        out << "t_final," << run.t_final << '\n';
        out << "ever_infected," << run.ever_infected << '\n';
        out << "iota," << detail::fmt_double(iota) << '\n';
        out << "plateau_radius," << pl.radius << '\n';
        out << "plateau_mean," << detail::fmt_double(pl.mean) << '\n';
        out << "plateau_min," << detail::fmt_double(pl.min) << '\n';
        out << "plateau_max," << detail::fmt_double(pl.max) << '\n';
    }
    if (cfg.ic == "unit") {
        r.checks.push_back({"plateau_near_iota", run.survived() && std::abs(pl.mean - iota) < 0.05,
                            "mean (I+R)/N over |x|+|y|<=" + std::to_string(pl.radius) + " is " +
                                detail::fmt_sci(pl.mean) + " vs iota " + detail::fmt_sci(iota)});
    }
    r.manifest.note("theta", detail::fmt_short(cfg.theta));
    r.manifest.note("N", std::to_string(cfg.N));
    r.manifest.note("T", std::to_string(cfg.T));
    r.manifest.note("ic", detail::describe(ic));
    r.manifest.note("replicate", std::to_string(cfg.replicate));
    detail::finish(r, flags, clock);
    return r;
}

// ---------------------------------------------------------------- det

struct DetConfig {
    double theta = 2.0;
    std::string ic = "gamma";
    double gamma = 0.2;
    int half_length = 0;  ///< diag-line truncation; 0 means T
    int T = 200;
    int layers = 5;
    int layer_n = 200;
    int radius = 400;  ///< box radius for the final-size equation; 0 skips it
    double tol = 1e-9;

    void bind(SectionBinder& b)
    {
        b.real("theta", theta, [](double x) { return x > 0.0; }, "theta > 0")
            .text("ic", ic, {"gamma", "diag"})
            .real("gamma", gamma, [](double x) { return x > 0.0 && x <= 1.0; }, "0 < gamma <= 1")
            .integer("half_length", half_length, 0, 1 << 20)
            .integer("T", T, 0, 1 << 14)
            .integer("layers", layers, 1, 1000)
            .integer("layer_n", layer_n, 0, 1 << 20)
            .integer("radius", radius, 0, 1 << 13)
            .real("tol", tol, [](double x) { return x > 0.0 && x < 1.0; }, "0 < tol < 1");
    }
};

/// Frontier statistics on the antidiagonal x + y = n, x, y >= 0, at time n:
/// overall min/max/mean and the extremes inside the cone min(x, y)/n >= kappa + eps.
struct FrontierRow {
    int n = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::optional<double> cone_min;
    std::optional<double> cone_max;
};

inline FrontierRow frontier_row(const RealField& I, int n, std::optional<double> kappa, double eps)
{
    FrontierRow row;
    row.n = n;
    row.min = 1.0;
    double sum = 0.0;
    for (int x = 0; x <= n; ++x) {
        const double v = I.at(x, n - x);
        row.min = std::min(row.min, v);
        row.max = std::max(row.max, v);
        sum += v;
        if (kappa && n > 0 && std::min(x, n - x) >= (*kappa + eps) * n) {
            row.cone_min = std::min(row.cone_min.value_or(1.0), v);
            row.cone_max = std::max(row.cone_max.value_or(0.0), v);
        }
    }
    row.mean = sum / (n + 1);
    return row;
}

inline CommandResult cmd_det(const DetConfig& cfg, const RunFlags& flags)
{
    const Stopwatch clock;
    CommandResult r;
    r.manifest.command = "det";
    const InitialCondition ic = detail::make_ic(cfg.ic, cfg.gamma, cfg.half_length > 0 ? cfg.half_length : cfg.T);
    const std::optional<double> kappa = cfg.theta > 1.5 ? std::optional(solve_kappa(cfg.theta)) : std::nullopt;
    const std::optional<double> ell =
        cfg.theta > 1.5 ? std::optional(ell_sequence(cfg.theta, 1).values[0]) : std::nullopt;

    std::vector<FrontierRow> rows;
    DetOptions dopt;
    dopt.threads = flags.threads;
    const DetState fin = det_run(
        ic, cfg.theta, cfg.T, [&](const DetState& s) { rows.push_back(frontier_row(s.I, s.t, kappa, 0.05)); }, dopt);
    {
        auto out = detail::open_output(r, flags.out, "det_frontier.csv");
        out << "n,min,max,mean,cone_min,cone_max,ell1\n";
        const std::string ell_cell = ell ? detail::fmt_double(*ell) : "";
        for (const auto& row : rows) {
            out << row.n << ',' << detail::fmt_double(row.min) << ',' << detail::fmt_double(row.max) << ','
                << detail::fmt_double(row.mean) << ',' << (row.cone_min ? detail::fmt_double(*row.cone_min) : "")
                << ',' << (row.cone_max ? detail::fmt_double(*row.cone_max) : "") << ','
                << ell_cell << '\n';
        }
    }
    const std::string t = std::to_string(cfg.T);
    for (const auto& [name, field] : {std::pair{"det_I_t", &fin.I}, std::pair{"det_R_t", &fin.R}}) {
        {
            auto out = detail::open_output(r, flags.out, name + t + ".csv");
            write_field_csv(out, *field);
        }
        {
            auto out = detail::open_output(r, flags.out, name + t + ".pgm");
            write_field_pgm(out, *field);
        }
    }

    const LayerMatrix lm = frontier_layer_sequences(cfg.theta, cfg.gamma, cfg.layers, cfg.layer_n);
    {
        auto out = detail::open_output(r, flags.out, "det_layers.csv");
        out << "n";
        for (int i = 1; i <= cfg.layers; ++i) {
            out << ",y" << i;
        }
        out << '\n';
        for (int n = 0; n <= cfg.layer_n; ++n) {
            out << n;
            for (int i = 1; i <= cfg.layers; ++i) {
                const double v = lm.at(i, n);
                out << ',' << (std::isnan(v) ? "" : detail::fmt_double(v));
            }
            out << '\n';
        }
        if (cfg.theta > 1.5) {
            const EllTable et = ell_sequence(cfg.theta, cfg.layers);
            out << "limit";
            for (double v : et.values) {
                out << ',' << detail::fmt_double(v);
            }
            out << '\n';
        }
    }

    if (cfg.radius > 0 && cfg.ic == "gamma") {
        const Window box = Window::square(cfg.radius);
        const RealField I0 = ic.density();
        RInfinityOptions ropt;
        ropt.tol = cfg.tol;
        const RInfinityResult res = solve_R_infinity(I0, cfg.theta, box, ropt);
        const RealField lb = log_excess_lower_bound(I0, cfg.theta, box);
        bool bound_ok = true;
        for (double v : lb.values()) {
            bound_ok = bound_ok && std::isfinite(v);
        }
        {
            auto out = detail::open_output(r, flags.out, "rinf_radial.csv");
            out << "radius,mean,min,max,iota\n";
            for (int rad = 0; rad <= cfg.radius; ++rad) {
                double sum = 0.0;
                double lo = 1.0;
                double hi = 0.0;
                int count = 0;
                for (int x = -rad; x <= rad; ++x) {
                    const int ys[2] = {rad - std::abs(x), -(rad - std::abs(x))};
                    for (int k = 0; k < (ys[0] == 0 ? 1 : 2); ++k) {
                        const double v = res.f.at(x, ys[k]);
                        sum += v;
                        lo = std::min(lo, v);
                        hi = std::max(hi, v);
                        ++count;
                    }
                }
                out << rad << ',' << detail::fmt_double(sum / count) << ',' << detail::fmt_double(lo) << ','
                    << detail::fmt_double(hi) << ',' << detail::fmt_double(res.iota) << '\n';
            }
        }
        {
            auto out = detail::open_output(r, flags.out, "rinf_field.pgm");
            write_field_pgm(out, res.f);
        }
        {
            auto out = detail::open_output(r, flags.out, "rinf_summary.csv");
            out << "key,value\n";
            out << "gap," << detail::fmt_double(res.gap) << '\n';
            out << "sweeps," << res.sweeps << '\n';
            out << "boundary_deviation," << detail::fmt_double(res.boundary_deviation) << '\n';
            out << "iota," << detail::fmt_double(res.iota) << '\n';
            out << "excess_certified," << (bound_ok ? "true" : "false") << '\n';
        }
        r.checks.push_back({"rinf_converged", res.gap <= cfg.tol, "gap " + detail::fmt_sci(res.gap)});
        r.checks.push_back({"rinf_excess_positive", bound_ok, "(f - I0)/(1 - I0) > iota certified at every site"});
    }
    r.manifest.note("theta", detail::fmt_short(cfg.theta));
    r.manifest.note("ic", detail::describe(ic));
    r.manifest.note("T", t);
    r.manifest.note("radius", std::to_string(cfg.radius));
    detail::finish(r, flags, clock);
    return r;
}

// ---------------------------------------------------------------- montecarlo

struct MonteCarloConfig {
    std::string kind = "survival";  ///< survival | delay | profile | layers
    double theta = 2.0;
    int N = 0;      ///< 0: the desk default of the kind
    int reps = 0;   ///< 0: the desk default of the kind
    int T_max = 0;  ///< 0: the desk default of the kind
    std::string ic = "unit";
    double gamma = 0.2;
    std::int64_t threshold = 1000;
    int survivors = 1000;
    int i_max = 5;
    int n = 300;
    double eps = 0.05;
    std::vector<int> probe_x{0, 5, 10, 20};
    std::vector<int> probe_y{0, 0, 0, 0};

    void bind(SectionBinder& b)
    {
        b.text("kind", kind, {"survival", "delay", "profile", "layers"})
            .real("theta", theta, [](double x) { return x > 0.0; }, "theta > 0")
            .integer("N", N, 0, 1 << 30)
            .integer("reps", reps, 0, 1 << 30)
            .integer("T_max", T_max, 0, 1 << 20)
            .text("ic", ic, {"unit", "gamma"})
            .real("gamma", gamma, [](double x) { return x > 0.0 && x <= 1.0; }, "0 < gamma <= 1")
            .integer("threshold", threshold, 0, INT64_MAX)
            .integer("survivors", survivors, 1, 1 << 30)
            .integer("i_max", i_max, 0, 1000)
            .integer("n", n, 1, 1 << 20)
            .real("eps", eps, [](double x) { return x >= 0.0 && x < 0.5; }, "0 <= eps < 0.5")
            .integers("probe_x", probe_x)
            .integers("probe_y", probe_y);
    }

    /// Fills the kind-specific defaults.
    void resolve()
    {
        if (kind == "survival") {
            N = N ? N : 500;
            reps = reps ? reps : 2000;
            T_max = T_max ? T_max : 200;
        } else if (kind == "delay") {
            N = N ? N : 2000;
            T_max = T_max ? T_max : 60;
        } else if (kind == "profile") {
            N = N ? N : 200;
            reps = reps ? reps : 50;
            T_max = T_max ? T_max : 100;
        } else {
            N = N ? N : 1000;
            reps = reps ? reps : 1;
            if (ic == "unit") {
                ic = "gamma";
            }
        }
    }
};

inline CommandResult cmd_montecarlo(MonteCarloConfig cfg, const RunFlags& flags)
{
    const Stopwatch clock;
    CommandResult r;
    r.manifest.command = "montecarlo";
    cfg.resolve();
    const ModelParams params(cfg.theta, cfg.N);
    const InitialCondition ic = detail::make_ic(cfg.ic, cfg.gamma, 0);
    const McOptions mc{flags.seed, flags.threads};
    MonteCarloReport rep;
    if (cfg.kind == "survival") {
        rep = estimate_survival(params, ic, cfg.T_max, cfg.reps, cfg.threshold, mc);
    } else if (cfg.kind == "delay") {
        rep = delay_distribution(params, cfg.survivors, cfg.T_max, cfg.i_max, mc);
    } else if (cfg.kind == "profile") {
        if (cfg.probe_x.size() != cfg.probe_y.size()) {
            throw ConfigError("montecarlo: probe_x and probe_y differ in length");
        }
        std::vector<std::pair<int, int>> probes;
        for (std::size_t k = 0; k < cfg.probe_x.size(); ++k) {
            probes.emplace_back(cfg.probe_x[k], cfg.probe_y[k]);
        }
        rep = final_proportion_profile(params, ic, cfg.T_max, cfg.reps, probes, mc);
    } else {
        rep = layer_profile(params, ic, cfg.n, cfg.i_max, cfg.eps, cfg.reps, mc);
    }
    {
        auto out = detail::open_output(r, flags.out, "mc_" + cfg.kind + ".csv");
        rep.write_csv(out);
    }
    r.manifest.note("kind", cfg.kind);
    r.manifest.note("theta", detail::fmt_short(cfg.theta));
    r.manifest.note("N", std::to_string(cfg.N));
    r.manifest.note("reps", std::to_string(cfg.reps));
    r.manifest.note("T_max", std::to_string(cfg.T_max));
    r.manifest.note("ic", detail::describe(ic));
    detail::finish(r, flags, clock);
    return r;
}

// ---------------------------------------------------------------- paths

struct PathsConfig {
    int exact_n = 12;
    int mass_n = 20;
    int strip_n = 14;
    int strip_k = 7;
    double theta = 2.0;
    int dm = 1;
    int dl = 1;
    double v = 0.5;
    std::vector<int> ns{100, 200, 400};
    double gap_tol = 0.05;

    void bind(SectionBinder& b)
    {
        b.integer("exact_n", exact_n, 0, 60)
            .integer("mass_n", mass_n, 0, 200)
            .integer("strip_n", strip_n, 0, 200)
            .integer("strip_k", strip_k, 1, 200)
            .real("theta", theta, [](double x) { return x > 0.0; }, "theta > 0")
            .integer("dm", dm, -1000, 1000)
            .integer("dl", dl, -1000, 1000)
            .real("v", v, [](double x) { return x > 0.0 && x <= 1.0; }, "0 < v <= 1")
            .integers("ns", ns)
            .real("gap_tol", gap_tol, [](double x) { return x > 0.0; }, "gap_tol > 0");
    }
};

/// Exact path-count identities against the transfer-matrix oracle.
inline std::vector<Check> path_exactness_checks(int exact_n, int mass_n, int strip_n, int strip_k)
{
    std::vector<Check> checks;
    {
        int cases = 0;
        int bad = 0;
        for (int n = 0; n <= exact_n; ++n) {
            const PathDp lazy(n, true);
            const PathDp simple(n, false);
            for (int m = -n; m <= n; ++m) {
                for (int l = -(n - std::abs(m)); l <= n - std::abs(m); ++l) {
                    cases += 2;
                    bad += count_srw(m, l, n).value != simple.at(m, l);
                    bad += count_lrw(m, l, n).value != lazy.at(m, l);
                }
            }
        }
        checks.push_back({"srw_lrw_equal_dp", bad == 0,
                          std::to_string(cases - bad) + "/" + std::to_string(cases) + " cases, n <= " +
                              std::to_string(exact_n)});
    }
    {
        int bad = 0;
        BigInt five = 1;
        for (int n = 0; n <= mass_n; ++n) {
            BigInt total = 0;
            for (int m = -n; m <= n; ++m) {
                for (int l = -(n - std::abs(m)); l <= n - std::abs(m); ++l) {
                    total += count_lrw(m, l, n).value;
                }
            }
            bad += total != five;
            five *= 5;
        }
        checks.push_back({"lrw_total_mass", bad == 0, "sum equals 5^n for n <= " + std::to_string(mass_n)});
    }
    {
        int cases = 0;
        int bad = 0;
        for (int k = 1; k <= strip_k; ++k) {
            for (int n = 0; n <= strip_n; ++n) {
                for (int m = -(k - 1); m <= k - 1; ++m) {
                    ++cases;
                    bad += count_oriented_strip(m, n, k).value != strip_dp(m, n, k);
                }
            }
        }
        checks.push_back({"strip_equal_dp", bad == 0,
                          std::to_string(cases - bad) + "/" + std::to_string(cases) + " cases, n <= " +
                              std::to_string(strip_n) + ", k <= " + std::to_string(strip_k)});
    }
    return checks;
}

inline CommandResult cmd_paths(const PathsConfig& cfg, const RunFlags& flags)
{
    const Stopwatch clock;
    CommandResult r;
    r.manifest.command = "paths";
    r.checks = path_exactness_checks(cfg.exact_n, cfg.mass_n, cfg.strip_n, cfg.strip_k);
    const auto rows = growth_rate_check(cfg.theta, cfg.dm, cfg.dl, cfg.v, cfg.ns);
    {
        auto out = detail::open_output(r, flags.out, "paths_growth.csv");
        write_growth_csv(out, rows);
    }
    if (!rows.empty()) {
        r.checks.push_back({"growth_gap", rows.back().gap < cfg.gap_tol,
                            "gap " + detail::fmt_sci(rows.back().gap) + " at n=" + std::to_string(rows.back().n)});
        bool decreasing = true;
        for (std::size_t k = 1; k < rows.size(); ++k) {
            decreasing = decreasing && rows[k].gap < rows[k - 1].gap;
        }
        r.checks.push_back({"growth_gap_decreasing", decreasing, "over the configured n schedule"});
    }
    {
        auto out = detail::open_output(r, flags.out, "paths_checks.csv");
        detail::write_checks(out, r.checks);
    }
    r.manifest.note("exact_n", std::to_string(cfg.exact_n));
    r.manifest.note("theta", detail::fmt_short(cfg.theta));
    detail::finish(r, flags, clock);
    return r;
}

// ---------------------------------------------------------------- percolation-check

struct PercolationCheckConfig {
    int seeds = 20000;
    double theta = 2.0;
    double alpha = 0.001;

    void bind(SectionBinder& b)
    {
        b.integer("seeds", seeds, 100, 1 << 26)
            .real("theta", theta, [](double x) { return x > 0.0; }, "theta > 0")
            .real("alpha", alpha, [](double x) { return x > 0.0 && x < 1.0; }, "0 < alpha < 1");
    }
};

/// Cross-checks of the percolation representation against the simulator and
/// against exact laws. Seeds are first_seed, first_seed + 1, ...
inline std::vector<Check> percolation_checks(double theta, int seeds, double alpha, std::uint64_t first_seed,
                                             int threads = 1)
{
    std::vector<Check> checks;
    auto chi = [&](const std::string& name, const ChiSquareResult& c) {
        checks.push_back({name, c.passes(alpha),
                          "chi2 " + detail::fmt_sci(c.statistic) + " dof " + std::to_string(c.dof) + " p " +
                              detail::fmt_sci(c.p_value)});
    };
    auto confined = [](const Window& box) {
        SimOptions opt;
        opt.record = RecordPolicy::every_k(1);
        opt.domain = box;
        return opt;
    };

    // N = 1: summing over every edge configuration equals the SIR recursion
    {
        const ModelParams p1(theta, 1);
        double worst = 0.0;
        std::size_t max_edges = 0;
        for (const Window& box : {Window{0, 1, 0, 0}, Window{0, 2, 0, 0}, Window{0, 1, 0, 1}, Window{0, 5, 0, 0}}) {
            max_edges = std::max(max_edges, percolation_edges(box, 1).size());
            CountField init(Window::point(0, 0));
            init.ref(0, 0) = 1;
            worst = std::max(worst, law_distance(exhaustive_percolation_law(box, 1, p1.p_edge(), {{0, 0, 0}}),
                                                 exact_sir_law(box, 1, p1.p_edge(), init)));
        }
        checks.push_back({"exhaustive_n1", worst < 1e-12,
                          "max law difference " + detail::fmt_sci(worst) + " on boxes with <= " +
                              std::to_string(max_edges) + " edges"});
    }

    const ModelParams p2(theta, 2);
    const auto ic = InitialCondition::gamma_point(0.5);
    auto sample_keys = [&](const Window& box, int level, bool percolation) {
        auto keys = run_replicates(first_seed, seeds, threads, [&](std::uint64_t seed) {
            if (percolation) {
                return trajectory_key(sir_from_percolation(PercolationSample(p2, box, seed), ic, level), box);
            }
            return trajectory_key(sim_run(p2, ic, level < 0 ? 1000 : level, seed, 0, confined(box)), box);
        });
        std::map<TrajectoryKey, std::int64_t> counts;
        for (auto& k : keys) {
            ++counts[k];
        }
        return counts;
    };
    CountField one(Window::point(0, 0));
    one.ref(0, 0) = 1;

    // N = 2, 3x3 box: joint law of the first generation
    {
        const Window box = Window::square(1);
        const auto perc = sample_keys(box, 1, true);
        const auto sim = sample_keys(box, 1, false);
        const ExactLaw law = exact_sir_law(box, 2, p2.p_edge(), one, 1);
        chi("first_step_3x3_homogeneity", chi_square_homogeneity(perc, sim));
        chi("first_step_3x3_percolation_vs_exact", chi_square_against_law(perc, law));
        chi("first_step_3x3_simulator_vs_exact", chi_square_against_law(sim, law));
    }
    // N = 2, two sites: whole trajectories
    {
        const Window box{0, 1, 0, 0};
        const auto perc = sample_keys(box, -1, true);
        const auto sim = sample_keys(box, -1, false);
        const ExactLaw law = exact_sir_law(box, 2, p2.p_edge(), one);
        chi("trajectory_2x1_homogeneity", chi_square_homogeneity(perc, sim));
        chi("trajectory_2x1_percolation_vs_exact", chi_square_against_law(perc, law));
        chi("trajectory_2x1_simulator_vs_exact", chi_square_against_law(sim, law));
    }
    // oriented percolation against the simulator frontier
    {
        const auto line = InitialCondition::diag_line(0.5, 3);
        const Window box = Window::square(3);
        SimOptions opt;
        opt.record = RecordPolicy::at({1, 2});
        auto pairs = run_replicates(first_seed, seeds, threads, [&](std::uint64_t seed) {
            const CountField w = oriented_frontier(OrientedPercolationSample(p2, box, seed), line);
            const SimRun run = sim_run(p2, line, 2, seed, 0, opt);
            const SimSlice* s1 = run.slice_at(1);
            const SimSlice* s2 = run.slice_at(2);
            return std::array<int, 4>{w.at(1, 0), s1 ? s1->I.at(1, 0) : 0, w.at(1, 1), s2 ? s2->I.at(1, 1) : 0};
        });
        std::map<int, std::int64_t> w10;
        std::map<int, std::int64_t> s10;
        std::map<int, std::int64_t> w11;
        std::map<int, std::int64_t> s11;
        for (const auto& a : pairs) {
            ++w10[a[0]];
            ++s10[a[1]];
            ++w11[a[2]];
            ++s11[a[3]];
        }
        const double q = 1.0 - std::pow(1.0 - p2.p_edge(), 2);
        chi("oriented_W10_vs_binomial",
            chi_square_gof({w10[0], w10[1], w10[2]}, {(1 - q) * (1 - q), 2 * q * (1 - q), q * q}));
        chi("oriented_W10_homogeneity", chi_square_homogeneity(w10, s10));
        chi("oriented_W11_homogeneity", chi_square_homogeneity(w11, s11));
    }
    return checks;
}

inline CommandResult cmd_percolation_check(const PercolationCheckConfig& cfg, const RunFlags& flags)
{
    const Stopwatch clock;
    CommandResult r;
    r.manifest.command = "percolation-check";
    r.checks = percolation_checks(cfg.theta, cfg.seeds, cfg.alpha, flags.seed, flags.threads);
    {
        auto out = detail::open_output(r, flags.out, "percolation_checks.csv");
        detail::write_checks(out, r.checks);
    }
    r.manifest.note("seeds", std::to_string(cfg.seeds));
    r.manifest.note("theta", detail::fmt_short(cfg.theta));
    r.manifest.note("alpha", detail::fmt_short(cfg.alpha));
    detail::finish(r, flags, clock);
    return r;
}

// ---------------------------------------------------------------- validate

struct ValidateConfig {
    int seeds = 20000;
    double residual_tol = 1e-12;

    void bind(SectionBinder& b)
    {
        b.integer("seeds", seeds, 100, 1 << 26)
            .real("residual_tol", residual_tol, [](double x) { return x > 0.0; }, "residual_tol > 0");
    }
};

/// Fixed-point residuals on a theta grid.
inline std::vector<Check> fixed_point_checks(double tol)
{
    double worst_iota = 0.0;
    double worst_kappa = 0.0;
    double worst_ell = 0.0;
    double worst_gamma = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double th = 0.1 * k;
        const double iota = solve_iota(th);
        worst_iota = std::max(worst_iota, std::abs(iota + std::expm1(-(1.0 + th) * iota)));
        if (th > 1.5) {
            const double c = limit_rate(th);
            if (th < 4.0) {
                const double kap = solve_kappa(th);
                worst_kappa = std::max(worst_kappa, std::abs(entropy_h(kap) - std::log(c)));
            }
            const EllTable t = ell_sequence(th, 20);
            for (std::size_t i = 1; i <= t.values.size(); ++i) {
                worst_ell = std::max(worst_ell, std::abs(ell_residual(t, i)));
            }
        }
        if (th > 4.0) {
            const double g = solve_gamma1(th);
            worst_gamma = std::max(worst_gamma, std::abs(g + std::expm1(-limit_rate(th) * g)));
        }
    }
    return {
        {"iota_residual", worst_iota < tol, "max " + detail::fmt_sci(worst_iota)},
        {"kappa_residual", worst_kappa < tol, "max " + detail::fmt_sci(worst_kappa)},
        {"ell_residual", worst_ell < tol, "max " + detail::fmt_sci(worst_ell)},
        {"gamma1_residual", worst_gamma < tol, "max " + detail::fmt_sci(worst_gamma)},
    };
}

/// Endpoint identities of the rate function.
inline std::vector<Check> speed_curve_checks()
{
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / 64;
        worst = std::max(worst, std::abs(rate_G(1.0, phi) - entropy_h(direction_ratio_a(phi))));
    }
    const double small = std::abs(rate_G(1e-6, std::numbers::pi / 4) - std::log(0.2));
    return {
        {"G_at_speed_one", worst < 1e-10, "max deviation " + detail::fmt_sci(worst)},
        {"G_near_speed_zero", small < 1e-3, "deviation " + detail::fmt_sci(small)},
    };
}

inline CommandResult cmd_validate(const ValidateConfig& cfg, const RunFlags& flags)
{
    const Stopwatch clock;
    CommandResult r;
    r.manifest.command = "validate";
    auto append = [&r](std::vector<Check> more) { r.checks.insert(r.checks.end(), more.begin(), more.end()); };
    // each suite runs on its own; a throwing suite is recorded as a failure
    auto guarded = [&](const std::string& name, auto&& suite) {
        try {
            append(suite());
        } catch (const std::exception& e) {
            r.checks.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };
    guarded("fixed_points", [&] { return fixed_point_checks(cfg.residual_tol); });
    guarded("speed_curve", [] { return speed_curve_checks(); });
    guarded("paths", [] { return path_exactness_checks(12, 20, 14, 7); });
    guarded("percolation", [&] { return percolation_checks(2.0, cfg.seeds, 0.001, flags.seed, flags.threads); });
    {
        auto out = detail::open_output(r, flags.out, "validate.csv");
        detail::write_checks(out, r.checks);
    }
    r.manifest.note("seeds", std::to_string(cfg.seeds));
    detail::finish(r, flags, clock);
    return r;
}

}  // namespace sirlat
