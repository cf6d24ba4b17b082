#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sirlat/detail/csv.hpp"
#include "sirlat/fixed_points.hpp"
#include "sirlat/stats.hpp"
#include "sirlat/stoch_sim.hpp"

namespace sirlat {

/// Runs f(r) for r = first..first+n-1 on up to `threads` workers. Results are
/// stored by replicate index, so the output does not depend on scheduling.
template <class F>
auto run_replicates(std::uint64_t first, int n, int threads, F&& f) -> std::vector<decltype(f(first))>
{
    using R = decltype(f(first));
    std::vector<R> out(static_cast<std::size_t>(std::max(n, 0)));
    if (n <= 0) {
        return out;
    }
    threads = std::clamp(threads, 1, n);
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= n) {
                return;
            }
            try {
                out[static_cast<std::size_t>(k)] = f(first + static_cast<std::uint64_t>(k));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(n);
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

/// Per-replicate outcome kept in a report.
struct ReplicateSummary {
    std::uint64_t replicate = 0;
    bool survived = false;
    int extinct_at = -1;
    int t_final = 0;
    int delay = -1;              ///< K at the farthest reached antidiagonal, -1 if none
    int delay_antidiagonal = -1;
    std::vector<double> values;  ///< probe or layer values, report-specific
};

struct MonteCarloReport {
    std::string kind;
    std::int64_t n_replicates = 0;
    std::vector<std::pair<std::string, Estimate>> estimates;
    std::vector<ReplicateSummary> replicates;

    void add(std::string name, Estimate e) { estimates.emplace_back(std::move(name), e); }

    const Estimate& get(const std::string& name) const
    {
        for (const auto& [k, v] : estimates) {
            if (k == name) {
                return v;
            }
        }
        throw DomainError("MonteCarloReport: no estimate named " + name);
    }

    bool has(const std::string& name) const
    {
        return std::any_of(estimates.begin(), estimates.end(), [&](const auto& e) { return e.first == name; });
    }

    void write_csv(std::ostream& out) const
    {
        out << "name,estimate,ci95,n\n";
        for (const auto& [k, v] : estimates) {
            out << k << ',' << detail::fmt_double(v.value) << ',' << detail::fmt_double(v.ci95) << ',' << v.n
                << '\n';
        }
    }
};

struct McOptions {
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Fraction of replicates with infected individuals at T_max. A replicate whose
/// total infected count reaches `survival_threshold` is classified as surviving
/// at that moment (0 disables the shortcut).
inline MonteCarloReport estimate_survival(const ModelParams& params, const InitialCondition& ic, int T_max,
                                          int n_reps, std::int64_t survival_threshold, const McOptions& mc = {})
{
    if (n_reps < 1) {
        throw DomainError("estimate_survival: need at least one replicate");
    }
    SimOptions opt;
    opt.record = RecordPolicy::none();
    opt.stop_when_infected = survival_threshold;
    auto reps = run_replicates(0, n_reps, mc.threads, [&](std::uint64_t r) {
        const SimRun run = sim_run(params, ic, T_max, mc.seed, r, opt);
        ReplicateSummary s;
        s.replicate = r;
        s.survived = run.survived();
        s.extinct_at = run.extinct_at.value_or(-1);
        s.t_final = run.t_final;
        return s;
    });
    MonteCarloReport rep;
    rep.kind = "survival";
    rep.n_replicates = n_reps;
    const auto alive = std::count_if(reps.begin(), reps.end(), [](const auto& s) { return s.survived; });
    rep.add("survival", proportion_estimate(alive, n_reps));
    const double reference = ic.kind == IcKind::unit ? solve_iota(params.theta()) : 1.0;
    rep.add("reference", {reference, 0.0, 0});
    rep.replicates = std::move(reps);
    return rep;
}

/// Empirical law of the delay K at the farthest antidiagonal reached by T_max,
/// from single-individual starts, collected until `n_survivors` replicates
/// survive. Extinct replicates count as K = infinity: "P(K=i)" estimates are
/// over all replicates run, "P(K=i|survival)" over the survivors.
inline MonteCarloReport delay_distribution(const ModelParams& params, int n_survivors, int T_max, int i_max,
                                           const McOptions& mc = {})
{
    if (!(params.theta() > 1.5)) {
        throw DomainError("delay_distribution: requires theta > 1.5");
    }
    if (n_survivors < 1 || i_max < 0) {
        throw DomainError("delay_distribution: need n_survivors >= 1 and i_max >= 0");
    }
    SimOptions opt;
    opt.record = RecordPolicy::none();
    const auto ic = InitialCondition::unit();
    std::vector<ReplicateSummary> all;
    int survivors = 0;
    std::uint64_t next = 0;
    const int batch = std::max(64, n_survivors / 4);
    while (survivors < n_survivors) {
        auto reps = run_replicates(next, batch, mc.threads, [&](std::uint64_t r) {
            const SimRun run = sim_run(params, ic, T_max, mc.seed, r, opt);
            ReplicateSummary s;
            s.replicate = r;
            s.survived = run.survived();
            s.extinct_at = run.extinct_at.value_or(-1);
            s.t_final = run.t_final;
            if (s.survived && !run.first_hit.empty()) {
                s.delay_antidiagonal = static_cast<int>(run.first_hit.size()) - 1;
                s.delay = run.first_hit.back() - s.delay_antidiagonal;
            }
            return s;
        });
        next += static_cast<std::uint64_t>(batch);
        // keep replicates in index order up to the n-th survivor
        for (auto& s : reps) {
            if (survivors == n_survivors) {
                break;
            }
            survivors += s.survived ? 1 : 0;
            all.push_back(std::move(s));
        }
    }
    MonteCarloReport rep;
    rep.kind = "delay";
    rep.n_replicates = static_cast<std::int64_t>(all.size());
    const auto total = static_cast<std::int64_t>(all.size());
    std::int64_t tail = 0;
    for (int i = 0; i <= i_max; ++i) {
        const auto hits = std::count_if(all.begin(), all.end(), [i](const auto& s) { return s.survived && s.delay == i; });
        rep.add("P(K=" + std::to_string(i) + ")", proportion_estimate(hits, total));
        rep.add("P(K=" + std::to_string(i) + "|survival)", proportion_estimate(hits, survivors));
        tail += hits;
    }
    rep.add("P(K>" + std::to_string(i_max) + "|survival)", proportion_estimate(survivors - tail, survivors));
    rep.add("survival", proportion_estimate(survivors, total));
    const auto ell = ell_sequence(params.theta(), i_max + 1);
    for (int i = 0; i <= i_max; ++i) {
        rep.add("ell" + std::to_string(i + 1), {ell.values[static_cast<std::size_t>(i)], 0.0, 0});
    }
    rep.replicates = std::move(all);
    return rep;
}

/// Per-probe mean of (I + R)_{T_max}(x) / N, which equals R_infinity(x) / N
/// once the epidemic has passed x. Single-individual starts are conditioned on
/// survival by discarding extinct replicates.
inline MonteCarloReport final_proportion_profile(const ModelParams& params, const InitialCondition& ic, int T_max,
                                                 int n_reps, const std::vector<std::pair<int, int>>& probes,
                                                 const McOptions& mc = {})
{
    if (n_reps < 1) {
        throw DomainError("final_proportion_profile: need at least one replicate");
    }
    SimOptions opt;
    opt.record = RecordPolicy::final_only();
    const double N = params.village_size();
    auto reps = run_replicates(0, n_reps, mc.threads, [&](std::uint64_t r) {
        const SimRun run = sim_run(params, ic, T_max, mc.seed, r, opt);
        ReplicateSummary s;
        s.replicate = r;
        s.survived = run.survived() || ic.kind != IcKind::unit;
        s.extinct_at = run.extinct_at.value_or(-1);
        s.t_final = run.t_final;
        const SimSlice& last = run.slices.back();
        for (const auto& [x, y] : probes) {
            s.values.push_back((last.I.at(x, y) + last.R.at(x, y)) / N);
        }
        return s;
    });
    MonteCarloReport rep;
    rep.kind = "final-proportion";
    rep.n_replicates = n_reps;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        std::vector<double> xs;
        for (const auto& s : reps) {
            if (s.survived) {
                xs.push_back(s.values[p]);
            }
        }
        rep.add("R(" + std::to_string(probes[p].first) + ";" + std::to_string(probes[p].second) + ")",
                mean_estimate(xs));
    }
    const auto kept = std::count_if(reps.begin(), reps.end(), [](const auto& s) { return s.survived; });
    rep.add("kept", proportion_estimate(kept, n_reps));
    rep.replicates = std::move(reps);
    return rep;
}

/// Summary of one layer behind the frontier.
struct LayerStat {
    int layer = 0;
    double mean = 0.0;
    double sd = 0.0;
    int count = 0;
};

/// Layer-i proportions I_{n+i-1+offset}(m, n-m) / N over m with m/n inside
/// (kappa + eps, 1 - kappa - eps), for i = 1..i_max. Without a speed-one cone
/// (theta <= 1.5) the range is (eps, 1 - eps).
inline std::vector<LayerStat> frontier_statistics(const SimRun& run, double eps, int n, int i_max, int offset = 0)
{
    if (n < 1 || i_max < 1 || offset < 0) {
        throw DomainError("frontier_statistics: need n >= 1, i_max >= 1, offset >= 0");
    }
    const double theta = run.params.theta();
    const double kappa = theta > 1.5 ? solve_kappa(theta) : 0.0;
    const double lo = kappa + eps;
    const double hi = 1.0 - kappa - eps;
    const double N = run.params.village_size();
    std::vector<LayerStat> out;
    for (int i = 1; i <= i_max; ++i) {
        const int t = n + i - 1 + offset;
        const SimSlice* s = run.slice_at(t);
        if (!s) {
            throw DomainError("frontier_statistics: no recorded slice at t=" + std::to_string(t));
        }
        std::vector<double> xs;
        for (int m = 0; m <= n; ++m) {
            const double frac = static_cast<double>(m) / n;
            if (frac > lo && frac < hi) {
                xs.push_back(s->I.at(m, n - m) / N);
            }
        }
        LayerStat st;
        st.layer = i;
        st.count = static_cast<int>(xs.size());
        if (!xs.empty()) {
            const Estimate e = mean_estimate(xs);
            st.mean = e.value;
            st.sd = e.n > 1 ? e.ci95 / 1.96 * std::sqrt(static_cast<double>(e.n)) : 0.0;
        }
        out.push_back(st);
    }
    return out;
}

/// Cone layer means pooled over replicates from runs long enough for layer i_max.
inline MonteCarloReport layer_profile(const ModelParams& params, const InitialCondition& ic, int n, int i_max,
                                      double eps, int n_reps, const McOptions& mc = {})
{
    if (n_reps < 1) {
        throw DomainError("layer_profile: need at least one replicate");
    }
    std::vector<int> times;
    for (int i = 1; i <= i_max; ++i) {
        times.push_back(n + i - 1);
    }
    SimOptions opt;
    opt.record = RecordPolicy::at(times);
    opt.record.final_slice = false;
    auto reps = run_replicates(0, n_reps, mc.threads, [&](std::uint64_t r) {
        const SimRun run = sim_run(params, ic, n + i_max - 1, mc.seed, r, opt);
        ReplicateSummary s;
        s.replicate = r;
        s.survived = run.survived() && run.t_final == n + i_max - 1;
        s.t_final = run.t_final;
        if (s.survived) {
            for (const auto& st : frontier_statistics(run, eps, n, i_max)) {
                s.values.push_back(st.mean);
            }
        }
        return s;
    });
    MonteCarloReport rep;
    rep.kind = "layers";
    rep.n_replicates = n_reps;
    const auto ell = params.theta() > 1.5 ? ell_sequence(params.theta(), i_max).values : std::vector<double>(i_max, 0.0);
    for (int i = 1; i <= i_max; ++i) {
        std::vector<double> xs;
        for (const auto& s : reps) {
            if (s.survived) {
                xs.push_back(s.values[static_cast<std::size_t>(i - 1)]);
            }
        }
        rep.add("layer" + std::to_string(i), mean_estimate(xs));
        rep.add("ell" + std::to_string(i), {ell[static_cast<std::size_t>(i - 1)], 0.0, 0});
    }
    rep.replicates = std::move(reps);
    return rep;
}

}  // namespace sirlat
