#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "sirlat/binomial.hpp"
#include "sirlat/field.hpp"
#include "sirlat/initial_condition.hpp"
#include "sirlat/params.hpp"
#include "sirlat/rng.hpp"

namespace sirlat {

/// Which time slices a run keeps.
struct RecordPolicy {
    bool final_slice = true;
    int every = 0;           ///< keep t with t % every == 0 when positive
    std::vector<int> times;  ///< keep these times
    int last_k = 0;          ///< keep the most recent k slices

    static RecordPolicy none() { return {false, 0, {}, 0}; }
    static RecordPolicy final_only() { return {}; }
    static RecordPolicy every_k(int k) { return {true, k, {}, 0}; }
    static RecordPolicy at(std::vector<int> ts) { return {true, 0, std::move(ts), 0}; }
    static RecordPolicy last(int k) { return {true, 0, {}, k}; }

    bool wants(int t) const
    {
        return (every > 0 && t % every == 0) || std::find(times.begin(), times.end(), t) != times.end();
    }
};

struct SimOptions {
    RecordPolicy record = RecordPolicy::last(4);
    /// Confining set of sites; by default the process lives on all of Z^2.
    std::optional<Window> domain;
    int max_window_side = 1 << 13;
    /// Stop once the total infected count reaches this value (0 disables).
    std::int64_t stop_when_infected = 0;
    /// Stop once the antidiagonal x + y = n is first infected (negative disables).
    int stop_at_antidiagonal = -1;
};

struct SimSlice {
    int t = 0;
    CountField I;
    CountField R;
};

/// One realisation of the stochastic SIR process.
struct SimRun {
    ModelParams params;
    InitialCondition ic;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    int t_final = 0;
    std::optional<int> extinct_at;  ///< first t with no infected individual
    bool stopped_early = false;
    std::vector<SimSlice> slices;
    std::vector<std::int64_t> total_infected;  ///< sum of I_t over sites, t = 0..t_final
    std::int64_t ever_infected = 0;
    /// first_hit[n] = first t with I_t > 0 somewhere on x + y = n, for the
    /// antidiagonals n = 0, 1, ... reached so far.
    std::vector<int> first_hit;

    /// K(n) = first_hit[n] - n for every reached antidiagonal.
    std::vector<int> frontier_delay() const
    {
        std::vector<int> k(first_hit.size());
        for (std::size_t n = 0; n < first_hit.size(); ++n) {
            k[n] = first_hit[n] - static_cast<int>(n);
        }
        return k;
    }

    const SimSlice* slice_at(int t) const
    {
        for (const auto& s : slices) {
            if (s.t == t) {
                return &s;
            }
        }
        return nullptr;
    }

    bool survived() const { return !extinct_at.has_value(); }
};

namespace detail {

// Dense state of one run over a fixed window.
class Lattice {
public:
    Lattice(const Window& w, int N) : I_(w.size(), 0), R_(w.size(), 0), next_(w.size(), 0), stamp_(w.size(), -1),
                                      w_(w), N_(N)
    {
    }

    const Window& window() const { return w_; }
    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y - w_.y_lo) * w_.width() + (x - w_.x_lo); }
    int x_of(std::size_t i) const { return w_.x_lo + static_cast<int>(i % w_.width()); }
    int y_of(std::size_t i) const { return w_.y_lo + static_cast<int>(i / w_.width()); }

    int I(int x, int y) const { return w_.contains(x, y) ? I_[idx(x, y)] : 0; }

    std::vector<int> I_;
    std::vector<int> R_;
    std::vector<int> next_;
    std::vector<int> stamp_;
    std::vector<std::size_t> active_;

    Window w_;
    int N_;

    CountField snapshot(const std::vector<int>& v, const Window& crop) const
    {
        CountField f(crop);
        for (int y = crop.y_lo; y <= crop.y_hi; ++y) {
            for (int x = crop.x_lo; x <= crop.x_hi; ++x) {
                f.ref(x, y) = v[idx(x, y)];
            }
        }
        return f;
    }
};

inline Window intersect(const Window& a, const Window& b)
{
    return {std::max(a.x_lo, b.x_lo), std::min(a.x_hi, b.x_hi), std::max(a.y_lo, b.y_lo), std::min(a.y_hi, b.y_hi)};
}

}  // namespace detail

/// Simulates up to T generations of
///   I_{t+1}(x) ~ Bin(S_t(x), 1 - (1 - p)^{I~_t(x)}),  R_{t+1} = R_t + I_t,
/// with p = (1+theta)/(5N) and I~ the five-point neighbourhood sum. The draw at
/// (t, x, y) uses its own counter-based stream, so a run is a pure function of
/// (params, ic, seed, replicate).
inline SimRun sim_run(const ModelParams& params, const InitialCondition& ic, int T, std::uint64_t seed,
                      std::uint64_t replicate = 0, const SimOptions& opt = {})
{
    if (T < 0) {
        throw DomainError("sim_run: T must be nonnegative");
    }
    const int N = params.village_size();
    const CountField init = ic.counts(N);
    const Window reach = init.window().dilated(T);
    const Window w = opt.domain ? *opt.domain : reach;
    if (w.empty()) {
        throw DomainError("sim_run: empty domain");
    }
    if (w.width() > opt.max_window_side || w.height() > opt.max_window_side) {
        throw ResourceError("sim_run: window side " + std::to_string(std::max(w.width(), w.height())) +
                            " exceeds the maximum " + std::to_string(opt.max_window_side) +
                            "; lower T or raise max_window_side");
    }

    SimRun run{params, ic, seed, replicate, 0, std::nullopt, false, {}, {}, 0, {}};
    detail::Lattice lat(w, N);
    const auto key = derive_key(seed, replicate, StreamTag::site_infection);
    const double log_keep = std::log1p(-params.p_edge());

    std::int64_t total = 0;
    auto note_hit = [&](int x, int y, int t) {
        const int s = x + y;
        if (s < 0) {
            return;
        }
        if (static_cast<std::size_t>(s) >= run.first_hit.size()) {
            run.first_hit.resize(static_cast<std::size_t>(s) + 1, -1);
        }
        if (run.first_hit[static_cast<std::size_t>(s)] < 0) {
            run.first_hit[static_cast<std::size_t>(s)] = t;
        }
    };
    const Window& iw = init.window();
    for (int y = iw.y_lo; y <= iw.y_hi; ++y) {
        for (int x = iw.x_lo; x <= iw.x_hi; ++x) {
            const int v = init.ref(x, y);
            if (v <= 0) {
                continue;
            }
            if (!w.contains(x, y)) {
                throw DomainError("sim_run: initial condition lies outside the domain");
            }
            lat.I_[lat.idx(x, y)] = v;
            lat.active_.push_back(lat.idx(x, y));
            total += v;
            note_hit(x, y, 0);
        }
    }
    run.total_infected.push_back(total);
    run.ever_infected = total;

    std::deque<SimSlice> recent;
    auto record = [&](int t, bool is_final) {
        const bool keep = opt.record.wants(t) || (is_final && opt.record.final_slice);
        const bool ring = opt.record.last_k > 0;
        if (!keep && !ring) {
            return;
        }
        const Window crop = detail::intersect(w, init.window().dilated(t));
        SimSlice s{t, lat.snapshot(lat.I_, crop), lat.snapshot(lat.R_, crop)};
        if (ring) {
            recent.push_back(s);
            if (static_cast<int>(recent.size()) > opt.record.last_k) {
                recent.pop_front();
            }
        }
        if (keep) {
            run.slices.push_back(std::move(s));
        }
    };

    auto reached_target = [&] {
        return opt.stop_at_antidiagonal >= 0 &&
               static_cast<int>(run.first_hit.size()) > opt.stop_at_antidiagonal;
    };

    std::vector<std::size_t> candidates;
    std::vector<std::size_t> fresh;
    int t = 0;
    for (;;) {
        if (total == 0) {
            run.extinct_at = t;
            break;
        }
        if (t == T) {
            break;
        }
        if ((opt.stop_when_infected > 0 && total >= opt.stop_when_infected) || reached_target()) {
            run.stopped_early = true;
            break;
        }
        record(t, false);

        candidates.clear();
        for (std::size_t a : lat.active_) {
            const int x = lat.x_of(a);
            const int y = lat.y_of(a);
            const int nb[5][2] = {{x, y}, {x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
            for (const auto& p : nb) {
                if (!w.contains(p[0], p[1])) {
                    continue;
                }
                const std::size_t j = lat.idx(p[0], p[1]);
                if (lat.stamp_[j] != t) {
                    lat.stamp_[j] = t;
                    candidates.push_back(j);
                }
            }
        }

        fresh.clear();
        std::int64_t new_total = 0;
        for (std::size_t j : candidates) {
            const int x = lat.x_of(j);
            const int y = lat.y_of(j);
            const int sus = N - lat.I_[j] - lat.R_[j];
            if (sus <= 0) {
                continue;
            }
            const int tilde = lat.I(x, y) + lat.I(x + 1, y) + lat.I(x - 1, y) + lat.I(x, y + 1) + lat.I(x, y - 1);
            const double q = -std::expm1(static_cast<double>(tilde) * log_keep);
            CounterStream stream(key, coord_word(t), coord_word(x), coord_word(y));
            auto uniform = [&stream] { return stream.uniform(); };
            const auto k = static_cast<int>(sample_binomial(sus, q, uniform));
            if (k > 0) {
                lat.next_[j] = k;
                fresh.push_back(j);
                new_total += k;
            }
        }
        for (std::size_t a : lat.active_) {
            lat.R_[a] += lat.I_[a];
            lat.I_[a] = 0;
        }
        std::swap(lat.I_, lat.next_);
        lat.active_.swap(fresh);
        ++t;
        for (std::size_t a : lat.active_) {
            note_hit(lat.x_of(a), lat.y_of(a), t);
        }
        total = new_total;
        run.total_infected.push_back(total);
        run.ever_infected += total;
    }
    run.t_final = t;
    record(t, true);
    if (opt.record.last_k > 0) {
        for (auto& s : recent) {
            if (!run.slice_at(s.t)) {
                run.slices.push_back(std::move(s));
            }
        }
        std::sort(run.slices.begin(), run.slices.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    }
    return run;
}

}  // namespace sirlat
