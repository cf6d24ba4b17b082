#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sirlat/binomial.hpp"
#include "sirlat/field.hpp"
#include "sirlat/percolation.hpp"
#include "sirlat/stats.hpp"
#include "sirlat/stoch_sim.hpp"

namespace sirlat {

/// A trajectory flattened for comparison: I_1, I_2, ... in raster order of the
/// box, up to and including the first empty level or `max_level`.
using TrajectoryKey = std::vector<int>;

/// Exact law over trajectory keys; probabilities sum to one.
using ExactLaw = std::map<TrajectoryKey, double>;

namespace detail {

inline void append_field(TrajectoryKey& key, const CountField& f, const Window& box)
{
    for (int y = box.y_lo; y <= box.y_hi; ++y) {
        for (int x = box.x_lo; x <= box.x_hi; ++x) {
            key.push_back(f.at(x, y));
        }
    }
}

inline bool all_zero(const CountField& f)
{
    for (int v : f.values()) {
        if (v != 0) {
            return false;
        }
    }
    return true;
}

// A percolation graph with an explicit set of open edges.
class ExplicitGraph {
public:
    ExplicitGraph(Window box, int N, std::set<std::pair<Vertex, Vertex>> open_edges)
        : box_(box), N_(N), open_(std::move(open_edges))
    {
    }

    const Window& box() const { return box_; }
    int village_size() const { return N_; }
    bool contains(const Vertex& v) const { return box_.contains(v.x, v.y) && v.i >= 0 && v.i < N_; }

    bool open(Vertex a, Vertex b) const
    {
        if (b < a) {
            std::swap(a, b);
        }
        return open_.count({a, b}) > 0;
    }

private:
    Window box_;
    int N_;
    std::set<std::pair<Vertex, Vertex>> open_;
};

}  // namespace detail

inline TrajectoryKey trajectory_key(const PercolationTrajectory& tr, const Window& box)
{
    TrajectoryKey key;
    for (std::size_t n = 1; n < tr.I.size(); ++n) {
        detail::append_field(key, tr.I[n], box);
    }
    return key;
}

/// Key of a simulated run confined to `box`; the run must record every slice.
inline TrajectoryKey trajectory_key(const SimRun& run, const Window& box)
{
    TrajectoryKey key;
    for (int t = 1; t <= run.t_final; ++t) {
        const SimSlice* s = run.slice_at(t);
        if (!s) {
            throw DomainError("trajectory_key: run is missing slice " + std::to_string(t));
        }
        detail::append_field(key, s->I, box);
    }
    return key;
}

/// All edges of the N-percolation graph on the box, smaller endpoint first.
inline std::vector<std::pair<Vertex, Vertex>> percolation_edges(const Window& box, int N)
{
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (int y = box.y_lo; y <= box.y_hi; ++y) {
        for (int x = box.x_lo; x <= box.x_hi; ++x) {
            for (int i = 0; i < N; ++i) {
                const Vertex a{x, y, i};
                for (int j = i + 1; j < N; ++j) {
                    edges.push_back({a, {x, y, j}});
                }
                const int nb[2][2] = {{x + 1, y}, {x, y + 1}};
                for (const auto& s : nb) {
                    if (!box.contains(s[0], s[1])) {
                        continue;
                    }
                    for (int j = 0; j < N; ++j) {
                        const Vertex b{s[0], s[1], j};
                        edges.push_back({a, b});
                    }
                }
            }
        }
    }
    return edges;
}

/// Law of the BFS trajectory by summing over all 2^E edge configurations.
inline ExactLaw exhaustive_percolation_law(const Window& box, int N, double p, const std::vector<Vertex>& sources,
                                           int max_level = -1, int max_edges = 20)
{
    const auto edges = percolation_edges(box, N);
    if (static_cast<int>(edges.size()) > max_edges) {
        throw ResourceError("exhaustive_percolation_law: " + std::to_string(edges.size()) +
                            " edges exceed the enumeration cap " + std::to_string(max_edges));
    }
    ExactLaw law;
    const std::uint64_t configs = std::uint64_t{1} << edges.size();
    for (std::uint64_t mask = 0; mask < configs; ++mask) {
        std::set<std::pair<Vertex, Vertex>> open;
        double w = 1.0;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if ((mask >> e) & 1U) {
                open.insert(edges[e]);
                w *= p;
            } else {
                w *= 1.0 - p;
            }
        }
        const detail::ExplicitGraph g(box, N, std::move(open));
        law[trajectory_key(bfs_levels(g, sources, max_level), box)] += w;
    }
    return law;
}

/// Exact law of the SIR chain on a confined box by recursion over states: given
/// (I_t, R_t), the new infections are independent Bin(S_t(x), 1 - (1-p)^{I~_t(x)}).
inline ExactLaw exact_sir_law(const Window& box, int N, double p, const CountField& init, int max_level = -1)
{
    ExactLaw law;
    const double log_keep = std::log1p(-p);
    std::function<void(const CountField&, const CountField&, int, TrajectoryKey&, double)> recurse;
    recurse = [&](const CountField& I, const CountField& R, int t, TrajectoryKey& key, double w) {
        if (detail::all_zero(I) || (max_level >= 0 && t == max_level)) {
            law[key] += w;
            return;
        }
        std::vector<std::pair<int, int>> sites;
        std::vector<std::vector<double>> pmfs;
        for (int y = box.y_lo; y <= box.y_hi; ++y) {
            for (int x = box.x_lo; x <= box.x_hi; ++x) {
                const int tilde = I.at(x, y) + I.at(x + 1, y) + I.at(x - 1, y) + I.at(x, y + 1) + I.at(x, y - 1);
                const int sus = N - I.at(x, y) - R.at(x, y);
                const double q = -std::expm1(tilde * log_keep);
                std::vector<double> pmf(static_cast<std::size_t>(sus) + 1);
                for (int k = 0; k <= sus; ++k) {
                    pmf[static_cast<std::size_t>(k)] = std::exp(binomial_log_pmf(sus, q, k));
                }
                sites.push_back({x, y});
                pmfs.push_back(std::move(pmf));
            }
        }
        CountField next(box);
        CountField r2(box);
        for (int y = box.y_lo; y <= box.y_hi; ++y) {
            for (int x = box.x_lo; x <= box.x_hi; ++x) {
                r2.ref(x, y) = R.at(x, y) + I.at(x, y);
            }
        }
        std::function<void(std::size_t, double)> choose = [&](std::size_t s, double pw) {
            if (pw == 0.0) {
                return;
            }
            if (s == sites.size()) {
                const std::size_t mark = key.size();
                detail::append_field(key, next, box);
                recurse(next, r2, t + 1, key, pw);
                key.resize(mark);
                return;
            }
            const auto [x, y] = sites[s];
            for (std::size_t k = 0; k < pmfs[s].size(); ++k) {
                next.ref(x, y) = static_cast<int>(k);
                choose(s + 1, pw * pmfs[s][k]);
            }
            next.ref(x, y) = 0;
        };
        choose(0, w);
    };
    CountField I0(box);
    for (int y = box.y_lo; y <= box.y_hi; ++y) {
        for (int x = box.x_lo; x <= box.x_hi; ++x) {
            I0.ref(x, y) = init.at(x, y);
        }
    }
    TrajectoryKey key;
    recurse(I0, CountField(box), 0, key, 1.0);
    return law;
}

/// Largest absolute difference between two laws over the union of their supports.
inline double law_distance(const ExactLaw& a, const ExactLaw& b)
{
    double worst = 0.0;
    for (const auto& [k, v] : a) {
        const auto it = b.find(k);
        worst = std::max(worst, std::abs(v - (it == b.end() ? 0.0 : it->second)));
    }
    for (const auto& [k, v] : b) {
        if (!a.count(k)) {
            worst = std::max(worst, v);
        }
    }
    return worst;
}

/// Chi-square goodness of fit of sampled keys against an exact law.
inline ChiSquareResult chi_square_against_law(const std::map<TrajectoryKey, std::int64_t>& observed,
                                              const ExactLaw& law)
{
    std::vector<std::pair<double, TrajectoryKey>> cells;
    for (const auto& [k, v] : law) {
        cells.push_back({v, k});
    }
    // rare outcomes last, so pooling merges them
    std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::int64_t> obs;
    std::vector<double> probs;
    std::int64_t matched = 0;
    for (const auto& [p, k] : cells) {
        const auto it = observed.find(k);
        const std::int64_t o = it == observed.end() ? 0 : it->second;
        obs.push_back(o);
        probs.push_back(p);
        matched += o;
    }
    std::int64_t total = 0;
    for (const auto& [k, v] : observed) {
        total += v;
    }
    // outcomes the law says are impossible
    obs.push_back(total - matched);
    probs.push_back(0.0);
    return chi_square_gof(obs, probs);
}

}  // namespace sirlat
