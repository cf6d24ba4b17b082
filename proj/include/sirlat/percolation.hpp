#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <vector>

#include "sirlat/field.hpp"
#include "sirlat/initial_condition.hpp"
#include "sirlat/params.hpp"
#include "sirlat/rng.hpp"

namespace sirlat {

/// Individual i (0-based) of the village at (x, y).
struct Vertex {
    int x = 0;
    int y = 0;
    int i = 0;

    auto operator<=>(const Vertex&) const = default;
};

namespace detail {

// Uniform in (0, 1) for one edge: the whole edge id is the Philox counter, so
// a query is a pure function of (key, id) and repeated queries agree.
inline double edge_uniform(const std::array<std::uint32_t, 2>& key, const Vertex& a, std::uint32_t packed)
{
    const auto out = philox4x32({coord_word(a.x), coord_word(a.y), static_cast<std::uint32_t>(a.i), packed}, key);
    const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline void check_sample(const Window& box, int N)
{
    if (box.empty()) {
        throw DomainError("percolation: empty box");
    }
    if (N < 1 || N >= (1 << 29)) {
        throw DomainError("percolation: village size out of range");
    }
}

}  // namespace detail

/// The N-percolation graph on box x {0..N-1}: an edge joins every two distinct
/// vertices whose sites are equal or l1-adjacent, open with probability p.
/// Edges are sampled lazily and keyed by their canonical id, so the sample is
/// immutable and never stores an edge.
class PercolationSample {
public:
    PercolationSample(Window box, int N, double p, std::uint64_t seed, std::uint64_t replicate = 0)
        : box_(box), N_(N), p_(p), seed_(seed), key_(derive_key(seed, replicate, StreamTag::percolation_edge))
    {
        detail::check_sample(box, N);
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError("percolation: p must lie in [0, 1]");
        }
    }

    PercolationSample(const ModelParams& params, Window box, std::uint64_t seed, std::uint64_t replicate = 0)
        : PercolationSample(box, params.village_size(), params.p_edge(), seed, replicate)
    {
    }

    const Window& box() const { return box_; }
    int village_size() const { return N_; }
    double p() const { return p_; }
    std::uint64_t seed() const { return seed_; }

    bool contains(const Vertex& v) const { return box_.contains(v.x, v.y) && v.i >= 0 && v.i < N_; }

    /// Whether {a, b} is an open edge; false for non-edges.
    bool open(Vertex a, Vertex b) const
    {
        if (b < a) {
            std::swap(a, b);
        }
        const int dx = b.x - a.x;
        const int dy = b.y - a.y;
        // a < b lexicographically, so the site step is (0,0), (1,0), (0,1) or (0,-1)
        std::uint32_t dir = 0;
        if (dx == 0 && dy == 0) {
            if (a.i == b.i) {
                return false;
            }
            dir = 0;
        } else if (dx == 1 && dy == 0) {
            dir = 1;
        } else if (dx == 0 && dy == 1) {
            dir = 2;
        } else if (dx == 0 && dy == -1) {
            dir = 3;
        } else {
            return false;
        }
        if (forced_) {
            return *forced_;
        }
        return detail::edge_uniform(key_, a, static_cast<std::uint32_t>(b.i) * 4u + dir) < p_;
    }

    /// Every edge open (true) or closed (false), for geometric tests.
    void force_all(std::optional<bool> state) { forced_ = state; }

private:
    Window box_;
    int N_;
    double p_;
    std::uint64_t seed_;
    std::array<std::uint32_t, 2> key_;
    std::optional<bool> forced_;
};

/// Oriented variant: directed edges (x, i) -> (x + e, j) for e in {(1,0), (0,1)}.
class OrientedPercolationSample {
public:
    OrientedPercolationSample(Window box, int N, double p, std::uint64_t seed, std::uint64_t replicate = 0)
        : box_(box), N_(N), p_(p), key_(derive_key(seed, replicate, StreamTag::oriented_edge))
    {
        detail::check_sample(box, N);
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError("percolation: p must lie in [0, 1]");
        }
    }

    OrientedPercolationSample(const ModelParams& params, Window box, std::uint64_t seed, std::uint64_t replicate = 0)
        : OrientedPercolationSample(box, params.village_size(), params.p_edge(), seed, replicate)
    {
    }

    const Window& box() const { return box_; }
    int village_size() const { return N_; }

    bool open(const Vertex& from, const Vertex& to) const
    {
        std::uint32_t dir = 0;
        if (to.x == from.x + 1 && to.y == from.y) {
            dir = 0;
        } else if (to.x == from.x && to.y == from.y + 1) {
            dir = 1;
        } else {
            return false;
        }
        if (forced_) {
            return *forced_;
        }
        return detail::edge_uniform(key_, from, static_cast<std::uint32_t>(to.i) * 2u + dir) < p_;
    }

    void force_all(std::optional<bool> state) { forced_ = state; }

private:
    Window box_;
    int N_;
    double p_;
    std::array<std::uint32_t, 2> key_;
    std::optional<bool> forced_;
};

/// Level counts of a breadth-first search: I[n](x) counts vertices at x at graph
/// distance n from the sources, R[n](x) those at distance <= n - 1. The last
/// level is the first empty one, so R.back() is the final cluster.
struct PercolationTrajectory {
    std::vector<CountField> I;
    std::vector<CountField> R;

    int extinct_at() const { return static_cast<int>(I.size()) - 1; }
    const CountField& reached() const { return R.back(); }
};

/// The sources chosen for per-site counts: the lowest-index individuals.
inline std::vector<Vertex> lowest_index_sources(const CountField& counts, int N)
{
    std::vector<Vertex> a;
    const Window& w = counts.window();
    for (int y = w.y_lo; y <= w.y_hi; ++y) {
        for (int x = w.x_lo; x <= w.x_hi; ++x) {
            const int c = counts.ref(x, y);
            if (c > N) {
                throw DomainError("percolation: more sources than individuals at a site");
            }
            for (int i = 0; i < c; ++i) {
                a.push_back({x, y, i});
            }
        }
    }
    return a;
}

/// Breadth-first layering from A. `max_level` caps the depth (negative: run to
/// exhaustion). Any graph with box(), village_size(), contains() and an open()
/// edge predicate over the percolation neighbourhood works.
template <class Graph>
PercolationTrajectory bfs_levels(const Graph& s, const std::vector<Vertex>& sources, int max_level = -1)
{
    if (sources.empty()) {
        throw DomainError("bfs_levels: empty source set");
    }
    const Window& box = s.box();
    const int N = s.village_size();
    auto vid = [&](const Vertex& v) {
        return (static_cast<std::size_t>(v.y - box.y_lo) * static_cast<std::size_t>(box.width()) +
                static_cast<std::size_t>(v.x - box.x_lo)) *
                   static_cast<std::size_t>(N) +
               static_cast<std::size_t>(v.i);
    };
    std::vector<char> seen(box.size() * static_cast<std::size_t>(N), 0);
    std::vector<Vertex> level;
    for (const auto& v : sources) {
        if (!s.contains(v)) {
            throw DomainError("bfs_levels: source outside the vertex set");
        }
        if (!seen[vid(v)]) {
            seen[vid(v)] = 1;
            level.push_back(v);
        }
    }
    PercolationTrajectory out;
    CountField cum(box);
    std::vector<Vertex> next;
    for (int n = 0;; ++n) {
        CountField in(box);
        for (const auto& v : level) {
            ++in.ref(v.x, v.y);
        }
        out.I.push_back(in);
        out.R.push_back(cum);
        if (level.empty() || (max_level >= 0 && n == max_level)) {
            break;
        }
        for (const auto& v : level) {
            ++cum.ref(v.x, v.y);
        }
        next.clear();
        for (const auto& u : level) {
            const int nb[5][2] = {{u.x, u.y}, {u.x + 1, u.y}, {u.x - 1, u.y}, {u.x, u.y + 1}, {u.x, u.y - 1}};
            for (const auto& site : nb) {
                if (!box.contains(site[0], site[1])) {
                    continue;
                }
                for (int j = 0; j < N; ++j) {
                    const Vertex v{site[0], site[1], j};
                    const std::size_t k = vid(v);
                    if (!seen[k] && s.open(u, v)) {
                        seen[k] = 1;
                        next.push_back(v);
                    }
                }
            }
        }
        level.swap(next);
    }
    return out;
}

/// The SIR trajectory read off the percolation graph, with the initial counts
/// of `ic` placed on the lowest-index individuals.
inline PercolationTrajectory sir_from_percolation(const PercolationSample& s, const InitialCondition& ic,
                                                  int max_level = -1)
{
    const CountField init = ic.counts(s.village_size());
    const Window& w = init.window();
    for (int y = w.y_lo; y <= w.y_hi; ++y) {
        for (int x = w.x_lo; x <= w.x_hi; ++x) {
            if (init.ref(x, y) > 0 && !s.box().contains(x, y)) {
                throw DomainError("sir_from_percolation: initial condition outside the box");
            }
        }
    }
    return bfs_levels(s, lowest_index_sources(init, s.village_size()), max_level);
}

/// W(x) = number of vertices at x reachable from the sources along open directed
/// edges. Sources must lie on the antidiagonal x + y = 0.
inline CountField oriented_frontier(const OrientedPercolationSample& s, const std::vector<Vertex>& sources)
{
    const Window& box = s.box();
    const int N = s.village_size();
    CountField w(box);
    std::vector<std::vector<char>> on(box.size(), std::vector<char>());
    auto slot = [&](int x, int y) -> std::vector<char>& {
        auto& v = on[static_cast<std::size_t>(y - box.y_lo) * static_cast<std::size_t>(box.width()) +
                     static_cast<std::size_t>(x - box.x_lo)];
        if (v.empty()) {
            v.assign(static_cast<std::size_t>(N), 0);
        }
        return v;
    };
    for (const auto& v : sources) {
        if (v.x + v.y != 0) {
            throw DomainError("oriented_frontier: sources must lie on x + y = 0");
        }
        if (!box.contains(v.x, v.y) || v.i < 0 || v.i >= N) {
            throw DomainError("oriented_frontier: source outside the vertex set");
        }
        auto& r = slot(v.x, v.y);
        if (!r[static_cast<std::size_t>(v.i)]) {
            r[static_cast<std::size_t>(v.i)] = 1;
            ++w.ref(v.x, v.y);
        }
    }
    const int d_lo = std::max(box.x_lo + box.y_lo, 0);
    const int d_hi = box.x_hi + box.y_hi;
    for (int d = d_lo; d < d_hi; ++d) {
        for (int x = box.x_lo; x <= box.x_hi; ++x) {
            const int y = d - x;
            if (!box.contains(x, y) || w.ref(x, y) == 0) {
                continue;
            }
            const auto& from = slot(x, y);
            const int targets[2][2] = {{x + 1, y}, {x, y + 1}};
            for (const auto& t : targets) {
                if (!box.contains(t[0], t[1])) {
                    continue;
                }
                auto& to = slot(t[0], t[1]);
                for (int i = 0; i < N; ++i) {
                    if (!from[static_cast<std::size_t>(i)]) {
                        continue;
                    }
                    for (int j = 0; j < N; ++j) {
                        if (!to[static_cast<std::size_t>(j)] && s.open({x, y, i}, {t[0], t[1], j})) {
                            to[static_cast<std::size_t>(j)] = 1;
                            ++w.ref(t[0], t[1]);
                        }
                    }
                }
            }
        }
    }
    return w;
}

inline CountField oriented_frontier(const OrientedPercolationSample& s, const InitialCondition& ic)
{
    const CountField init = ic.counts(s.village_size());
    const Window& w = init.window();
    for (int y = w.y_lo; y <= w.y_hi; ++y) {
        for (int x = w.x_lo; x <= w.x_hi; ++x) {
            if (init.ref(x, y) > 0 && x + y != 0) {
                throw DomainError("oriented_frontier: initial condition off the antidiagonal x + y = 0");
            }
        }
    }
    return oriented_frontier(s, lowest_index_sources(init, s.village_size()));
}

}  // namespace sirlat
