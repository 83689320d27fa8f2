#pragma once

// Reference implementations used by the tests. Each one is deliberately
// naive and shares no code with the engine.

#include "fluidic/game_def.hpp"
#include "fluidic/physics.hpp"
#include "fluidic/rng.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using namespace fluidic;

// All-pairs contact test. Edges as (smaller id, larger id).
inline std::set<std::pair<BallId, BallId>> contact_edges(const std::vector<Ball>& balls, double slop) {
    std::set<std::pair<BallId, BallId>> out;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        for (std::size_t j = i + 1; j < balls.size(); ++j) {
            const Ball& a = balls[i];
            const Ball& b = balls[j];
            if (a.kind != b.kind) continue;
            const double dx = a.position.x - b.position.x;
            const double dy = a.position.y - b.position.y;
            const double reach = a.radius + b.radius + slop;
            if (dx * dx + dy * dy <= reach * reach) out.insert({std::min(a.id, b.id), std::max(a.id, b.id)});
        }
    }
    return out;
}

// Connected components by recursive-free depth-first search over an edge set.
// Returns every component as a sorted id list, components sorted by first id.
inline std::vector<std::vector<BallId>> components(const std::vector<BallId>& nodes,
                                                   const std::set<std::pair<BallId, BallId>>& edges) {
    std::map<BallId, std::vector<BallId>> adj;
    for (auto id : nodes) adj[id];
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::set<BallId> seen;
    std::vector<std::vector<BallId>> out;
    for (auto start : nodes) {
        if (seen.count(start)) continue;
        std::vector<BallId> comp, stack{start};
        seen.insert(start);
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (auto v : adj[u]) {
                if (seen.insert(v).second) stack.push_back(v);
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(comp);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct OracleCluster {
    BallKind kind;
    std::vector<BallId> ids;
};

// Components of size >= threshold[kind], ordered by smallest id.
inline std::vector<OracleCluster> clusters(const std::vector<Ball>& balls, double slop,
                                           const PerKind<int>& threshold) {
    std::vector<BallId> nodes;
    std::map<BallId, BallKind> kind_of;
    for (const auto& b : balls) {
        nodes.push_back(b.id);
        kind_of[b.id] = b.kind;
    }
    std::vector<OracleCluster> out;
    for (auto& comp : components(nodes, contact_edges(balls, slop))) {
        const BallKind k = kind_of[comp.front()];
        if (static_cast<int>(comp.size()) >= threshold[k]) out.push_back({k, comp});
    }
    return out;
}

// Nearest ball within radius + slop of p; exact ties to the lower id.
inline std::optional<BallId> hit(const std::vector<Ball>& balls, Vec2 p, double slop) {
    std::vector<std::pair<double, BallId>> hits;
    for (const auto& b : balls) {
        const double dx = b.position.x - p.x;
        const double dy = b.position.y - p.y;
        const double reach = b.radius + slop;
        if (dx * dx + dy * dy <= reach * reach) hits.push_back({dx * dx + dy * dy, b.id});
    }
    if (hits.empty()) return std::nullopt;
    return std::min_element(hits.begin(), hits.end())->second;
}

// Balance search by full enumeration with exact rational comparisons.
struct BalanceInput {
    PerKind<std::int64_t> cluster_weight; // sum over bursts of size
    PerKind<std::int64_t> tap_weight;     // fired taps
    std::int64_t games = 1;
    std::array<int, 4> original{};        // c+, c-, t+, t-
    std::array<bool, 4> searched{};       // which variables may move
    std::array<bool, 4> tap_nonpositive{}; // sign class of tap variables
    int magnitude = 5;
    double tolerance = 0.25;
};

struct BalanceOutput {
    std::array<int, 4> scores{};
    std::int64_t gain = 0;
    std::int64_t loss = 0;
};

inline BalanceOutput balance(const BalanceInput& in) {
    const std::array<std::int64_t, 4> w{in.cluster_weight.positive, in.cluster_weight.negative,
                                        in.tap_weight.positive, in.tap_weight.negative};
    std::array<std::vector<int>, 4> domain;
    for (int i = 0; i < 4; ++i) {
        if (!in.searched[i]) {
            domain[i] = {in.original[i]};
            continue;
        }
        int lo, hi;
        if (i == 0) lo = 1, hi = in.magnitude;
        else if (i == 1) lo = -in.magnitude, hi = -1;
        else if (in.tap_nonpositive[i]) lo = -in.magnitude, hi = 0;
        else lo = 0, hi = in.magnitude;
        for (int v = lo; v <= hi; ++v) domain[i].push_back(v);
    }

    struct Row {
        std::array<int, 4> s;
        std::int64_t gain, loss, dist;
    };
    std::vector<Row> rows;
    for (int a : domain[0])
        for (int b : domain[1])
            for (int c : domain[2])
                for (int d : domain[3]) {
                    Row r{{a, b, c, d}, 0, 0, 0};
                    for (int i = 0; i < 4; ++i) {
                        const std::int64_t contrib = w[i] * r.s[i];
                        if (contrib > 0) r.gain += contrib;
                        else r.loss -= contrib;
                        r.dist += std::abs(r.s[i] - in.original[i]);
                    }
                    rows.push_back(r);
                }

    // Imbalance as the exact fraction |gain - loss| / max(gain, loss, games).
    auto num = [](const Row& r) { return std::llabs(r.gain - r.loss); };
    auto den = [&](const Row& r) { return std::max({r.gain, r.loss, in.games}); };
    auto less_imbalance = [&](const Row& x, const Row& y) {
        return static_cast<__int128>(num(x)) * den(y) < static_cast<__int128>(num(y)) * den(x);
    };
    auto preferred = [](const Row& x, const Row& y) {
        if (x.dist != y.dist) return x.dist < y.dist;
        for (int i = 0; i < 4; ++i) {
            if (std::abs(x.s[i]) != std::abs(y.s[i])) return std::abs(x.s[i]) > std::abs(y.s[i]);
        }
        return false;
    };

    const Row* pick = nullptr;
    for (const auto& r : rows) {
        if (static_cast<double>(num(r)) > in.tolerance * static_cast<double>(den(r))) continue;
        if (!pick || preferred(r, *pick)) pick = &r;
    }
    if (!pick) {
        for (const auto& r : rows) {
            if (!pick || less_imbalance(r, *pick) || (!less_imbalance(*pick, r) && preferred(r, *pick))) pick = &r;
        }
    }
    return {pick->s, pick->gain, pick->loss};
}

// Random ball layout inside the playfield.
inline std::vector<Ball> random_layout(Rng& rng, int n, double rmin = 0.3, double rmax = 0.6) {
    std::vector<Ball> balls;
    for (int i = 0; i < n; ++i) {
        Ball b;
        b.id = static_cast<BallId>(i + 1);
        b.kind = rng.bernoulli(0.5) ? BallKind::Positive : BallKind::Negative;
        b.radius = rng.uniform(rmin, rmax);
        b.position = {rng.uniform(0.0, kFieldWidth), rng.uniform(0.0, 4.0)};
        balls.push_back(b);
    }
    return balls;
}

} // namespace oracle
