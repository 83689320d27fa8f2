#include "fluidic/rules.hpp"

#include "fluidic/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>

namespace fluidic {

std::string_view to_string(InputSource s) {
    switch (s) {
    case InputSource::Human: return "human";
    case InputSource::Assistant: return "assistant";
    case InputSource::Policy: return "policy";
    }
    return "human";
}

std::optional<InputSource> input_source_from_string(std::string_view s) {
    for (auto v : {InputSource::Human, InputSource::Assistant, InputSource::Policy}) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

namespace {

// Union by size with path halving.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

    std::uint32_t size_of(std::uint32_t x) { return size_[find(x)]; }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

DisjointSets components(const ContactGraph& graph) {
    DisjointSets sets(graph.size());
    for (std::uint32_t i = 0; i < graph.size(); ++i) {
        for (auto j : graph.adjacency[i]) {
            if (j > i) sets.unite(i, j);
        }
    }
    return sets;
}

} // namespace

std::vector<std::uint32_t> component_sizes(const ContactGraph& graph) {
    auto sets = components(graph);
    std::vector<std::uint32_t> out(graph.size());
    for (std::uint32_t i = 0; i < graph.size(); ++i) out[i] = sets.size_of(i);
    return out;
}

ClusterReport detect_clusters(const ContactGraph& graph, const GameDefinition& def) {
    auto sets = components(graph);
    ClusterReport report;
    std::vector<std::int64_t> slot(graph.size(), -1);
    for (std::uint32_t i = 0; i < graph.size(); ++i) {
        const BallKind k = graph.kinds[i];
        if (sets.size_of(i) < static_cast<std::uint32_t>(def.cluster_threshold[k])) continue;
        const auto root = sets.find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<std::int64_t>(report.clusters.size());
            report.clusters.push_back({k, {}});
        }
        report.clusters[static_cast<std::size_t>(slot[root])].ids.push_back(graph.ids[i]);
    }
    for (auto& c : report.clusters) std::sort(c.ids.begin(), c.ids.end());
    std::sort(report.clusters.begin(), report.clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.ids.front() < b.ids.front(); });
    return report;
}

std::int64_t apply_bursts(GameState& state, const ClusterReport& report) {
    for (const auto& c : report.clusters) {
        for (auto id : c.ids) {
            const Ball* b = state.find(id);
            if (!b || b->kind != c.kind)
                throw StateError("stale_report", "ball " + std::to_string(id) + " is not in the state");
        }
    }
    std::int64_t delta = 0;
    const auto& def = state.def();
    for (const auto& c : report.clusters) {
        const auto n = static_cast<std::int64_t>(c.ids.size());
        delta += n * def.cluster_score_per_ball[c.kind];
        state.spawns.pending_respawns[c.kind] += static_cast<int>(n);
        state.spawns.enqueued[c.kind] += n;
        for (auto id : c.ids) remove_ball(state, id);
    }
    state.score += delta;
    return delta;
}

std::optional<BallId> hit_test(const GameState& state, Vec2 p) {
    std::optional<BallId> best;
    double best_d2 = 0.0;
    for (const auto& b : state.balls) {
        const double reach = b.radius + kTapSlop;
        const double d2 = (b.position - p).norm2();
        if (d2 > reach * reach) continue;
        // Balls are stored in ascending id order, so strict < keeps the lower id on ties.
        if (!best || d2 < best_d2) {
            best = b.id;
            best_d2 = d2;
        }
    }
    return best;
}

TapOutcome apply_tap(GameState& state, const InputEvent& event) {
    if (event.time != state.step)
        throw StateError("tap_time", "tap for step " + std::to_string(event.time) +
                                         " applied at step " + std::to_string(state.step));
    TapOutcome out;
    out.event = event;
    out.hit = hit_test(state, event.position);
    if (!out.hit) return out;

    Ball* ball = state.find(*out.hit);
    const BallKind k = ball->kind;
    const auto& def = state.def();
    out.kind = k;
    out.action = def.tap_action[k];
    switch (out.action) {
    case TapAction::Explode:
        remove_ball(state, *out.hit);
        ++state.spawns.pending_respawns[k];
        ++state.spawns.enqueued[k];
        break;
    case TapAction::Destroy:
        remove_ball(state, *out.hit);
        break;
    case TapAction::Impulse:
        ball->velocity.y += kTapImpulse;
        break;
    case TapAction::None:
        return out;
    }
    out.score_delta = def.tap_score[k];
    state.score += out.score_delta;
    return out;
}

std::int64_t apply_exit_scoring(GameState& state, const std::vector<ExitEvent>& exited) {
    const auto& regions = state.def().exit_regions;
    std::int64_t delta = 0;
    for (const auto& e : exited) {
        if (e.region >= regions.size())
            throw StateError("unknown_region", "exit region " + std::to_string(e.region));
        delta += regions[e.region].score[e.kind];
    }
    state.score += delta;
    return delta;
}

TickReport tick(GameState& state, const std::vector<InputEvent>& inputs) {
    if (state.finished) throw StateError("finished", "cannot tick a finished game");
    TickReport report;
    report.step = state.step;
    for (const auto& in : inputs) {
        report.taps.push_back(apply_tap(state, in));
        report.tap_delta += report.taps.back().score_delta;
    }
    report.events = step(state);
    report.exit_delta = apply_exit_scoring(state, report.events.exited);
    report.clusters = detect_clusters(report.events.contacts, state.def());
    report.burst_delta = apply_bursts(state, report.clusters);
    report.finished = state.finished;
    return report;
}

std::string to_json(const TickReport& r) {
    using nlohmann::json;
    json taps = json::array();
    for (const auto& t : r.taps) {
        json o{{"source", to_string(t.event.source)},
               {"x", t.event.position.x},
               {"y", t.event.position.y},
               {"delta", t.score_delta}};
        if (t.hit) {
            o["hit"] = *t.hit;
            o["kind"] = to_string(t.kind);
            o["action"] = to_string(t.action);
        } else {
            o["hit"] = nullptr;
        }
        taps.push_back(std::move(o));
    }
    json exited = json::array();
    for (const auto& e : r.events.exited)
        exited.push_back({{"id", e.id}, {"kind", to_string(e.kind)}, {"region", e.region}});
    json bursts = json::array();
    for (const auto& c : r.clusters.clusters) bursts.push_back({{"kind", to_string(c.kind)}, {"ids", c.ids}});

    json o{{"step", r.step},
           {"taps", taps},
           {"spawned", r.events.spawned},
           {"exited", exited},
           {"bursts", bursts},
           {"contacts_changed", r.events.contacts_changed},
           {"score_delta", r.score_delta()},
           {"finished", r.finished}};
    return o.dump();
}

} // namespace fluidic
