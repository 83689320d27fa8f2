#include "fluidic/ai.hpp"

#include "fluidic/error.hpp"

#include <algorithm>

namespace fluidic {

std::string_view to_string(PolicyId p) {
    switch (p) {
    case PolicyId::Assistant: return "assistant";
    case PolicyId::Novice: return "novice";
    case PolicyId::Idle: return "idle";
    }
    return "idle";
}

std::optional<PolicyId> policy_from_string(std::string_view s) {
    for (auto p : {PolicyId::Assistant, PolicyId::Novice, PolicyId::Idle}) {
        if (to_string(p) == s) return p;
    }
    return std::nullopt;
}

void require_valid(const AssistConfig& cfg) {
    if (!(cfg.level >= 0.0 && cfg.level <= 1.0))
        throw Error("assist_level", "assist level must lie in [0, 1]");
    if (cfg.decision_period < 1) throw Error("decision_period", "decision period must be >= 1");
    if (cfg.reaction_jitter < 0) throw Error("reaction_jitter", "reaction jitter must be >= 0");
}

std::vector<Threat> assess_threats(const GameState& state) {
    const auto& def = state.def();
    auto candidate = [&](BallKind k) {
        return def.cluster_score_per_ball[k] < 0 && fires(def.tap_action[k]);
    };
    std::vector<Threat> out;
    if (!candidate(BallKind::Positive) && !candidate(BallKind::Negative)) return out;

    const auto graph = contact_graph(state);
    const auto sizes = component_sizes(graph);
    for (std::size_t i = 0; i < graph.size(); ++i) {
        const BallKind k = graph.kinds[i];
        if (!candidate(k)) continue;
        out.push_back({graph.ids[i], static_cast<double>(sizes[i]) / def.cluster_threshold[k], sizes[i]});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Threat& a, const Threat& b) { return a.urgency > b.urgency; });
    return out;
}

std::optional<AssistDecision> assistant_act(const GameState& state, const AssistConfig& cfg, Rng& rng) {
    const bool acts = rng.uniform() < cfg.level;
    // One variate for the jitter too, even when the jitter range is a single value.
    const auto span = static_cast<std::uint64_t>(cfg.reaction_jitter) + 1;
    const auto jitter = std::min(static_cast<std::uint64_t>(rng.uniform() * static_cast<double>(span)), span - 1);
    if (!acts) return std::nullopt;

    const auto& def = state.def();
    for (const auto& t : assess_threats(state)) {
        const Ball* b = state.find(t.id);
        const auto needed = static_cast<std::uint32_t>(std::max(1, def.cluster_threshold[b->kind] - cfg.imminence));
        if (t.component < needed) continue;
        AssistDecision d;
        d.target = t.id;
        d.event = {state.step + jitter, b->position, InputSource::Assistant};
        return d;
    }
    return std::nullopt;
}

std::optional<InputEvent> novice_act(const GameState& state, Rng& rng, const NoviceConfig& cfg) {
    const double u = rng.uniform();
    if (u < cfg.p_ball) {
        std::vector<const Ball*> tappable;
        for (const auto& b : state.balls) {
            if (fires(state.def().tap_action[b.kind]) && inside_field(b.position)) tappable.push_back(&b);
        }
        if (tappable.empty()) return std::nullopt;
        const Ball* pick = tappable[rng.below(tappable.size())];
        return InputEvent{state.step, pick->position, InputSource::Policy};
    }
    if (u < cfg.p_ball + cfg.p_point) {
        const double x = rng.uniform(0.0, kFieldWidth);
        const double y = rng.uniform(0.0, kFieldHeight);
        return InputEvent{state.step, {x, y}, InputSource::Policy};
    }
    return std::nullopt;
}

AssistantPlayer::AssistantPlayer(AssistConfig cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
    require_valid(cfg_);
}

void AssistantPlayer::set_level(double level) {
    AssistConfig next = cfg_;
    next.level = level;
    require_valid(next);
    cfg_ = next;
}

std::vector<InputEvent> AssistantPlayer::poll(const GameState& state) {
    if (state.step % static_cast<std::uint64_t>(cfg_.decision_period) == 0) {
        if (auto d = assistant_act(state, cfg_, rng_)) pending_.push_back({d->event.time, d->target});
    }
    std::vector<InputEvent> out;
    std::erase_if(pending_, [&](const Pending& p) {
        if (p.fire_step > state.step) return false;
        if (const Ball* b = state.find(p.target))
            out.push_back({state.step, b->position, InputSource::Assistant});
        return true;
    });
    return out;
}

} // namespace fluidic
