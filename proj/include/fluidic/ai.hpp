#pragma once

#include "fluidic/physics.hpp"
#include "fluidic/rng.hpp"
#include "fluidic/rules.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace fluidic {

enum class PolicyId : std::uint8_t { Assistant, Novice, Idle };

std::string_view to_string(PolicyId p);
std::optional<PolicyId> policy_from_string(std::string_view s);

struct AssistConfig {
    double level = 0.5;       // per-opportunity action probability, in [0, 1]
    int decision_period = 15; // steps between decision opportunities (4 Hz)
    int reaction_jitter = 10; // tap lands 0..reaction_jitter steps after the decision
    // A threat is acted on once its component is within this many balls of bursting.
    int imminence = 1;
};

void require_valid(const AssistConfig& cfg);

struct NoviceConfig {
    double p_ball = 0.6;  // tap a random visible tappable ball
    double p_point = 0.1; // tap a random screen point
    int decision_period = 15;
};

struct Threat {
    BallId id = 0;
    double urgency = 0.0; // component size / cluster threshold
    std::uint32_t component = 0;
    bool operator==(const Threat&) const = default;
};

// Balls of kinds that lose score when they burst and that a tap can act on,
// ranked by descending urgency, then ascending id.
std::vector<Threat> assess_threats(const GameState& state);

struct AssistDecision {
    InputEvent event; // time = decision step + jitter, position = target centre now
    BallId target = 0;
};

// One decision opportunity. Draws exactly two variates from rng regardless of
// the board, so paired runs at different levels stay aligned.
std::optional<AssistDecision> assistant_act(const GameState& state, const AssistConfig& cfg, Rng& rng);

// One novice decision: tap a random tappable ball, a random point, or nothing.
std::optional<InputEvent> novice_act(const GameState& state, Rng& rng, const NoviceConfig& cfg = {});

// The gloved hand. Holds decisions until their jittered fire step, then taps
// the target's current centre; targets that vanished in between are dropped.
class AssistantPlayer {
public:
    AssistantPlayer(AssistConfig cfg, std::uint64_t seed);

    // Slider changes apply from the next decision opportunity.
    void set_level(double level);
    const AssistConfig& config() const { return cfg_; }

    std::vector<InputEvent> poll(const GameState& state);

private:
    struct Pending {
        std::uint64_t fire_step;
        BallId target;
    };

    AssistConfig cfg_;
    Rng rng_;
    std::vector<Pending> pending_;
};

} // namespace fluidic
