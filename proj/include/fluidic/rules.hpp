#pragma once

#include "fluidic/game_def.hpp"
#include "fluidic/physics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fluidic {

// Finger-sized forgiveness around each ball when hit-testing taps.
inline constexpr double kTapSlop = 0.15;
// Upward velocity change applied by the Impulse tap action.
inline constexpr double kTapImpulse = 8.0;

struct Cluster {
    BallKind kind = BallKind::Positive;
    std::vector<BallId> ids; // ascending
    bool operator==(const Cluster&) const = default;
};

struct ClusterReport {
    std::vector<Cluster> clusters; // ordered by smallest member id
    bool empty() const { return clusters.empty(); }
    bool operator==(const ClusterReport&) const = default;
};

enum class InputSource : std::uint8_t { Human, Assistant, Policy };

std::string_view to_string(InputSource s);
std::optional<InputSource> input_source_from_string(std::string_view s);

struct InputEvent {
    std::uint64_t time = 0; // step index at which the tap applies
    Vec2 position;
    InputSource source = InputSource::Human;
    bool operator==(const InputEvent&) const = default;
};

struct TapOutcome {
    InputEvent event;
    std::optional<BallId> hit;
    BallKind kind = BallKind::Positive;
    TapAction action = TapAction::None;
    std::int64_t score_delta = 0;
    bool fired() const { return hit.has_value() && fires(action); }
};

struct TickReport {
    std::uint64_t step = 0; // step index the tick started at
    std::vector<TapOutcome> taps;
    StepEvents events;
    ClusterReport clusters;
    std::int64_t tap_delta = 0;
    std::int64_t exit_delta = 0;
    std::int64_t burst_delta = 0;
    bool finished = false;

    std::int64_t score_delta() const { return tap_delta + exit_delta + burst_delta; }
};

// Maximal same-kind components whose size reaches the kind's threshold.
ClusterReport detect_clusters(const ContactGraph& graph, const GameDefinition& def);

// Component size for every node of the graph (index-aligned with graph.ids).
std::vector<std::uint32_t> component_sizes(const ContactGraph& graph);

std::int64_t apply_bursts(GameState& state, const ClusterReport& report);

// Hit test: nearest ball whose centre lies within radius + kTapSlop of p;
// exact distance ties go to the lower id.
std::optional<BallId> hit_test(const GameState& state, Vec2 p);

TapOutcome apply_tap(GameState& state, const InputEvent& event);

std::int64_t apply_exit_scoring(GameState& state, const std::vector<ExitEvent>& exited);

// One game tick: taps, physics step, exit scoring, cluster detection, bursts.
TickReport tick(GameState& state, const std::vector<InputEvent>& inputs);

// JSON wire form of a tick report (one object per line in trace files).
std::string to_json(const TickReport& report);

} // namespace fluidic
