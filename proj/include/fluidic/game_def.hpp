#pragma once

#include "fluidic/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fluidic {

// Positive is the white "snow" ball, Negative the blue "rain" ball.
enum class BallKind : std::uint8_t { Positive = 0, Negative = 1 };

inline constexpr std::array<BallKind, 2> kAllKinds{BallKind::Positive, BallKind::Negative};

constexpr std::size_t index_of(BallKind k) { return static_cast<std::size_t>(k); }
std::string_view to_string(BallKind k);
std::optional<BallKind> ball_kind_from_string(std::string_view s);

// A table with exactly one entry per ball kind.
template <typename T>
struct PerKind {
    T positive{};
    T negative{};

    constexpr T& operator[](BallKind k) { return k == BallKind::Positive ? positive : negative; }
    constexpr const T& operator[](BallKind k) const {
        return k == BallKind::Positive ? positive : negative;
    }
    bool operator==(const PerKind&) const = default;
};

enum class TapAction : std::uint8_t { Explode, Destroy, Impulse, None };

std::string_view to_string(TapAction a);
std::optional<TapAction> tap_action_from_string(std::string_view s);
constexpr bool fires(TapAction a) { return a != TapAction::None; }

struct GridLayout {
    std::vector<Segment> segments;
    std::optional<std::string> catalog_id;
    bool operator==(const GridLayout&) const = default;
};

struct PhysicsParams {
    double gravity = 10.0;
    double restitution = 0.2;
    double noise_amplitude = 0.0;
    double contact_slop = 0.05;
    bool operator==(const PhysicsParams&) const = default;
};

// Closed horizontal interval [lo, hi] along the top edge.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    constexpr double width() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

enum class Edge : std::uint8_t { Bottom, Left, Right };

std::string_view to_string(Edge e);
std::optional<Edge> edge_from_string(std::string_view s);

// An opening in one playfield edge. `span` is measured along the edge:
// x for the bottom edge, y for the side edges. A ball whose center crosses
// the edge inside the span leaves the playfield and scores `score[kind]`.
struct ExitRegion {
    Edge edge = Edge::Bottom;
    Interval span;
    PerKind<int> score;
    bool operator==(const ExitRegion&) const = default;
};

struct GameDefinition {
    std::string name;
    std::uint64_t seed_hint = 0;

    PerKind<int> cluster_threshold{4, 4};
    PerKind<int> cluster_score_per_ball{1, -1};
    PerKind<TapAction> tap_action{TapAction::None, TapAction::Explode};
    PerKind<int> tap_score{0, -1};
    PerKind<double> ball_radius{0.45, 0.45};
    PerKind<int> max_balls{20, 20};
    GridLayout grid;
    PhysicsParams physics;
    PerKind<std::vector<Interval>> spawn_regions;
    std::vector<ExitRegion> exit_regions;
    double spawn_rate = 2.0;
    double game_duration = 120.0;

    bool operator==(const GameDefinition&) const = default;
};

struct Violation {
    std::string code;
    std::string detail;
};

// Every invariant violation; empty when the definition is valid.
std::vector<Violation> validate(const GameDefinition& def);

// Throws DefinitionError carrying the first violation code when invalid.
void require_valid(const GameDefinition& def);

// Built-in presets: let_it_snow, rain_rain, jack_frost, slush_slosh.
std::vector<std::string> preset_names();
GameDefinition preset(std::string_view name);

// Canonical JSON document (schema "fluidic-game/1"). Keys are sorted and
// numbers use shortest round-trip formatting, so equal definitions give
// byte-identical documents.
inline constexpr std::string_view kDefinitionSchema = "fluidic-game/1";
std::string serialize(const GameDefinition& def);
// Parses and validates; throws DefinitionError (missing_field, wrong_type,
// malformed, schema_version, or the first validate() code).
GameDefinition deserialize(std::string_view text);
// Schema checks only; the result may violate invariants.
GameDefinition parse_definition(std::string_view text);

// FNV-1a of the canonical document.
std::uint64_t definition_hash(const GameDefinition& def);

// Hash of everything except scoring fields. Scores do not affect the
// simulated dynamics under score-blind policies, so a frequency histogram
// stays valid for any rescoring with the same dynamics hash.
std::uint64_t dynamics_hash(const GameDefinition& def);

} // namespace fluidic
