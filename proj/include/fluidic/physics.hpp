#pragma once

#include "fluidic/game_def.hpp"
#include "fluidic/geometry.hpp"
#include "fluidic/rng.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace fluidic {

using BallId = std::uint32_t;

inline constexpr double kFixedDt = 1.0 / 60.0;

// Speed cap keeps per-step displacement below the smallest useful radius,
// which is what prevents tunnelling without continuous collision detection.
inline constexpr double kMaxSpeed = 30.0;
inline constexpr double kNoiseProbability = 0.1;
inline constexpr int kSolverIterations = 4;

struct Ball {
    BallId id = 0;
    BallKind kind = BallKind::Positive;
    Vec2 position;
    Vec2 velocity;
    double radius = 0.0;

    double mass() const { return radius * radius; }
    bool operator==(const Ball&) const = default;
};

struct SpawnLedger {
    PerKind<int> fill_remaining;   // initial-fill balls not yet spawned
    PerKind<int> pending_respawns; // queued replacements for exploded balls
    PerKind<double> accumulator;   // fractional spawn opportunities
    PerKind<std::int64_t> fill_spawned;
    PerKind<std::int64_t> respawned;
    PerKind<std::int64_t> enqueued;
    bool operator==(const SpawnLedger&) const = default;
};

struct GameState {
    std::shared_ptr<const GameDefinition> definition;
    std::vector<Ball> balls; // ascending id order
    std::uint64_t step = 0;  // elapsed = step * kFixedDt
    std::int64_t score = 0;
    Rng rng;
    SpawnLedger spawns;
    BallId next_id = 1;
    std::uint64_t contact_signature = 0;
    bool finished = false;

    const GameDefinition& def() const { return *definition; }
    double elapsed() const { return static_cast<double>(step) * kFixedDt; }
    int count(BallKind k) const;
    const Ball* find(BallId id) const;
    Ball* find(BallId id);
};

bool operator==(const GameState& a, const GameState& b);

// Same-kind contact graph. Node i corresponds to state.balls[i]; adjacency
// lists are sorted and symmetric.
struct ContactGraph {
    std::vector<BallId> ids;
    std::vector<BallKind> kinds;
    std::vector<std::vector<std::uint32_t>> adjacency;

    std::size_t size() const { return ids.size(); }
    std::uint64_t signature() const;
    bool operator==(const ContactGraph&) const = default;
};

struct ExitEvent {
    BallId id = 0;
    BallKind kind = BallKind::Positive;
    std::size_t region = 0;
    bool operator==(const ExitEvent&) const = default;
};

struct StepEvents {
    bool contacts_changed = false;
    std::vector<ExitEvent> exited;
    std::vector<BallId> spawned;
    ContactGraph contacts; // graph after this step, reused by the rules layer
};

GameState init_state(std::shared_ptr<const GameDefinition> def, std::uint64_t seed);
GameState init_state(const GameDefinition& def, std::uint64_t seed);

// Number of steps after which a timed game finishes; 0 for untimed games.
std::uint64_t duration_steps(double seconds);

StepEvents step(GameState& state, double dt = kFixedDt);

// Spawn policy, invoked once per step. Exposed for direct testing.
std::vector<BallId> spawn(GameState& state, double dt = kFixedDt);

ContactGraph contact_graph(const GameState& state);

// Removes a ball; returns false if the id is not present.
bool remove_ball(GameState& state, BallId id);

// Adds a ball of kind k at p with zero velocity, bypassing the spawn policy.
// Scenario construction only.
BallId place_ball(GameState& state, BallKind k, Vec2 p, Vec2 v = {});

// Kinetic + potential energy per the definition's gravity (mass = radius^2).
double total_energy(const GameState& state);

// Contact resolution primitives, exposed so their energy behaviour can be
// checked in isolation.
void resolve_pair(Ball& a, Ball& b, double restitution);
void resolve_static(Ball& ball, Vec2 normal, double depth, double restitution, double gravity);

// Rolling replay digest: folds step index, score and every ball (positions
// quantized to 1e-6) into the previous digest.
std::uint64_t step_digest(const GameState& state, std::uint64_t previous);

} // namespace fluidic
