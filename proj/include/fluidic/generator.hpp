#pragma once

#include "fluidic/ai.hpp"
#include "fluidic/game_def.hpp"
#include "fluidic/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fluidic {

struct IntRange {
    int lo = 0;
    int hi = 0;
};

struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Allowed values per facet. Defaults span the built-in design subspace.
struct Constraints {
    PerKind<IntRange> cluster_threshold{{3, 6}, {3, 6}};
    PerKind<IntRange> cluster_score_per_ball{{1, 3}, {-3, -1}};
    PerKind<std::vector<TapAction>> tap_actions{
        {TapAction::None, TapAction::Impulse, TapAction::Explode},
        {TapAction::Explode, TapAction::Destroy, TapAction::Impulse}};
    PerKind<IntRange> tap_score{{0, 1}, {-2, 0}};
    PerKind<RealRange> ball_radius{{0.3, 0.6}, {0.3, 0.6}};
    PerKind<IntRange> max_balls{{10, 24}, {10, 24}};
    std::vector<GridLayout> grids; // empty: the whole grid catalog
    RealRange gravity{6.0, 14.0};
    RealRange restitution{0.0, 0.6};
    RealRange noise_amplitude{0.0, 0.6};
    RealRange contact_slop{0.02, 0.08};
    PerKind<std::vector<std::vector<Interval>>> spawn_layouts; // empty: built-in choices
    std::vector<std::vector<ExitRegion>> exit_layouts;         // empty: built-in choices
    RealRange spawn_rate{1.5, 4.0};
    RealRange game_duration{60.0, 90.0};
    std::optional<std::string> name; // default: "generated-<hex>"
    std::optional<std::uint64_t> seed_hint;

    // Degenerate constraints that only admit `def`.
    static Constraints pinned(const GameDefinition& def);
};

// Draws every facet from its range or choice list. Retries until the result
// validates; throws GeneratorError("unsatisfiable") when it cannot.
GameDefinition sample_definition(Rng& rng, const Constraints& constraints = {});

struct FrequencyHistogram {
    std::map<std::pair<BallKind, int>, std::int64_t> counts; // (kind, cluster size) -> bursts
    PerKind<std::int64_t> tap_counts;                        // taps whose action fired
    int games_simulated = 0;
    std::int64_t total_steps = 0;
    std::uint64_t dynamics_hash = 0;

    bool empty() const { return counts.empty(); }
    std::int64_t bursts(BallKind k) const;
    bool operator==(const FrequencyHistogram&) const = default;
};

struct EstimateOptions {
    // Per-game horizon cap in seconds; 0 uses the definition's own duration.
    double horizon = 60.0;
    int workers = 0;
    bool serial = false; // use the serial reference kernel
    NoviceConfig novice;
    AssistConfig assist{0.0};
};

std::uint64_t estimate_game_seed(std::uint64_t seed, std::size_t game);

FrequencyHistogram estimate_frequencies(const GameDefinition& def, int n_games, PolicyId policy,
                                        std::uint64_t seed, const EstimateOptions& opts = {});

struct BalanceReport {
    double expected_positive = 0.0;
    double expected_negative = 0.0;
    double imbalance = 1.0;
    bool unplayable = false;
};

// Expected per-game gains and losses from bursts and fired taps under `hist`.
BalanceReport evaluate_balance(const GameDefinition& def, const FrequencyHistogram& hist);

// Which scores the search may change. A score is only searched when the
// histogram shows it can matter (bursts or fired taps of that kind).
struct BalanceSearch {
    PerKind<bool> cluster{true, true};
    PerKind<bool> tap{true, true};
    int magnitude = 5;
};

struct BalanceResult {
    GameDefinition definition;
    BalanceReport report;
};

// Integer score search. Positive burst scores stay in [1, m], negative ones in
// [-m, -1], tap scores keep their sign. Returns the candidate closest (L1) to
// the current scores whose imbalance <= tolerance; otherwise the argmin.
// Remaining ties prefer larger magnitudes in the order (cluster+, cluster-, tap+, tap-).
BalanceResult balance_scores(const GameDefinition& def, const FrequencyHistogram& hist,
                             double tolerance, const BalanceSearch& search = {});

struct GeneratorConfig {
    int n_games = 100;
    double tolerance = 0.25;
    int max_attempts = 20;
    EstimateOptions estimate;
};

struct GenerateResult {
    GameDefinition definition;
    BalanceReport report;
    FrequencyHistogram histogram;
    int attempts = 0;
    bool accepted = false;
};

// At least one burst of every kind with a nonzero cap.
bool playable(const GameDefinition& def, const FrequencyHistogram& hist);

GenerateResult generate_balanced(Rng& rng, const Constraints& constraints, const GeneratorConfig& cfg = {});

std::string to_json(const FrequencyHistogram& h);
std::string to_json(const BalanceReport& r);

} // namespace fluidic
