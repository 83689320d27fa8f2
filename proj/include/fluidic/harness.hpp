#pragma once

#include "fluidic/ai.hpp"
#include "fluidic/game_def.hpp"
#include "fluidic/rules.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fluidic {

// Untimed definitions run this long unless a duration override is given.
inline constexpr double kUntimedHorizon = 120.0;

struct ReplayLog {
    GameDefinition definition;
    std::uint64_t seed = 0;
    std::vector<InputEvent> inputs;    // non-decreasing time
    std::vector<std::uint64_t> digests; // rolling digest after each step
};

struct BurstRecord {
    std::uint64_t step = 0;
    BallKind kind = BallKind::Positive;
    std::uint32_t size = 0;
    bool operator==(const BurstRecord&) const = default;
};

struct TapRecord {
    std::uint64_t step = 0;
    InputSource source = InputSource::Human;
    std::optional<BallId> hit;
    BallKind kind = BallKind::Positive;
    TapAction action = TapAction::None;
    std::int64_t score_delta = 0;
    bool operator==(const TapRecord&) const = default;
};

struct GameResult {
    std::int64_t final_score = 0;
    std::vector<BurstRecord> bursts;
    std::vector<TapRecord> taps;
    std::uint64_t seed = 0;
    std::uint64_t definition_hash = 0;
    std::uint64_t steps = 0;
    std::uint64_t final_digest = 0;
    std::int64_t delta_sum = 0; // sum of per-tick score deltas
    std::optional<ReplayLog> replay;

    bool operator==(const GameResult& o) const {
        return final_score == o.final_score && bursts == o.bursts && taps == o.taps && seed == o.seed &&
               definition_hash == o.definition_hash && steps == o.steps &&
               final_digest == o.final_digest && delta_sum == o.delta_sum;
    }
};

struct RunOptions {
    PolicyId policy = PolicyId::Idle;
    AssistConfig assist{0.0};
    NoviceConfig novice;
    std::optional<double> duration_override; // seconds
    bool record_replay = false;
};

// Seeds of the policy and assistant generators derived from the game seed.
std::uint64_t policy_seed(std::uint64_t game_seed);
std::uint64_t assistant_seed(std::uint64_t game_seed);

GameResult run_game(const GameDefinition& def, const RunOptions& opts, std::uint64_t seed);
GameResult run_game(const GameDefinition& def, PolicyId policy, const AssistConfig& assist,
                    std::uint64_t seed, std::optional<double> duration_override = std::nullopt);

// Digest chain start value for a (definition, seed) pair.
std::uint64_t digest_origin(std::uint64_t definition_hash, std::uint64_t seed);

// Replay log text format, see docs/formats.md.
std::string write_replay(const ReplayLog& log);
ReplayLog parse_replay(std::string_view text);

struct VerifyResult {
    bool ok = false;
    std::optional<std::uint64_t> divergent_step;
    std::string reason;
};

// Re-simulates the log and compares every step digest. Throws ReplayError
// for corrupt logs, definition-hash and RNG-fingerprint mismatches.
VerifyResult replay_verify(std::string_view text);
VerifyResult replay_verify_file(const std::filesystem::path& path);

// Re-simulates a log and returns every tick report (independent log scan).
std::vector<TickReport> replay_ticks(const ReplayLog& log);

struct LevelMetrics {
    double level = 0.0;
    double mean_score = 0.0;
    double score_variance = 0.0;
    int runs = 0;
    bool operator==(const LevelMetrics&) const = default;
};

struct BatchMetrics {
    double mean_score = 0.0;
    double score_variance = 0.0; // population variance over every run
    PerKind<std::int64_t> bursts_per_kind;
    std::optional<double> difficulty_gap; // mean at level 1.0 minus mean at 0.0
    int runs = 0;
    std::vector<LevelMetrics> levels;

    bool operator==(const BatchMetrics&) const = default;
};

struct BatchConfig {
    int games_per_level = 1;
    PolicyId policy = PolicyId::Idle;
    std::vector<double> levels{0.0};
    std::uint64_t base_seed = 0;
    AssistConfig assist; // level is overridden per batch level
    NoviceConfig novice;
    std::optional<double> duration_override;
    int workers = 0; // 0: default_workers()
};

// Runs games_per_level games per level with seeds base_seed + i.
BatchMetrics batch(const GameDefinition& def, const BatchConfig& cfg);
BatchMetrics batch_serial(const GameDefinition& def, const BatchConfig& cfg);

// results[l * games_per_level + i] belongs to levels[l].
BatchMetrics metrics_from_results(const std::vector<double>& levels, int games_per_level,
                                  const std::vector<GameResult>& results);

std::string to_json(const GameResult& r);
std::string to_json(const BatchMetrics& m);

} // namespace fluidic
