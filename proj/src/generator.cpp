#include "fluidic/generator.hpp"

#include "fluidic/error.hpp"
#include "fluidic/grid_catalog.hpp"
#include "fluidic/harness.hpp"
#include "fluidic/hash.hpp"
#include "fluidic/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace fluidic {

Constraints Constraints::pinned(const GameDefinition& d) {
    Constraints c;
    auto pin_i = [](const PerKind<int>& v) { return PerKind<IntRange>{{v.positive, v.positive}, {v.negative, v.negative}}; };
    auto pin_r = [](double v) { return RealRange{v, v}; };
    c.cluster_threshold = pin_i(d.cluster_threshold);
    c.cluster_score_per_ball = pin_i(d.cluster_score_per_ball);
    c.tap_actions = {{d.tap_action.positive}, {d.tap_action.negative}};
    c.tap_score = pin_i(d.tap_score);
    c.ball_radius = {pin_r(d.ball_radius.positive), pin_r(d.ball_radius.negative)};
    c.max_balls = pin_i(d.max_balls);
    c.grids = {d.grid};
    c.gravity = pin_r(d.physics.gravity);
    c.restitution = pin_r(d.physics.restitution);
    c.noise_amplitude = pin_r(d.physics.noise_amplitude);
    c.contact_slop = pin_r(d.physics.contact_slop);
    c.spawn_layouts = {{d.spawn_regions.positive}, {d.spawn_regions.negative}};
    c.exit_layouts = {d.exit_regions};
    c.spawn_rate = pin_r(d.spawn_rate);
    c.game_duration = pin_r(d.game_duration);
    c.name = d.name;
    c.seed_hint = d.seed_hint;
    return c;
}

namespace {

std::vector<std::vector<Interval>> builtin_spawn_layouts() {
    return {{{0.0, 9.0}}, {{0.0, 5.0}}, {{4.0, 9.0}}, {{2.0, 7.0}}, {{0.0, 3.0}, {6.0, 9.0}}};
}

std::vector<std::vector<ExitRegion>> builtin_exit_layouts() {
    return {
        {},
        {},
        {{Edge::Bottom, {3.5, 5.5}, {-1, 2}}},
        {{Edge::Left, {0.0, 2.5}, {1, -1}}},
        {{Edge::Right, {0.0, 2.5}, {1, -1}}},
        {{Edge::Bottom, {0.0, 1.5}, {0, 1}}, {Edge::Bottom, {7.5, 9.0}, {0, 1}}},
    };
}

std::vector<GridLayout> builtin_grids() {
    std::vector<GridLayout> out;
    for (const auto& id : grid_catalog_ids()) out.push_back(*grid_from_catalog(id));
    return out;
}

[[noreturn]] void unsatisfiable(const std::string& detail) { throw GeneratorError("unsatisfiable", detail); }

void check(const IntRange& r, const char* what, int min_lo = INT32_MIN) {
    if (r.lo > r.hi) unsatisfiable(std::string(what) + " range is empty");
    if (r.lo < min_lo) unsatisfiable(std::string(what) + " range admits invalid values");
}

void check(const RealRange& r, const char* what, double min_lo, double max_hi, bool open_lo = false) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
        unsatisfiable(std::string(what) + " range is empty");
    if (r.lo < min_lo || (open_lo && r.lo <= min_lo) || r.hi > max_hi)
        unsatisfiable(std::string(what) + " range admits invalid values");
}

int draw(Rng& rng, IntRange r) { return static_cast<int>(rng.between(r.lo, r.hi)); }

// Rounded to 1e-3 for readable files; pinned ranges return their value exactly.
double draw(Rng& rng, RealRange r) {
    if (r.lo == r.hi) return r.lo;
    const double v = std::round(rng.uniform(r.lo, r.hi) * 1000.0) / 1000.0;
    return std::clamp(v, r.lo, r.hi);
}

template <typename T>
const T& choose(Rng& rng, const std::vector<T>& options) {
    return options[rng.below(options.size())];
}

} // namespace

GameDefinition sample_definition(Rng& rng, const Constraints& c) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    for (BallKind k : kAllKinds) {
        check(c.cluster_threshold[k], "cluster_threshold", 2);
        check(c.cluster_score_per_ball[k], "cluster_score_per_ball");
        check(c.tap_score[k], "tap_score");
        check(c.max_balls[k], "max_balls", 0);
        check(c.ball_radius[k], "ball_radius", 0.0, kInf, true);
        if (c.tap_actions[k].empty()) unsatisfiable("no tap action allowed");
    }
    check(c.gravity, "gravity", -kInf, kInf);
    check(c.restitution, "restitution", 0.0, 1.0);
    check(c.noise_amplitude, "noise_amplitude", 0.0, kInf);
    check(c.contact_slop, "contact_slop", 0.0, kInf);
    check(c.spawn_rate, "spawn_rate", 0.0, kInf, true);
    check(c.game_duration, "game_duration", 0.0, kInf);

    const auto grids = c.grids.empty() ? builtin_grids() : c.grids;
    PerKind<std::vector<std::vector<Interval>>> spawns = c.spawn_layouts;
    for (BallKind k : kAllKinds) {
        if (spawns[k].empty()) spawns[k] = builtin_spawn_layouts();
    }
    const auto exits = c.exit_layouts.empty() ? builtin_exit_layouts() : c.exit_layouts;

    constexpr int kMaxTries = 1000;
    for (int attempt = 0; attempt < kMaxTries; ++attempt) {
        GameDefinition d;
        for (BallKind k : kAllKinds) {
            d.cluster_threshold[k] = draw(rng, c.cluster_threshold[k]);
            d.cluster_score_per_ball[k] = draw(rng, c.cluster_score_per_ball[k]);
            d.tap_action[k] = choose(rng, c.tap_actions[k]);
            d.tap_score[k] = draw(rng, c.tap_score[k]);
            d.ball_radius[k] = draw(rng, c.ball_radius[k]);
            d.max_balls[k] = draw(rng, c.max_balls[k]);
            d.spawn_regions[k] = choose(rng, spawns[k]);
        }
        d.grid = choose(rng, grids);
        d.physics.gravity = draw(rng, c.gravity);
        d.physics.restitution = draw(rng, c.restitution);
        d.physics.noise_amplitude = draw(rng, c.noise_amplitude);
        d.physics.contact_slop = draw(rng, c.contact_slop);
        d.exit_regions = choose(rng, exits);
        d.spawn_rate = draw(rng, c.spawn_rate);
        d.game_duration = draw(rng, c.game_duration);
        const auto tag = rng.next();
        d.name = c.name ? *c.name : "generated-" + to_hex(tag).substr(0, 8);
        d.seed_hint = c.seed_hint ? *c.seed_hint : tag;
        if (validate(d).empty()) return d;
    }
    unsatisfiable("no valid definition found in " + std::to_string(kMaxTries) + " draws");
}

// ---------------------------------------------------------------------------
// Frequency estimation

std::int64_t FrequencyHistogram::bursts(BallKind k) const {
    std::int64_t n = 0;
    for (const auto& [key, count] : counts) {
        if (key.first == k) n += count;
    }
    return n;
}

std::uint64_t estimate_game_seed(std::uint64_t seed, std::size_t game) {
    return derive_seed(seed, 0x10000 + game);
}

FrequencyHistogram estimate_frequencies(const GameDefinition& def, int n_games, PolicyId policy,
                                        std::uint64_t seed, const EstimateOptions& opts) {
    if (n_games < 1) throw GeneratorError("n_games", "at least one game is required");
    require_valid(def);

    RunOptions run;
    run.policy = policy;
    run.novice = opts.novice;
    run.assist = opts.assist;
    if (opts.horizon > 0.0)
        run.duration_override = def.game_duration > 0.0 ? std::min(opts.horizon, def.game_duration) : opts.horizon;

    std::vector<GameResult> results(static_cast<std::size_t>(n_games));
    auto body = [&](std::size_t i) { results[i] = run_game(def, run, estimate_game_seed(seed, i)); };
    if (opts.serial)
        for_each_game_serial(results.size(), body);
    else
        for_each_game(results.size(), opts.workers, body);

    FrequencyHistogram h;
    h.games_simulated = n_games;
    h.dynamics_hash = dynamics_hash(def);
    for (const auto& r : results) {
        h.total_steps += static_cast<std::int64_t>(r.steps);
        for (const auto& b : r.bursts) ++h.counts[{b.kind, static_cast<int>(b.size)}];
        for (const auto& t : r.taps) {
            if (t.hit && fires(t.action)) ++h.tap_counts[t.kind];
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Balancing

namespace {

struct Weights {
    PerKind<std::int64_t> cluster; // sum of count * size per kind
    PerKind<std::int64_t> tap;     // fired taps per kind
    std::int64_t games = 1;
};

Weights weights_of(const FrequencyHistogram& h) {
    Weights w;
    for (const auto& [key, count] : h.counts) w.cluster[key.first] += count * key.second;
    w.tap = h.tap_counts;
    w.games = std::max(1, h.games_simulated);
    return w;
}

// scores = {cluster+, cluster-, tap+, tap-}
using Scores = std::array<int, 4>;

std::pair<std::int64_t, std::int64_t> totals(const Weights& w, const Scores& s) {
    const std::array<std::int64_t, 4> weight{w.cluster.positive, w.cluster.negative, w.tap.positive, w.tap.negative};
    std::int64_t gain = 0, loss = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (s[i] > 0) gain += weight[i] * s[i];
        else loss += weight[i] * -s[i];
    }
    return {gain, loss};
}

double imbalance_of(std::int64_t gain, std::int64_t loss, std::int64_t games) {
    const auto denom = std::max({gain, loss, games});
    return static_cast<double>(std::llabs(gain - loss)) / static_cast<double>(denom);
}

Scores scores_of(const GameDefinition& d) {
    return {d.cluster_score_per_ball.positive, d.cluster_score_per_ball.negative, d.tap_score.positive,
            d.tap_score.negative};
}

} // namespace

BalanceReport evaluate_balance(const GameDefinition& def, const FrequencyHistogram& hist) {
    const auto w = weights_of(hist);
    const auto [gain, loss] = totals(w, scores_of(def));
    BalanceReport r;
    r.expected_positive = static_cast<double>(gain) / static_cast<double>(w.games);
    r.expected_negative = static_cast<double>(loss) / static_cast<double>(w.games);
    r.imbalance = imbalance_of(gain, loss, w.games);
    r.unplayable = hist.empty();
    return r;
}

BalanceResult balance_scores(const GameDefinition& def, const FrequencyHistogram& hist, double tolerance,
                             const BalanceSearch& search) {
    if (!(tolerance > 0.0 && tolerance <= 1.0))
        throw GeneratorError("tolerance", "tolerance must lie in (0, 1]");
    if (hist.games_simulated < 1) throw GeneratorError("histogram_mismatch", "histogram has no games");
    if (hist.dynamics_hash != dynamics_hash(def))
        throw GeneratorError("histogram_mismatch", "histogram was produced for a different definition");
    for (const auto& [key, count] : hist.counts) {
        if (key.second < def.cluster_threshold[key.first] || count < 0)
            throw GeneratorError("histogram_mismatch", "cluster size below the definition's threshold");
    }

    if (hist.empty()) {
        BalanceResult out{def, evaluate_balance(def, hist)};
        out.report.unplayable = true;
        return out;
    }

    const auto w = weights_of(hist);
    const Scores original = scores_of(def);
    const int m = search.magnitude;

    // Inclusive range per variable.
    std::array<std::pair<int, int>, 4> range;
    for (std::size_t i = 0; i < 4; ++i) range[i] = {original[i], original[i]};
    if (search.cluster.positive && w.cluster.positive > 0) range[0] = {1, m};
    if (search.cluster.negative && w.cluster.negative > 0) range[1] = {-m, -1};
    const std::array<BallKind, 2> tap_kinds{BallKind::Positive, BallKind::Negative};
    for (std::size_t t = 0; t < 2; ++t) {
        const BallKind k = tap_kinds[t];
        if (search.tap[k] && w.tap[k] > 0 && fires(def.tap_action[k]))
            range[2 + t] = original[2 + t] <= 0 ? std::pair{-m, 0} : std::pair{0, m};
    }

    struct Candidate {
        Scores s;
        int distance;
        double imbalance;
    };
    std::vector<Candidate> candidates;
    Scores s{};
    for (s[0] = range[0].first; s[0] <= range[0].second; ++s[0])
        for (s[1] = range[1].first; s[1] <= range[1].second; ++s[1])
            for (s[2] = range[2].first; s[2] <= range[2].second; ++s[2])
                for (s[3] = range[3].first; s[3] <= range[3].second; ++s[3]) {
                    int dist = 0;
                    for (std::size_t i = 0; i < 4; ++i) dist += std::abs(s[i] - original[i]);
                    const auto [gain, loss] = totals(w, s);
                    candidates.push_back({s, dist, imbalance_of(gain, loss, w.games)});
                }

    auto magnitude_before = [](const Scores& a, const Scores& b) {
        for (std::size_t i = 0; i < 4; ++i) {
            if (std::abs(a[i]) != std::abs(b[i])) return std::abs(a[i]) > std::abs(b[i]);
        }
        return false;
    };
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return magnitude_before(a.s, b.s);
    });

    const Candidate* chosen = nullptr;
    for (const auto& c : candidates) {
        if (c.imbalance <= tolerance) {
            chosen = &c;
            break;
        }
    }
    if (!chosen) {
        // Candidates are already in tie-break order, so the first minimum wins.
        chosen = &*std::min_element(candidates.begin(), candidates.end(),
                                    [](const Candidate& a, const Candidate& b) { return a.imbalance < b.imbalance; });
    }

    GameDefinition out = def;
    out.cluster_score_per_ball = {chosen->s[0], chosen->s[1]};
    out.tap_score = {chosen->s[2], chosen->s[3]};
    return {out, evaluate_balance(out, hist)};
}

bool playable(const GameDefinition& def, const FrequencyHistogram& hist) {
    for (BallKind k : kAllKinds) {
        if (def.max_balls[k] > 0 && hist.bursts(k) == 0) return false;
    }
    return true;
}

GenerateResult generate_balanced(Rng& rng, const Constraints& constraints, const GeneratorConfig& cfg) {
    if (cfg.max_attempts < 1) throw GeneratorError("max_attempts", "max_attempts must be >= 1");
    std::optional<GenerateResult> best;
    bool best_playable = false;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        const GameDefinition sampled = sample_definition(rng, constraints);
        const std::uint64_t estimate_seed = rng.next();
        auto hist = estimate_frequencies(sampled, cfg.n_games, PolicyId::Novice, estimate_seed, cfg.estimate);
        auto balanced = balance_scores(sampled, hist, cfg.tolerance);
        const bool ok = playable(balanced.definition, hist);

        GenerateResult current{std::move(balanced.definition), balanced.report, std::move(hist), attempt, false};
        if (ok && current.report.imbalance <= cfg.tolerance) {
            current.accepted = true;
            return current;
        }
        const bool better = !best || (ok && !best_playable) ||
                            (ok == best_playable && current.report.imbalance < best->report.imbalance);
        if (better) {
            best = std::move(current);
            best_playable = ok;
        }
    }
    best->attempts = cfg.max_attempts;
    return *best;
}

std::string to_json(const FrequencyHistogram& h) {
    using nlohmann::json;
    json counts = json::array();
    for (const auto& [key, count] : h.counts)
        counts.push_back({{"kind", to_string(key.first)}, {"size", key.second}, {"count", count}});
    json o{{"schema", "fluidic-histogram/1"},
           {"counts", counts},
           {"tap_counts", {{"positive", h.tap_counts.positive}, {"negative", h.tap_counts.negative}}},
           {"games_simulated", h.games_simulated},
           {"total_steps", h.total_steps},
           {"dynamics_hash", to_hex(h.dynamics_hash)}};
    return o.dump(2) + "\n";
}

std::string to_json(const BalanceReport& r) {
    nlohmann::json o{{"schema", "fluidic-balance/1"},
                     {"expected_positive", r.expected_positive},
                     {"expected_negative", r.expected_negative},
                     {"imbalance", r.imbalance},
                     {"unplayable", r.unplayable}};
    return o.dump(2) + "\n";
}

} // namespace fluidic
