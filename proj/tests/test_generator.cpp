#include "fluidic/error.hpp"
#include "fluidic/generator.hpp"
#include "fluidic/grid_catalog.hpp"
#include "fluidic/harness.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <functional>

using namespace fluidic;

namespace {

bool in(IntRange r, int v) { return v >= r.lo && v <= r.hi; }
bool in(RealRange r, double v) { return v >= r.lo && v <= r.hi; }

FrequencyHistogram histogram_for(const GameDefinition& d, std::map<std::pair<BallKind, int>, std::int64_t> counts,
                                 PerKind<std::int64_t> taps = {}, int games = 10) {
    FrequencyHistogram h;
    h.counts = std::move(counts);
    h.tap_counts = taps;
    h.games_simulated = games;
    h.dynamics_hash = dynamics_hash(d);
    return h;
}

std::string code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

} // namespace

TEST_SUITE("generator") {

TEST_CASE("sampled definitions are valid and inside the constraints") {
    Rng rng(1);
    const Constraints c;
    for (int i = 0; i < 1000; ++i) {
        const auto d = sample_definition(rng, c);
        CHECK(validate(d).empty());
        for (BallKind k : kAllKinds) {
            CHECK(in(c.cluster_threshold[k], d.cluster_threshold[k]));
            CHECK(in(c.cluster_score_per_ball[k], d.cluster_score_per_ball[k]));
            CHECK(in(c.tap_score[k], d.tap_score[k]));
            CHECK(in(c.ball_radius[k], d.ball_radius[k]));
            CHECK(in(c.max_balls[k], d.max_balls[k]));
            const auto& actions = c.tap_actions[k];
            CHECK(std::find(actions.begin(), actions.end(), d.tap_action[k]) != actions.end());
        }
        CHECK(in(c.gravity, d.physics.gravity));
        CHECK(in(c.restitution, d.physics.restitution));
        CHECK(in(c.noise_amplitude, d.physics.noise_amplitude));
        CHECK(in(c.contact_slop, d.physics.contact_slop));
        CHECK(in(c.spawn_rate, d.spawn_rate));
        CHECK(in(c.game_duration, d.game_duration));
        REQUIRE(d.grid.catalog_id);
        CHECK(grid_from_catalog(*d.grid.catalog_id));
    }
}

TEST_CASE("pinned constraints reproduce the definition") {
    for (const auto& n : preset_names()) {
        const auto d = preset(n);
        Rng rng(5);
        CHECK(sample_definition(rng, Constraints::pinned(d)) == d);
    }
}

TEST_CASE("sampling is deterministic") {
    Rng a(77), b(77);
    for (int i = 0; i < 50; ++i) CHECK(serialize(sample_definition(a)) == serialize(sample_definition(b)));
}

TEST_CASE("unsatisfiable constraints") {
    Constraints c;
    c.cluster_threshold.positive = {1, 1};
    Rng rng(1);
    CHECK(code_of([&] { sample_definition(rng, c); }) == "unsatisfiable");
    Constraints e;
    e.max_balls.negative = {5, 2};
    CHECK(code_of([&] { sample_definition(rng, e); }) == "unsatisfiable");
}

TEST_CASE("a kind capped at zero never bursts") {
    auto d = preset("let_it_snow");
    d.max_balls.negative = 0;
    EstimateOptions opts;
    opts.horizon = 30.0;
    const auto h = estimate_frequencies(d, 6, PolicyId::Novice, 3, opts);
    CHECK(h.bursts(BallKind::Negative) == 0);
    CHECK(h.tap_counts.negative == 0);
    CHECK(h.bursts(BallKind::Positive) > 0);
}

TEST_CASE("estimates are deterministic and scheduling independent") {
    const auto d = preset("rain_rain");
    EstimateOptions opts;
    opts.horizon = 20.0;
    const auto a = estimate_frequencies(d, 8, PolicyId::Novice, 11, opts);
    opts.workers = 3;
    const auto b = estimate_frequencies(d, 8, PolicyId::Novice, 11, opts);
    opts.serial = true;
    const auto c = estimate_frequencies(d, 8, PolicyId::Novice, 11, opts);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a.games_simulated == 8);
    CHECK(a.total_steps == 8 * 1200);
    CHECK(a.dynamics_hash == dynamics_hash(d));
    CHECK_FALSE(a == estimate_frequencies(d, 8, PolicyId::Novice, 12, opts));
}

TEST_CASE("histogram matches an independent scan of replay logs") {
    for (const auto& name : {"let_it_snow", "jack_frost", "slush_slosh"}) {
        const auto d = preset(name);
        EstimateOptions opts;
        opts.horizon = 20.0;
        const int n = 4;
        const auto h = estimate_frequencies(d, n, PolicyId::Novice, 21, opts);

        FrequencyHistogram scan;
        for (int i = 0; i < n; ++i) {
            RunOptions run;
            run.policy = PolicyId::Novice;
            run.duration_override = std::min(20.0, d.game_duration);
            run.record_replay = true;
            const auto r = run_game(d, run, estimate_game_seed(21, i));
            for (const auto& t : replay_ticks(*r.replay)) {
                for (const auto& c : t.clusters.clusters) ++scan.counts[{c.kind, static_cast<int>(c.ids.size())}];
                for (const auto& tap : t.taps)
                    if (tap.fired()) ++scan.tap_counts[tap.kind];
                scan.total_steps += 1;
            }
        }
        CAPTURE(name);
        CHECK(h.counts == scan.counts);
        CHECK(h.tap_counts == scan.tap_counts);
        CHECK(h.total_steps == scan.total_steps);
    }
}

TEST_CASE("balance examples") {
    const auto d = preset("let_it_snow");

    SUBCASE("already balanced") {
        const auto h = histogram_for(d, {{{BallKind::Positive, 4}, 10}, {{BallKind::Negative, 4}, 10}});
        const auto r = balance_scores(d, h, 0.25);
        CHECK(r.definition == d);
        CHECK(r.report.imbalance == 0.0);
        CHECK(r.report.expected_positive == 4.0);
        CHECK(r.report.expected_negative == 4.0);
    }
    SUBCASE("loss side fixed") {
        const auto h = histogram_for(d, {{{BallKind::Positive, 4}, 10}, {{BallKind::Negative, 4}, 5}});
        BalanceSearch s;
        s.cluster.negative = false;
        const auto r = balance_scores(d, h, 0.25, s);
        CHECK(r.definition.cluster_score_per_ball == PerKind<int>{1, -1});
        CHECK(r.report.imbalance == 0.5);
    }
    SUBCASE("free search") {
        const auto h = histogram_for(d, {{{BallKind::Positive, 4}, 10}, {{BallKind::Negative, 4}, 5}});
        const auto r = balance_scores(d, h, 0.25);
        CHECK(r.definition.cluster_score_per_ball == PerKind<int>{1, -2});
        CHECK(r.report.imbalance == 0.0);
    }
    SUBCASE("no bursts") {
        const auto r = balance_scores(d, histogram_for(d, {}), 0.25);
        CHECK(r.report.unplayable);
        CHECK(r.definition == d);
        CHECK_FALSE(playable(d, histogram_for(d, {})));
    }
    SUBCASE("tolerance 1 keeps the scores") {
        const auto h = histogram_for(d, {{{BallKind::Positive, 5}, 30}, {{BallKind::Negative, 4}, 1}}, {0, 3});
        const auto r = balance_scores(d, h, 1.0);
        CHECK(r.definition == d);
    }
    SUBCASE("errors") {
        const auto h = histogram_for(d, {{{BallKind::Positive, 4}, 1}});
        CHECK(code_of([&] { balance_scores(d, h, 0.0); }) == "tolerance");
        CHECK(code_of([&] { balance_scores(d, h, 1.5); }) == "tolerance");
        auto other = d;
        other.physics.gravity = 12.0;
        CHECK(code_of([&] { balance_scores(other, h, 0.25); }) == "histogram_mismatch");
        const auto small = histogram_for(d, {{{BallKind::Positive, 2}, 1}});
        CHECK(code_of([&] { balance_scores(d, small, 0.25); }) == "histogram_mismatch");
        // Rescoring does not change the dynamics hash.
        auto rescored = d;
        rescored.cluster_score_per_ball.positive = 3;
        CHECK_NOTHROW(balance_scores(rescored, h, 0.25));
    }
}

TEST_CASE("balance search matches exhaustive enumeration") {
    Rng rng(808);
    const std::array<double, 5> tolerances{0.05, 0.1, 0.25, 0.5, 1.0};
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = sample_definition(rng);
        std::map<std::pair<BallKind, int>, std::int64_t> counts;
        for (BallKind k : kAllKinds) {
            if (rng.bernoulli(0.15)) continue;
            const int sizes = static_cast<int>(rng.between(1, 3));
            for (int s = 0; s < sizes; ++s)
                counts[{k, d.cluster_threshold[k] + static_cast<int>(rng.between(0, 3))}] += rng.between(1, 200);
        }
        PerKind<std::int64_t> taps{rng.bernoulli(0.5) ? rng.between(0, 300) : 0, rng.between(0, 300)};
        const int games = static_cast<int>(rng.between(1, 100));
        const auto h = histogram_for(d, counts, taps, games);
        BalanceSearch search;
        search.cluster = {rng.bernoulli(0.9), rng.bernoulli(0.9)};
        search.tap = {rng.bernoulli(0.8), rng.bernoulli(0.8)};
        const double tol = tolerances[rng.below(tolerances.size())];

        const auto got = balance_scores(d, h, tol, search);
        if (h.empty()) {
            CHECK(got.report.unplayable);
            continue;
        }

        oracle::BalanceInput in;
        for (auto& [key, c] : counts) in.cluster_weight[key.first] += c * key.second;
        in.tap_weight = taps;
        in.games = games;
        in.original = {d.cluster_score_per_ball.positive, d.cluster_score_per_ball.negative, d.tap_score.positive,
                       d.tap_score.negative};
        in.searched = {search.cluster.positive && in.cluster_weight.positive > 0,
                       search.cluster.negative && in.cluster_weight.negative > 0,
                       search.tap.positive && taps.positive > 0 && fires(d.tap_action.positive),
                       search.tap.negative && taps.negative > 0 && fires(d.tap_action.negative)};
        in.tap_nonpositive = {false, false, d.tap_score.positive <= 0, d.tap_score.negative <= 0};
        in.tolerance = tol;
        const auto want = oracle::balance(in);

        CAPTURE(trial);
        CHECK(got.definition.cluster_score_per_ball == PerKind<int>{want.scores[0], want.scores[1]});
        CHECK(got.definition.tap_score == PerKind<int>{want.scores[2], want.scores[3]});
        const double expected = static_cast<double>(std::llabs(want.gain - want.loss)) /
                                static_cast<double>(std::max({want.gain, want.loss, std::int64_t{games}}));
        CHECK(got.report.imbalance == expected);
        // Only scores change.
        auto rest = got.definition;
        rest.cluster_score_per_ball = d.cluster_score_per_ball;
        rest.tap_score = d.tap_score;
        CHECK(rest == d);
    }
}

TEST_CASE("generate_balanced") {
    GeneratorConfig cfg;
    cfg.n_games = 6;
    cfg.max_attempts = 3;
    cfg.estimate.horizon = 15.0;
    Rng a(3), b(3);
    const auto x = generate_balanced(a, {}, cfg);
    const auto y = generate_balanced(b, {}, cfg);
    CHECK(serialize(x.definition) == serialize(y.definition));
    CHECK(x.histogram == y.histogram);
    CHECK(validate(x.definition).empty());
    CHECK(x.attempts >= 1);
    CHECK(x.attempts <= 3);
    if (x.accepted) {
        CHECK(x.report.imbalance <= cfg.tolerance);
        CHECK(playable(x.definition, x.histogram));
    }
    const auto again = evaluate_balance(x.definition, x.histogram);
    CHECK(again.imbalance == x.report.imbalance);
    cfg.max_attempts = 0;
    CHECK(code_of([&] { generate_balanced(a, {}, cfg); }) == "max_attempts");
}

TEST_CASE("report json") {
    const auto d = preset("let_it_snow");
    const auto h = histogram_for(d, {{{BallKind::Positive, 4}, 3}}, {0, 2}, 5);
    const auto j = nlohmann::json::parse(to_json(h));
    CHECK(j["schema"] == "fluidic-histogram/1");
    CHECK(j["counts"][0]["size"] == 4);
    CHECK(j["tap_counts"]["negative"] == 2);
    const auto r = nlohmann::json::parse(to_json(evaluate_balance(d, h)));
    CHECK(r["expected_positive"] == doctest::Approx(12.0 / 5));
    CHECK(r["expected_negative"] == doctest::Approx(2.0 / 5));
}

}
