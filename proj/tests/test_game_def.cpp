#include "fluidic/error.hpp"
#include "fluidic/game_def.hpp"
#include "fluidic/generator.hpp"
#include "fluidic/grid_catalog.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <set>

using namespace fluidic;

namespace {

bool has_code(const std::vector<Violation>& v, const std::string& code) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == code; });
}

std::string error_code(const std::string& text) {
    try {
        deserialize(text);
    } catch (const DefinitionError& e) {
        return e.code();
    }
    return "";
}

} // namespace

TEST_SUITE("game_def") {

TEST_CASE("every preset validates") {
    const auto names = preset_names();
    CHECK(names == std::vector<std::string>{"let_it_snow", "rain_rain", "jack_frost", "slush_slosh"});
    for (const auto& n : names) {
        CAPTURE(n);
        CHECK(validate(preset(n)).empty());
        CHECK(preset(n).name == n);
    }
    CHECK_THROWS_AS(preset("blizzard"), DefinitionError);
}

TEST_CASE("let_it_snow rules") {
    const auto d = preset("let_it_snow");
    CHECK(d.cluster_threshold == PerKind<int>{4, 4});
    CHECK(d.cluster_score_per_ball == PerKind<int>{1, -1});
    CHECK(d.tap_action.negative == TapAction::Explode);
    CHECK(d.tap_score.negative == -1);
    CHECK(d.tap_action.positive == TapAction::None);
    CHECK(d.max_balls.positive == 20);
    CHECK(d.max_balls.negative == 20);
    CHECK(d.exit_regions.empty());
    REQUIRE(d.grid.catalog_id);
    CHECK(*d.grid.catalog_id == "bins");
}

TEST_CASE("variants differ from let_it_snow in at least two facets") {
    const auto base = preset("let_it_snow");
    for (const auto* n : {"rain_rain", "jack_frost", "slush_slosh"}) {
        const auto d = preset(n);
        int facets = 0;
        facets += d.cluster_threshold != base.cluster_threshold;
        facets += d.cluster_score_per_ball != base.cluster_score_per_ball || d.tap_score != base.tap_score;
        facets += d.ball_radius != base.ball_radius;
        facets += d.max_balls != base.max_balls;
        facets += d.grid != base.grid;
        facets += d.physics != base.physics;
        facets += d.spawn_regions != base.spawn_regions;
        facets += d.exit_regions != base.exit_regions;
        facets += d.tap_action != base.tap_action;
        CAPTURE(n);
        CHECK(facets >= 2);
    }
}

TEST_CASE("violation codes") {
    auto d = preset("let_it_snow");

    SUBCASE("threshold") {
        d.cluster_threshold.positive = 1;
        CHECK(has_code(validate(d), "threshold_below_2"));
    }
    SUBCASE("spawn interval narrower than a ball") {
        d.spawn_regions.positive = {{2.0, 2.5}};
        CHECK(has_code(validate(d), "spawn_too_narrow"));
    }
    SUBCASE("spawn interval exactly one diameter is not wider") {
        d.ball_radius.positive = 0.375;
        d.spawn_regions.positive = {{2.0, 2.75}};
        CHECK(has_code(validate(d), "spawn_too_narrow"));
        d.spawn_regions.positive = {{2.0, 2.875}};
        CHECK(validate(d).empty());
        d.spawn_regions.positive = {{2.0, 2.75}};
        CHECK(has_code(validate(d), "spawn_too_narrow"));
    }
    SUBCASE("spawn outside the field") {
        d.spawn_regions.negative = {{8.0, 9.5}};
        CHECK(has_code(validate(d), "spawn_out_of_bounds"));
    }
    SUBCASE("radius") {
        d.ball_radius.negative = 0.0;
        CHECK(has_code(validate(d), "radius_nonpositive"));
    }
    SUBCASE("cap") {
        d.max_balls.negative = -1;
        CHECK(has_code(validate(d), "max_balls_negative"));
    }
    SUBCASE("spawn rate") {
        d.spawn_rate = 0.0;
        CHECK(has_code(validate(d), "spawn_rate_nonpositive"));
    }
    SUBCASE("duration") {
        d.game_duration = -1.0;
        CHECK(has_code(validate(d), "duration_negative"));
    }
    SUBCASE("physics ranges") {
        d.physics.restitution = 1.5;
        d.physics.noise_amplitude = -0.1;
        d.physics.contact_slop = -0.1;
        const auto v = validate(d);
        CHECK(has_code(v, "restitution_out_of_range"));
        CHECK(has_code(v, "noise_negative"));
        CHECK(has_code(v, "slop_negative"));
    }
    SUBCASE("segments") {
        d.grid = {{{{1.0, 1.0}, {10.0, 1.0}}}, std::nullopt};
        CHECK(has_code(validate(d), "segment_out_of_bounds"));
    }
    SUBCASE("catalog id must match the catalog") {
        d.grid.segments.pop_back();
        CHECK(has_code(validate(d), "grid_catalog_mismatch"));
        d.grid.catalog_id = "nope";
        CHECK(has_code(validate(d), "grid_catalog_unknown"));
    }
    SUBCASE("overlapping exits") {
        d.exit_regions = {{Edge::Bottom, {1.0, 3.0}, {1, 1}}, {Edge::Bottom, {2.0, 4.0}, {1, 1}}};
        CHECK(has_code(validate(d), "exit_overlap"));
        d.exit_regions[1].edge = Edge::Left;
        CHECK(validate(d).empty());
        d.exit_regions[1].span = {2.0, 17.0};
        CHECK(has_code(validate(d), "exit_out_of_bounds"));
    }
    SUBCASE("violations are data and require_valid throws the first") {
        d.cluster_threshold = {0, 1};
        CHECK(validate(d).size() == 2);
        try {
            require_valid(d);
            FAIL("expected a DefinitionError");
        } catch (const DefinitionError& e) {
            CHECK(e.code() == "threshold_below_2");
        }
    }
}

TEST_CASE("grid catalog") {
    const auto ids = grid_catalog_ids();
    CHECK(ids.size() >= 6);
    CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());
    REQUIRE(grid_from_catalog("empty"));
    CHECK(grid_from_catalog("empty")->segments.empty());
    REQUIRE(grid_from_catalog("bins"));
    CHECK(grid_from_catalog("bins")->segments.size() >= 2);
    std::vector<std::vector<Segment>> layouts;
    for (const auto& id : ids) {
        const auto g = grid_from_catalog(id);
        REQUIRE(g);
        CHECK(*g->catalog_id == id);
        for (const auto& s : g->segments) {
            CHECK(inside_field(s.a));
            CHECK(inside_field(s.b));
        }
        layouts.push_back(g->segments);
    }
    for (std::size_t i = 0; i < layouts.size(); ++i)
        for (std::size_t j = i + 1; j < layouts.size(); ++j) CHECK(layouts[i] != layouts[j]);
    CHECK_FALSE(grid_from_catalog("nope"));
}

TEST_CASE("round trip of presets") {
    for (const auto& n : preset_names()) {
        const auto d = preset(n);
        CHECK(deserialize(serialize(d)) == d);
    }
}

TEST_CASE("missing field") {
    auto j = nlohmann::json::parse(serialize(preset("let_it_snow")));
    j.erase("max_balls");
    CHECK(error_code(j.dump()) == "missing_field");

    auto k = nlohmann::json::parse(serialize(preset("let_it_snow")));
    k["physics"].erase("gravity");
    CHECK(error_code(k.dump()) == "missing_field");
}

TEST_CASE("schema errors") {
    const auto good = serialize(preset("let_it_snow"));
    CHECK(error_code("{ not json") == "malformed");
    CHECK(error_code("[]") == "wrong_type");

    auto j = nlohmann::json::parse(good);
    j["schema"] = "fluidic-game/2";
    CHECK(error_code(j.dump()) == "schema_version");

    j = nlohmann::json::parse(good);
    j["max_balls"]["positive"] = "twenty";
    CHECK(error_code(j.dump()) == "wrong_type");

    j = nlohmann::json::parse(good);
    j["cluster_threshold"]["positive"] = 4.5;
    CHECK(error_code(j.dump()) == "wrong_type");

    j = nlohmann::json::parse(good);
    j["tap_action"]["negative"] = "vaporize";
    CHECK(error_code(j.dump()) == "wrong_type");

    j = nlohmann::json::parse(good);
    j["cluster_threshold"]["positive"] = 1;
    CHECK(error_code(j.dump()) == "threshold_below_2");
    // parse_definition only checks the schema.
    CHECK(parse_definition(j.dump()).cluster_threshold.positive == 1);
}

TEST_CASE("canonical bytes") {
    const auto a = preset("jack_frost");
    GameDefinition b = a; // structurally equal, separately built
    b.spawn_regions.negative = std::vector<Interval>(a.spawn_regions.negative.begin(), a.spawn_regions.negative.end());
    CHECK(serialize(a) == serialize(b));
    CHECK(serialize(a) == serialize(deserialize(serialize(a))));

    // Key order and whitespace in the input do not matter.
    auto j = nlohmann::json::parse(serialize(a));
    CHECK(serialize(deserialize(j.dump())) == serialize(a));
    CHECK(definition_hash(a) == definition_hash(b));
}

TEST_CASE("hashes") {
    const auto a = preset("let_it_snow");
    auto b = a;
    b.cluster_score_per_ball.positive = 3;
    b.name = "renamed";
    b.seed_hint = 99;
    CHECK(definition_hash(a) != definition_hash(b));
    CHECK(dynamics_hash(a) == dynamics_hash(b));
    b.physics.gravity = 11.0;
    CHECK(dynamics_hash(a) != dynamics_hash(b));
}

TEST_CASE("round trip of 1000 sampled definitions") {
    Rng rng(20240611);
    for (int i = 0; i < 1000; ++i) {
        const auto d = sample_definition(rng);
        const auto text = serialize(d);
        const auto back = deserialize(text);
        CHECK(back == d);
        CHECK(serialize(back) == text);
    }
}

}
