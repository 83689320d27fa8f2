#include "fluidic/game_def.hpp"

#include "fluidic/error.hpp"
#include "fluidic/grid_catalog.hpp"
#include "fluidic/hash.hpp"

#include <json.hpp>

#include <cmath>

namespace fluidic {

using nlohmann::json;

std::string_view to_string(BallKind k) {
    return k == BallKind::Positive ? "positive" : "negative";
}

std::optional<BallKind> ball_kind_from_string(std::string_view s) {
    if (s == "positive") return BallKind::Positive;
    if (s == "negative") return BallKind::Negative;
    return std::nullopt;
}

std::string_view to_string(TapAction a) {
    switch (a) {
    case TapAction::Explode: return "explode";
    case TapAction::Destroy: return "destroy";
    case TapAction::Impulse: return "impulse";
    case TapAction::None: return "none";
    }
    return "none";
}

std::optional<TapAction> tap_action_from_string(std::string_view s) {
    for (auto a : {TapAction::Explode, TapAction::Destroy, TapAction::Impulse, TapAction::None}) {
        if (to_string(a) == s) return a;
    }
    return std::nullopt;
}

std::string_view to_string(Edge e) {
    switch (e) {
    case Edge::Bottom: return "bottom";
    case Edge::Left: return "left";
    case Edge::Right: return "right";
    }
    return "bottom";
}

std::optional<Edge> edge_from_string(std::string_view s) {
    for (auto e : {Edge::Bottom, Edge::Left, Edge::Right}) {
        if (to_string(e) == s) return e;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

double edge_length(Edge e) { return e == Edge::Bottom ? kFieldWidth : kFieldHeight; }

bool finite(double v) { return std::isfinite(v); }

} // namespace

std::vector<Violation> validate(const GameDefinition& def) {
    std::vector<Violation> out;
    auto fail = [&](std::string code, std::string detail) {
        out.push_back({std::move(code), std::move(detail)});
    };

    for (BallKind k : kAllKinds) {
        const std::string kind(to_string(k));
        if (def.cluster_threshold[k] < 2)
            fail("threshold_below_2", kind + " cluster threshold is " +
                                          std::to_string(def.cluster_threshold[k]));
        if (!finite(def.ball_radius[k]) || def.ball_radius[k] <= 0.0)
            fail("radius_nonpositive", kind + " ball radius must be > 0");
        if (def.max_balls[k] < 0) fail("max_balls_negative", kind + " cap must be >= 0");

        const auto& regions = def.spawn_regions[k];
        if (def.max_balls[k] > 0 && regions.empty())
            fail("spawn_regions_empty", kind + " can appear but has no spawn region");
        for (const auto& r : regions) {
            if (!finite(r.lo) || !finite(r.hi) || r.lo < 0.0 || r.hi > kFieldWidth || r.lo > r.hi) {
                fail("spawn_out_of_bounds", kind + " spawn interval outside the playfield");
            } else if (finite(def.ball_radius[k]) && r.width() <= 2.0 * def.ball_radius[k]) {
                fail("spawn_too_narrow", kind + " spawn interval is not wider than the ball diameter");
            }
        }
    }

    const auto& p = def.physics;
    if (!finite(p.gravity)) fail("non_finite", "gravity must be finite");
    if (!finite(p.restitution) || p.restitution < 0.0 || p.restitution > 1.0)
        fail("restitution_out_of_range", "restitution must lie in [0, 1]");
    if (!finite(p.noise_amplitude) || p.noise_amplitude < 0.0)
        fail("noise_negative", "noise amplitude must be >= 0");
    if (!finite(p.contact_slop) || p.contact_slop < 0.0)
        fail("slop_negative", "contact slop must be >= 0");

    if (!finite(def.spawn_rate) || def.spawn_rate <= 0.0)
        fail("spawn_rate_nonpositive", "spawn rate must be > 0");
    if (!finite(def.game_duration) || def.game_duration < 0.0)
        fail("duration_negative", "game duration must be >= 0");

    for (const auto& s : def.grid.segments) {
        if (!finite(s.a.x) || !finite(s.a.y) || !finite(s.b.x) || !finite(s.b.y) ||
            !inside_field(s.a) || !inside_field(s.b))
            fail("segment_out_of_bounds", "grid segment endpoint outside the playfield");
    }
    if (def.grid.catalog_id) {
        auto known = grid_from_catalog(*def.grid.catalog_id);
        if (!known)
            fail("grid_catalog_unknown", "unknown grid layout '" + *def.grid.catalog_id + "'");
        else if (known->segments != def.grid.segments)
            fail("grid_catalog_mismatch",
                 "segments differ from catalog layout '" + *def.grid.catalog_id + "'");
    }

    for (std::size_t i = 0; i < def.exit_regions.size(); ++i) {
        const auto& e = def.exit_regions[i];
        if (!finite(e.span.lo) || !finite(e.span.hi) || e.span.lo >= e.span.hi ||
            e.span.lo < 0.0 || e.span.hi > edge_length(e.edge))
            fail("exit_out_of_bounds", "exit region " + std::to_string(i) + " is not a valid edge span");
        for (std::size_t j = i + 1; j < def.exit_regions.size(); ++j) {
            const auto& f = def.exit_regions[j];
            if (e.edge == f.edge && e.span.lo < f.span.hi && f.span.lo < e.span.hi)
                fail("exit_overlap",
                     "exit regions " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
    }
    return out;
}

void require_valid(const GameDefinition& def) {
    auto v = validate(def);
    if (!v.empty()) throw DefinitionError(v.front().code, v.front().detail);
}

// ---------------------------------------------------------------------------
// Presets

namespace {

GameDefinition let_it_snow() {
    GameDefinition d;
    d.name = "let_it_snow";
    d.cluster_threshold = {4, 4};
    d.cluster_score_per_ball = {1, -1};
    d.tap_action = {TapAction::None, TapAction::Explode};
    d.tap_score = {0, -1};
    d.ball_radius = {0.35, 0.35};
    d.max_balls = {20, 20};
    d.grid = *grid_from_catalog("bins");
    d.physics = {10.0, 0.2, 0.3, 0.05};
    d.spawn_regions = {{{0.0, 9.0}}, {{0.0, 9.0}}};
    d.spawn_rate = 2.0;
    d.game_duration = 120.0;
    return d;
}

// The three variants below carry invented parameter values. Only their
// names come from the original app.
GameDefinition rain_rain() {
    GameDefinition d;
    d.name = "rain_rain";
    d.cluster_threshold = {3, 5};
    d.cluster_score_per_ball = {1, -2};
    d.tap_action = {TapAction::None, TapAction::Destroy};
    d.tap_score = {0, -1};
    d.ball_radius = {0.4, 0.35};
    d.max_balls = {18, 25};
    d.grid = *grid_from_catalog("funnel");
    d.physics = {12.0, 0.1, 0.2, 0.05};
    d.spawn_regions = {{{0.0, 4.5}}, {{0.0, 9.0}}};
    d.spawn_rate = 3.0;
    d.game_duration = 90.0;
    return d;
}

GameDefinition jack_frost() {
    GameDefinition d;
    d.name = "jack_frost";
    d.cluster_threshold = {4, 3};
    d.cluster_score_per_ball = {2, -1};
    d.tap_action = {TapAction::Impulse, TapAction::Explode};
    d.tap_score = {0, -1};
    d.ball_radius = {0.5, 0.4};
    d.max_balls = {16, 16};
    d.grid = *grid_from_catalog("pegs");
    d.physics = {9.0, 0.6, 0.6, 0.05};
    d.spawn_regions = {{{1.0, 8.0}}, {{0.0, 3.0}, {6.0, 9.0}}};
    d.spawn_rate = 2.0;
    d.game_duration = 120.0;
    return d;
}

GameDefinition slush_slosh() {
    GameDefinition d;
    d.name = "slush_slosh";
    d.cluster_threshold = {4, 4};
    d.cluster_score_per_ball = {1, -1};
    d.tap_action = {TapAction::None, TapAction::Impulse};
    d.tap_score = {0, 0};
    d.ball_radius = {0.45, 0.45};
    d.max_balls = {20, 15};
    d.grid = *grid_from_catalog("ramps");
    d.physics = {10.0, 0.3, 0.3, 0.05};
    d.spawn_regions = {{{0.0, 9.0}}, {{0.0, 9.0}}};
    d.exit_regions = {ExitRegion{Edge::Bottom, {3.5, 5.5}, {-1, 2}}};
    d.spawn_rate = 2.0;
    d.game_duration = 120.0;
    return d;
}

} // namespace

std::vector<std::string> preset_names() {
    return {"let_it_snow", "rain_rain", "jack_frost", "slush_slosh"};
}

GameDefinition preset(std::string_view name) {
    if (name == "let_it_snow") return let_it_snow();
    if (name == "rain_rain") return rain_rain();
    if (name == "jack_frost") return jack_frost();
    if (name == "slush_slosh") return slush_slosh();
    throw DefinitionError("unknown_preset", "no preset named '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

template <typename T, typename F>
json per_kind_json(const PerKind<T>& v, F&& conv) {
    return json{{"positive", conv(v.positive)}, {"negative", conv(v.negative)}};
}

auto identity = [](const auto& v) { return v; };

json interval_list(const std::vector<Interval>& v) {
    json a = json::array();
    for (const auto& i : v) a.push_back(json::array({i.lo, i.hi}));
    return a;
}

json to_json(const GameDefinition& d) {
    json segs = json::array();
    for (const auto& s : d.grid.segments) segs.push_back(json::array({s.a.x, s.a.y, s.b.x, s.b.y}));
    json grid{{"segments", segs}};
    grid["catalog_id"] = d.grid.catalog_id ? json(*d.grid.catalog_id) : json(nullptr);

    json exits = json::array();
    for (const auto& e : d.exit_regions) {
        exits.push_back(json{{"edge", to_string(e.edge)},
                             {"from", e.span.lo},
                             {"to", e.span.hi},
                             {"score", per_kind_json(e.score, identity)}});
    }

    return json{
        {"schema", kDefinitionSchema},
        {"name", d.name},
        {"seed_hint", d.seed_hint},
        {"cluster_threshold", per_kind_json(d.cluster_threshold, identity)},
        {"cluster_score_per_ball", per_kind_json(d.cluster_score_per_ball, identity)},
        {"tap_action", per_kind_json(d.tap_action, [](TapAction a) { return to_string(a); })},
        {"tap_score", per_kind_json(d.tap_score, identity)},
        {"ball_radius", per_kind_json(d.ball_radius, identity)},
        {"max_balls", per_kind_json(d.max_balls, identity)},
        {"grid", grid},
        {"physics",
         {{"gravity", d.physics.gravity},
          {"restitution", d.physics.restitution},
          {"noise_amplitude", d.physics.noise_amplitude},
          {"contact_slop", d.physics.contact_slop}}},
        {"spawn_regions", per_kind_json(d.spawn_regions, interval_list)},
        {"exit_regions", exits},
        {"spawn_rate", d.spawn_rate},
        {"game_duration", d.game_duration},
    };
}

// Reader that turns schema problems into DefinitionError codes.
class Reader {
public:
    explicit Reader(const json& j, std::string path = "") : j_(j), path_(std::move(path)) {}

    Reader at(const char* key) const {
        if (!j_.is_object()) wrong("object");
        auto it = j_.find(key);
        if (it == j_.end())
            throw DefinitionError("missing_field", "missing field '" + join(key) + "'");
        return Reader(*it, join(key));
    }

    Reader at(std::size_t i) const { return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }

    bool is_null() const { return j_.is_null(); }

    double number() const {
        if (!j_.is_number()) wrong("number");
        return j_.get<double>();
    }

    int integer() const {
        if (!j_.is_number_integer()) wrong("integer");
        auto v = j_.get<std::int64_t>();
        if (v < INT32_MIN || v > INT32_MAX) wrong("32-bit integer");
        return static_cast<int>(v);
    }

    std::uint64_t u64() const {
        if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0))
            wrong("unsigned integer");
        return j_.get<std::uint64_t>();
    }

    std::string string() const {
        if (!j_.is_string()) wrong("string");
        return j_.get<std::string>();
    }

    std::size_t array_size(std::size_t exact = 0) const {
        if (!j_.is_array()) wrong("array");
        if (exact != 0 && j_.size() != exact) wrong("array of " + std::to_string(exact));
        return j_.size();
    }

    template <typename F>
    auto per_kind(F&& conv) const {
        using T = decltype(conv(at("positive")));
        return PerKind<T>{conv(at("positive")), conv(at("negative"))};
    }

    [[noreturn]] void wrong(const std::string& what) const {
        throw DefinitionError("wrong_type", "field '" + path_ + "' must be " + what);
    }

private:
    std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& j_;
    std::string path_;
};

std::vector<Interval> read_intervals(const Reader& r) {
    std::vector<Interval> out;
    const auto n = r.array_size();
    for (std::size_t i = 0; i < n; ++i) {
        auto pair = r.at(i);
        pair.array_size(2);
        out.push_back({pair.at(std::size_t{0}).number(), pair.at(std::size_t{1}).number()});
    }
    return out;
}

GameDefinition from_json(const json& j) {
    Reader root(j);
    if (!j.is_object()) root.wrong("object");
    const auto schema = root.at("schema").string();
    if (schema != kDefinitionSchema)
        throw DefinitionError("schema_version", "unsupported schema '" + schema + "'");

    GameDefinition d;
    d.name = root.at("name").string();
    d.seed_hint = root.at("seed_hint").u64();
    auto as_int = [](const Reader& r) { return r.integer(); };
    auto as_num = [](const Reader& r) { return r.number(); };
    d.cluster_threshold = root.at("cluster_threshold").per_kind(as_int);
    d.cluster_score_per_ball = root.at("cluster_score_per_ball").per_kind(as_int);
    d.tap_action = root.at("tap_action").per_kind([](const Reader& r) {
        auto a = tap_action_from_string(r.string());
        if (!a) r.wrong("one of explode|destroy|impulse|none");
        return *a;
    });
    d.tap_score = root.at("tap_score").per_kind(as_int);
    d.ball_radius = root.at("ball_radius").per_kind(as_num);
    d.max_balls = root.at("max_balls").per_kind(as_int);

    auto grid = root.at("grid");
    auto segs = grid.at("segments");
    for (std::size_t i = 0, n = segs.array_size(); i < n; ++i) {
        auto s = segs.at(i);
        s.array_size(4);
        d.grid.segments.push_back({{s.at(std::size_t{0}).number(), s.at(std::size_t{1}).number()},
                                   {s.at(std::size_t{2}).number(), s.at(std::size_t{3}).number()}});
    }
    auto cat = grid.at("catalog_id");
    if (!cat.is_null()) d.grid.catalog_id = cat.string();

    auto phys = root.at("physics");
    d.physics.gravity = phys.at("gravity").number();
    d.physics.restitution = phys.at("restitution").number();
    d.physics.noise_amplitude = phys.at("noise_amplitude").number();
    d.physics.contact_slop = phys.at("contact_slop").number();

    d.spawn_regions = root.at("spawn_regions").per_kind(read_intervals);

    auto exits = root.at("exit_regions");
    for (std::size_t i = 0, n = exits.array_size(); i < n; ++i) {
        auto e = exits.at(i);
        ExitRegion region;
        auto edge_reader = e.at("edge");
        auto edge = edge_from_string(edge_reader.string());
        if (!edge) edge_reader.wrong("one of bottom|left|right");
        region.edge = *edge;
        region.span = {e.at("from").number(), e.at("to").number()};
        region.score = e.at("score").per_kind(as_int);
        d.exit_regions.push_back(region);
    }

    d.spawn_rate = root.at("spawn_rate").number();
    d.game_duration = root.at("game_duration").number();
    return d;
}

} // namespace

std::string serialize(const GameDefinition& def) {
    return to_json(def).dump(2) + "\n";
}

GameDefinition parse_definition(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DefinitionError("malformed", e.what());
    }
    return from_json(j);
}

GameDefinition deserialize(std::string_view text) {
    auto def = parse_definition(text);
    require_valid(def);
    return def;
}

std::uint64_t definition_hash(const GameDefinition& def) { return fnv1a(serialize(def)); }

std::uint64_t dynamics_hash(const GameDefinition& def) {
    GameDefinition d = def;
    d.name.clear();
    d.seed_hint = 0;
    d.cluster_score_per_ball = {};
    d.tap_score = {};
    for (auto& e : d.exit_regions) e.score = {};
    return definition_hash(d);
}

} // namespace fluidic
