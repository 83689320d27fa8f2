#include "fluidic/physics.hpp"

#include "fluidic/error.hpp"
#include "fluidic/hash.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fluidic {

int GameState::count(BallKind k) const {
    return static_cast<int>(
        std::count_if(balls.begin(), balls.end(), [k](const Ball& b) { return b.kind == k; }));
}

const Ball* GameState::find(BallId id) const {
    auto it = std::lower_bound(balls.begin(), balls.end(), id,
                               [](const Ball& b, BallId v) { return b.id < v; });
    return it != balls.end() && it->id == id ? &*it : nullptr;
}

Ball* GameState::find(BallId id) {
    return const_cast<Ball*>(std::as_const(*this).find(id));
}

bool operator==(const GameState& a, const GameState& b) {
    const bool same_def = a.definition == b.definition ||
                          (a.definition && b.definition && *a.definition == *b.definition);
    return same_def && a.balls == b.balls && a.step == b.step && a.score == b.score &&
           a.rng == b.rng && a.spawns == b.spawns && a.next_id == b.next_id &&
           a.contact_signature == b.contact_signature && a.finished == b.finished;
}

std::uint64_t ContactGraph::signature() const {
    Fnv1a h;
    for (std::size_t i = 0; i < adjacency.size(); ++i) {
        for (auto j : adjacency[i]) {
            if (j > i) {
                h.u64(ids[i]);
                h.u64(ids[j]);
            }
        }
    }
    return h.value();
}

std::uint64_t duration_steps(double seconds) {
    if (seconds <= 0.0) return 0;
    return static_cast<std::uint64_t>(std::ceil(seconds / kFixedDt - 1e-9));
}

GameState init_state(std::shared_ptr<const GameDefinition> def, std::uint64_t seed) {
    if (!def) throw DefinitionError("missing_definition", "null definition");
    require_valid(*def);
    GameState s;
    s.rng = Rng(seed);
    for (BallKind k : kAllKinds) s.spawns.fill_remaining[k] = def->max_balls[k];
    s.definition = std::move(def);
    s.contact_signature = ContactGraph{}.signature();
    return s;
}

GameState init_state(const GameDefinition& def, std::uint64_t seed) {
    return init_state(std::make_shared<const GameDefinition>(def), seed);
}

bool remove_ball(GameState& state, BallId id) {
    auto it = std::lower_bound(state.balls.begin(), state.balls.end(), id,
                               [](const Ball& b, BallId v) { return b.id < v; });
    if (it == state.balls.end() || it->id != id) return false;
    state.balls.erase(it);
    return true;
}

BallId place_ball(GameState& state, BallKind k, Vec2 p, Vec2 v) {
    const BallId id = state.next_id++;
    state.balls.push_back({id, k, p, v, state.def().ball_radius[k]});
    return id;
}

double total_energy(const GameState& state) {
    const double g = state.def().physics.gravity;
    double e = 0.0;
    for (const auto& b : state.balls) e += b.mass() * (0.5 * b.velocity.norm2() + g * b.position.y);
    return e;
}

// ---------------------------------------------------------------------------
// Contact resolution

void resolve_pair(Ball& a, Ball& b, double restitution) {
    const Vec2 d = b.position - a.position;
    const double reach = a.radius + b.radius;
    const double dist2 = d.norm2();
    if (dist2 >= reach * reach) return;

    const double dist = std::sqrt(dist2);
    // Coincident centres: separate along +x so the outcome stays deterministic.
    const Vec2 n = dist > 1e-12 ? d * (1.0 / dist) : Vec2{1.0, 0.0};
    const double inv_a = 1.0 / a.mass();
    const double inv_b = 1.0 / b.mass();
    const double inv_sum = inv_a + inv_b;

    // Mass-weighted projection leaves the pair's centre of mass, and hence
    // its potential energy, unchanged.
    const double depth = reach - dist;
    a.position -= n * (depth * inv_a / inv_sum);
    b.position += n * (depth * inv_b / inv_sum);

    const double vn = (b.velocity - a.velocity).dot(n);
    if (vn < 0.0) {
        const double j = -(1.0 + restitution) * vn / inv_sum;
        a.velocity -= n * (j * inv_a);
        b.velocity += n * (j * inv_b);
    }
}

void resolve_static(Ball& ball, Vec2 normal, double depth, double restitution, double gravity) {
    if (depth <= 0.0) return;
    ball.position += normal * depth;

    const double vn = ball.velocity.dot(normal);
    if (vn < 0.0) ball.velocity -= normal * ((1.0 + restitution) * vn);

    // Pushing a ball out of a static surface can lift it. Pay for the lift
    // from kinetic energy so bounces never gain energy.
    const double lift = gravity * normal.y * depth;
    if (lift > 0.0) {
        const double ke = 0.5 * ball.velocity.norm2();
        if (ke > 0.0) {
            const double remaining = std::max(0.0, ke - lift);
            ball.velocity = ball.velocity * std::sqrt(remaining / ke);
        }
    }
}

namespace {

bool in_exit_span(const GameDefinition& def, Edge edge, double along) {
    for (const auto& e : def.exit_regions) {
        if (e.edge == edge && along >= e.span.lo && along <= e.span.hi) return true;
    }
    return false;
}

void resolve_boundaries(const GameDefinition& def, Ball& b) {
    const auto& p = def.physics;
    const double r = b.radius;
    if (b.position.y < r && !in_exit_span(def, Edge::Bottom, b.position.x))
        resolve_static(b, {0.0, 1.0}, r - b.position.y, p.restitution, p.gravity);
    if (b.position.x < r && !in_exit_span(def, Edge::Left, b.position.y))
        resolve_static(b, {1.0, 0.0}, r - b.position.x, p.restitution, p.gravity);
    if (b.position.x > kFieldWidth - r && !in_exit_span(def, Edge::Right, b.position.y))
        resolve_static(b, {-1.0, 0.0}, b.position.x - (kFieldWidth - r), p.restitution, p.gravity);

    // Open top: balls enter from just above the edge and may not rise past it.
    const double ceiling = kFieldHeight + r;
    if (b.position.y > ceiling) {
        b.position.y = ceiling;
        if (b.velocity.y > 0.0) b.velocity.y = -p.restitution * b.velocity.y;
    }

    for (const auto& s : def.grid.segments) {
        const Vec2 c = closest_point(s, b.position);
        const Vec2 d = b.position - c;
        const double dist2 = d.norm2();
        if (dist2 >= r * r) continue;
        const double dist = std::sqrt(dist2);
        Vec2 n;
        if (dist > 1e-12) {
            n = d * (1.0 / dist);
        } else {
            const Vec2 ab = s.b - s.a;
            const double len = ab.norm();
            n = len > 0.0 ? Vec2{-ab.y / len, ab.x / len} : Vec2{0.0, 1.0};
        }
        resolve_static(b, n, r - dist, p.restitution, p.gravity);
    }
}

// Sort-and-sweep along x. Returns index pairs (i < j) whose bounding boxes,
// inflated by `margin`, overlap. Pairs are sorted for a fixed resolution order.
std::vector<std::pair<std::uint32_t, std::uint32_t>> candidate_pairs(const std::vector<Ball>& balls,
                                                                     double margin) {
    std::vector<std::uint32_t> order(balls.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double xa = balls[a].position.x - balls[a].radius;
        const double xb = balls[b].position.x - balls[b].radius;
        return xa < xb || (xa == xb && a < b);
    });

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const Ball& a = balls[order[oi]];
        const double right = a.position.x + a.radius + margin;
        for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
            const Ball& b = balls[order[oj]];
            if (b.position.x - b.radius > right) break;
            if (std::abs(a.position.y - b.position.y) > a.radius + b.radius + margin) continue;
            auto i = order[oi], j = order[oj];
            pairs.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

void apply_noise(GameState& state) {
    const double amp = state.def().physics.noise_amplitude;
    if (amp <= 0.0) return;
    for (auto& b : state.balls) {
        if (!state.rng.bernoulli(kNoiseProbability)) continue;
        // Direction by rejection in the unit disc: only sqrt is needed,
        // which IEEE 754 rounds exactly on every platform.
        double x, y, r2;
        do {
            x = state.rng.uniform(-1.0, 1.0);
            y = state.rng.uniform(-1.0, 1.0);
            r2 = x * x + y * y;
        } while (r2 > 1.0 || r2 < 1e-12);
        const double inv = amp / std::sqrt(r2);
        b.velocity += Vec2{x * inv, y * inv};
    }
}

void clamp_speed(Ball& b) {
    const double s2 = b.velocity.norm2();
    if (s2 > kMaxSpeed * kMaxSpeed) b.velocity = b.velocity * (kMaxSpeed / std::sqrt(s2));
}

std::vector<ExitEvent> collect_exits(GameState& state) {
    std::vector<ExitEvent> out;
    const auto& def = state.def();
    if (def.exit_regions.empty()) return out;
    std::erase_if(state.balls, [&](const Ball& b) {
        for (std::size_t i = 0; i < def.exit_regions.size(); ++i) {
            const auto& e = def.exit_regions[i];
            bool crossed = false;
            switch (e.edge) {
            case Edge::Bottom:
                crossed = b.position.y < 0.0 && b.position.x >= e.span.lo && b.position.x <= e.span.hi;
                break;
            case Edge::Left:
                crossed = b.position.x < 0.0 && b.position.y >= e.span.lo && b.position.y <= e.span.hi;
                break;
            case Edge::Right:
                crossed = b.position.x > kFieldWidth && b.position.y >= e.span.lo &&
                          b.position.y <= e.span.hi;
                break;
            }
            if (crossed) {
                out.push_back({b.id, b.kind, i});
                return true;
            }
        }
        return false;
    });
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Spawning

namespace {

double spawn_x(const GameDefinition& def, BallKind k, Rng& rng) {
    const double r = def.ball_radius[k];
    const auto& regions = def.spawn_regions[k];
    double total = 0.0;
    for (const auto& iv : regions) total += iv.width() - 2.0 * r;
    double pick = rng.uniform() * total;
    for (const auto& iv : regions) {
        const double usable = iv.width() - 2.0 * r;
        if (pick <= usable) return iv.lo + r + pick;
        pick -= usable;
    }
    return regions.back().hi - r;
}

bool spawn_blocked(const GameState& state, Vec2 p, double r) {
    const double slop = state.def().physics.contact_slop;
    for (const auto& b : state.balls) {
        const double reach = b.radius + r + slop;
        if ((b.position - p).norm2() <= reach * reach) return true;
    }
    return false;
}

} // namespace

std::vector<BallId> spawn(GameState& state, double dt) {
    std::vector<BallId> spawned;
    const auto& def = state.def();
    auto& ledger = state.spawns;
    for (BallKind k : kAllKinds) {
        const double r = def.ball_radius[k];
        // Respawns go in as soon as the drawn spot is clear; a blocked draw
        // waits for the next step.
        while (ledger.pending_respawns[k] > 0 && state.count(k) < def.max_balls[k]) {
            const Vec2 p{spawn_x(def, k, state.rng), kFieldHeight + r};
            if (spawn_blocked(state, p, r)) break;
            --ledger.pending_respawns[k];
            ++ledger.respawned[k];
            spawned.push_back(place_ball(state, k, p));
        }
        if (ledger.fill_remaining[k] <= 0) continue;
        ledger.accumulator[k] = std::min(ledger.accumulator[k] + def.spawn_rate * dt, 1.0);
        if (ledger.accumulator[k] < 1.0 || state.count(k) >= def.max_balls[k]) continue;
        ledger.accumulator[k] -= 1.0;
        --ledger.fill_remaining[k];
        ++ledger.fill_spawned[k];
        spawned.push_back(place_ball(state, k, {spawn_x(def, k, state.rng), kFieldHeight + r}));
    }
    return spawned;
}

// ---------------------------------------------------------------------------
// Step

StepEvents step(GameState& state, double dt) {
    if (state.finished) throw StateError("finished", "cannot step a finished game");
    if (dt != kFixedDt) throw StateError("bad_timestep", "only the fixed 1/60 s timestep is supported");

    const auto& def = state.def();
    const auto& phys = def.physics;
    StepEvents events;

    apply_noise(state);

    // Semi-implicit Euler.
    for (auto& b : state.balls) {
        b.velocity.y -= phys.gravity * dt;
        clamp_speed(b);
        b.position += b.velocity * dt;
    }

    const auto pairs = candidate_pairs(state.balls, 0.1);
    for (int it = 0; it < kSolverIterations; ++it) {
        for (auto [i, j] : pairs) resolve_pair(state.balls[i], state.balls[j], phys.restitution);
        for (auto& b : state.balls) resolve_boundaries(def, b);
    }

    events.exited = collect_exits(state);
    events.spawned = spawn(state, dt);

    ++state.step;
    const auto limit = duration_steps(def.game_duration);
    if (limit > 0 && state.step >= limit) state.finished = true;

    events.contacts = contact_graph(state);
    const auto sig = events.contacts.signature();
    events.contacts_changed = sig != state.contact_signature;
    state.contact_signature = sig;
    return events;
}

// ---------------------------------------------------------------------------
// Contacts

ContactGraph contact_graph(const GameState& state) {
    ContactGraph g;
    const auto& balls = state.balls;
    const double slop = state.def().physics.contact_slop;
    const std::size_t n = balls.size();
    g.ids.reserve(n);
    g.kinds.reserve(n);
    for (const auto& b : balls) {
        g.ids.push_back(b.id);
        g.kinds.push_back(b.kind);
    }
    g.adjacency.assign(n, {});

    for (auto [i, j] : candidate_pairs(balls, slop)) {
        const Ball& a = balls[i];
        const Ball& b = balls[j];
        if (a.kind != b.kind) continue;
        const double reach = a.radius + b.radius + slop;
        if ((b.position - a.position).norm2() <= reach * reach) {
            g.adjacency[i].push_back(j);
            g.adjacency[j].push_back(i);
        }
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    return g;
}

// ---------------------------------------------------------------------------
// Digest

std::uint64_t step_digest(const GameState& state, std::uint64_t previous) {
    Fnv1a h(previous);
    h.u64(state.step);
    h.i64(state.score);
    for (const auto& b : state.balls) {
        h.u64(b.id);
        h.u64(static_cast<std::uint64_t>(b.kind));
        h.i64(std::llround(b.position.x * 1e6));
        h.i64(std::llround(b.position.y * 1e6));
    }
    return h.value();
}

} // namespace fluidic
