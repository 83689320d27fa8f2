#include "fluidic/harness.hpp"

#include "fluidic/error.hpp"
#include "fluidic/hash.hpp"
#include "fluidic/parallel.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace fluidic {

std::uint64_t policy_seed(std::uint64_t game_seed) { return derive_seed(game_seed, 1); }
std::uint64_t assistant_seed(std::uint64_t game_seed) { return derive_seed(game_seed, 2); }

std::uint64_t digest_origin(std::uint64_t definition_hash, std::uint64_t seed) {
    Fnv1a h;
    h.u64(definition_hash);
    h.u64(seed);
    return h.value();
}

namespace {

std::uint64_t step_limit(const GameDefinition& def, std::optional<double> override_seconds) {
    if (override_seconds) return duration_steps(*override_seconds);
    return duration_steps(def.game_duration > 0.0 ? def.game_duration : kUntimedHorizon);
}

} // namespace

GameResult run_game(const GameDefinition& def, const RunOptions& opts, std::uint64_t seed) {
    auto shared = std::make_shared<const GameDefinition>(def);
    GameState state = init_state(shared, seed);

    GameResult result;
    result.seed = seed;
    result.definition_hash = definition_hash(def);
    std::uint64_t digest = digest_origin(result.definition_hash, seed);
    if (opts.record_replay) result.replay = ReplayLog{def, seed, {}, {}};

    Rng policy_rng(policy_seed(seed));
    AssistantPlayer assistant(opts.assist, assistant_seed(seed));
    const auto limit = step_limit(def, opts.duration_override);
    const auto novice_period = static_cast<std::uint64_t>(std::max(1, opts.novice.decision_period));

    std::vector<InputEvent> inputs;
    while (!state.finished && state.step < limit) {
        inputs.clear();
        if (opts.policy == PolicyId::Novice && state.step % novice_period == 0) {
            if (auto e = novice_act(state, policy_rng, opts.novice)) inputs.push_back(*e);
        }
        for (const auto& e : assistant.poll(state)) inputs.push_back(e);

        const TickReport report = tick(state, inputs);
        result.delta_sum += report.score_delta();
        for (const auto& t : report.taps) {
            result.taps.push_back({report.step, t.event.source, t.hit, t.kind, t.action, t.score_delta});
        }
        for (const auto& c : report.clusters.clusters) {
            result.bursts.push_back({report.step, c.kind, static_cast<std::uint32_t>(c.ids.size())});
        }
        digest = step_digest(state, digest);
        if (result.replay) {
            result.replay->inputs.insert(result.replay->inputs.end(), inputs.begin(), inputs.end());
            result.replay->digests.push_back(digest);
        }
    }
    result.final_score = state.score;
    result.steps = state.step;
    result.final_digest = digest;
    return result;
}

GameResult run_game(const GameDefinition& def, PolicyId policy, const AssistConfig& assist,
                    std::uint64_t seed, std::optional<double> duration_override) {
    RunOptions opts;
    opts.policy = policy;
    opts.assist = assist;
    opts.duration_override = duration_override;
    return run_game(def, opts, seed);
}

// ---------------------------------------------------------------------------
// Replay log

namespace {

constexpr std::string_view kReplayMagic = "fluidic-replay/1";
constexpr std::string_view kRngName = "xorshift64star";

std::string format_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

[[noreturn]] void corrupt(const std::string& detail) { throw ReplayError("corrupt_log", detail); }

template <typename T>
T parse_number(std::string_view s) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        corrupt("bad number '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_hex_field(std::string_view s) {
    std::uint64_t v = 0;
    if (!parse_hex(s, v)) corrupt("bad hex '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        auto next = line.find(' ', pos);
        if (next == std::string_view::npos) next = line.size();
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }

    std::string_view next() {
        if (done()) corrupt("unexpected end of log");
        auto end = text_.find('\n', pos_);
        if (end == std::string_view::npos) corrupt("missing final newline");
        auto line = text_.substr(pos_, end - pos_);
        pos_ = end + 1;
        return line;
    }

    std::string_view peek_keyword() const {
        auto end = text_.find_first_of(" \n", pos_);
        return text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_);
    }

    std::string_view expect(std::string_view keyword) {
        auto line = next();
        if (line.size() <= keyword.size() || line.substr(0, keyword.size()) != keyword ||
            line[keyword.size()] != ' ')
            corrupt("expected '" + std::string(keyword) + "' line");
        return line.substr(keyword.size() + 1);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

std::string write_replay(const ReplayLog& log) {
    std::ostringstream out;
    out << kReplayMagic << '\n';
    out << "rng " << kRngName << ' ' << to_hex(rng_fingerprint()) << '\n';
    out << "timestep 1/60\n";
    out << "definition_hash " << to_hex(definition_hash(log.definition)) << '\n';
    out << "seed " << log.seed << '\n';
    out << "steps " << log.digests.size() << '\n';
    out << "definition " << nlohmann::json::parse(serialize(log.definition)).dump() << '\n';
    for (const auto& e : log.inputs) {
        out << "input " << e.time << ' ' << to_string(e.source) << ' ' << format_double(e.position.x)
            << ' ' << format_double(e.position.y) << '\n';
    }
    for (auto d : log.digests) out << "digest " << to_hex(d) << '\n';
    std::string body = out.str();
    body += "checksum " + to_hex(fnv1a(body)) + "\n";
    return body;
}

ReplayLog parse_replay(std::string_view text) {
    const auto tail = text.rfind("checksum ");
    if (tail == std::string_view::npos || (tail != 0 && text[tail - 1] != '\n')) corrupt("missing checksum");
    auto sum_line = text.substr(tail + 9);
    if (sum_line.size() != 17 || sum_line.back() != '\n') corrupt("malformed checksum line");
    if (parse_hex_field(sum_line.substr(0, 16)) != fnv1a(text.substr(0, tail)))
        corrupt("checksum mismatch");

    LineReader in(text.substr(0, tail));
    if (in.next() != kReplayMagic) corrupt("not a fluidic replay log (version 1)");

    auto rng = split(in.expect("rng"));
    if (rng.size() != 2) corrupt("malformed rng line");
    if (rng[0] != kRngName || parse_hex_field(rng[1]) != rng_fingerprint())
        throw ReplayError("rng_mismatch", "log was recorded with a different random generator");
    if (in.expect("timestep") != "1/60") corrupt("unsupported timestep");

    const auto declared_hash = parse_hex_field(in.expect("definition_hash"));
    ReplayLog log;
    log.seed = parse_number<std::uint64_t>(in.expect("seed"));
    const auto steps = parse_number<std::uint64_t>(in.expect("steps"));
    try {
        log.definition = deserialize(in.expect("definition"));
    } catch (const DefinitionError& e) {
        corrupt(std::string("embedded definition: ") + e.what());
    }
    if (definition_hash(log.definition) != declared_hash)
        throw ReplayError("definition_hash", "embedded definition does not match the header hash");

    while (in.peek_keyword() == "input") {
        auto f = split(in.expect("input"));
        if (f.size() != 4) corrupt("malformed input line");
        InputEvent e;
        e.time = parse_number<std::uint64_t>(f[0]);
        auto src = input_source_from_string(f[1]);
        if (!src) corrupt("unknown input source");
        e.source = *src;
        e.position = {parse_number<double>(f[2]), parse_number<double>(f[3])};
        if (!log.inputs.empty() && e.time < log.inputs.back().time) corrupt("input times decrease");
        if (e.time >= steps) corrupt("input after the last step");
        log.inputs.push_back(e);
    }
    log.digests.reserve(steps);
    for (std::uint64_t i = 0; i < steps; ++i) log.digests.push_back(parse_hex_field(in.expect("digest")));
    if (!in.done()) corrupt("trailing content");
    return log;
}

namespace {

// Drives a log through tick(); `visit` sees every report and the digest after it.
template <typename Visit>
void resimulate(const ReplayLog& log, Visit&& visit) {
    GameState state = init_state(log.definition, log.seed);
    std::uint64_t digest = digest_origin(definition_hash(log.definition), log.seed);
    std::size_t next_input = 0;
    std::vector<InputEvent> inputs;
    for (std::uint64_t s = 0; s < log.digests.size(); ++s) {
        if (state.finished) {
            if (!visit(s, nullptr, 0)) return;
            continue;
        }
        inputs.clear();
        while (next_input < log.inputs.size() && log.inputs[next_input].time == state.step)
            inputs.push_back(log.inputs[next_input++]);
        TickReport report = tick(state, inputs);
        digest = step_digest(state, digest);
        if (!visit(s, &report, digest)) return;
    }
}

} // namespace

VerifyResult replay_verify(std::string_view text) {
    const ReplayLog log = parse_replay(text);
    VerifyResult result{true, std::nullopt, "bit-exact"};
    resimulate(log, [&](std::uint64_t s, const TickReport* report, std::uint64_t digest) {
        if (!report) {
            result = {false, s, "game finished before the recorded step count"};
            return false;
        }
        if (digest != log.digests[s]) {
            result = {false, s, "state digest diverges at step " + std::to_string(s)};
            return false;
        }
        return true;
    });
    return result;
}

VerifyResult replay_verify_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ReplayError("io", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return replay_verify(buf.str());
}

std::vector<TickReport> replay_ticks(const ReplayLog& log) {
    std::vector<TickReport> out;
    resimulate(log, [&](std::uint64_t, const TickReport* report, std::uint64_t) {
        if (!report) return false;
        out.push_back(*report);
        return true;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Batch

namespace {

std::vector<GameResult> batch_results(const GameDefinition& def, const BatchConfig& cfg, bool serial) {
    if (cfg.games_per_level < 1) throw Error("batch_runs", "games per level must be >= 1");
    if (cfg.levels.empty()) throw Error("batch_levels", "at least one assist level is required");
    const auto n = static_cast<std::size_t>(cfg.games_per_level);
    std::vector<GameResult> results(n * cfg.levels.size());
    auto body = [&](std::size_t idx) {
        RunOptions opts;
        opts.policy = cfg.policy;
        opts.assist = cfg.assist;
        opts.assist.level = cfg.levels[idx / n];
        opts.novice = cfg.novice;
        opts.duration_override = cfg.duration_override;
        results[idx] = run_game(def, opts, cfg.base_seed + idx % n);
    };
    if (serial)
        for_each_game_serial(results.size(), body);
    else
        for_each_game(results.size(), cfg.workers, body);
    return results;
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

Moments moments(const std::vector<GameResult>& rs, std::size_t begin, std::size_t end) {
    Moments m;
    const double n = static_cast<double>(end - begin);
    for (std::size_t i = begin; i < end; ++i) m.mean += static_cast<double>(rs[i].final_score);
    m.mean /= n;
    for (std::size_t i = begin; i < end; ++i) {
        const double d = static_cast<double>(rs[i].final_score) - m.mean;
        m.variance += d * d;
    }
    m.variance /= n;
    return m;
}

} // namespace

BatchMetrics metrics_from_results(const std::vector<double>& levels, int games_per_level,
                                  const std::vector<GameResult>& results) {
    const auto n = static_cast<std::size_t>(games_per_level);
    if (n == 0 || results.size() != n * levels.size())
        throw Error("batch_shape", "results do not match levels x games_per_level");
    BatchMetrics m;
    m.runs = static_cast<int>(results.size());
    const auto all = moments(results, 0, results.size());
    m.mean_score = all.mean;
    m.score_variance = all.variance;
    for (const auto& r : results) {
        for (const auto& b : r.bursts) ++m.bursts_per_kind[b.kind];
    }
    std::optional<double> at0, at1;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const auto mm = moments(results, l * n, (l + 1) * n);
        m.levels.push_back({levels[l], mm.mean, mm.variance, games_per_level});
        if (levels[l] == 0.0) at0 = mm.mean;
        if (levels[l] == 1.0) at1 = mm.mean;
    }
    if (at0 && at1) m.difficulty_gap = *at1 - *at0;
    return m;
}

BatchMetrics batch(const GameDefinition& def, const BatchConfig& cfg) {
    return metrics_from_results(cfg.levels, cfg.games_per_level, batch_results(def, cfg, false));
}

BatchMetrics batch_serial(const GameDefinition& def, const BatchConfig& cfg) {
    return metrics_from_results(cfg.levels, cfg.games_per_level, batch_results(def, cfg, true));
}

std::string to_json(const GameResult& r) {
    using nlohmann::json;
    json bursts = json::array();
    for (const auto& b : r.bursts) bursts.push_back({{"step", b.step}, {"kind", to_string(b.kind)}, {"size", b.size}});
    json taps = json::array();
    for (const auto& t : r.taps) {
        json o{{"step", t.step}, {"source", to_string(t.source)}, {"delta", t.score_delta}};
        if (t.hit) {
            o["hit"] = *t.hit;
            o["kind"] = to_string(t.kind);
            o["action"] = to_string(t.action);
        } else {
            o["hit"] = nullptr;
        }
        taps.push_back(std::move(o));
    }
    json o{{"final_score", r.final_score},
           {"seed", r.seed},
           {"definition_hash", to_hex(r.definition_hash)},
           {"steps", r.steps},
           {"final_digest", to_hex(r.final_digest)},
           {"bursts", bursts},
           {"taps", taps}};
    return o.dump(2);
}

std::string to_json(const BatchMetrics& m) {
    using nlohmann::json;
    json levels = json::array();
    for (const auto& l : m.levels)
        levels.push_back({{"level", l.level},
                          {"mean_score", l.mean_score},
                          {"score_variance", l.score_variance},
                          {"runs", l.runs}});
    json o{{"mean_score", m.mean_score},
           {"score_variance", m.score_variance},
           {"bursts_per_kind",
            {{"positive", m.bursts_per_kind.positive}, {"negative", m.bursts_per_kind.negative}}},
           {"runs", m.runs},
           {"levels", levels}};
    o["difficulty_gap"] = m.difficulty_gap ? json(*m.difficulty_gap) : json(nullptr);
    return o.dump(2);
}

} // namespace fluidic
