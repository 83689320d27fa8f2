// fluidic: command-line entry point for headless play, batch simulation,
// balanced generation and replay verification.
//
// Exit codes: 0 ok, 1 usage, 2 validation failure, 3 verification failure.

#include "fluidic/error.hpp"
#include "fluidic/game_def.hpp"
#include "fluidic/generator.hpp"
#include "fluidic/harness.hpp"
#include "fluidic/hash.hpp"
#include "fluidic/parallel.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace fluidic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitVerify = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write " + path.string());
    out << content;
}

void emit(const std::string& out_path, const std::string& content) {
    const std::string text = content.ends_with('\n') ? content : content + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
    fs::path p = out;
    p.replace_extension();
    return p.string() + suffix;
}

struct DefinitionSource {
    std::string preset;
    std::string file;

    void add_to(CLI::App* cmd) {
        auto* p = cmd->add_option("--preset", preset, "Built-in preset name");
        auto* f = cmd->add_option("--def", file, "Game definition file");
        p->excludes(f);
    }

    GameDefinition load() const {
        if (!file.empty()) return deserialize(read_file(file));
        return fluidic::preset(preset.empty() ? "let_it_snow" : preset);
    }
};

PolicyId parse_policy(const std::string& s) {
    auto p = policy_from_string(s);
    if (!p) throw CLI::ValidationError("--policy", "expected assistant, novice or idle");
    return *p;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fluidic - play, generate and verify cluster-burst physics games"};
    app.require_subcommand(1);

    // play-headless
    auto* play = app.add_subcommand("play-headless", "Run one game without a display");
    DefinitionSource play_src;
    play_src.add_to(play);
    std::uint64_t play_seed = 0;
    std::string play_policy = "idle", play_out, play_replay, play_trace;
    double play_assist = 0.0;
    std::optional<double> play_duration;
    play->add_option("--seed", play_seed, "Game seed");
    play->add_option("--policy", play_policy, "assistant | novice | idle")->check(CLI::IsMember({"assistant", "novice", "idle"}));
    play->add_option("--assist", play_assist, "Assist level in [0, 1]")->check(CLI::Range(0.0, 1.0));
    play->add_option("--duration", play_duration, "Override the game duration (seconds)");
    play->add_option("--replay", play_replay, "Write a replay log");
    play->add_option("--trace", play_trace, "Write tick reports as JSON lines");
    play->add_option("--out", play_out, "Write the game result here instead of stdout");

    // batch
    auto* bat = app.add_subcommand("batch", "Run many games per assist level and report metrics");
    DefinitionSource bat_src;
    bat_src.add_to(bat);
    BatchConfig bcfg;
    std::string bat_policy = "idle", bat_out;
    bat->add_option("--runs", bcfg.games_per_level, "Games per assist level")->check(CLI::PositiveNumber);
    bat->add_option("--policy", bat_policy, "assistant | novice | idle")->check(CLI::IsMember({"assistant", "novice", "idle"}));
    bat->add_option("--levels", bcfg.levels, "Assist levels")->delimiter(',')->check(CLI::Range(0.0, 1.0));
    bat->add_option("--seed", bcfg.base_seed, "Base seed; game i uses seed + i");
    bat->add_option("--workers", bcfg.workers, "Worker threads (default: FLUIDIC_WORKERS)");
    bat->add_option("--duration", bcfg.duration_override, "Override the game duration (seconds)");
    bat->add_option("--out", bat_out, "Write metrics here instead of stdout");

    // generate
    auto* gen = app.add_subcommand("generate", "Sample and balance a new game");
    std::uint64_t gen_seed = 0;
    GeneratorConfig gcfg;
    std::string gen_out;
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--games", gcfg.n_games, "Novice games per candidate")->check(CLI::PositiveNumber);
    gen->add_option("--tolerance", gcfg.tolerance, "Accepted imbalance")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--attempts", gcfg.max_attempts, "Maximum candidates")->check(CLI::PositiveNumber);
    gen->add_option("--workers", gcfg.estimate.workers, "Worker threads");
    gen->add_option("--out", gen_out, "Definition output file")->required();

    // balance
    auto* bal = app.add_subcommand("balance", "Rebalance the scores of an existing game");
    DefinitionSource bal_src;
    bal_src.add_to(bal);
    std::uint64_t bal_seed = 0;
    int bal_games = 100;
    double bal_tol = 0.25;
    int bal_workers = 0;
    std::string bal_out;
    bal->add_option("--seed", bal_seed, "Simulation seed");
    bal->add_option("--games", bal_games, "Novice games")->check(CLI::PositiveNumber);
    bal->add_option("--tolerance", bal_tol, "Accepted imbalance")->check(CLI::Range(0.0, 1.0));
    bal->add_option("--workers", bal_workers, "Worker threads");
    bal->add_option("--out", bal_out, "Definition output file")->required();

    // validate
    auto* val = app.add_subcommand("validate", "Check a game definition file");
    std::string val_file;
    val->add_option("file", val_file, "Definition file")->required();

    // replay-verify
    auto* ver = app.add_subcommand("replay-verify", "Re-simulate a replay log bit-exactly");
    std::string ver_file;
    ver->add_option("file", ver_file, "Replay log")->required();

    // export-preset
    auto* exp = app.add_subcommand("export-preset", "Write a built-in preset as a definition file");
    std::string exp_name, exp_out;
    exp->add_option("name", exp_name, "Preset name")->required();
    exp->add_option("--out", exp_out, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*play) {
            RunOptions opts;
            opts.policy = parse_policy(play_policy);
            opts.assist.level = play_assist;
            opts.duration_override = play_duration;
            opts.record_replay = !play_replay.empty() || !play_trace.empty();
            const auto def = play_src.load();
            const auto result = run_game(def, opts, play_seed);
            if (!play_replay.empty()) write_file(play_replay, write_replay(*result.replay));
            if (!play_trace.empty()) {
                std::ofstream trace(play_trace);
                for (const auto& r : replay_ticks(*result.replay)) trace << to_json(r) << '\n';
            }
            emit(play_out, to_json(result));
        } else if (*bat) {
            bcfg.policy = parse_policy(bat_policy);
            emit(bat_out, to_json(batch(bat_src.load(), bcfg)));
        } else if (*gen) {
            Rng rng(gen_seed);
            const auto result = generate_balanced(rng, Constraints{}, gcfg);
            write_file(gen_out, serialize(result.definition));
            write_file(sibling(gen_out, ".histogram.json"), to_json(result.histogram));
            write_file(sibling(gen_out, ".balance.json"), to_json(result.report));
            std::cout << result.definition.name << " imbalance " << result.report.imbalance
                      << (result.accepted ? " accepted" : " best-effort") << " after " << result.attempts
                      << " attempt(s)\n";
        } else if (*bal) {
            const auto def = bal_src.load();
            EstimateOptions eo;
            eo.workers = bal_workers;
            const auto hist = estimate_frequencies(def, bal_games, PolicyId::Novice, bal_seed, eo);
            const auto result = balance_scores(def, hist, bal_tol);
            write_file(bal_out, serialize(result.definition));
            write_file(sibling(bal_out, ".histogram.json"), to_json(hist));
            write_file(sibling(bal_out, ".balance.json"), to_json(result.report));
            std::cout << "imbalance " << result.report.imbalance
                      << (result.report.unplayable ? " (unplayable)" : "") << "\n";
        } else if (*val) {
            const auto def = parse_definition(read_file(val_file));
            const auto violations = validate(def);
            if (violations.empty()) {
                std::cout << "valid " << to_hex(definition_hash(def)) << "\n";
                return kExitOk;
            }
            for (const auto& v : violations) std::cout << v.code << ": " << v.detail << "\n";
            return kExitInvalid;
        } else if (*ver) {
            try {
                const auto r = replay_verify_file(ver_file);
                std::cout << (r.ok ? "ok" : "mismatch") << ": " << r.reason << "\n";
                return r.ok ? kExitOk : kExitVerify;
            } catch (const ReplayError& e) {
                std::cout << "error: " << e.what() << "\n";
                return kExitVerify;
            }
        } else if (*exp) {
            emit(exp_out, serialize(preset(exp_name)));
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const DefinitionError& e) {
        std::cerr << "invalid definition: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
