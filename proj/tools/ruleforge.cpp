// Command-line front end: run experiments, evaluate stored policies, dump
// archives, and replay single episodes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ruleforge/config.hpp"
#include "ruleforge/engine.hpp"
#include "ruleforge/envs.hpp"
#include "ruleforge/errors.hpp"
#include "ruleforge/fitness.hpp"
#include "ruleforge/kernels/rule_eval.hpp"
#include "ruleforge/trajectory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ruleforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::vector<std::string> overrides;
    std::optional<std::size_t> workers;
    bool quiet = false;
};

int cmd_run(const RunArgs& args) {
    auto merged = args.config.empty() ? merge_config(nlohmann::json::object()) : load_config_file(args.config);
    for (const auto& o : args.overrides) apply_override(merged, o);
    if (args.seed) merged["engine"]["seed"] = *args.seed;
    if (args.workers) merged["engine"]["workers"] = *args.workers;
    const auto cfg = run_config_from_json(merged);

    ProgressFn progress;
    if (!args.quiet) {
        progress = [](const GenerationStats& s) {
            std::fprintf(stderr, "gen %4zu  best %.2f  mean %.2f  perf %.2f  cells %zu\n", s.generation,
                         s.best_fitness, s.mean_fitness, s.best_performance, s.archive_occupancy);
        };
    }
    const auto result = run_evolution(cfg, progress);

    const fs::path out(args.out);
    fs::create_directories(out);
    const auto policy_text = format_policy(result.best.policy);
    json summary = {
        {"best_policy_text", policy_text},
        {"best_policy", policy_to_json(result.best.policy)},
        {"performance", result.best.performance},
        {"complexity", complexity(result.best.policy)},
        {"fitness", result.best.fitness},
        {"generations_run", result.stats.size()},
        {"solved", result.solved},
        {"episodes_run", result.episodes_run},
        {"config", config_echo(merged)},
    };
    write_file(out / "summary.json", summary.dump(2) + "\n");
    write_file(out / "timing.json",
               json{{"wall_time_s", result.wall_time_s}, {"workers", cfg.workers},
                    {"simd", std::string(kernels::isa_name(kernels::active_isa()))}}
                       .dump(2) +
                   "\n");
    write_file(out / "stats.csv", stats_csv(result.stats));
    write_file(out / "archive.json", result.archive.dump().dump(2) + "\n");
    write_file(out / "best_policy.txt", policy_text);

    std::cout << policy_text;
    if (!args.quiet) {
        std::cout << "performance " << fmt(result.best.performance) << ", complexity "
                  << complexity(result.best.policy) << ", generations " << result.stats.size() << "\n";
    }
    return kExitOk;
}

int cmd_eval(const std::string& policy_file, const std::string& env_name, std::size_t episodes, std::uint64_t seed) {
    const auto spec = env_spec(env_name);
    const auto policy = parse_policy(read_file(policy_file), spec.limits());
    if (episodes < 1) throw ConfigError("--episodes must be >= 1");
    std::vector<std::uint64_t> seeds(episodes);
    for (std::size_t e = 0; e < episodes; ++e) seeds[e] = episode_seed(seed, e);
    const auto returns = batch_returns(policy, env_name, seeds);
    double sum = 0.0;
    for (std::size_t e = 0; e < returns.size(); ++e) {
        std::cout << "episode " << e << ": " << fmt(returns[e]) << "\n";
        sum += returns[e];
    }
    std::cout << "mean: " << fmt(sum / static_cast<double>(episodes)) << "\n";
    return kExitOk;
}

int cmd_dump_archive(const std::string& archive_file, const std::string& format) {
    const auto doc = json::parse(read_file(archive_file), nullptr, false);
    if (doc.is_discarded()) throw ParseError("archive file is not valid JSON", 0, 0);
    const auto archive = Archive::load(doc);
    if (format == "csv") {
        std::cout << archive.to_csv();
    } else {
        std::cout << archive.dump().dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_replay(const std::string& policy_file, const std::string& env_name, std::uint64_t seed,
               const std::string& out) {
    const auto spec = env_spec(env_name);
    const auto policy = parse_policy(read_file(policy_file), spec.limits());
    const auto csv = trajectory_to_csv(record_trajectory(policy, env_name, seed));
    if (out.empty()) {
        std::cout << csv;
    } else {
        write_file(out, csv);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolve and evaluate rule-list control policies"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run an evolution experiment");
    run_cmd->add_option("--config", run.config, "JSON run config");
    run_cmd->add_option("--seed", run.seed, "Run seed (overrides engine.seed)");
    run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
    run_cmd->add_option("--set", run.overrides, "Override a config key, KEY=VALUE (repeatable)");
    run_cmd->add_option("--workers", run.workers, "Evaluation threads");
    run_cmd->add_flag("--quiet", run.quiet, "Only print the best policy");

    std::string policy_file, env_name, archive_file, format = "json", replay_out;
    std::size_t episodes = 5;
    std::uint64_t seed = 0;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a policy file");
    eval_cmd->add_option("--policy", policy_file, "Policy text file")->required();
    eval_cmd->add_option("--env", env_name, "cartpole, mountaincar or acrobot")->required();
    eval_cmd->add_option("--episodes", episodes, "Episode count")->capture_default_str();
    eval_cmd->add_option("--seed", seed, "Base seed")->capture_default_str();

    auto* dump_cmd = app.add_subcommand("dump-archive", "Print an archive as JSON or CSV");
    dump_cmd->add_option("--archive", archive_file, "archive.json from a run")->required();
    dump_cmd->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    auto* replay_cmd = app.add_subcommand("replay", "Record one episode as trajectory CSV");
    replay_cmd->add_option("--policy", policy_file, "Policy text file")->required();
    replay_cmd->add_option("--env", env_name, "cartpole, mountaincar or acrobot")->required();
    replay_cmd->add_option("--seed", seed, "Environment seed")->capture_default_str();
    replay_cmd->add_option("--out", replay_out, "Write to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*eval_cmd) return cmd_eval(policy_file, env_name, episodes, seed);
        if (*dump_cmd) return cmd_dump_archive(archive_file, format);
        if (*replay_cmd) return cmd_replay(policy_file, env_name, seed, replay_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ValidationError& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
