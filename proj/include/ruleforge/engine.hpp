#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruleforge/evolution.hpp"
#include "ruleforge/fitness.hpp"
#include "ruleforge/qd.hpp"

namespace ruleforge {

enum class EliteSource { Archive, Population };

struct RunConfig {
    std::string env_name = "cartpole";
    std::size_t population = 200;
    std::size_t generations = 500;
    std::size_t eval_episodes = 5;
    double lambda = 0.1;
    VariationConfig variation;  // threshold_sets/action_count filled from the env when empty
    std::size_t threshold_bins = 16;
    std::optional<double> th_max;  // default: largest |threshold| in the grids
    double elite_fraction = 0.25;
    EliteSource elite_source = EliteSource::Archive;
    std::optional<double> early_stop_threshold;  // default: the env's solve threshold
    std::uint64_t run_seed = 0;
    std::size_t workers = 1;
    bool cache_fitness = false;
    bool dedup = false;

    /// Throws ConfigError. Checks everything that can be checked before any rollout.
    void validate() const;
};

/// Fills environment-dependent defaults (threshold grids, action count,
/// th_max, early-stop threshold) and validates. Throws ConfigError.
RunConfig resolve(RunConfig cfg);

struct GenerationStats {
    std::size_t generation = 0;  // 1-based
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double best_performance = 0.0;
    std::size_t archive_occupancy = 0;
    double archive_best_fitness = 0.0;
    std::size_t best_complexity = 0;
    double wall_time_s = 0.0;
};

struct RunResult {
    Archive archive{GridSpec{}};
    std::vector<GenerationStats> stats;
    ArchiveCell best;
    std::size_t episodes_run = 0;
    std::size_t evaluations = 0;
    bool solved = false;
    double wall_time_s = 0.0;
};

using ProgressFn = std::function<void(const GenerationStats&)>;

/// Generational loop: evaluate, archive, select elites, breed; stops after
/// cfg.generations or once a policy's mean return reaches the early-stop
/// threshold. Results do not depend on cfg.workers.
RunResult run_evolution(const RunConfig& cfg, const ProgressFn& progress = {});

/// Elites first, unchanged; then children until `size` policies exist.
/// Each child: two uniform elite parents; crossover with p_cross, else a copy
/// of one of them; then mutation with p_mut.
std::vector<Policy> breed_population(std::span<const Policy> elites, std::size_t size, const VariationConfig& cfg,
                                     Rng& rng);

/// One row per generation. The wall-time column is optional so the rest can
/// be compared byte for byte.
std::string stats_csv(std::span<const GenerationStats> stats, bool with_wall_time = true);

}  // namespace ruleforge
