#include "ruleforge/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <thread>
#include <cmath>
#include <exception>
#include <mutex>
#include <unordered_map>

#include "ruleforge/envs.hpp"
#include "ruleforge/errors.hpp"
#include "ruleforge/rng.hpp"

namespace ruleforge {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kEvalStream = 2;
constexpr std::uint64_t kBreedStream = 3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void RunConfig::validate() const {
    const auto spec = env_spec(env_name);
    if (population < 2) throw ConfigError("engine.population must be >= 2");
    if (generations < 1) throw ConfigError("engine.generations must be >= 1");
    if (eval_episodes < 1) throw ConfigError("engine.eval_episodes must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("engine.lambda must be finite and >= 0");
    if (!(elite_fraction > 0.0 && elite_fraction <= 1.0)) throw ConfigError("engine.elite_fraction must lie in (0, 1]");
    if (workers < 1) throw ConfigError("engine.workers must be >= 1");
    variation.validate();
    if (variation.obs_dim() != spec.obs_dim) {
        throw ConfigError("threshold sets cover " + std::to_string(variation.obs_dim()) + " dimensions, " + spec.name +
                          " has " + std::to_string(spec.obs_dim));
    }
    if (variation.action_count != spec.action_count) throw ConfigError("action count does not match " + spec.name);
    GridSpec{variation.max_rules, threshold_bins, th_max.value_or(max_abs_threshold(variation))}.validate();
    if (early_stop_threshold && !std::isfinite(*early_stop_threshold)) {
        throw ConfigError("engine.early_stop_threshold must be finite");
    }
}

RunConfig resolve(RunConfig cfg) {
    const auto spec = env_spec(cfg.env_name);
    cfg.variation.action_count = spec.action_count;
    if (cfg.variation.threshold_sets.empty()) cfg.variation.threshold_sets = default_variation(spec).threshold_sets;
    if (!cfg.th_max) cfg.th_max = max_abs_threshold(cfg.variation);
    if (!cfg.early_stop_threshold) cfg.early_stop_threshold = spec.solve_threshold;
    cfg.validate();
    return cfg;
}

std::vector<Policy> breed_population(std::span<const Policy> elites, std::size_t size, const VariationConfig& cfg,
                                     Rng& rng) {
    if (elites.empty()) throw UsageError("breeding needs at least one elite");
    std::vector<Policy> next(elites.begin(), elites.begin() + static_cast<std::ptrdiff_t>(std::min(size, elites.size())));
    next.reserve(size);
    while (next.size() < size) {
        const auto& p1 = elites[rng.uniform_index(elites.size())];
        const auto& p2 = elites[rng.uniform_index(elites.size())];
        Policy child;
        if (rng.bernoulli(cfg.p_cross)) {
            child = crossover(p1, p2, cfg, rng);
        } else {
            child = rng.uniform_index(2) == 0 ? p1 : p2;
        }
        if (rng.bernoulli(cfg.p_mut)) child = mutate(child, cfg, rng);
        next.push_back(std::move(child));
    }
    return next;
}

namespace {

std::vector<FitnessReport> evaluate_population(const std::vector<Policy>& population, const RunConfig& cfg,
                                               std::uint64_t base_seed) {
    std::vector<FitnessReport> reports(population.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (auto i = next.fetch_add(1); i < population.size(); i = next.fetch_add(1)) {
            reports[i] = evaluate(population[i], cfg.env_name, cfg.eval_episodes, cfg.lambda, base_seed);
        }
    };
    const auto workers = std::min(cfg.workers, population.size());
    if (workers <= 1) {
        work();
        return reports;
    }
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                work();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    return reports;
}

std::vector<Policy> population_elites(const std::vector<Policy>& population, const std::vector<FitnessReport>& reports,
                                      std::size_t k) {
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (reports[a].fitness != reports[b].fitness) return reports[a].fitness > reports[b].fitness;
        return reports[a].complexity < reports[b].complexity;
    });
    std::vector<Policy> elites;
    for (std::size_t i = 0; i < std::min(k, order.size()); ++i) elites.push_back(population[order[i]]);
    return elites;
}

}  // namespace

RunResult run_evolution(const RunConfig& raw, const ProgressFn& progress) {
    const auto cfg = resolve(raw);
    const auto spec = env_spec(cfg.env_name);
    const auto start = Clock::now();

    RunResult result;
    result.archive = Archive(GridSpec{cfg.variation.max_rules, cfg.threshold_bins, *cfg.th_max});

    Rng init_rng(derive_seed(cfg.run_seed, {kInitStream}));
    std::vector<Policy> population;
    population.reserve(cfg.population);
    for (std::size_t i = 0; i < cfg.population; ++i) population.push_back(random_policy(spec, cfg.variation, init_rng));

    std::unordered_map<std::string, FitnessReport> cache;
    const auto k = elite_count(cfg.elite_fraction, cfg.population);

    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        if (cfg.dedup) {
            for (auto& p : population) p = dedup_predicates(std::move(p));
        }
        const auto base_seed = derive_seed(cfg.run_seed, {kEvalStream, gen});

        std::vector<FitnessReport> reports;
        if (cfg.cache_fitness) {
            std::vector<Policy> fresh;
            std::vector<std::string> keys(population.size());
            std::vector<std::string> fresh_keys;
            for (std::size_t i = 0; i < population.size(); ++i) {
                keys[i] = policy_to_json(population[i]).dump();
                if (!cache.contains(keys[i]) &&
                    std::find(fresh_keys.begin(), fresh_keys.end(), keys[i]) == fresh_keys.end()) {
                    fresh.push_back(population[i]);
                    fresh_keys.push_back(keys[i]);
                }
            }
            const auto fresh_reports = evaluate_population(fresh, cfg, base_seed);
            for (std::size_t i = 0; i < fresh.size(); ++i) {
                cache.emplace(fresh_keys[i], fresh_reports[i]);
                result.episodes_run += cfg.eval_episodes;
                ++result.evaluations;
            }
            reports.reserve(population.size());
            for (const auto& key : keys) reports.push_back(cache.at(key));
        } else {
            reports = evaluate_population(population, cfg, base_seed);
            result.episodes_run += population.size() * cfg.eval_episodes;
            result.evaluations += population.size();
        }

        GenerationStats stats;
        stats.generation = gen;
        std::size_t best = 0;
        double fitness_sum = 0.0;
        bool solved = false;
        for (std::size_t i = 0; i < population.size(); ++i) {
            result.archive.insert(population[i], reports[i].fitness, gen, reports[i].performance);
            fitness_sum += reports[i].fitness;
            if (reports[i].fitness > reports[best].fitness ||
                (reports[i].fitness == reports[best].fitness && reports[i].complexity < reports[best].complexity)) {
                best = i;
            }
            stats.best_performance = i == 0 ? reports[i].performance : std::max(stats.best_performance, reports[i].performance);
            if (reports[i].performance >= *cfg.early_stop_threshold) solved = true;
        }
        stats.best_fitness = reports[best].fitness;
        stats.best_complexity = reports[best].complexity;
        stats.mean_fitness = fitness_sum / static_cast<double>(population.size());
        stats.archive_occupancy = result.archive.size();
        stats.archive_best_fitness = result.archive.best().fitness;
        stats.wall_time_s = seconds_since(start);
        result.stats.push_back(stats);
        if (progress) progress(stats);

        if (solved) {
            result.solved = true;
            break;
        }
        if (gen == cfg.generations) break;

        const auto elites = cfg.elite_source == EliteSource::Archive ? select_elites(result.archive, k)
                                                                     : population_elites(population, reports, k);
        Rng breed_rng(derive_seed(cfg.run_seed, {kBreedStream, gen}));
        population = breed_population(elites, cfg.population, cfg.variation, breed_rng);
    }

    result.best = result.archive.best();
    result.wall_time_s = seconds_since(start);
    return result;
}

std::string stats_csv(std::span<const GenerationStats> stats, bool with_wall_time) {
    std::string out =
        "generation,best_fitness,mean_fitness,best_performance,archive_occupancy,archive_best_fitness,best_complexity";
    out += with_wall_time ? ",wall_time_s\n" : "\n";
    char buf[256];
    for (const auto& s : stats) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%zu,%.17g,%zu", s.generation, s.best_fitness,
                      s.mean_fitness, s.best_performance, s.archive_occupancy, s.archive_best_fitness,
                      s.best_complexity);
        out += buf;
        if (with_wall_time) {
            std::snprintf(buf, sizeof buf, ",%.3f", s.wall_time_s);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace ruleforge
