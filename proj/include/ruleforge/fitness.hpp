#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ruleforge/policy.hpp"

namespace ruleforge {

struct FitnessReport {
    double performance = 0.0;  // mean episode return
    std::size_t complexity = 0;
    double fitness = 0.0;  // performance - lambda * complexity
    std::vector<double> episode_returns;

    friend bool operator==(const FitnessReport&, const FitnessReport&) = default;
};

/// Seed of episode `index` under `base_seed`. Independent of which policy is
/// being evaluated, so a whole generation faces the same start states.
std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t index);

inline double penalized_fitness(double performance, std::size_t complexity, double lambda) noexcept {
    return performance - lambda * static_cast<double>(complexity);
}

/// Undiscounted return of one episode on a fresh environment seeded with `seed`.
/// Steps the environment one state at a time through eval_policy.
double episode_return(const Policy& policy, std::string_view env_name, std::uint64_t seed);

/// Returns of one episode per seed, run in lockstep with the batched
/// rule-evaluation kernel. Element i equals episode_return(policy, env, seeds[i]).
std::vector<double> batch_returns(const Policy& policy, std::string_view env_name, std::span<const std::uint64_t> seeds);

/// Runs `episodes` episodes seeded from base_seed and fills every report field.
FitnessReport evaluate(const Policy& policy, std::string_view env_name, std::size_t episodes, double lambda,
                       std::uint64_t base_seed);

}  // namespace ruleforge
