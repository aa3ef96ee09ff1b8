#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ruleforge/envs.hpp"
#include "ruleforge/policy.hpp"
#include "ruleforge/qd.hpp"
#include "ruleforge/rng.hpp"

namespace ruleforge {

enum class MutationKind { Predicate, Action, AddRule, RemoveRule };

struct VariationConfig {
    std::size_t max_rules = 6;
    std::size_t max_predicates_per_rule = 3;
    std::size_t action_count = 2;
    std::size_t fallback_action = 0;
    /// One sorted, non-empty candidate list per observation dimension.
    std::vector<std::vector<double>> threshold_sets;
    double p_mut = 0.3;
    double p_cross = 0.7;
    /// Relative weights of predicate, action, add-rule, remove-rule mutations.
    std::array<double, 4> mutation_weights{0.5, 0.2, 0.15, 0.15};

    std::size_t obs_dim() const noexcept { return threshold_sets.size(); }
    PolicyLimits limits() const noexcept { return {obs_dim(), action_count, max_rules, max_predicates_per_rule}; }
    /// Throws ConfigError.
    void validate() const;
};

/// Physical range each observation dimension's threshold grid spans.
std::vector<std::pair<double, double>> threshold_ranges(const EnvSpec& spec);

/// `count` evenly spaced values per range, rounded to two decimals, duplicates removed.
std::vector<std::vector<double>> threshold_grid(std::span<const std::pair<double, double>> ranges,
                                                std::size_t count = 41);

/// Defaults for an environment: 41-point grids, 6 rules, 3 predicates per rule.
VariationConfig default_variation(const EnvSpec& spec);

/// Largest |threshold| over all grids; the default archive th_max.
double max_abs_threshold(const VariationConfig& cfg);

Rule random_rule(const VariationConfig& cfg, Rng& rng);
Policy random_policy(const EnvSpec& spec, const VariationConfig& cfg, Rng& rng);

/// Applies one mutation drawn by mutation_weights and returns the child.
/// Every mutation changes exactly one thing: a single predicate field, one
/// rule action, one inserted rule, or one removed rule. Kinds that cannot
/// apply (add at the rule cap, remove from a single-rule policy, action
/// change with one action) fall back to predicate mutation.
Policy mutate(const Policy& policy, const VariationConfig& cfg, Rng& rng);
Policy mutate_as(const Policy& policy, MutationKind kind, const VariationConfig& cfg, Rng& rng);

/// Single-point crossover: c uniform in [1, |p1|], then crossover_at.
Policy crossover(const Policy& p1, const Policy& p2, const VariationConfig& cfg, Rng& rng);

/// First c rules of p1, then rules c+1.. of p2, capped at max_rules.
/// Fallback comes from p1. Requires 1 <= c <= |p1|.
Policy crossover_at(const Policy& p1, const Policy& p2, std::size_t c, const VariationConfig& cfg);

/// max(1, ceil(fraction * population)).
std::size_t elite_count(double fraction, std::size_t population);

/// Top k archive occupants by ranks_before. Throws UsageError on an empty archive.
std::vector<Policy> select_elites(const Archive& archive, std::size_t k);

}  // namespace ruleforge
