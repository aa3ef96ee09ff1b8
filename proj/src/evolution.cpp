#include "ruleforge/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ruleforge/errors.hpp"

namespace ruleforge {

void VariationConfig::validate() const {
    if (max_rules < 1) throw ConfigError("variation.max_rules must be >= 1");
    if (max_predicates_per_rule < 1) throw ConfigError("variation.max_predicates_per_rule must be >= 1");
    if (action_count < 1) throw ConfigError("action count must be >= 1");
    if (fallback_action >= action_count) throw ConfigError("fallback action out of range");
    if (!(p_mut >= 0.0 && p_mut <= 1.0)) throw ConfigError("variation.p_mut must lie in [0, 1]");
    if (!(p_cross >= 0.0 && p_cross <= 1.0)) throw ConfigError("variation.p_cross must lie in [0, 1]");
    double total = 0.0;
    for (double w : mutation_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("mutation weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw ConfigError("mutation weights must not all be zero");
    if (threshold_sets.empty()) throw ConfigError("threshold sets are empty");
    for (const auto& set : threshold_sets) {
        if (set.empty()) throw ConfigError("every dimension needs at least one threshold");
        for (double v : set) {
            if (!std::isfinite(v)) throw ConfigError("thresholds must be finite");
        }
    }
}

std::vector<std::pair<double, double>> threshold_ranges(const EnvSpec& spec) {
    constexpr double pi = std::numbers::pi;
    if (spec.name == "cartpole") return {{-2.4, 2.4}, {-3.0, 3.0}, {-0.21, 0.21}, {-3.0, 3.0}};
    if (spec.name == "mountaincar") return {{-1.2, 0.6}, {-0.07, 0.07}};
    if (spec.name == "acrobot") {
        return {{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-4 * pi, 4 * pi}, {-9 * pi, 9 * pi}};
    }
    throw ConfigError("no threshold ranges for environment '" + spec.name + "'");
}

std::vector<std::vector<double>> threshold_grid(std::span<const std::pair<double, double>> ranges,
                                                std::size_t count) {
    if (count < 1) throw ConfigError("threshold count must be >= 1");
    std::vector<std::vector<double>> grids;
    for (const auto& [lo, hi] : ranges) {
        std::vector<double> grid;
        for (std::size_t i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count - 1);
            const double v = lo + (hi - lo) * t;
            grid.push_back(std::round(v * 100.0) / 100.0 + 0.0);  // + 0.0 folds -0 into 0
        }
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        grids.push_back(std::move(grid));
    }
    return grids;
}

VariationConfig default_variation(const EnvSpec& spec) {
    VariationConfig cfg;
    cfg.action_count = spec.action_count;
    const auto ranges = threshold_ranges(spec);
    cfg.threshold_sets = threshold_grid(ranges);
    return cfg;
}

double max_abs_threshold(const VariationConfig& cfg) {
    double m = 0.0;
    for (const auto& set : cfg.threshold_sets) {
        for (double v : set) m = std::max(m, std::abs(v));
    }
    return m;
}

namespace {

Predicate random_predicate(const VariationConfig& cfg, Rng& rng) {
    Predicate p;
    p.dim = rng.uniform_index(cfg.obs_dim());
    p.op = rng.uniform_index(2) == 0 ? Op::LessThan : Op::GreaterThan;
    const auto& set = cfg.threshold_sets[p.dim];
    p.threshold = set[rng.uniform_index(set.size())];
    return p;
}

MutationKind draw_kind(const VariationConfig& cfg, Rng& rng) {
    const auto& w = cfg.mutation_weights;
    const double total = w[0] + w[1] + w[2] + w[3];
    const double u = rng.uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        acc += w[i];
        if (u < acc && w[i] > 0.0) return static_cast<MutationKind>(i);
    }
    // Land on the last kind with positive weight.
    for (std::size_t i = 4; i-- > 0;) {
        if (w[i] > 0.0) return static_cast<MutationKind>(i);
    }
    return MutationKind::Predicate;
}

void mutate_predicate(Policy& child, const VariationConfig& cfg, Rng& rng) {
    auto& rule = child.rules[rng.uniform_index(child.rules.size())];
    auto& p = rule.predicates[rng.uniform_index(rule.predicates.size())];

    const auto& set = cfg.threshold_sets[p.dim];
    const auto other_thresholds =
        static_cast<std::size_t>(std::count_if(set.begin(), set.end(), [&](double v) { return v != p.threshold; }));

    enum Field { Dim, Operator, Threshold };
    std::vector<Field> fields;
    if (cfg.obs_dim() > 1) fields.push_back(Dim);
    fields.push_back(Operator);
    if (other_thresholds > 0) fields.push_back(Threshold);

    switch (fields[rng.uniform_index(fields.size())]) {
        case Dim: {
            // The threshold is kept; only generators draw from the grid.
            auto d = rng.uniform_index(cfg.obs_dim() - 1);
            p.dim = d >= p.dim ? d + 1 : d;
            break;
        }
        case Operator:
            p.op = p.op == Op::LessThan ? Op::GreaterThan : Op::LessThan;
            break;
        case Threshold: {
            auto pick = rng.uniform_index(other_thresholds);
            for (double v : set) {
                if (v == p.threshold) continue;
                if (pick-- == 0) {
                    p.threshold = v;
                    break;
                }
            }
            break;
        }
    }
}

}  // namespace

Rule random_rule(const VariationConfig& cfg, Rng& rng) {
    Rule rule;
    const auto n = rng.uniform_int(1, cfg.max_predicates_per_rule);
    rule.predicates.reserve(n);
    for (std::size_t j = 0; j < n; ++j) rule.predicates.push_back(random_predicate(cfg, rng));
    rule.action = rng.uniform_index(cfg.action_count);
    return rule;
}

Policy random_policy(const EnvSpec& spec, const VariationConfig& cfg, Rng& rng) {
    if (cfg.obs_dim() != spec.obs_dim || cfg.action_count != spec.action_count) {
        throw ConfigError("variation config does not match environment '" + spec.name + "'");
    }
    Policy policy;
    policy.fallback_action = cfg.fallback_action;
    const auto k = rng.uniform_int(1, cfg.max_rules);
    policy.rules.reserve(k);
    for (std::size_t i = 0; i < k; ++i) policy.rules.push_back(random_rule(cfg, rng));
    return policy;
}

Policy mutate(const Policy& policy, const VariationConfig& cfg, Rng& rng) {
    return mutate_as(policy, draw_kind(cfg, rng), cfg, rng);
}

Policy mutate_as(const Policy& policy, MutationKind kind, const VariationConfig& cfg, Rng& rng) {
    Policy child = policy;
    if (kind == MutationKind::AddRule && child.rules.size() >= cfg.max_rules) kind = MutationKind::Predicate;
    if (kind == MutationKind::RemoveRule && child.rules.size() <= 1) kind = MutationKind::Predicate;
    if (kind == MutationKind::Action && cfg.action_count < 2) kind = MutationKind::Predicate;

    switch (kind) {
        case MutationKind::Predicate:
            mutate_predicate(child, cfg, rng);
            break;
        case MutationKind::Action: {
            auto& rule = child.rules[rng.uniform_index(child.rules.size())];
            const auto a = rng.uniform_index(cfg.action_count - 1);
            rule.action = a >= rule.action ? a + 1 : a;
            break;
        }
        case MutationKind::AddRule: {
            const auto at = rng.uniform_index(child.rules.size() + 1);
            child.rules.insert(child.rules.begin() + static_cast<std::ptrdiff_t>(at), random_rule(cfg, rng));
            break;
        }
        case MutationKind::RemoveRule: {
            const auto at = rng.uniform_index(child.rules.size());
            child.rules.erase(child.rules.begin() + static_cast<std::ptrdiff_t>(at));
            break;
        }
    }
    return child;
}

Policy crossover(const Policy& p1, const Policy& p2, const VariationConfig& cfg, Rng& rng) {
    const auto c = rng.uniform_int(1, p1.rules.size());
    return crossover_at(p1, p2, c, cfg);
}

Policy crossover_at(const Policy& p1, const Policy& p2, std::size_t c, const VariationConfig& cfg) {
    if (c < 1 || c > p1.rules.size()) {
        throw UsageError("crossover point " + std::to_string(c) + " outside [1, " + std::to_string(p1.rules.size()) + "]");
    }
    Policy child;
    child.fallback_action = p1.fallback_action;
    child.rules.assign(p1.rules.begin(), p1.rules.begin() + static_cast<std::ptrdiff_t>(c));
    for (std::size_t i = c; i < p2.rules.size(); ++i) child.rules.push_back(p2.rules[i]);
    if (child.rules.size() > cfg.max_rules) child.rules.resize(cfg.max_rules);
    return child;
}

std::size_t elite_count(double fraction, std::size_t population) {
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(population)));
    return std::max<std::size_t>(1, k);
}

std::vector<Policy> select_elites(const Archive& archive, std::size_t k) {
    if (archive.empty()) throw UsageError("cannot select elites from an empty archive");
    const auto ranked = archive.ranked();
    std::vector<Policy> elites;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) elites.push_back(ranked[i]->policy);
    return elites;
}

}  // namespace ruleforge
