#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ruleforge {

enum class Op : std::uint8_t { LessThan, GreaterThan };

/// One thresholded comparison `s[dim] op threshold`. Comparisons are strict.
struct Predicate {
    std::size_t dim = 0;
    Op op = Op::LessThan;
    double threshold = 0.0;

    bool holds(std::span<const double> state) const noexcept {
        const double x = state[dim];
        return op == Op::LessThan ? x < threshold : x > threshold;
    }

    friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// Conjunction of predicates mapped to a discrete action.
struct Rule {
    std::vector<Predicate> predicates;
    std::size_t action = 0;

    bool matches(std::span<const double> state) const noexcept {
        for (const auto& p : predicates) {
            if (!p.holds(state)) return false;
        }
        return true;
    }

    friend bool operator==(const Rule&, const Rule&) = default;
};

/// Ordered rule list. The first matching rule fires; otherwise fallback_action.
struct Policy {
    std::vector<Rule> rules;
    std::size_t fallback_action = 0;

    friend bool operator==(const Policy&, const Policy&) = default;
};

/// Bounds a policy is checked against. A zero for max_rules or
/// max_predicates_per_rule means unbounded.
struct PolicyLimits {
    std::size_t obs_dim = 0;
    std::size_t action_count = 0;
    std::size_t max_rules = 0;
    std::size_t max_predicates_per_rule = 0;
};

/// Archive coordinates before binning: rule count and mean |threshold|.
struct Descriptor {
    std::size_t rule_count = 0;
    double mean_abs_threshold = 0.0;

    friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

/// Shape checks that need no environment: at least one rule, at least one
/// predicate per rule, finite thresholds. Throws ValidationError.
void validate_structure(const Policy& policy);

/// validate_structure plus index and size bounds. Throws ValidationError.
void validate(const Policy& policy, const PolicyLimits& limits);

/// Action chosen for `state`. Throws ValidationError when any predicate
/// indexes past the end of `state`, whether or not that predicate is reached.
std::size_t eval_policy(const Policy& policy, std::span<const double> state);

/// Total predicate count over all rules.
std::size_t complexity(const Policy& policy) noexcept;

Descriptor descriptor(const Policy& policy);

/// Removes exact duplicate predicates inside each rule, keeping first occurrences.
Policy dedup_predicates(Policy policy);

/// Renders one rule per line followed by the fallback line:
///
///     if s[2] > -0.02 and s[3] > -0.30 then action = 1
///     else action = 0
///
/// Thresholds are printed with two decimals.
std::string format_policy(const Policy& policy);

/// Inverse of format_policy. Accepts any decimal precision, surrounding
/// blank lines, and CRLF line endings. Throws ParseError on grammar
/// violations and ValidationError when the result has no rules.
Policy parse_policy(std::string_view text);

/// parse_policy followed by validate(policy, limits).
Policy parse_policy(std::string_view text, const PolicyLimits& limits);

std::string_view op_name(Op op) noexcept;

nlohmann::json policy_to_json(const Policy& policy);
/// Throws ParseError (line 0) on a malformed document, ValidationError on a bad shape.
Policy policy_from_json(const nlohmann::json& doc);

}  // namespace ruleforge
