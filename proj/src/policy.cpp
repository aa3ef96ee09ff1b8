#include "ruleforge/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ruleforge/errors.hpp"

namespace ruleforge {

void validate_structure(const Policy& policy) {
    if (policy.rules.empty()) {
        throw ValidationError("policy must contain at least one rule");
    }
    for (std::size_t i = 0; i < policy.rules.size(); ++i) {
        const auto& rule = policy.rules[i];
        if (rule.predicates.empty()) {
            throw ValidationError("rule " + std::to_string(i + 1) + " has no predicates");
        }
        for (const auto& p : rule.predicates) {
            if (!std::isfinite(p.threshold)) {
                throw ValidationError("rule " + std::to_string(i + 1) + " has a non-finite threshold");
            }
        }
    }
}

void validate(const Policy& policy, const PolicyLimits& limits) {
    validate_structure(policy);
    if (limits.max_rules != 0 && policy.rules.size() > limits.max_rules) {
        throw ValidationError("policy has " + std::to_string(policy.rules.size()) + " rules, limit is " +
                              std::to_string(limits.max_rules));
    }
    if (policy.fallback_action >= limits.action_count) {
        throw ValidationError("fallback action " + std::to_string(policy.fallback_action) + " out of range");
    }
    for (std::size_t i = 0; i < policy.rules.size(); ++i) {
        const auto& rule = policy.rules[i];
        const auto where = "rule " + std::to_string(i + 1);
        if (limits.max_predicates_per_rule != 0 && rule.predicates.size() > limits.max_predicates_per_rule) {
            throw ValidationError(where + " has too many predicates");
        }
        if (rule.action >= limits.action_count) {
            throw ValidationError(where + ": action " + std::to_string(rule.action) + " out of range (action count " +
                                  std::to_string(limits.action_count) + ")");
        }
        for (const auto& p : rule.predicates) {
            if (p.dim >= limits.obs_dim) {
                throw ValidationError(where + ": s[" + std::to_string(p.dim) + "] out of range (observation size " +
                                      std::to_string(limits.obs_dim) + ")");
            }
        }
    }
}

std::size_t eval_policy(const Policy& policy, std::span<const double> state) {
    for (const auto& rule : policy.rules) {
        for (const auto& p : rule.predicates) {
            if (p.dim >= state.size()) {
                throw ValidationError("predicate reads s[" + std::to_string(p.dim) + "] but the state has " +
                                      std::to_string(state.size()) + " entries");
            }
        }
    }
    for (const auto& rule : policy.rules) {
        if (rule.matches(state)) return rule.action;
    }
    return policy.fallback_action;
}

std::size_t complexity(const Policy& policy) noexcept {
    std::size_t n = 0;
    for (const auto& rule : policy.rules) n += rule.predicates.size();
    return n;
}

Descriptor descriptor(const Policy& policy) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& rule : policy.rules) {
        for (const auto& p : rule.predicates) {
            sum += std::abs(p.threshold);
            ++n;
        }
    }
    if (n == 0) throw ValidationError("descriptor of a policy without predicates");
    return {policy.rules.size(), sum / static_cast<double>(n)};
}

Policy dedup_predicates(Policy policy) {
    for (auto& rule : policy.rules) {
        std::vector<Predicate> kept;
        kept.reserve(rule.predicates.size());
        for (const auto& p : rule.predicates) {
            if (std::find(kept.begin(), kept.end(), p) == kept.end()) kept.push_back(p);
        }
        rule.predicates = std::move(kept);
    }
    return policy;
}

std::string_view op_name(Op op) noexcept { return op == Op::LessThan ? "LessThan" : "GreaterThan"; }

namespace {

std::string format_threshold(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

/// Cursor over a single line; columns are 1-based in error messages.
class LineCursor {
public:
    LineCursor(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_no_, pos_ + 1); }

    void skip_spaces() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    }

    bool at_end() {
        skip_spaces();
        return pos_ == line_.size();
    }

    bool try_word(std::string_view word) {
        skip_spaces();
        if (line_.substr(pos_, word.size()) != word) return false;
        const auto after = pos_ + word.size();
        // keywords must end at a word boundary
        if (std::isalpha(static_cast<unsigned char>(word.back())) && after < line_.size() &&
            std::isalnum(static_cast<unsigned char>(line_[after]))) {
            return false;
        }
        pos_ = after;
        return true;
    }

    void expect(std::string_view word) {
        if (!try_word(word)) fail("expected '" + std::string(word) + "'");
    }

    std::size_t parse_index() {
        skip_spaces();
        std::size_t value = 0;
        const auto* first = line_.data() + pos_;
        const auto* last = line_.data() + line_.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr == first) fail("expected a non-negative integer");
        pos_ += static_cast<std::size_t>(ptr - first);
        return value;
    }

    double parse_number() {
        skip_spaces();
        std::size_t start = pos_;
        if (pos_ < line_.size() && line_[pos_] == '+') ++start;
        double value = 0.0;
        const auto* first = line_.data() + start;
        const auto* last = line_.data() + line_.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr == first || !std::isfinite(value)) fail("expected a finite number");
        pos_ = static_cast<std::size_t>(ptr - line_.data());
        return value;
    }

private:
    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

Predicate parse_predicate(LineCursor& cur) {
    Predicate p;
    cur.expect("s[");
    p.dim = cur.parse_index();
    cur.expect("]");
    if (cur.try_word("<")) {
        p.op = Op::LessThan;
    } else if (cur.try_word(">")) {
        p.op = Op::GreaterThan;
    } else {
        cur.fail("expected '<' or '>'");
    }
    p.threshold = cur.parse_number();
    return p;
}

std::size_t parse_action_tail(LineCursor& cur) {
    cur.expect("action");
    cur.expect("=");
    const auto action = cur.parse_index();
    if (!cur.at_end()) cur.fail("unexpected trailing text");
    return action;
}

}  // namespace

std::string format_policy(const Policy& policy) {
    std::string out;
    for (const auto& rule : policy.rules) {
        out += "if ";
        for (std::size_t j = 0; j < rule.predicates.size(); ++j) {
            const auto& p = rule.predicates[j];
            if (j > 0) out += " and ";
            out += "s[" + std::to_string(p.dim) + "] ";
            out += p.op == Op::LessThan ? "< " : "> ";
            out += format_threshold(p.threshold);
        }
        out += " then action = " + std::to_string(rule.action) + "\n";
    }
    out += "else action = " + std::to_string(policy.fallback_action) + "\n";
    return out;
}

Policy parse_policy(std::string_view text) {
    Policy policy;
    bool have_fallback = false;
    std::size_t line_no = 0;
    std::size_t last_line = 0;
    while (!text.empty() || line_no == 0) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        LineCursor cur(line, line_no);
        if (cur.at_end()) {
            if (text.empty()) break;
            continue;
        }
        last_line = line_no;
        if (have_fallback) cur.fail("text after the fallback line");

        if (cur.try_word("else")) {
            if (!cur.try_word("if")) {
                policy.fallback_action = parse_action_tail(cur);
                have_fallback = true;
                continue;
            }
        } else {
            cur.expect("if");
        }
        Rule rule;
        rule.predicates.push_back(parse_predicate(cur));
        while (cur.try_word("and")) rule.predicates.push_back(parse_predicate(cur));
        cur.expect("then");
        rule.action = parse_action_tail(cur);
        policy.rules.push_back(std::move(rule));
        if (text.empty()) break;
    }
    if (!have_fallback) {
        throw ParseError("missing fallback line 'else action = N'", std::max<std::size_t>(last_line, 1), 1);
    }
    validate_structure(policy);
    return policy;
}

Policy parse_policy(std::string_view text, const PolicyLimits& limits) {
    auto policy = parse_policy(text);
    validate(policy, limits);
    return policy;
}

nlohmann::json policy_to_json(const Policy& policy) {
    auto rules = nlohmann::json::array();
    for (const auto& rule : policy.rules) {
        auto preds = nlohmann::json::array();
        for (const auto& p : rule.predicates) {
            preds.push_back({{"dim", p.dim}, {"op", op_name(p.op)}, {"threshold", p.threshold}});
        }
        rules.push_back({{"predicates", std::move(preds)}, {"action", rule.action}});
    }
    return {{"rules", std::move(rules)}, {"fallback_action", policy.fallback_action}};
}

Policy policy_from_json(const nlohmann::json& doc) {
    Policy policy;
    try {
        for (const auto& r : doc.at("rules")) {
            Rule rule;
            rule.action = r.at("action").get<std::size_t>();
            for (const auto& p : r.at("predicates")) {
                Predicate pred;
                pred.dim = p.at("dim").get<std::size_t>();
                const auto op = p.at("op").get<std::string>();
                if (op == "LessThan") {
                    pred.op = Op::LessThan;
                } else if (op == "GreaterThan") {
                    pred.op = Op::GreaterThan;
                } else {
                    throw ParseError("unknown operator '" + op + "'", 0, 0);
                }
                pred.threshold = p.at("threshold").get<double>();
                rule.predicates.push_back(pred);
            }
            policy.rules.push_back(std::move(rule));
        }
        policy.fallback_action = doc.at("fallback_action").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed policy document: ") + e.what(), 0, 0);
    }
    validate_structure(policy);
    return policy;
}

}  // namespace ruleforge
