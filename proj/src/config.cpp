#include "ruleforge/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ruleforge/errors.hpp"

namespace ruleforge {

using nlohmann::json;

json default_config() {
    return json::parse(R"({
      "env": "cartpole",
      "engine": {
        "population": 200,
        "generations": 500,
        "eval_episodes": 5,
        "lambda": 0.1,
        "elite_fraction": 0.25,
        "elite_source": "archive",
        "early_stop_threshold": null,
        "seed": 0,
        "workers": 1,
        "cache_fitness": false
      },
      "variation": {
        "max_rules": 6,
        "max_predicates_per_rule": 3,
        "p_mut": 0.3,
        "p_cross": 0.7,
        "mutation_weights": {"predicate": 0.5, "action": 0.2, "add_rule": 0.15, "remove_rule": 0.15},
        "threshold_count": 41,
        "threshold_sets": null
      },
      "archive": {"threshold_bins": 16, "th_max": null},
      "policy": {"fallback_action": 0, "dedup": false}
    })");
}

namespace {

void overlay(json& base, const json& user, const std::string& prefix) {
    if (!user.is_object()) throw ConfigError("config section '" + prefix + "' must be an object");
    for (const auto& [key, value] : user.items()) {
        const auto path = prefix.empty() ? key : prefix + "." + key;
        if (!base.contains(key)) throw ConfigError("unknown config key '" + path + "'");
        auto& slot = base[key];
        if (slot.is_object()) {
            overlay(slot, value, path);
        } else {
            slot = value;
        }
    }
}

const json& at(const json& j, const std::string& section, const std::string& key) { return j.at(section).at(key); }

std::size_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError("'" + path + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

double as_real(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("'" + path + "' must be a number");
    return v.get<double>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError("'" + path + "' must be true or false");
    return v.get<bool>();
}

}  // namespace

json merge_config(const json& user) {
    auto merged = default_config();
    overlay(merged, user, "");
    return merged;
}

void apply_override(json& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' is not KEY=VALUE");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json nested = value;
    std::string rest = key;
    std::vector<std::string> parts;
    for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1)) {
        parts.push_back(rest.substr(0, pos));
    }
    parts.push_back(rest);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) nested = json{{*it, nested}};

    // Whole-object replacement for leaves that are objects would skip key checks.
    const json* probe = &config;
    for (const auto& part : parts) {
        if (!probe->is_object() || !probe->contains(part)) throw ConfigError("unknown config key '" + key + "'");
        probe = &probe->at(part);
    }
    overlay(config, nested, "");
}

RunConfig run_config_from_json(const json& c) {
    try {
        RunConfig cfg;
        if (!c.at("env").is_string()) throw ConfigError("'env' must be a string");
        cfg.env_name = c.at("env").get<std::string>();
        const auto spec = env_spec(cfg.env_name);

        cfg.population = as_count(at(c, "engine", "population"), "engine.population");
        cfg.generations = as_count(at(c, "engine", "generations"), "engine.generations");
        cfg.eval_episodes = as_count(at(c, "engine", "eval_episodes"), "engine.eval_episodes");
        cfg.lambda = as_real(at(c, "engine", "lambda"), "engine.lambda");
        cfg.elite_fraction = as_real(at(c, "engine", "elite_fraction"), "engine.elite_fraction");
        const auto& source = at(c, "engine", "elite_source");
        if (source == "archive") {
            cfg.elite_source = EliteSource::Archive;
        } else if (source == "population") {
            cfg.elite_source = EliteSource::Population;
        } else {
            throw ConfigError("'engine.elite_source' must be \"archive\" or \"population\"");
        }
        if (const auto& v = at(c, "engine", "early_stop_threshold"); !v.is_null()) {
            cfg.early_stop_threshold = as_real(v, "engine.early_stop_threshold");
        }
        cfg.run_seed = as_count(at(c, "engine", "seed"), "engine.seed");
        cfg.workers = as_count(at(c, "engine", "workers"), "engine.workers");
        cfg.cache_fitness = as_bool(at(c, "engine", "cache_fitness"), "engine.cache_fitness");

        auto& var = cfg.variation;
        var.max_rules = as_count(at(c, "variation", "max_rules"), "variation.max_rules");
        var.max_predicates_per_rule =
            as_count(at(c, "variation", "max_predicates_per_rule"), "variation.max_predicates_per_rule");
        var.p_mut = as_real(at(c, "variation", "p_mut"), "variation.p_mut");
        var.p_cross = as_real(at(c, "variation", "p_cross"), "variation.p_cross");
        const auto& w = at(c, "variation", "mutation_weights");
        const char* names[] = {"predicate", "action", "add_rule", "remove_rule"};
        for (std::size_t i = 0; i < 4; ++i) {
            var.mutation_weights[i] = as_real(w.at(names[i]), std::string("variation.mutation_weights.") + names[i]);
        }
        var.action_count = spec.action_count;
        const auto count = as_count(at(c, "variation", "threshold_count"), "variation.threshold_count");
        if (count < 1) throw ConfigError("'variation.threshold_count' must be >= 1");
        if (const auto& sets = at(c, "variation", "threshold_sets"); !sets.is_null()) {
            if (!sets.is_array()) throw ConfigError("'variation.threshold_sets' must be an array of arrays");
            for (const auto& set : sets) {
                if (!set.is_array()) throw ConfigError("'variation.threshold_sets' must be an array of arrays");
                std::vector<double> values;
                for (const auto& v : set) values.push_back(as_real(v, "variation.threshold_sets"));
                std::sort(values.begin(), values.end());
                values.erase(std::unique(values.begin(), values.end()), values.end());
                var.threshold_sets.push_back(std::move(values));
            }
        } else {
            const auto ranges = threshold_ranges(spec);
            var.threshold_sets = threshold_grid(ranges, count);
        }

        cfg.threshold_bins = as_count(at(c, "archive", "threshold_bins"), "archive.threshold_bins");
        if (const auto& v = at(c, "archive", "th_max"); !v.is_null()) cfg.th_max = as_real(v, "archive.th_max");

        var.fallback_action = as_count(at(c, "policy", "fallback_action"), "policy.fallback_action");
        cfg.dedup = as_bool(at(c, "policy", "dedup"), "policy.dedup");

        return resolve(cfg);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

json config_echo(const json& config) {
    auto echo = config;
    echo["engine"].erase("workers");
    return echo;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const auto doc = json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config file '" + path + "' is not valid JSON");
    return merge_config(doc);
}

}  // namespace ruleforge
