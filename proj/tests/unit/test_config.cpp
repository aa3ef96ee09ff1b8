#include <doctest.h>

#include "ruleforge/config.hpp"
#include "ruleforge/engine.hpp"
#include "ruleforge/errors.hpp"

using namespace ruleforge;

TEST_CASE("defaults convert to the documented run config") {
    const auto cfg = run_config_from_json(merge_config(nlohmann::json::object()));
    CHECK(cfg.env_name == "cartpole");
    CHECK(cfg.population == 200);
    CHECK(cfg.generations == 500);
    CHECK(cfg.eval_episodes == 5);
    CHECK(cfg.lambda == 0.1);
    CHECK(cfg.elite_fraction == 0.25);
    CHECK(cfg.variation.max_rules == 6);
    CHECK(cfg.variation.max_predicates_per_rule == 3);
    CHECK(cfg.variation.p_mut == 0.3);
    CHECK(cfg.variation.p_cross == 0.7);
    CHECK(cfg.threshold_bins == 16);
}

TEST_CASE("unknown keys are rejected with their path") {
    try {
        merge_config(nlohmann::json::parse(R"({"engine":{"populaton":10}})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("engine.populaton") != std::string::npos);
    }
    CHECK_THROWS_AS(merge_config(nlohmann::json::parse(R"({"extra":1})")), ConfigError);
    auto c = merge_config(nlohmann::json::object());
    CHECK_THROWS_AS(apply_override(c, "engine.nope=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "no_equals_sign"), ConfigError);
}

TEST_CASE("overrides and range checks") {
    auto c = merge_config(nlohmann::json::object());
    apply_override(c, "engine.generations=0");
    CHECK_THROWS_AS(run_config_from_json(c), ConfigError);
    c = merge_config(nlohmann::json::object());
    apply_override(c, "env=mountaincar");
    apply_override(c, "engine.population=12");
    apply_override(c, "variation.p_mut=0.5");
    apply_override(c, "engine.elite_source=\"population\"");
    const auto cfg = run_config_from_json(c);
    CHECK(cfg.env_name == "mountaincar");
    CHECK(cfg.population == 12);
    CHECK(cfg.variation.p_mut == 0.5);
    CHECK(cfg.elite_source == EliteSource::Population);
    CHECK(cfg.variation.action_count == 3);
    c = merge_config(nlohmann::json::object());
    apply_override(c, "engine.population=\"many\"");
    CHECK_THROWS_AS(run_config_from_json(c), ConfigError);
    c = merge_config(nlohmann::json::object());
    apply_override(c, "env=pendulum");
    CHECK_THROWS_AS(run_config_from_json(c), ConfigError);
}

TEST_CASE("the config echo reproduces the run") {
    auto c = merge_config(nlohmann::json::object());
    apply_override(c, "engine.population=16");
    apply_override(c, "engine.generations=4");
    apply_override(c, "engine.eval_episodes=2");
    apply_override(c, "engine.seed=9");
    apply_override(c, "engine.workers=2");
    const auto echo = config_echo(c);
    CHECK_FALSE(echo["engine"].contains("workers"));
    const auto a = run_evolution(run_config_from_json(c));
    const auto b = run_evolution(run_config_from_json(merge_config(echo)));
    CHECK(a.archive.dump() == b.archive.dump());
    CHECK(stats_csv(a.stats, false) == stats_csv(b.stats, false));
}
