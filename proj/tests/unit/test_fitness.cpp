#include <doctest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "ruleforge/envs.hpp"
#include "ruleforge/fitness.hpp"

using namespace ruleforge;

namespace {

Policy load(const std::string& name) {
    std::ifstream in(std::string(RULEFORGE_SOURCE_DIR) + "/policies/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_policy(ss.str());
}

}  // namespace

TEST_CASE("published cartpole policy: complexity 2, penalty 0.2") {
    const auto p = load("cartpole_published.txt");
    const auto r = evaluate(p, "cartpole", 5, 0.1, 0);
    CHECK(r.complexity == 2);
    CHECK(r.episode_returns.size() == 5);
    CHECK(r.fitness == doctest::Approx(r.performance - 0.2).epsilon(1e-12));
    double sum = 0.0;
    for (double v : r.episode_returns) sum += v;
    CHECK(r.performance == sum / 5.0);
}

TEST_CASE("fitness is linear in lambda") {
    oracle::PolicyGen gen(11, 4, 2);
    for (int i = 0; i < 30; ++i) {
        const auto p = gen.policy();
        const auto seed = static_cast<std::uint64_t>(i);
        const auto r0 = evaluate(p, "cartpole", 3, 0.0, seed);
        const auto r1 = evaluate(p, "cartpole", 3, 0.1, seed);
        const auto r5 = evaluate(p, "cartpole", 3, 0.5, seed);
        REQUIRE(r0.fitness == r0.performance);
        REQUIRE(r0.performance == r1.performance);
        REQUIRE(r1.fitness - r5.fitness == doctest::Approx(0.4 * static_cast<double>(complexity(p))));
        REQUIRE(r5.fitness <= r1.fitness);
    }
}

TEST_CASE("adding a predicate lowers fitness by exactly lambda at equal performance") {
    // A predicate that can never fail leaves behaviour unchanged.
    const Policy base{{{{{2, Op::GreaterThan, 0.0}}, 1}}, 0};
    Policy extra = base;
    extra.rules[0].predicates.push_back({0, Op::LessThan, 100.0});
    const auto a = evaluate(base, "cartpole", 5, 0.1, 3);
    const auto b = evaluate(extra, "cartpole", 5, 0.1, 3);
    CHECK(a.performance == b.performance);
    CHECK(a.fitness - b.fitness == doctest::Approx(0.1));
}

TEST_CASE("evaluation is deterministic and the batch path matches the scalar path") {
    for (const char* env : {"cartpole", "mountaincar", "acrobot"}) {
        const auto spec = env_spec(env);
        oracle::PolicyGen g(13, spec.obs_dim, spec.action_count);
        for (int i = 0; i < 10; ++i) {
            const auto p = g.policy();
            std::vector<std::uint64_t> seeds;
            for (std::size_t e = 0; e < 7; ++e) seeds.push_back(episode_seed(42, e));
            const auto batch = batch_returns(p, env, seeds);
            REQUIRE(batch.size() == seeds.size());
            for (std::size_t e = 0; e < seeds.size(); ++e) REQUIRE(batch[e] == episode_return(p, env, seeds[e]));
            REQUIRE(evaluate(p, env, 4, 0.1, 5) == evaluate(p, env, 4, 0.1, 5));
        }
    }
}

TEST_CASE("constant policy on mountaincar stays within the return bounds") {
    const Policy always{{{{{0, Op::GreaterThan, -10.0}}, 1}}, 1};
    const auto r = evaluate(always, "mountaincar", 10, 0.1, 0);
    for (double v : r.episode_returns) {
        CHECK(v >= -200.0);
        CHECK(v <= -1.0);
    }
}

TEST_CASE("episode seeds differ across indices and bases") {
    CHECK(episode_seed(0, 0) != episode_seed(0, 1));
    CHECK(episode_seed(0, 0) != episode_seed(1, 0));
    CHECK(episode_seed(5, 3) == episode_seed(5, 3));
}
