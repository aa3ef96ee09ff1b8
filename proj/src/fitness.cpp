#include "ruleforge/fitness.hpp"

#include <memory>

#include "ruleforge/envs.hpp"
#include "ruleforge/errors.hpp"
#include "ruleforge/kernels/rule_eval.hpp"
#include "ruleforge/rng.hpp"

namespace ruleforge {

std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t index) {
    return derive_seed(base_seed, {static_cast<std::uint64_t>(index)});
}

double episode_return(const Policy& policy, std::string_view env_name, std::uint64_t seed) {
    auto env = make_env(env_name, seed);
    validate(policy, env->spec().limits());
    auto state = env->reset();
    double total = 0.0;
    for (;;) {
        const auto outcome = env->step_into(eval_policy(policy, state), state);
        total += outcome.reward;
        if (outcome.done) break;
    }
    return total;
}

std::vector<double> batch_returns(const Policy& policy, std::string_view env_name,
                                  std::span<const std::uint64_t> seeds) {
    const auto spec = env_spec(env_name);
    validate(policy, spec.limits());
    const auto flat = kernels::flatten(policy, spec.obs_dim);

    const std::size_t lanes = seeds.size();
    std::vector<std::unique_ptr<Environment>> envs;
    envs.reserve(lanes);
    std::vector<double> block(spec.obs_dim * lanes);
    std::vector<double> obs(spec.obs_dim);
    for (std::size_t i = 0; i < lanes; ++i) {
        envs.push_back(make_env(env_name, seeds[i]));
        const auto first = envs.back()->reset();
        for (std::size_t d = 0; d < spec.obs_dim; ++d) block[d * lanes + i] = first[d];
    }

    std::vector<double> returns(lanes, 0.0);
    std::vector<std::int32_t> actions(lanes);
    std::size_t running = lanes;
    const kernels::StateBlock view{block, lanes, lanes};
    while (running > 0) {
        kernels::eval_batch(flat, view, actions);
        for (std::size_t i = 0; i < lanes; ++i) {
            auto& env = *envs[i];
            if (env.done()) continue;
            const auto outcome = env.step_into(static_cast<std::size_t>(actions[i]), obs);
            returns[i] += outcome.reward;
            for (std::size_t d = 0; d < spec.obs_dim; ++d) block[d * lanes + i] = obs[d];
            if (outcome.done) --running;
        }
    }
    return returns;
}

FitnessReport evaluate(const Policy& policy, std::string_view env_name, std::size_t episodes, double lambda,
                       std::uint64_t base_seed) {
    if (episodes < 1) throw UsageError("evaluate needs at least one episode");
    std::vector<std::uint64_t> seeds(episodes);
    for (std::size_t e = 0; e < episodes; ++e) seeds[e] = episode_seed(base_seed, e);

    FitnessReport report;
    report.episode_returns = batch_returns(policy, env_name, seeds);
    double sum = 0.0;
    for (double r : report.episode_returns) sum += r;
    report.performance = sum / static_cast<double>(episodes);
    report.complexity = complexity(policy);
    report.fitness = penalized_fitness(report.performance, report.complexity, lambda);
    return report;
}

}  // namespace ruleforge
