#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ruleforge/envs.hpp"
#include "ruleforge/trajectory.hpp"

namespace fixtures {

struct ParityResult {
    std::string file;
    std::size_t steps = 0;
    double max_abs_error = 0.0;
    bool flags_match = true;  // done flags and rewards
};

/// Replays a reference trajectory through our environment from its recorded
/// initial state. The reference gives 0 reward on acrobot's terminal step; we
/// give -1, so that single case is mapped before comparing.
inline ParityResult check_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto t = ruleforge::trajectory_from_csv(buf.str());
    auto env = ruleforge::make_env(t.env, 0);
    ParityResult r;
    r.file = path.filename().string();
    auto obs = env->restore(t.initial_internal);
    for (std::size_t d = 0; d < obs.size(); ++d) {
        r.max_abs_error = std::max(r.max_abs_error, std::abs(obs[d] - t.rows.at(0).state.at(d)));
    }
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        const auto step = env->step(static_cast<std::size_t>(row.action));
        for (std::size_t d = 0; d < step.state.size(); ++d) {
            r.max_abs_error = std::max(r.max_abs_error, std::abs(step.state[d] - row.state.at(d)));
        }
        double expected_reward = row.reward;
        if (t.env == "acrobot" && row.done && row.reward == 0.0) expected_reward = -1.0;
        if (step.done != row.done || step.reward != expected_reward) r.flags_match = false;
        ++r.steps;
    }
    return r;
}

inline std::vector<std::filesystem::path> fixture_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace fixtures
