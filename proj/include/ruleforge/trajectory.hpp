#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ruleforge/policy.hpp"

namespace ruleforge {

/// One row of a trajectory file. Row 0 is the initial state (action -1).
struct TrajectoryRow {
    std::size_t step = 0;
    int action = -1;
    std::vector<double> state;
    double reward = 0.0;
    bool done = false;
};

/// Episode trace in the fixture CSV format:
///
///     # env: cartpole
///     # init: <internal state, %.17g, space separated>
///     step,action,s0,...,s{n-1},reward,done
///
/// The init line carries the simulator state, which for acrobot is not the
/// observation, so a trace can be replayed exactly.
struct Trajectory {
    std::string env;
    std::vector<double> initial_internal;
    std::vector<TrajectoryRow> rows;
};

/// Rolls `policy` out for one episode on a fresh environment seeded with `seed`.
Trajectory record_trajectory(const Policy& policy, std::string_view env_name, std::uint64_t seed);

std::string trajectory_to_csv(const Trajectory& t);
/// Throws ParseError.
Trajectory trajectory_from_csv(std::string_view text);

}  // namespace ruleforge
