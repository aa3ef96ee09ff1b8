#include "ruleforge/trajectory.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "ruleforge/envs.hpp"
#include "ruleforge/errors.hpp"

namespace ruleforge {

Trajectory record_trajectory(const Policy& policy, std::string_view env_name, std::uint64_t seed) {
    auto env = make_env(env_name, seed);
    validate(policy, env->spec().limits());
    Trajectory t;
    t.env = std::string(env_name);
    auto state = env->reset();
    t.initial_internal = env->internal_state();
    t.rows.push_back({0, -1, state, 0.0, false});
    while (!env->done()) {
        const auto action = eval_policy(policy, state);
        const auto outcome = env->step_into(action, state);
        t.rows.push_back({env->steps(), static_cast<int>(action), state, outcome.reward, outcome.done});
    }
    return t;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto pos = s.find(sep);
        out.push_back(s.substr(0, pos));
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
    return out;
}

template <typename T>
T parse_field(std::string_view text, std::size_t line, std::size_t col) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError("bad field '" + std::string(text) + "'", line, col);
    }
    return value;
}

}  // namespace

std::string trajectory_to_csv(const Trajectory& t) {
    std::string out = "# env: " + t.env + "\n# init:";
    for (double v : t.initial_internal) out += " " + num(v);
    out += "\nstep,action";
    const auto dims = t.rows.empty() ? 0 : t.rows.front().state.size();
    for (std::size_t d = 0; d < dims; ++d) out += ",s" + std::to_string(d);
    out += ",reward,done\n";
    for (const auto& r : t.rows) {
        out += std::to_string(r.step) + "," + std::to_string(r.action);
        for (double v : r.state) out += "," + num(v);
        out += "," + num(r.reward) + "," + (r.done ? "1" : "0") + "\n";
    }
    return out;
}

Trajectory trajectory_from_csv(std::string_view text) {
    Trajectory t;
    std::size_t line_no = 0;
    bool header = false;
    std::size_t dims = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.starts_with("# env:")) {
            auto v = line.substr(6);
            while (v.starts_with(' ')) v.remove_prefix(1);
            t.env = std::string(v);
            continue;
        }
        if (line.starts_with("# init:")) {
            for (auto tok : split(line.substr(7), ' ')) {
                if (!tok.empty()) t.initial_internal.push_back(parse_field<double>(tok, line_no, 1));
            }
            continue;
        }
        if (line.starts_with('#')) continue;
        const auto fields = split(line, ',');
        if (!header) {
            if (fields.size() < 4 || fields[0] != "step" || fields[1] != "action") {
                throw ParseError("expected header 'step,action,s0,...,reward,done'", line_no, 1);
            }
            dims = fields.size() - 4;
            header = true;
            continue;
        }
        if (fields.size() != dims + 4) throw ParseError("wrong number of columns", line_no, 1);
        TrajectoryRow row;
        row.step = parse_field<std::size_t>(fields[0], line_no, 1);
        row.action = parse_field<int>(fields[1], line_no, 2);
        for (std::size_t d = 0; d < dims; ++d) row.state.push_back(parse_field<double>(fields[2 + d], line_no, 3 + d));
        row.reward = parse_field<double>(fields[2 + dims], line_no, 3 + dims);
        row.done = parse_field<int>(fields[3 + dims], line_no, 4 + dims) != 0;
        t.rows.push_back(std::move(row));
    }
    if (!header) throw ParseError("missing header row", line_no, 1);
    return t;
}

}  // namespace ruleforge
