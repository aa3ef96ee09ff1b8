#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ruleforge/policy.hpp"
#include "ruleforge/rng.hpp"

namespace ruleforge {

struct EnvSpec {
    std::string name;
    std::size_t obs_dim = 0;
    std::size_t action_count = 0;
    std::size_t max_steps = 0;
    double solve_threshold = 0.0;

    PolicyLimits limits() const noexcept { return {obs_dim, action_count, 0, 0}; }
};

struct StepResult {
    std::vector<double> state;
    double reward = 0.0;
    bool done = false;
};

/// Reward and done flag of one tick; the observation is written separately.
struct StepOutcome {
    double reward = 0.0;
    bool done = false;
    bool terminated = false;  // goal/failure reached, as opposed to the step cap
};

/// Single-episode-at-a-time simulator with a seeded initial-state draw.
///
/// The reset/step sequence is a pure function of the construction seed and
/// the actions taken: reset k draws from the same stream every time.
class Environment {
public:
    Environment(EnvSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seed) {}
    virtual ~Environment() = default;

    Environment(const Environment&) = delete;
    Environment& operator=(const Environment&) = delete;

    const EnvSpec& spec() const noexcept { return spec_; }
    bool done() const noexcept { return done_; }
    std::size_t steps() const noexcept { return steps_; }

    /// Draws a fresh initial state and returns its observation.
    std::vector<double> reset();

    /// Starts an episode from an explicit internal state (see internal_state()).
    std::vector<double> restore(std::span<const double> internal);

    /// Throws UsageError when the episode is over or the action is invalid.
    StepResult step(std::size_t action);

    /// Allocation-free step: writes the next observation into `obs`.
    StepOutcome step_into(std::size_t action, std::span<double> obs);

    std::vector<double> observation() const;
    void observation_into(std::span<double> obs) const { write_observation(obs); }

    /// Raw simulator state (CartPole/MountainCar: same as the observation;
    /// Acrobot: the two joint angles and velocities).
    virtual std::vector<double> internal_state() const = 0;

protected:
    virtual void draw_initial(Rng& rng) = 0;
    virtual void set_internal(std::span<const double> internal) = 0;
    /// Advances one tick; returns true on a terminal transition.
    virtual bool advance(std::size_t action) = 0;
    virtual void write_observation(std::span<double> obs) const = 0;
    virtual double step_reward() const noexcept = 0;

private:
    EnvSpec spec_;
    Rng rng_;
    std::size_t steps_ = 0;
    bool done_ = true;
    bool started_ = false;
};

/// Known names: cartpole, mountaincar, acrobot. Throws ConfigError otherwise.
EnvSpec env_spec(std::string_view name);
std::vector<std::string> env_names();
std::unique_ptr<Environment> make_env(std::string_view name, std::uint64_t seed);

/// Canonical cart-pole: Euler integration, tau 0.02, force +-10.
class CartPole final : public Environment {
public:
    static constexpr double kGravity = 9.8;
    static constexpr double kCartMass = 1.0;
    static constexpr double kPoleMass = 0.1;
    static constexpr double kTotalMass = kCartMass + kPoleMass;
    static constexpr double kHalfLength = 0.5;
    static constexpr double kPoleMassLength = kPoleMass * kHalfLength;
    static constexpr double kForce = 10.0;
    static constexpr double kTau = 0.02;
    static constexpr double kXThreshold = 2.4;
    static constexpr double kThetaThreshold = 12.0 * 2.0 * 3.141592653589793 / 360.0;

    explicit CartPole(std::uint64_t seed);
    std::vector<double> internal_state() const override { return {state_.begin(), state_.end()}; }

protected:
    void draw_initial(Rng& rng) override;
    void set_internal(std::span<const double> internal) override;
    bool advance(std::size_t action) override;
    void write_observation(std::span<double> obs) const override;
    double step_reward() const noexcept override { return 1.0; }

private:
    std::array<double, 4> state_{};
};

/// Canonical mountain car: force 0.001, gravity 0.0025, goal at x >= 0.5.
class MountainCar final : public Environment {
public:
    static constexpr double kMinPosition = -1.2;
    static constexpr double kMaxPosition = 0.6;
    static constexpr double kMaxSpeed = 0.07;
    static constexpr double kGoalPosition = 0.5;
    static constexpr double kGoalVelocity = 0.0;
    static constexpr double kForce = 0.001;
    static constexpr double kGravity = 0.0025;

    explicit MountainCar(std::uint64_t seed);
    std::vector<double> internal_state() const override { return {position_, velocity_}; }

protected:
    void draw_initial(Rng& rng) override;
    void set_internal(std::span<const double> internal) override;
    bool advance(std::size_t action) override;
    void write_observation(std::span<double> obs) const override;
    double step_reward() const noexcept override { return -1.0; }

private:
    double position_ = 0.0;
    double velocity_ = 0.0;
};

/// Canonical two-link acrobot ("book" dynamics), one RK4 step of 0.2 s per tick.
/// Observation: [cos t1, sin t1, cos t2, sin t2, dt1, dt2].
class Acrobot final : public Environment {
public:
    static constexpr double kPi = 3.141592653589793;
    static constexpr double kDt = 0.2;
    static constexpr double kLinkLength1 = 1.0;
    static constexpr double kLinkMass1 = 1.0;
    static constexpr double kLinkMass2 = 1.0;
    static constexpr double kLinkCom1 = 0.5;
    static constexpr double kLinkCom2 = 0.5;
    static constexpr double kLinkMoi = 1.0;
    static constexpr double kMaxVel1 = 4 * kPi;
    static constexpr double kMaxVel2 = 9 * kPi;

    explicit Acrobot(std::uint64_t seed);
    std::vector<double> internal_state() const override { return {state_.begin(), state_.end()}; }

protected:
    void draw_initial(Rng& rng) override;
    void set_internal(std::span<const double> internal) override;
    bool advance(std::size_t action) override;
    void write_observation(std::span<double> obs) const override;
    double step_reward() const noexcept override { return -1.0; }

private:
    std::array<double, 4> state_{};
};

}  // namespace ruleforge
