#include "ruleforge/envs.hpp"

#include <algorithm>
#include <cmath>

#include "ruleforge/errors.hpp"

namespace ruleforge {

// ---------------------------------------------------------------------------
// Environment

std::vector<double> Environment::reset() {
    draw_initial(rng_);
    steps_ = 0;
    done_ = false;
    started_ = true;
    return observation();
}

std::vector<double> Environment::restore(std::span<const double> internal) {
    if (internal.size() != internal_state().size()) {
        throw UsageError("restore: expected " + std::to_string(internal_state().size()) + " state values");
    }
    set_internal(internal);
    steps_ = 0;
    done_ = false;
    started_ = true;
    return observation();
}

std::vector<double> Environment::observation() const {
    std::vector<double> obs(spec_.obs_dim);
    write_observation(obs);
    return obs;
}

StepOutcome Environment::step_into(std::size_t action, std::span<double> obs) {
    if (!started_) throw UsageError(spec_.name + ": step before reset");
    if (done_) throw UsageError(spec_.name + ": step on a finished episode");
    if (action >= spec_.action_count) {
        throw UsageError(spec_.name + ": action " + std::to_string(action) + " out of range");
    }
    const bool terminated = advance(action);
    ++steps_;
    done_ = terminated || steps_ >= spec_.max_steps;
    write_observation(obs);
    return {step_reward(), done_, terminated};
}

StepResult Environment::step(std::size_t action) {
    StepResult result;
    result.state.resize(spec_.obs_dim);
    const auto outcome = step_into(action, result.state);
    result.reward = outcome.reward;
    result.done = outcome.done;
    return result;
}

// ---------------------------------------------------------------------------
// Registry

EnvSpec env_spec(std::string_view name) {
    if (name == "cartpole") return {"cartpole", 4, 2, 500, 500.0};
    if (name == "mountaincar") return {"mountaincar", 2, 3, 200, -110.0};
    if (name == "acrobot") return {"acrobot", 6, 3, 500, -100.0};
    throw ConfigError("unknown environment '" + std::string(name) + "' (expected cartpole, mountaincar or acrobot)");
}

std::vector<std::string> env_names() { return {"cartpole", "mountaincar", "acrobot"}; }

std::unique_ptr<Environment> make_env(std::string_view name, std::uint64_t seed) {
    if (name == "cartpole") return std::make_unique<CartPole>(seed);
    if (name == "mountaincar") return std::make_unique<MountainCar>(seed);
    if (name == "acrobot") return std::make_unique<Acrobot>(seed);
    env_spec(name);  // throws
    return nullptr;
}

// ---------------------------------------------------------------------------
// CartPole

CartPole::CartPole(std::uint64_t seed) : Environment(env_spec("cartpole"), seed) {}

void CartPole::draw_initial(Rng& rng) {
    for (auto& v : state_) v = rng.uniform(-0.05, 0.05);
}

void CartPole::set_internal(std::span<const double> internal) { std::copy(internal.begin(), internal.end(), state_.begin()); }

bool CartPole::advance(std::size_t action) {
    auto [x, x_dot, theta, theta_dot] = state_;
    const double force = action == 1 ? kForce : -kForce;
    const double costheta = std::cos(theta);
    const double sintheta = std::sin(theta);

    const double temp = (force + kPoleMassLength * (theta_dot * theta_dot) * sintheta) / kTotalMass;
    const double thetaacc = (kGravity * sintheta - costheta * temp) /
                            (kHalfLength * (4.0 / 3.0 - kPoleMass * (costheta * costheta) / kTotalMass));
    const double xacc = temp - kPoleMassLength * thetaacc * costheta / kTotalMass;

    x = x + kTau * x_dot;
    x_dot = x_dot + kTau * xacc;
    theta = theta + kTau * theta_dot;
    theta_dot = theta_dot + kTau * thetaacc;
    state_ = {x, x_dot, theta, theta_dot};

    return x < -kXThreshold || x > kXThreshold || theta < -kThetaThreshold || theta > kThetaThreshold;
}

void CartPole::write_observation(std::span<double> obs) const { std::copy(state_.begin(), state_.end(), obs.begin()); }

// ---------------------------------------------------------------------------
// MountainCar

MountainCar::MountainCar(std::uint64_t seed) : Environment(env_spec("mountaincar"), seed) {}

void MountainCar::draw_initial(Rng& rng) {
    position_ = rng.uniform(-0.6, -0.4);
    velocity_ = 0.0;
}

void MountainCar::set_internal(std::span<const double> internal) {
    position_ = internal[0];
    velocity_ = internal[1];
}

bool MountainCar::advance(std::size_t action) {
    velocity_ += (static_cast<double>(action) - 1.0) * kForce + std::cos(3 * position_) * (-kGravity);
    velocity_ = std::clamp(velocity_, -kMaxSpeed, kMaxSpeed);
    position_ += velocity_;
    position_ = std::clamp(position_, kMinPosition, kMaxPosition);
    if (position_ == kMinPosition && velocity_ < 0) velocity_ = 0.0;
    return position_ >= kGoalPosition && velocity_ >= kGoalVelocity;
}

void MountainCar::write_observation(std::span<double> obs) const {
    obs[0] = position_;
    obs[1] = velocity_;
}

// ---------------------------------------------------------------------------
// Acrobot

namespace {

using Augmented = std::array<double, 5>;  // t1, t2, dt1, dt2, torque

// Equations of motion; operation order follows the reference transcription
// so trajectories agree to the last bits wherever libm agrees.
Augmented acrobot_derivs(const Augmented& s) {
    constexpr double m1 = Acrobot::kLinkMass1;
    constexpr double m2 = Acrobot::kLinkMass2;
    constexpr double l1 = Acrobot::kLinkLength1;
    constexpr double lc1 = Acrobot::kLinkCom1;
    constexpr double lc2 = Acrobot::kLinkCom2;
    constexpr double I1 = Acrobot::kLinkMoi;
    constexpr double I2 = Acrobot::kLinkMoi;
    constexpr double g = 9.8;
    constexpr double pi = Acrobot::kPi;

    const double a = s[4];
    const double theta1 = s[0];
    const double theta2 = s[1];
    const double dtheta1 = s[2];
    const double dtheta2 = s[3];

    const double d1 = m1 * (lc1 * lc1) + m2 * (l1 * l1 + lc2 * lc2 + 2 * l1 * lc2 * std::cos(theta2)) + I1 + I2;
    const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + I2;
    const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - pi / 2.0);
    const double phi1 = -m2 * l1 * lc2 * (dtheta2 * dtheta2) * std::sin(theta2) -
                        2 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
                        (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - pi / 2) + phi2;
    const double ddtheta2 =
        (a + d2 / d1 * phi1 - m2 * l1 * lc2 * (dtheta1 * dtheta1) * std::sin(theta2) - phi2) /
        (m2 * (lc2 * lc2) + I2 - (d2 * d2) / d1);
    const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
    return {dtheta1, dtheta2, ddtheta1, ddtheta2, 0.0};
}

Augmented axpy(const Augmented& y, double h, const Augmented& k) {
    Augmented out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + h * k[i];
    return out;
}

double wrap(double x, double lo, double hi) {
    const double diff = hi - lo;
    while (x > hi) x = x - diff;
    while (x < lo) x = x + diff;
    return x;
}

}  // namespace

Acrobot::Acrobot(std::uint64_t seed) : Environment(env_spec("acrobot"), seed) {}

void Acrobot::draw_initial(Rng& rng) {
    for (auto& v : state_) v = rng.uniform(-0.1, 0.1);
}

void Acrobot::set_internal(std::span<const double> internal) { std::copy(internal.begin(), internal.end(), state_.begin()); }

bool Acrobot::advance(std::size_t action) {
    static constexpr double kTorques[] = {-1.0, 0.0, 1.0};
    const Augmented y0{state_[0], state_[1], state_[2], state_[3], kTorques[action]};

    const double dt = kDt;
    const double dt2 = dt / 2.0;
    const auto k1 = acrobot_derivs(y0);
    const auto k2 = acrobot_derivs(axpy(y0, dt2, k1));
    const auto k3 = acrobot_derivs(axpy(y0, dt2, k2));
    const auto k4 = acrobot_derivs(axpy(y0, dt, k3));
    std::array<double, 4> ns{};
    for (std::size_t i = 0; i < ns.size(); ++i) {
        ns[i] = y0[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }

    ns[0] = wrap(ns[0], -kPi, kPi);
    ns[1] = wrap(ns[1], -kPi, kPi);
    ns[2] = std::min(std::max(ns[2], -kMaxVel1), kMaxVel1);
    ns[3] = std::min(std::max(ns[3], -kMaxVel2), kMaxVel2);
    state_ = ns;
    return -std::cos(state_[0]) - std::cos(state_[1] + state_[0]) > 1.0;
}

void Acrobot::write_observation(std::span<double> obs) const {
    obs[0] = std::cos(state_[0]);
    obs[1] = std::sin(state_[0]);
    obs[2] = std::cos(state_[1]);
    obs[3] = std::sin(state_[1]);
    obs[4] = state_[2];
    obs[5] = state_[3];
}

}  // namespace ruleforge
