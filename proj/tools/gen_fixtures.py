#!/usr/bin/env python3
"""Generate reference trajectory fixtures from the Gymnasium classic-control envs.

Each file records one (env, seed, action script) episode of at most 200 steps
in the same CSV layout the C++ replay tool emits. The initial simulator state
is drawn from the canonical range with numpy's default_rng(seed) and stored on
the '# init:' line so the C++ side can start from the identical state.

Usage: tools/gen_fixtures.py [output_dir]   (default: fixtures/)
"""

import math
import pathlib
import sys

import gymnasium as gym
import numpy as np

STEPS = 200

ENVS = {
    "cartpole": ("CartPole-v1", 0.05),
    "mountaincar": ("MountainCar-v0", None),
    "acrobot": ("Acrobot-v1", 0.1),
}

SCRIPTS = {
    "cartpole": {
        "alternate": lambda t, s: t % 2,
        "push_right": lambda t, s: 1,
        "feedback": lambda t, s: 1 if s[2] + 0.5 * s[3] > 0 else 0,
    },
    "mountaincar": {
        "push_right": lambda t, s: 2,
        "blocks": lambda t, s: (t // 15) % 3,
        "energy": lambda t, s: 2 if s[1] >= 0 else 0,
    },
    "acrobot": {
        "positive_torque": lambda t, s: 2,
        "cycle": lambda t, s: t % 3,
        "energy": lambda t, s: 2 if s[2] > 0 else 0,
    },
}

SEEDS = {"alternate": 11, "push_right": 12, "feedback": 13, "blocks": 21, "energy": 22,
         "positive_torque": 31, "cycle": 32}


def initial_state(name, seed):
    rng = np.random.default_rng(seed)
    if name == "mountaincar":
        return np.array([rng.uniform(-0.6, -0.4), 0.0])
    lim = ENVS[name][1]
    return rng.uniform(-lim, lim, size=4)


def observe(name, state):
    s = [float(v) for v in state]
    if name == "acrobot":
        return [math.cos(s[0]), math.sin(s[0]), math.cos(s[1]), math.sin(s[1]), s[2], s[3]]
    return s


def fmt(v):
    return repr(float(v))


def generate(name, script, out_dir):
    env = gym.make(ENVS[name][0])
    env.reset(seed=0)
    init = initial_state(name, SEEDS[script])
    env.unwrapped.state = init.copy() if name != "mountaincar" else np.array(init)
    internal = [float(v) for v in init]

    obs = observe(name, env.unwrapped.state)
    lines = [f"# env: {name}", "# init: " + " ".join(fmt(v) for v in internal),
             "step,action," + ",".join(f"s{i}" for i in range(len(obs))) + ",reward,done",
             "0,-1," + ",".join(fmt(v) for v in obs) + ",0,0"]
    policy = SCRIPTS[name][script]
    internal_state = list(internal)
    for t in range(1, STEPS + 1):
        action = policy(t - 1, internal_state)
        _, reward, terminated, truncated, _ = env.step(action)
        internal_state = [float(v) for v in env.unwrapped.state]
        obs = observe(name, internal_state)
        done = terminated or truncated
        lines.append(f"{t},{action}," + ",".join(fmt(v) for v in obs) + f",{fmt(reward)},{int(done)}")
        if done:
            break
    path = out_dir / f"{name}_{script}_seed{SEEDS[script]}.csv"
    path.write_text("\n".join(lines) + "\n")
    return path, t


def main():
    out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, scripts in SCRIPTS.items():
        for script in scripts:
            path, steps = generate(name, script, out_dir)
            print(f"{path}: {steps} steps")


if __name__ == "__main__":
    main()
