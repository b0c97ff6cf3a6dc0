"""Desk-scale environments with sparse rewards.

Two tasks with opposite exploration demands:

* CartPoleSparse starts essentially at its optimum (pole upright, cart
  centered) and pays reward only while it stays there -- exploration is
  mostly harmful.
* PointMass starts at a random position and pays reward only inside a small
  goal disk at the origin -- the goal must be discovered.

Dynamics are deterministic (semi-implicit Euler, dt = 0.02 s); only reset
draws randomness.  Actions live in [-1, 1]^dim and are clipped before
integration.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StepResult:
    state: np.ndarray
    reward: float
    terminated: bool
    truncated: bool


class CartPoleSparse:
    """Frictionless cart-pole balance with a sparse upright reward.

    Observation is (x, cos theta, sin theta, x_dot, theta_dot); reward is 1
    while cos theta > 0.995 and |x| < 1.8, the episode terminates when the
    cart leaves |x| < 1.8 and truncates at 1000 steps.
    """

    observation_dim = 5
    action_dim = 1
    step_limit = 1000
    physics = {
        "cart_mass": 1.0,       # kg
        "pole_mass": 0.1,       # kg
        "pole_half_length": 0.5,  # m
        "gravity": 9.81,        # m/s^2
        "force_scale": 10.0,    # N
        "dt": 0.02,             # s, control interval
        "substeps": 20,         # integrator substeps per control interval
        "x_limit": 1.8,         # m
        "cos_threshold": 0.995,
        "init_range": 0.05,
    }

    def __init__(self):
        self._rng = np.random.default_rng()
        self._steps = 0
        self._x = self._x_dot = self._theta = self._theta_dot = 0.0

    def _obs(self):
        return np.array([self._x, np.cos(self._theta), np.sin(self._theta),
                         self._x_dot, self._theta_dot])

    def reset(self, seed=None):
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        lim = self.physics["init_range"]
        self._x = self._rng.uniform(-lim, lim)
        self._theta = self._rng.uniform(-lim, lim)
        self._x_dot = 0.0
        self._theta_dot = 0.0
        self._steps = 0
        return self._obs()

    def step(self, action):
        p = self.physics
        a = float(np.clip(np.asarray(action, dtype=float).reshape(-1)[0],
                          -1.0, 1.0))
        force = p["force_scale"] * a
        m_c, m_p, half = p["cart_mass"], p["pole_mass"], p["pole_half_length"]
        total = m_c + m_p
        dt = p["dt"] / p["substeps"]
        for _ in range(p["substeps"]):
            cos_t, sin_t = np.cos(self._theta), np.sin(self._theta)
            tmp = (force + m_p * half * self._theta_dot ** 2 * sin_t) / total
            theta_acc = ((p["gravity"] * sin_t - cos_t * tmp)
                         / (half * (4.0 / 3.0 - m_p * cos_t ** 2 / total)))
            x_acc = tmp - m_p * half * theta_acc * cos_t / total
            self._x_dot += dt * x_acc
            self._theta_dot += dt * theta_acc
            self._x += dt * self._x_dot
            self._theta += dt * self._theta_dot
        self._steps += 1

        in_bounds = abs(self._x) < p["x_limit"]
        upright = np.cos(self._theta) > p["cos_threshold"]
        reward = 1.0 if (upright and in_bounds) else 0.0
        terminated = not in_bounds
        truncated = self._steps >= self.step_limit and not terminated
        return StepResult(self._obs(), reward, terminated, truncated)


class PointMass:
    """Damped 2-D point mass with a sparse goal disk at the origin.

    Observation is (px, py, vx, vy); reward is 1 while |p| < 0.1.  There is
    no termination; episodes truncate at 500 steps.
    """

    observation_dim = 4
    action_dim = 2
    step_limit = 500
    physics = {
        "drag": 0.1,        # 1/s
        "dt": 0.02,         # s
        "goal_radius": 0.1,  # m
        "init_range": 0.25,  # m
    }

    def __init__(self):
        self._rng = np.random.default_rng()
        self._steps = 0
        self._p = np.zeros(2)
        self._v = np.zeros(2)

    def _obs(self):
        return np.concatenate([self._p, self._v])

    def reset(self, seed=None):
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        lim = self.physics["init_range"]
        self._p = self._rng.uniform(-lim, lim, size=2)
        self._v = np.zeros(2)
        self._steps = 0
        return self._obs()

    def step(self, action):
        p = self.physics
        a = np.clip(np.asarray(action, dtype=float).reshape(2), -1.0, 1.0)
        self._v = self._v + p["dt"] * (a - p["drag"] * self._v)
        self._p = self._p + p["dt"] * self._v
        self._steps += 1
        reward = 1.0 if float(np.hypot(*self._p)) < p["goal_radius"] else 0.0
        truncated = self._steps >= self.step_limit
        return StepResult(self._obs(), reward, False, truncated)


ENV_KEYS = ("cartpole_sparse", "pointmass")


def make_env(key):
    """Environment registry keyed by config value."""
    if key == "cartpole_sparse":
        return CartPoleSparse()
    if key == "pointmass":
        return PointMass()
    raise ValueError(f"unknown env {key!r}; choose from {ENV_KEYS}")
