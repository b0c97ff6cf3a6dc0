#!/usr/bin/env python3
"""Train the two transition models on toy dynamics and look at the
action-influence objective J they induce.

The conditioned model p_e(s'|s,a) learns a tight action-dependent
prediction; the marginal p_m(s'|s) must spread over everything any action
could do.  J evaluates their log-ratio at p_e's own mean: actions whose
outcome is atypical under the marginal score high, so maximizing J pushes
toward high-influence (exploratory) actions.  J >= 0 by construction.
"""

import numpy as np

from ebon.empowerment import TransitionModels

rng = np.random.default_rng(1)

# toy dynamics: s' = s + 0.5 * a + noise, 2-d state, 1-d action
def step(s, a):
    drift = np.concatenate([0.5 * a, 0.2 * a], axis=-1)
    return s + drift + 0.02 * rng.normal(size=s.shape)


models = TransitionModels(state_dim=2, action_dim=1, lr=3e-3, rng=rng)

print("training both models on replayed transitions...")
for it in range(1500):
    s = rng.uniform(-1, 1, size=(64, 2))
    a = rng.uniform(-1, 1, size=(64, 1))
    loss = models.update(s, a, step(s, a))
    if it % 300 == 0:
        print(f"  iter {it:5d}  joint NLL {loss:8.3f}")

print()
print("=== J across the action range at a fixed state ===")
s0 = np.zeros(2)
actions = np.linspace(-1, 1, 11)[:, None]
j = models.objective(s0, actions)
for a, val in zip(actions[:, 0], j):
    bar = "#" * int(40 * val / max(j.max(), 1e-9))
    print(f"a = {a:+.1f}  J = {val:8.4f}  {bar}")

print()
print("extreme actions have atypical outcomes under the marginal, so they")
print("carry the largest objective; J stays non-negative everywhere:")
probe_s = rng.uniform(-1, 1, size=(5000, 2))
probe_a = rng.uniform(-1, 1, size=(5000, 1))
vals = models.objective(probe_s, probe_a)
print(f"  min J over 5000 random probes: {vals.min():.3e}")
