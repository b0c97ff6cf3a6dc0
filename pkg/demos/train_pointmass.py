#!/usr/bin/env python3
"""A miniature training run on the point-mass task, end to end.

Each step draws candidate actions from the policy, scores them with the
action-influence objective, selects one with the entmax strategy, and
stores the transition; at episode end the learner and the transition models
replay half the buffer.  Twenty episodes is far from converged training --
this is a tour of the moving parts, not a result.
"""

from ebon.harness import RunConfig, Runner

cfg = RunConfig(
    env="pointmass",
    strategy="ent",
    alpha="arcsine",      # per-episode draw favoring the interval edges
    n_samples=64,         # candidate count per step (256 in full runs)
    episodes=20,
    seed=0,
    capacity=16384,
    eval_every=5,
    eval_episodes=2,
    out_dir="/tmp/ebon_demo",
)

runner = Runner(cfg)
print(f"{'ep':>3} {'alpha':>7} {'return':>7} {'steps':>6} "
      f"{'greedy':>7} {'temp':>8} {'wall':>8}")
for episode in range(cfg.episodes):
    row = runner.run_episode(episode)
    greedy = "" if row.greedy_return is None else f"{row.greedy_return:7.1f}"
    print(f"{row.episode:3d} {row.alpha:+7.2f} {row.ret:7.1f} "
          f"{row.steps:6d} {greedy:>7} {runner.learner.temperature:8.4f} "
          f"{row.wall_ms:7.0f}ms")

print()
print(f"buffer holds {len(runner.buffer)} transitions; "
      f"temperature {runner.learner.temperature:.4f}")
print("full studies run via: ebon sweep --preset eed --out results/eed")
