#!/usr/bin/env python3
"""Compare the four candidate-selection strategies on fixed scores.

One knob, alpha, moves selection continuously from near-uniform (negative,
heavy-tailed) through softmax (zero) to near-argmax (large positive), while
the reciprocal-of-mean auto-scale keeps the law invariant to the score
scale.
"""

import numpy as np

from ebon.bon import (Candidates, StrategyConfig, select, selection_probs)

rng = np.random.default_rng(7)
scores = np.array([0.2, 0.5, 1.0, 2.0, 6.0])
items = np.arange(10).reshape(5, 2).astype(float)
cand = Candidates(items, scores)

print("scores:", scores)
print()
print("=== selection probabilities as alpha varies ===")
print(f"{'alpha':>8} " + " ".join(f"{f'P[{i}]':>7}" for i in range(5))
      + "  entropy")
for alpha in (-4.0, -2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 8.0, 50.0):
    p = selection_probs(scores, alpha)
    mask = p > 0
    ent = -float(np.sum(p[mask] * np.log(p[mask])))
    print(f"{alpha:+8.1f} " + " ".join(f"{x:7.4f}" for x in p)
          + f"  {ent:.3f}")

print()
print("=== the auto-scale makes selection scale-free ===")
for c in (0.01, 1.0, 1000.0):
    p = selection_probs(c * scores, 1.0)
    print(f"scores x {c:<7}: P = " + " ".join(f"{x:.4f}" for x in p))

print()
print("=== empirical draws per strategy (2000 each) ===")
for kind, alpha in (("random", 0.0), ("hard", 0.0), ("ent", 0.0),
                    ("ent", 2.0), ("ent", -2.0)):
    counts = np.zeros(5, dtype=int)
    for _ in range(2000):
        _, idx, _ = select(cand, StrategyConfig(kind, alpha, 5), rng)
        counts[idx] += 1
    label = kind if kind != "ent" else f"ent({alpha:+.0f})"
    print(f"{label:>9}: " + " ".join(f"{c:5d}" for c in counts))
print()
print("note: 'random' ignores scores entirely (uniform over candidates);"
      "\nin training runs it draws a single candidate per step instead.")
