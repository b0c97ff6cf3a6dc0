"""Best-of-N action selection strategies over non-negative objective scores.

Four strategies share one surface: ``random`` draws a single candidate and
ignores scores, ``hard`` takes the argmax, and ``ent`` samples from the
entmax probabilities of the auto-scaled scores (``alpha = 0`` recovers the
softmax strategy).  Scores are scaled by the reciprocal of their sample mean
so the selection law is invariant to the objective's overall scale.
"""

from dataclasses import dataclass

import numpy as np

from .entmax import solve_approx

STRATEGY_KINDS = ("random", "hard", "ent")

# Sample means below this are treated as all-zero scores: no preference
# signal, so selection falls back to uniform.
_ZERO_MEAN_TOL = 1e-12


@dataclass
class Candidates:
    """N candidate actions with their non-negative objective values."""
    items: np.ndarray   # (N, action_dim)
    scores: np.ndarray  # (N,)

    def __post_init__(self):
        self.items = np.asarray(self.items, dtype=float)
        self.scores = np.asarray(self.scores, dtype=float)
        if self.items.ndim != 2 or self.scores.ndim != 1:
            raise ValueError("items must be (N, dim) and scores (N,)")
        if self.items.shape[0] != self.scores.shape[0] or self.scores.size < 1:
            raise ValueError("items and scores must share length N >= 1")
        if not np.all(np.isfinite(self.scores)) or np.any(self.scores < 0.0):
            raise ValueError("scores must be finite and non-negative")


@dataclass
class StrategyConfig:
    """Which selection strategy to run and with what parameters."""
    kind: str = "ent"
    alpha: float = 0.0      # ent only; 0 is the softmax strategy
    n_samples: int = 256

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"kind must be one of {STRATEGY_KINDS}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")

    @property
    def candidates_per_step(self):
        return 1 if self.kind == "random" else self.n_samples


def auto_beta(scores):
    """Reciprocal of the sample mean, so scaled scores have mean one.

    Returns None when the mean is effectively zero (all-zero scores carry no
    preference); callers fall back to uniform selection.
    """
    scores = np.asarray(scores, dtype=float)
    mean = float(scores.mean())
    if mean < _ZERO_MEAN_TOL:
        return None
    return 1.0 / mean


def select_hard(c):
    """The argmax candidate; ties break toward the lowest index."""
    return c.items[int(np.argmax(c.scores))]


def sample_categorical(p, u):
    """Index of the first cumulative-probability bucket exceeding u."""
    p = np.asarray(p, dtype=float)
    if abs(float(p.sum()) - 1.0) > 1e-9:
        raise ValueError("p must sum to one")
    if not 0.0 <= u < 1.0:
        raise ValueError("u must lie in [0, 1)")
    idx = int(np.searchsorted(np.cumsum(p), u, side="right"))
    return min(idx, p.size - 1)


def selection_probs(scores, alpha):
    """Entmax selection probabilities of auto-scaled scores (uniform if all zero)."""
    scores = np.asarray(scores, dtype=float)
    beta = auto_beta(scores)
    if beta is None:
        return np.full(scores.size, 1.0 / scores.size)
    return solve_approx(beta * scores, alpha).probs


def select_ebon(c, alpha, rng):
    """Draw one candidate from the entmax probabilities of its scaled scores.

    Returns the chosen action together with the full probability vector for
    diagnostics.  ``alpha = 0`` is soft (softmax) selection; large positive
    alpha approaches hard selection.
    """
    probs = selection_probs(c.scores, alpha)
    idx = sample_categorical(probs, float(rng.random()))
    return c.items[idx], probs


def select(c, cfg, rng):
    """Dispatch on the configured strategy; returns (action, chosen index, probs)."""
    if cfg.kind == "random":
        idx = 0 if c.scores.size == 1 else int(rng.integers(c.scores.size))
        return c.items[idx], idx, np.full(c.scores.size, 1.0 / c.scores.size)
    if cfg.kind == "hard":
        idx = int(np.argmax(c.scores))
        return c.items[idx], idx, None
    probs = selection_probs(c.scores, cfg.alpha)
    idx = sample_categorical(probs, float(rng.random()))
    return c.items[idx], idx, probs
