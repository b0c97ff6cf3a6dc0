"""Probability density primitives for the transition models and the policy.

Three families, all with diagonal structure and closed-form log-densities:

* :class:`StudentT` -- diagonal multivariate Student-t, dof >= 2 so the mean
  exists (and the variance whenever dof > 2).
* :class:`MixtureT` -- K-component mixture of Student-t's.
* :class:`PolicyDist` -- bounded-support action distribution on [-1, 1] per
  dimension, built from a Beta parameterized by a mode in (-1, 1) and a
  positive sharpness; its mean is available in closed form, which is what a
  greedy evaluation uses.

Parameters may carry leading batch axes; densities broadcast accordingly.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, digamma, gammaln

_HALF_LOG_PI = 0.5 * np.log(np.pi)
# Samples are nudged off the closed interval ends before evaluating Beta
# log-densities, keeping log-probabilities finite at the box boundary.
_EDGE_EPS = 1e-12


@dataclass
class StudentT:
    """Diagonal multivariate Student-t: loc/scale per dimension, shared dof."""
    loc: np.ndarray     # (..., dim)
    scale: np.ndarray   # (..., dim), > 0
    dof: np.ndarray     # (...,), >= 2

    def __post_init__(self):
        self.loc = np.asarray(self.loc, dtype=float)
        self.scale = np.asarray(self.scale, dtype=float)
        self.dof = np.asarray(self.dof, dtype=float)
        if np.any(self.scale <= 0.0):
            raise ValueError("scale must be strictly positive")
        if np.any(self.dof < 2.0):
            raise ValueError("dof must be >= 2")

    @property
    def dim(self):
        return self.loc.shape[-1]


def t_logpdf(d, x):
    """Sum of univariate Student-t log-densities across dimensions."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != d.dim:
        raise ValueError(f"x has dimension {x.shape[-1]}, expected {d.dim}")
    nu = d.dof[..., None]
    z = (x - d.loc) / d.scale
    per_dim = (gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0)
               - 0.5 * np.log(nu) - _HALF_LOG_PI - np.log(d.scale)
               - (nu + 1.0) / 2.0 * np.log1p(z * z / nu))
    return per_dim.sum(axis=-1)


def t_mean(d):
    """The distribution mean; equals loc since dof >= 2 > 1."""
    return d.loc


def t_logpdf_param_grads(d, x):
    """Exact derivatives of t_logpdf w.r.t. loc, scale, and dof.

    Returns (dloc, dscale, ddof) where dloc/dscale are per-dimension and
    ddof is summed over dimensions (the dof is shared across them).
    """
    x = np.asarray(x, dtype=float)
    nu = d.dof[..., None]
    z = (x - d.loc) / d.scale
    u = 1.0 + z * z / nu
    dloc = (nu + 1.0) * z / (nu * d.scale * u)
    dscale = (-1.0 + (nu + 1.0) * z * z / (nu * u)) / d.scale
    ddof = (0.5 * digamma((nu + 1.0) / 2.0) - 0.5 * digamma(nu / 2.0)
            - 0.5 / nu - 0.5 * np.log(u)
            + (nu + 1.0) * z * z / (2.0 * nu * nu * u))
    return dloc, dscale, ddof.sum(axis=-1)


@dataclass
class MixtureT:
    """Mixture of Student-t components, stored stacked along a K axis."""
    weights: np.ndarray  # (..., K), sums to one
    loc: np.ndarray      # (..., K, dim)
    scale: np.ndarray    # (..., K, dim)
    dof: np.ndarray      # (..., K)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.loc = np.asarray(self.loc, dtype=float)
        self.scale = np.asarray(self.scale, dtype=float)
        self.dof = np.asarray(self.dof, dtype=float)
        if np.any(self.weights < 0.0):
            raise ValueError("weights must be non-negative")
        if np.any(np.abs(self.weights.sum(axis=-1) - 1.0) > 1e-9):
            raise ValueError("weights must sum to one")
        if np.any(self.scale <= 0.0):
            raise ValueError("scale must be strictly positive")
        if np.any(self.dof < 2.0):
            raise ValueError("dof must be >= 2")

    @classmethod
    def from_components(cls, weights, components):
        return cls(weights,
                   np.stack([c.loc for c in components]),
                   np.stack([c.scale for c in components]),
                   np.stack([c.dof for c in components]))

    @property
    def dim(self):
        return self.loc.shape[-1]


def mixture_logpdf(m, x):
    """log sum_k w_k exp(logpdf_k(x)), max-shifted for stability.

    Zero-weight components are excluded from the sum so a one-hot mixture
    reproduces its active component exactly.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != m.dim:
        raise ValueError(f"x has dimension {x.shape[-1]}, expected {m.dim}")
    comp = t_logpdf(StudentT(m.loc, m.scale, m.dof), x[..., None, :])
    with np.errstate(divide="ignore"):
        logw = np.log(m.weights)
    terms = logw + comp
    shift = terms.max(axis=-1, keepdims=True)
    return (shift[..., 0]
            + np.log(np.exp(terms - shift).sum(axis=-1)))


def mixture_posteriors(m, x):
    """Per-component responsibilities softmax(log w_k + logpdf_k(x))."""
    comp = t_logpdf(StudentT(m.loc, m.scale, m.dof), x[..., None, :])
    with np.errstate(divide="ignore"):
        terms = np.log(m.weights) + comp
    shift = terms.max(axis=-1, keepdims=True)
    w = np.exp(terms - shift)
    return w / w.sum(axis=-1, keepdims=True)


@dataclass
class PolicyDist:
    """Per-dimension Beta on [-1, 1] with mode/sharpness parameterization.

    Dimension i uses Beta(1 + s_i (m_i + 1)/2, 1 + s_i (1 - m_i)/2) mapped
    affinely onto [-1, 1]; larger sharpness concentrates mass at the mode,
    sharpness -> 0 approaches uniform.
    """
    mode: np.ndarray       # (..., dim), in [-1, 1]
    sharpness: np.ndarray  # (..., dim), > 0

    def __post_init__(self):
        self.mode = np.asarray(self.mode, dtype=float)
        self.sharpness = np.asarray(self.sharpness, dtype=float)
        if np.any(np.abs(self.mode) > 1.0):
            raise ValueError("mode must lie in [-1, 1]")
        if np.any(self.sharpness <= 0.0):
            raise ValueError("sharpness must be strictly positive")

    @property
    def dim(self):
        return self.mode.shape[-1]


def policy_beta_params(p):
    a = 1.0 + p.sharpness * (p.mode + 1.0) / 2.0
    b = 1.0 + p.sharpness * (1.0 - p.mode) / 2.0
    return a, b


def policy_sample(p, rng, n=None):
    """Draw actions in [-1, 1]^dim; n adds a leading sample axis."""
    a, b = policy_beta_params(p)
    size = None if n is None else (n,) + p.mode.shape
    y = rng.beta(a, b, size=size)
    return 2.0 * y - 1.0


def policy_logpdf(p, x):
    """Joint log-density at x, one -ln 2 change-of-variable term per dimension."""
    x = np.asarray(x, dtype=float)
    a, b = policy_beta_params(p)
    y = np.clip((x + 1.0) / 2.0, _EDGE_EPS, 1.0 - _EDGE_EPS)
    per_dim = ((a - 1.0) * np.log(y) + (b - 1.0) * np.log1p(-y)
               - betaln(a, b) - np.log(2.0))
    return per_dim.sum(axis=-1)


def policy_logpdf_and_sample(p, rng, n=None):
    x = policy_sample(p, rng, n)
    return x, policy_logpdf(p, x)


def policy_logpdf_param_grads(p, x):
    """Per-dimension derivatives of the joint log-density w.r.t. mode/sharpness."""
    x = np.asarray(x, dtype=float)
    a, b = policy_beta_params(p)
    y = np.clip((x + 1.0) / 2.0, _EDGE_EPS, 1.0 - _EDGE_EPS)
    dab = digamma(a + b)
    da = np.log(y) - digamma(a) + dab
    db = np.log1p(-y) - digamma(b) + dab
    dmode = 0.5 * p.sharpness * (da - db)
    dsharp = 0.5 * ((p.mode + 1.0) * da + (1.0 - p.mode) * db)
    return dmode, dsharp


def policy_mean(p):
    """Closed-form mean s*m/(s+2) per dimension; strictly inside (-1, 1)."""
    return p.sharpness * p.mode / (p.sharpness + 2.0)
