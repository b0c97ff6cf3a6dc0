"""Deformed exponential/logarithm primitives and the deformed KL divergence.

The deformation parameter ``q`` generalizes the ordinary exp/log pair:

    exp_q(x) = [1 + (1-q) x]_+ ^ (1/(1-q))
    ln_q(x)  = (x^(1-q) - 1) / (1-q)

with the q -> 1 limit recovering ``exp`` and ``ln`` exactly.  These are the
building blocks of the sparse selection probabilities in :mod:`ebon.entmax`.

All functions accept scalars or numpy arrays and broadcast; scalar input
yields a plain float.
"""

import numpy as np

# Below this distance from q = 1 the deformed forms are routed to the exact
# exp/ln limit instead of dividing by (1 - q).
_Q_ONE_TOL = 1e-12


def _as_result(x_in, out):
    if np.ndim(x_in) == 0:
        return float(out)
    return out


def q_exp(q, x):
    """Deformed exponential ``[1 + (1-q)x]_+ ^ (1/(1-q))``; ``exp(x)`` at q = 1.

    For q < 1 a non-positive base clips to 0.  For q > 1 the clip boundary is
    a pole and the value diverges to +inf beyond it.  Evaluated through
    ``exp(log1p(.)/(1-q))`` so large powers cannot overflow prematurely.
    """
    x = np.asarray(x, dtype=float)
    if abs(q - 1.0) < _Q_ONE_TOL:
        return _as_result(x, np.exp(x))
    omq = 1.0 - q
    t = omq * x
    safe = t > -1.0
    expo = np.where(safe, np.log1p(np.where(safe, t, 0.0)) / omq,
                    -np.inf if omq > 0 else np.inf)
    return _as_result(x, np.exp(expo))


def q_log(q, x):
    """Deformed logarithm ``(x^(1-q) - 1)/(1-q)``; ``ln(x)`` at q = 1.

    Defined for x > 0 only; raises ValueError outside the domain.  Uses the
    ``expm1((1-q) ln x)`` form, which stays accurate arbitrarily close to
    the q = 1 limit.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("q_log requires strictly positive arguments")
    if abs(q - 1.0) < _Q_ONE_TOL:
        return _as_result(x, np.log(x))
    omq = 1.0 - q
    return _as_result(x, np.expm1(omq * np.log(x)) / omq)


def q_kl(q, p1, p2):
    """Deformed KL divergence ``sum_i p1_i * (-ln_q(p2_i / p1_i))``.

    Both arguments must be probability vectors of the same length, and p2
    must be strictly positive wherever p1 is.  Equals
    ``(1 - sum p1^q p2^(1-q)) / (1-q)``: non-negative for q >= 0 (zero iff
    the distributions coincide, except q = 0 where it vanishes identically)
    and non-positive for q < 0, where Jensen's inequality flips.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape != p2.shape:
        raise ValueError("probability vectors must have the same shape")
    for p in (p1, p2):
        if abs(float(p.sum()) - 1.0) > 1e-9 or np.any(p < 0.0):
            raise ValueError("arguments must be probability vectors")
    support = p1 > 0.0
    if np.any(p2[support] <= 0.0):
        raise ValueError("p2 must be positive on the support of p1")
    ratio = p2[support] / p1[support]
    return float(-np.sum(p1[support] * q_log(q, ratio)))
