"""Compact invariant suite behind the ``ebon selfcheck`` command.

Each check prints one PASS/FAIL line; the runner returns a non-zero exit
code if anything fails.  These are quick smoke versions of the full pytest
suite, meant for sanity-checking an installation.
"""

import numpy as np

from . import bon, entmax, tsallis
from .densities import policy_logpdf, policy_sample
from .empowerment import TransitionModels, kl_surrogate
from .envs import make_env
from .nets import Network


def _check_tsallis(rng):
    for _ in range(200):
        q = rng.uniform(-2.0, 3.0)
        x = rng.uniform(0.05, 20.0)
        if abs(tsallis.q_exp(q, tsallis.q_log(q, x)) - x) > 1e-10 * x:
            return False
    return True


def _check_entmax_bounds(rng):
    for n in (4, 64):
        for sigma in (0.1, 10.0):
            for alpha in (-2.0, -0.5, 0.5, 2.0):
                scores = rng.normal(0.0, sigma, size=(20, n))
                b = entmax.lambda_bounds(scores, alpha)
                if np.any(entmax.residual(scores, alpha, b.lower) < -1e-9):
                    return False
                if np.any(entmax.residual(scores, alpha, b.upper) > 1e-9):
                    return False
    return True


def _check_constant_cost(rng):
    scores = rng.normal(0.0, 1.0, size=(50, 128))
    sol = entmax.solve_approx(scores, 0.7)
    return bool(np.all(sol.n_evals == 3)
                and np.allclose(sol.probs.sum(axis=-1), 1.0, atol=1e-12))


def _check_scale_invariance(rng):
    scores = rng.uniform(0.1, 5.0, size=64)
    p1 = bon.selection_probs(scores, 1.5)
    p2 = bon.selection_probs(7.3 * scores, 1.5)
    return bool(np.max(np.abs(p1 - p2)) < 1e-10)


def _check_objective_nonneg(rng):
    models = TransitionModels(3, 2, rng=rng)
    s = rng.normal(size=(500, 3))
    a = rng.uniform(-1, 1, size=(500, 2))
    return bool(np.all(models.objective(s, a) >= 0.0)
                and np.all(kl_surrogate(rng.normal(size=1000) * 5) >= 0.0))


def _check_gradients(rng):
    net = Network(4, 3, rng)
    x = rng.normal(size=(5, 4))
    v = rng.normal(size=(5, 3))
    y, cache = net.forward_cached(x)
    grads, _ = net.backward(cache, v)
    h = 1e-6
    for _ in range(10):
        k = rng.integers(len(net.params()))
        p = net.params()[k]
        idx = tuple(rng.integers(dim) for dim in p.shape)
        orig = p[idx]
        p[idx] = orig + h
        up = float((net.forward(x) * v).sum())
        p[idx] = orig - h
        dn = float((net.forward(x) * v).sum())
        p[idx] = orig
        fd = (up - dn) / (2 * h)
        if abs(fd - grads[k][idx]) > 1e-4 * max(1.0, abs(fd)):
            return False
    return True


def _check_policy_box(rng):
    from .densities import PolicyDist
    dist = PolicyDist(rng.uniform(-1, 1, size=3), rng.uniform(0.1, 8, size=3))
    x = policy_sample(dist, rng, 2000)
    return bool(np.all(np.abs(x) <= 1.0)
                and np.all(np.isfinite(policy_logpdf(dist, x))))


def _check_env_determinism(rng):
    for key in ("pointmass", "cartpole_sparse"):
        env1, env2 = make_env(key), make_env(key)
        o1, o2 = env1.reset(seed=7), env2.reset(seed=7)
        if not np.array_equal(o1, o2):
            return False
        for _ in range(20):
            a = rng.uniform(-1, 1, size=env1.action_dim)
            r1, r2 = env1.step(a), env2.step(a)
            if not np.array_equal(r1.state, r2.state):
                return False
    return True


CHECKS = (
    ("deformed exp/log inverse identity", _check_tsallis),
    ("entmax bracket contains the root", _check_entmax_bounds),
    ("approximate solve costs 3 evaluations", _check_constant_cost),
    ("selection law is scale invariant", _check_scale_invariance),
    ("objective is non-negative", _check_objective_nonneg),
    ("network gradients match finite differences", _check_gradients),
    ("policy samples stay in the action box", _check_policy_box),
    ("environments are deterministic", _check_env_determinism),
)


def run_selfcheck(seed=0):
    failures = 0
    for name, fn in CHECKS:
        ok = fn(np.random.default_rng(seed))
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failures += 0 if ok else 1
    print(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed")
    return 0 if failures == 0 else 1
