"""Accuracy/cost benchmark for the approximate entmax solver.

Sweeps score batches drawn from zero-mean Gaussians over a grid of
(N, sigma, alpha) cells and compares three ways of producing the
multiplier:

* ``midpoint``  -- center of the tightened bracket, no residual evaluations;
* ``ridders``   -- the constant-cost three-evaluation estimate;
* ``bisect30``  -- bisection capped at 30 iterations with a 1e-5 residual
  convergence check.

A high-precision bisection run started from the *conventional* bracket
serves as the reference root, so containment in the tightened bracket is
checked independently of how that bracket was derived.  Interquartile means
of |e(lam)| and per-cell wall times are reported.
"""

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .entmax import (DEGENERATE_WIDTH, conventional_bounds, lambda_bounds,
                     residual, solve_approx, solve_oracle)

DEFAULT_NS = (4, 16, 64, 256, 1024)
DEFAULT_SIGMAS = (0.01, 0.1, 1.0, 10.0, 100.0)


def default_alphas():
    """alpha in [-2, 2] with 0.1 increments, excluding the softmax point 0."""
    grid = np.round(np.arange(-20, 21) * 0.1, 10)
    return tuple(float(a) for a in grid if a != 0.0)


def interquartile_mean(values):
    """Mean of the middle half of the sample (25% trimmed from each side)."""
    v = np.sort(np.asarray(values, dtype=float).ravel())
    k = v.size // 4
    return float(v[k:v.size - k].mean())


@dataclass
class BenchCell:
    n: int
    sigma: float
    alpha: float
    iqm_abs_e_midpoint: float
    iqm_abs_e_ridders: float
    iqm_abs_e_bisect30: float
    iqm_abs_e_oracle: float
    ms_midpoint: float
    ms_ridders: float
    ms_bisect30: float
    ms_oracle: float
    ridders_evals_ok: bool
    ridders_fallbacks: int
    bounds_contain_root: bool
    oracle_in_tight: bool
    tight_in_conventional: bool


@dataclass
class BenchReport:
    cells: list = field(default_factory=list)
    pooled: dict = field(default_factory=dict)

    def write_csv(self, path):
        names = [f.name for f in BenchCell.__dataclass_fields__.values()]
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(names)
            for c in self.cells:
                w.writerow([getattr(c, n) for n in names])


def _run_cell(scores, sigma, alpha, bisect_iters, bisect_tol, oracle_iters,
              oracle_tol):
    t0 = time.perf_counter()
    bounds = lambda_bounds(scores, alpha)
    lam_mid = 0.5 * (bounds.lower + bounds.upper)
    t_mid = time.perf_counter() - t0
    e_mid = residual(scores, alpha, lam_mid)

    t0 = time.perf_counter()
    approx = solve_approx(scores, alpha)
    t_rid = time.perf_counter() - t0

    t0 = time.perf_counter()
    bisect = solve_oracle(scores, alpha, max_iters=bisect_iters,
                          tol=bisect_tol)
    t_bis = time.perf_counter() - t0

    conv = conventional_bounds(scores, alpha)
    t0 = time.perf_counter()
    oracle = solve_oracle(scores, alpha, max_iters=oracle_iters,
                          tol=oracle_tol, bounds=conv)
    t_orc = time.perf_counter() - t0

    # The residual is monotone, so sign conditions at the tightened
    # endpoints certify that the exact root lies inside the bracket.
    sign_ok = bool(np.all(residual(scores, alpha, bounds.lower) >= -1e-9)
                   and np.all(residual(scores, alpha, bounds.upper) <= 1e-9))
    # Containment of the numerical root, up to its own bisection precision.
    width0 = np.asarray(conv.upper) - np.asarray(conv.lower)
    slack = width0 * np.exp2(-oracle.n_evals) + 1e-9
    inside = bool(np.all(oracle.lam >= bounds.lower - slack)
                  and np.all(oracle.lam <= bounds.upper + slack))
    nested = bool(np.all(bounds.lower >= conv.lower)
                  and np.all(bounds.upper <= conv.upper))
    degenerate = (bounds.upper - bounds.lower) < DEGENERATE_WIDTH
    evals_ok = bool(np.all(np.where(degenerate, approx.n_evals == 0,
                                    approx.n_evals == 3)))

    return BenchCell(
        n=scores.shape[1], sigma=sigma, alpha=alpha,
        iqm_abs_e_midpoint=interquartile_mean(np.abs(e_mid)),
        iqm_abs_e_ridders=interquartile_mean(np.abs(approx.residual)),
        iqm_abs_e_bisect30=interquartile_mean(np.abs(bisect.residual)),
        iqm_abs_e_oracle=interquartile_mean(np.abs(oracle.residual)),
        ms_midpoint=1e3 * t_mid, ms_ridders=1e3 * t_rid,
        ms_bisect30=1e3 * t_bis, ms_oracle=1e3 * t_orc,
        ridders_evals_ok=evals_ok,
        ridders_fallbacks=int(np.count_nonzero(approx.fallback)),
        bounds_contain_root=sign_ok,
        oracle_in_tight=inside,
        tight_in_conventional=nested,
    ), np.abs(e_mid), np.abs(approx.residual), np.abs(bisect.residual)


def entmax_bench(ns=DEFAULT_NS, sigmas=DEFAULT_SIGMAS, alphas=None,
                 batch=100, seed=0, bisect_iters=30, bisect_tol=1e-5,
                 oracle_iters=200, oracle_tol=1e-10):
    """Run the full grid; returns a BenchReport with per-cell and pooled stats."""
    alphas = default_alphas() if alphas is None else tuple(alphas)
    rng = np.random.default_rng(seed)
    report = BenchReport()
    abs_mid, abs_rid, abs_bis = [], [], []
    for n in ns:
        for sigma in sigmas:
            for alpha in alphas:
                scores = rng.normal(0.0, sigma, size=(batch, n))
                cell, e_m, e_r, e_b = _run_cell(
                    scores, sigma, alpha, bisect_iters, bisect_tol,
                    oracle_iters, oracle_tol)
                report.cells.append(cell)
                abs_mid.append(e_m)
                abs_rid.append(e_r)
                abs_bis.append(e_b)

    def ratio(num, den):
        if den > 0.0:
            return num / den
        return 0.0 if num == 0.0 else float("inf")

    pooled_mid = interquartile_mean(np.concatenate(abs_mid))
    pooled_rid = interquartile_mean(np.concatenate(abs_rid))
    pooled_bis = interquartile_mean(np.concatenate(abs_bis))
    ridders_ms = np.array([c.ms_ridders for c in report.cells])
    q1, q3 = np.percentile(ridders_ms, [25, 75])
    report.pooled = {
        "iqm_abs_e_midpoint": pooled_mid,
        "iqm_abs_e_ridders": pooled_rid,
        "iqm_abs_e_bisect30": pooled_bis,
        "ridders_over_midpoint": ratio(pooled_rid, pooled_mid),
        "ridders_over_bisect30": ratio(pooled_rid, pooled_bis),
        "all_evals_exactly_3": all(c.ridders_evals_ok for c in report.cells),
        "total_fallbacks": sum(c.ridders_fallbacks for c in report.cells),
        "bounds_contain_root_frac": float(np.mean(
            [c.bounds_contain_root for c in report.cells])),
        "oracle_in_tight_frac": float(np.mean(
            [c.oracle_in_tight for c in report.cells])),
        "tight_in_conventional_frac": float(np.mean(
            [c.tight_in_conventional for c in report.cells])),
        "ridders_ms_iqr_over_median": float((q3 - q1)
                                            / np.median(ridders_ms)),
        "cells": len(report.cells),
    }
    return report


def format_summary(report):
    lines = ["entmax solver benchmark"]
    for key, val in report.pooled.items():
        lines.append(f"  {key}: {val}")
    return "\n".join(lines)
