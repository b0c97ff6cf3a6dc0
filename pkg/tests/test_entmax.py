"""Entmax solver: bounds, residual, constant-cost approximation, oracle.

Hand-solved reference cases (worked in closed form):

* alpha = 1, J = (1, 0): assuming both entries active gives
  (1 + 1 - lam) + (1 + 0 - lam) = 1 => lam = 1.5, but the second entry clips
  at lam = 1, so the solution is lam = 1 with probabilities (1, 0).
* alpha = 1, J = (0.5, 0), lam = 0.75: raw masses (0.75, 0.25) sum to one.
* alpha = -1, J = (0, 0): P_i = [1 - (0 - lam)]^-1 = 1/(1 + lam); sum = 1
  gives lam = 1, uniform probabilities.
* alpha = 0: lam = LSE(J) and the probabilities are the softmax.
"""

import numpy as np
import pytest

from ebon import entmax
from ebon.entmax import (conventional_bounds, lambda_bounds, probabilities,
                         residual, solve_approx, solve_oracle)


def softmax(x):
    e = np.exp(x - np.max(x))
    return e / e.sum()


class TestLambdaBounds:
    def test_alpha_zero_degenerates_to_lse(self):
        j = np.array([0.0, 0.0])
        b = lambda_bounds(j, 0.0)
        assert b.lower == b.upper == pytest.approx(np.log(2.0), rel=1e-15)

    def test_sparsemax_case(self):
        b = lambda_bounds(np.array([1.0, 0.0]), 1.0)
        assert b.lower == pytest.approx(1.0)
        assert b.upper == pytest.approx(np.log(np.e + 1.0), rel=1e-12)
        assert b.lower <= 1.0 <= b.upper  # true multiplier is 1

    def test_symmetric_negative_alpha(self):
        # ln_0(2) = 2 - 1 = 1, and both bounds collapse onto lam = 1
        b = lambda_bounds(np.array([0.0, 0.0]), -1.0)
        assert b.lower == pytest.approx(1.0)
        assert b.upper == pytest.approx(1.0)

    def test_bracket_is_ordered_and_sign_correct(self):
        """e(lower) >= 0 >= e(upper) certifies the root is inside."""
        rng = np.random.default_rng(7)
        for alpha in (-2.0, -0.7, -0.1, 0.1, 0.9, 2.0):
            for sigma in (0.01, 1.0, 100.0):
                j = rng.normal(0.0, sigma, size=(50, 32))
                b = lambda_bounds(j, alpha)
                assert np.all(b.lower <= b.upper + 1e-12)
                assert np.all(residual(j, alpha, b.lower) >= -1e-9)
                assert np.all(residual(j, alpha, b.upper) <= 1e-9)

    def test_tightened_inside_conventional(self):
        rng = np.random.default_rng(8)
        for alpha in (-1.5, -0.3, 0.4, 1.7):
            j = rng.normal(0.0, 10.0, size=(100, 64))
            tight = lambda_bounds(j, alpha)
            conv = conventional_bounds(j, alpha)
            assert np.all(tight.lower >= conv.lower)
            assert np.all(tight.upper <= conv.upper)


class TestResidual:
    def test_softmax_residual_is_lse_minus_lam(self):
        rng = np.random.default_rng(9)
        j = rng.normal(size=12)
        lse = np.log(np.exp(j).sum())
        for lam in (-1.0, 0.0, 3.0):
            assert residual(j, 0.0, lam) == pytest.approx(lse - lam,
                                                          rel=1e-12)

    def test_root_at_hand_solved_multiplier(self):
        assert residual(np.array([1.0, 0.0]), 1.0, 1.0) == pytest.approx(0.0,
                                                                         abs=1e-15)

    def test_value_below_root(self):
        # lam = 0: (1+1) + (1+0) = 3
        got = residual(np.array([1.0, 0.0]), 1.0, 0.0)
        assert got == pytest.approx(np.log(3.0), rel=1e-12)

    def test_all_clipped_returns_neg_inf(self):
        assert residual(np.array([1.0, 0.0]), 1.0, 10.0) == -np.inf

    def test_non_increasing_in_lam(self):
        rng = np.random.default_rng(10)
        for alpha in (-2.0, -0.5, 0.0, 0.5, 2.0):
            j = rng.normal(size=16)
            b = lambda_bounds(j, alpha)
            lams = np.linspace(b.lower, b.upper + 1e-9, 50)
            vals = np.array([residual(j, alpha, lam) for lam in lams])
            assert np.all(np.diff(vals) <= 1e-12)


class TestProbabilities:
    def test_sparsemax_hand_solution(self):
        np.testing.assert_allclose(
            probabilities(np.array([1.0, 0.0]), 1.0, 1.0), [1.0, 0.0],
            atol=1e-15)

    def test_both_active_linear_case(self):
        np.testing.assert_allclose(
            probabilities(np.array([0.5, 0.0]), 1.0, 0.75), [0.75, 0.25],
            rtol=1e-12)

    def test_softmax_case(self):
        j = np.array([np.log(2.0), 0.0])
        lse = np.log(3.0)
        np.testing.assert_allclose(probabilities(j, 0.0, lse),
                                   [2.0 / 3.0, 1.0 / 3.0], rtol=1e-12)

    def test_renormalized_sum_is_one(self):
        rng = np.random.default_rng(11)
        for alpha in (-2.0, -0.5, 0.5, 2.0):
            j = rng.normal(size=(40, 16))
            sol = solve_approx(j, alpha)
            np.testing.assert_allclose(sol.probs.sum(axis=-1), 1.0,
                                       atol=1e-12)

    def test_degenerate_multiplier_raises(self):
        with pytest.raises(ValueError):
            probabilities(np.array([1.0, 0.0]), 1.0, 50.0)

    def test_sparsity_threshold_matches_clip(self):
        """For alpha > 0 an entry is zero exactly when 1 + alpha (J - lam) <= 0."""
        rng = np.random.default_rng(12)
        for alpha in (0.5, 1.0, 2.0):
            j = rng.normal(0.0, 2.0, size=64)
            sol = solve_oracle(j, alpha, tol=1e-12)
            clipped = 1.0 + alpha * (j - sol.lam) <= 0.0
            np.testing.assert_array_equal(sol.probs == 0.0, clipped)


class TestSolveApprox:
    def test_softmax_shortcut_costs_zero_evaluations(self):
        j = np.array([3.0, 1.0, 0.0])
        sol = solve_approx(j, 0.0)
        assert sol.n_evals == 0
        assert sol.lam == pytest.approx(np.log(np.exp(j).sum()), rel=1e-12)
        np.testing.assert_allclose(sol.probs, softmax(j), rtol=1e-12)

    def test_sparsemax_two_point(self):
        sol = solve_approx(np.array([1.0, 0.0]), 1.0)
        assert sol.n_evals == 3
        np.testing.assert_allclose(sol.probs, [1.0, 0.0], atol=1e-3)

    def test_symmetric_negative_alpha(self):
        sol = solve_approx(np.array([0.0, 0.0]), -1.0)
        assert sol.n_evals == 0  # bracket collapses for equal scores
        np.testing.assert_allclose(sol.probs, [0.5, 0.5], atol=1e-12)

    def test_exactly_three_residual_evaluations(self, monkeypatch):
        """Instrumented counter: the solver calls the residual three times."""
        calls = []
        true_residual = entmax.residual

        def counting(scores, alpha, lam):
            calls.append(1)
            return true_residual(scores, alpha, lam)

        monkeypatch.setattr(entmax, "residual", counting)
        rng = np.random.default_rng(13)
        sol = entmax.solve_approx(rng.normal(size=64), 1.3)
        assert len(calls) == 3
        assert sol.n_evals == 3

    def test_close_to_oracle_across_grid(self):
        rng = np.random.default_rng(14)
        for alpha in (-2.0, -1.0, -0.3, 0.3, 1.0, 2.0):
            for sigma in (0.1, 1.0, 10.0):
                j = rng.normal(0.0, sigma, size=(20, 64))
                approx = solve_approx(j, alpha)
                # approximation error measured through the residual magnitude
                mid = 0.5 * (lambda_bounds(j, alpha).lower
                             + lambda_bounds(j, alpha).upper)
                e_mid = np.abs(residual(j, alpha, mid))
                assert np.median(np.abs(approx.residual)) <= \
                    np.median(e_mid) + 1e-12

    def test_shift_invariance(self):
        rng = np.random.default_rng(15)
        j = rng.normal(size=32)
        for alpha in (-1.5, -0.5, 0.5, 1.5):
            base = solve_approx(j, alpha)
            shifted = solve_approx(j + 7.25, alpha)
            assert shifted.lam - base.lam == pytest.approx(7.25, abs=1e-9)
            np.testing.assert_allclose(shifted.probs, base.probs, atol=1e-10)

    def test_softmax_continuity_at_tiny_alpha(self):
        rng = np.random.default_rng(16)
        j = rng.normal(size=(200, 16))
        sm = np.exp(j - j.max(axis=-1, keepdims=True))
        sm /= sm.sum(axis=-1, keepdims=True)
        for alpha in (1e-6, -1e-6):
            sol = solve_approx(j, alpha)
            assert np.max(np.abs(sol.probs - sm)) < 1e-4

    def test_all_equal_scores_give_uniform(self):
        for alpha in (-2.0, -1.0, 0.0, 1.0, 2.0):
            sol = solve_approx(np.full(8, 3.7), alpha)
            np.testing.assert_allclose(sol.probs, np.full(8, 0.125),
                                       atol=1e-12)
            assert sol.n_evals == 0

    def test_monotone_tilt_in_alpha(self):
        """Argmax mass grows and support shrinks as alpha increases."""
        rng = np.random.default_rng(17)
        j = rng.normal(0.0, 1.0, size=24)
        alphas = np.arange(-2.0, 2.01, 0.25)
        alphas = alphas[alphas != 0.0]
        top = []
        support = []
        for alpha in alphas:
            sol = solve_oracle(j, float(alpha), tol=1e-12)
            top.append(sol.probs[np.argmax(j)])
            support.append(np.count_nonzero(sol.probs))
        assert np.all(np.diff(top) >= -1e-9)
        pos = [s for a, s in zip(alphas, support) if a > 0]
        assert np.all(np.diff(pos) <= 0)

    def test_single_candidate(self):
        for alpha in (-1.0, 0.0, 2.0):
            sol = solve_approx(np.array([4.2]), alpha)
            np.testing.assert_allclose(sol.probs, [1.0])


class TestSolveOracle:
    def test_hand_solved_sparsemax(self):
        sol = solve_oracle(np.array([1.0, 0.0]), 1.0, tol=1e-10)
        assert sol.lam == pytest.approx(1.0, abs=1e-9)
        assert sol.converged

    def test_degenerate_interval_immediate(self):
        sol = solve_oracle(np.array([3.0, 1.0, 0.0]), 0.0)
        assert sol.lam == pytest.approx(np.log(np.exp([3, 1, 0]).sum()),
                                        rel=1e-12)
        assert sol.converged
        assert sol.n_evals == 0

    def test_defining_equation_holds(self):
        from ebon.tsallis import q_exp
        j = np.array([0.5, 0.2, 0.1])
        sol = solve_oracle(j, 0.5, tol=1e-10)
        raw = q_exp(1.0 - 0.5, j - sol.lam)
        assert raw.sum() == pytest.approx(1.0, abs=1e-9)

    def test_nonconvergence_flag(self):
        sol = solve_oracle(np.array([5.0, 1.0, 0.0]), -1.5, max_iters=2,
                           tol=1e-14)
        assert not sol.converged

    def test_oracle_inside_tight_bounds_from_conventional_start(self):
        rng = np.random.default_rng(18)
        for alpha in (-2.0, -0.4, 0.4, 2.0):
            j = rng.normal(0.0, 5.0, size=(30, 32))
            conv = conventional_bounds(j, alpha)
            sol = solve_oracle(j, alpha, max_iters=200, tol=1e-10,
                               bounds=conv)
            tight = lambda_bounds(j, alpha)
            width = np.asarray(conv.upper) - np.asarray(conv.lower)
            slack = width * np.exp2(-sol.n_evals) + 1e-9
            assert np.all(sol.lam >= tight.lower - slack)
            assert np.all(sol.lam <= tight.upper + slack)
