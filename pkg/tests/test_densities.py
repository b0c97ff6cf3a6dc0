"""Density primitives: Student-t, t-mixture, and the bounded policy family.

Reference values computed independently:

* standard t with dof = 2 at x = 0: pdf = Gamma(1.5)/(sqrt(2 pi) Gamma(1))
  = 1/(2 sqrt(2)), so logpdf = -log(2 sqrt(2)).
* mode 0.5, sharpness 4 on [-1, 1]: mean = (lo + s*m + hi)/(s + 2) = 1/3.
"""

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import norm, t as student_t

from ebon.densities import (MixtureT, PolicyDist, StudentT, mixture_logpdf,
                            policy_beta_params, policy_logpdf,
                            policy_logpdf_and_sample, policy_mean,
                            policy_sample, t_logpdf, t_mean)


class TestStudentT:
    def test_standard_dof2_at_origin(self):
        d = StudentT(np.zeros(1), np.ones(1), np.array(2.0))
        expected = np.log(1.0 / (2.0 * np.sqrt(2.0)))
        assert t_logpdf(d, np.zeros(1)) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(-1.03972, abs=5e-6)

    def test_matches_scipy_per_dimension(self):
        rng = np.random.default_rng(30)
        loc = rng.normal(size=3)
        scale = rng.uniform(0.5, 2.0, size=3)
        dof = 4.5
        d = StudentT(loc, scale, np.array(dof))
        x = rng.normal(size=3)
        expected = student_t.logpdf(x, dof, loc=loc, scale=scale).sum()
        assert t_logpdf(d, x) == pytest.approx(expected, rel=1e-12)

    def test_maximal_at_loc(self):
        rng = np.random.default_rng(31)
        loc = rng.normal(size=4)
        d = StudentT(loc, rng.uniform(0.5, 2, size=4), np.array(3.0))
        at_mode = t_logpdf(d, loc)
        for _ in range(50):
            assert t_logpdf(d, loc + rng.normal(size=4)) <= at_mode

    def test_gaussian_limit_at_huge_dof(self):
        d = StudentT(np.zeros(1), np.ones(1), np.array(1e6))
        got = t_logpdf(d, np.ones(1))
        assert abs(got - norm.logpdf(1.0)) <= 1e-4

    def test_translation_covariance(self):
        rng = np.random.default_rng(32)
        loc = rng.normal(size=3)
        scale = rng.uniform(0.5, 2, size=3)
        x = rng.normal(size=3)
        shift = rng.normal(size=3)
        a = t_logpdf(StudentT(loc, scale, np.array(2.5)), x)
        b = t_logpdf(StudentT(loc + shift, scale, np.array(2.5)), x + shift)
        assert a == pytest.approx(b, abs=1e-12)

    def test_mean_is_loc(self):
        d = StudentT(np.array([1.0, 2.0]), np.ones(2), np.array(2.0))
        np.testing.assert_array_equal(t_mean(d), [1.0, 2.0])

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            StudentT(np.zeros(1), np.zeros(1), np.array(2.0))
        with pytest.raises(ValueError):
            StudentT(np.zeros(1), np.ones(1), np.array(1.5))

    def test_dimension_mismatch(self):
        d = StudentT(np.zeros(2), np.ones(2), np.array(2.0))
        with pytest.raises(ValueError):
            t_logpdf(d, np.zeros(3))

    def test_param_grads_match_finite_differences(self):
        rng = np.random.default_rng(33)
        from ebon.densities import t_logpdf_param_grads
        loc = rng.normal(size=3)
        scale = rng.uniform(0.5, 2, size=3)
        dof = 3.7
        x = rng.normal(size=3)
        d = StudentT(loc, scale, np.array(dof))
        dloc, dscale, ddof = t_logpdf_param_grads(d, x)
        h = 1e-6
        for i in range(3):
            for arr, grad in ((loc, dloc), (scale, dscale)):
                bumped = arr.copy()
                bumped[i] = arr[i] + h
                up = t_logpdf(StudentT(bumped if arr is loc else loc,
                                       bumped if arr is scale else scale,
                                       np.array(dof)), x)
                bumped[i] = arr[i] - h
                dn = t_logpdf(StudentT(bumped if arr is loc else loc,
                                       bumped if arr is scale else scale,
                                       np.array(dof)), x)
                fd = (up - dn) / (2 * h)
                assert grad[i] == pytest.approx(fd, rel=1e-5, abs=1e-8)
        up = t_logpdf(StudentT(loc, scale, np.array(dof + h)), x)
        dn = t_logpdf(StudentT(loc, scale, np.array(dof - h)), x)
        assert ddof == pytest.approx((up - dn) / (2 * h), rel=1e-5)


class TestMixtureT:
    def _component(self, rng, dim=2):
        return StudentT(rng.normal(size=dim), rng.uniform(0.5, 2, size=dim),
                        np.array(rng.uniform(2.0, 8.0)))

    def test_one_hot_weights_reduce_to_component(self):
        rng = np.random.default_rng(34)
        comps = [self._component(rng) for _ in range(3)]
        m = MixtureT.from_components(np.array([0.0, 1.0, 0.0]), comps)
        x = rng.normal(size=2)
        assert mixture_logpdf(m, x) == pytest.approx(
            t_logpdf(comps[1], x), rel=1e-12)

    def test_identical_components_collapse(self):
        rng = np.random.default_rng(35)
        c = self._component(rng)
        m = MixtureT.from_components(np.array([0.5, 0.5]), [c, c])
        x = rng.normal(size=2)
        assert mixture_logpdf(m, x) == pytest.approx(t_logpdf(c, x),
                                                     rel=1e-12)

    def test_matches_direct_two_term_sum(self):
        rng = np.random.default_rng(36)
        far_a = StudentT(np.full(2, -5.0), np.ones(2), np.array(3.0))
        far_b = StudentT(np.full(2, 5.0), np.ones(2), np.array(3.0))
        m = MixtureT.from_components(np.array([0.5, 0.5]), [far_a, far_b])
        x = rng.normal(size=2)
        direct = np.log(0.5 * np.exp(t_logpdf(far_a, x))
                        + 0.5 * np.exp(t_logpdf(far_b, x)))
        assert mixture_logpdf(m, x) == pytest.approx(direct, rel=1e-10)

    def test_lower_bound_by_weighted_component(self):
        rng = np.random.default_rng(37)
        comps = [self._component(rng) for _ in range(4)]
        w = np.array([0.1, 0.2, 0.3, 0.4])
        m = MixtureT.from_components(w, comps)
        for _ in range(20):
            x = rng.normal(size=2)
            floor = min(t_logpdf(c, x) for c in comps) + np.log(w.min())
            assert mixture_logpdf(m, x) >= floor - 1e-12

    def test_weight_validation(self):
        rng = np.random.default_rng(38)
        comps = [self._component(rng) for _ in range(2)]
        with pytest.raises(ValueError):
            MixtureT.from_components(np.array([0.7, 0.7]), comps)


class TestPolicyDist:
    def test_beta_parameterization(self):
        p = PolicyDist(np.array([0.5]), np.array([4.0]))
        a, b = policy_beta_params(p)
        assert a[0] == pytest.approx(4.0)  # 1 + 4 * 0.75
        assert b[0] == pytest.approx(2.0)  # 1 + 4 * 0.25

    def test_mean_formula(self):
        p = PolicyDist(np.array([0.5]), np.array([4.0]))
        assert policy_mean(p)[0] == pytest.approx(1.0 / 3.0, rel=1e-12)
        assert policy_mean(PolicyDist(np.zeros(3), np.full(3, 2.0)))[0] == 0.0

    def test_mean_approaches_mode_at_high_sharpness(self):
        p = PolicyDist(np.array([0.8]), np.array([1e6]))
        assert policy_mean(p)[0] == pytest.approx(0.8, abs=1e-5)

    def test_mean_strictly_inside_box(self):
        rng = np.random.default_rng(39)
        p = PolicyDist(rng.uniform(-1, 1, 16), rng.uniform(0.01, 50, 16))
        assert np.all(np.abs(policy_mean(p)) < 1.0)

    def test_symmetric_mode_zero(self):
        rng = np.random.default_rng(40)
        p = PolicyDist(np.zeros(1), np.array([3.0]))
        x = policy_sample(p, rng, 100000)
        se = x.std() / np.sqrt(x.size)
        assert abs(x.mean()) < 3 * se

    def test_empirical_mean_matches_formula(self):
        rng = np.random.default_rng(41)
        p = PolicyDist(np.array([0.5]), np.array([4.0]))
        x = policy_sample(p, rng, 200000)
        se = x.std() / np.sqrt(x.size)
        assert x.mean() == pytest.approx(1.0 / 3.0, abs=4 * se)

    def test_samples_in_closed_box(self):
        rng = np.random.default_rng(42)
        p = PolicyDist(rng.uniform(-1, 1, 4), rng.uniform(0.05, 20, 4))
        x = policy_sample(p, rng, 5000)
        assert np.all(np.abs(x) <= 1.0)

    def test_density_normalized_by_quadrature(self):
        """Trapezoid-free oracle: adaptive quadrature of the 1-d pdf."""
        for mode, sharp in ((0.0, 1.0), (0.5, 4.0), (-0.8, 9.0)):
            p = PolicyDist(np.array([mode]), np.array([sharp]))
            total, _ = quad(
                lambda x: np.exp(policy_logpdf(p, np.array([x]))),
                -1.0, 1.0, limit=200)
            assert total == pytest.approx(1.0, abs=1e-4)

    def test_logpdf_finite_at_own_samples(self):
        rng = np.random.default_rng(43)
        p = PolicyDist(rng.uniform(-1, 1, 3), rng.uniform(0.05, 30, 3))
        x, logp = policy_logpdf_and_sample(p, rng, 2000)
        assert np.all(np.isfinite(logp))

    def test_entropy_upper_bound(self):
        """Empirical entropy per dimension never beats uniform's ln 2."""
        rng = np.random.default_rng(44)
        for sharp in (0.1, 1.0, 8.0):
            p = PolicyDist(np.array([0.3]), np.array([sharp]))
            _, logp = policy_logpdf_and_sample(p, rng, 50000)
            entropy = -logp.mean()
            assert entropy <= np.log(2.0) + 0.01

    def test_param_grads_match_finite_differences(self):
        from ebon.densities import policy_logpdf_param_grads
        rng = np.random.default_rng(45)
        mode = rng.uniform(-0.9, 0.9, size=2)
        sharp = rng.uniform(0.5, 8.0, size=2)
        p = PolicyDist(mode, sharp)
        x = policy_sample(p, rng)
        dmode, dsharp = policy_logpdf_param_grads(p, x)
        h = 1e-6
        for i in range(2):
            for arr, grad in ((mode, dmode), (sharp, dsharp)):
                orig = arr[i]
                arr[i] = orig + h
                up = policy_logpdf(PolicyDist(mode, sharp), x)
                arr[i] = orig - h
                dn = policy_logpdf(PolicyDist(mode, sharp), x)
                arr[i] = orig
                assert grad[i] == pytest.approx((up - dn) / (2 * h),
                                                rel=1e-5, abs=1e-8)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            PolicyDist(np.array([1.5]), np.array([1.0]))
        with pytest.raises(ValueError):
            PolicyDist(np.array([0.0]), np.array([0.0]))
