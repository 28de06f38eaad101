import math

import numpy as np
import pytest

from bayes_screen.data import ValidationError
from bayes_screen.simgen import (
    Example1Spec,
    Example2Spec,
    conditioned_covariance,
    gen_example1,
    gen_example2,
    signal_floor,
)


class TestExample1:
    def test_spec_validation(self):
        with pytest.raises(ValidationError):
            Example1Spec(n=10, p=5, s_n=3)  # odd
        with pytest.raises(ValidationError):
            Example1Spec(n=10, p=5, s_n=2, rho=1.0)
        with pytest.raises(ValidationError):
            Example1Spec(n=10, p=5, s_n=6)

    def test_reproducible(self):
        spec = Example1Spec(n=30, p=10, s_n=4, rho=0.4, seed=3)
        d1, t1 = gen_example1(spec)
        d2, t2 = gen_example1(spec)
        np.testing.assert_array_equal(d1.x, d2.x)
        np.testing.assert_array_equal(d1.y, d2.y)
        np.testing.assert_array_equal(t1.beta0, t2.beta0)

    def test_ar1_correlation_structure(self):
        spec = Example1Spec(n=60000, p=5, s_n=2, rho=0.5, seed=1)
        d, _ = gen_example1(spec)
        corr = np.corrcoef(d.x, rowvar=False)
        for lag in (1, 2, 3):
            for j in range(5 - lag):
                assert corr[j, j + lag] == pytest.approx(0.5**lag, abs=0.02)
        np.testing.assert_allclose(np.var(d.x, axis=0), 1.0, atol=0.03)

    def test_coefficient_signs_and_ranges(self):
        _, t = gen_example1(Example1Spec(n=30, p=20, s_n=6, seed=2))
        b = t.beta0
        assert np.all((b[:3] >= 1.0) & (b[:3] <= 5.0))
        assert np.all((b[3:6] >= -5.0) & (b[3:6] <= -1.0))
        assert np.all(b[6:] == 0.0)
        assert t.s_n == 6

    def test_noise_variance(self):
        spec = Example1Spec(n=50000, p=2, s_n=2, sigma_sq=4.0, seed=4)
        d, t = gen_example1(spec)
        resid = d.y - d.x @ t.beta0
        assert np.var(resid) == pytest.approx(4.0, rel=0.05)


class TestExample2:
    def test_spec_validation(self):
        with pytest.raises(ValidationError):
            Example2Spec(setting="III", n=10, p=5, s_n=2, sigma=1.0, a=1.0)
        with pytest.raises(ValidationError):
            Example2Spec(setting="I", n=10, p=5, s_n=0, sigma=1.0, a=1.0)
        with pytest.raises(ValidationError):
            Example2Spec(setting="I", n=10, p=5, s_n=2, sigma=0.0, a=1.0)

    def test_default_collinearity_rule(self):
        s5 = Example2Spec(setting="II", n=200, p=1000, s_n=5, sigma=1.0, a=1.0)
        s14 = Example2Spec(setting="II", n=200, p=1000, s_n=14, sigma=2.0, a=1.0)
        assert s5.collinearity() == pytest.approx(1 - 4 * math.log(200) / 1000)
        assert s14.collinearity() == pytest.approx(1 - 5 * math.log(200) / 1000)
        explicit = Example2Spec(setting="II", n=200, p=1000, s_n=5, sigma=1.0, a=1.0, r=0.3)
        assert explicit.collinearity() == 0.3

    def test_signal_floor(self):
        assert signal_floor(100, 4.0) == pytest.approx(4.0 * math.log(100) / 10.0)

    def test_setting_i_iid_design(self):
        spec = Example2Spec(setting="I", n=20000, p=6, s_n=2, sigma=1.5, a=1.0, seed=5)
        d, t = gen_example2(spec)
        np.testing.assert_allclose(np.mean(d.x, axis=0), 0.0, atol=0.05)
        np.testing.assert_allclose(np.var(d.x, axis=0), 1.0, atol=0.05)
        corr = np.corrcoef(d.x, rowvar=False)
        assert np.max(np.abs(corr - np.eye(6))) < 0.05
        assert np.all(np.abs(t.beta0[:2]) >= 1.0)
        assert t.psi_n >= 1.0

    def test_setting_ii_collinearity(self):
        spec = Example2Spec(setting="II", n=5000, p=30, s_n=5, sigma=1.0, a=1.0,
                            r=0.9, seed=6)
        d, _ = gen_example2(spec)
        # columns s..2s-1 are W + r * X_{j-s}: strongly tied to the base block
        for j in range(5, 10):
            corr = np.corrcoef(d.x[:, j], d.x[:, j - 5])[0, 1]
            assert corr > 0.5
        # far columns load on X_1 with weight 1 - r = 0.1: weak correlation
        far = np.corrcoef(d.x[:, 25], d.x[:, 0])[0, 1]
        assert abs(far) < 0.3

    def test_sign_probability(self):
        spec = Example2Spec(setting="I", n=20, p=3000, s_n=2000, sigma=1.0, a=0.5, seed=7)
        _, t = gen_example2(spec)
        neg_frac = np.mean(t.beta0[:2000] < 0)
        assert neg_frac == pytest.approx(0.4, abs=0.03)

    def test_reproducible(self):
        spec = Example2Spec(setting="II", n=40, p=20, s_n=5, sigma=1.0, a=1.0, seed=8)
        d1, _ = gen_example2(spec)
        d2, _ = gen_example2(spec)
        np.testing.assert_array_equal(d1.x, d2.x)


class TestConditionedCovariance:
    def test_condition_number_exact(self):
        rngen = np.random.default_rng(9)
        for s, cond in [(3, 7.0), (8, 50.0)]:
            a = conditioned_covariance(s, cond, rngen)
            ev = np.linalg.eigvalsh(a)
            assert ev[0] == pytest.approx(1.0, rel=1e-8)
            assert ev[-1] / ev[0] == pytest.approx(cond, rel=1e-8)
            np.testing.assert_allclose(a, a.T, atol=1e-12)
