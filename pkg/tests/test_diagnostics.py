import numpy as np
import pytest

from bayes_screen.data import ValidationError
from bayes_screen.diagnostics import ess, gelman_rubin


class TestGelmanRubin:
    def test_identical_chains_closed_form(self):
        rngen = np.random.default_rng(0)
        chain = rngen.standard_normal(500)
        length = chain.shape[0]
        # B = 0, so R-hat = sqrt((L-1)/L)
        assert gelman_rubin([chain, chain]) == pytest.approx(
            np.sqrt((length - 1) / length), rel=1e-12)

    def test_iid_chains_near_one(self):
        rngen = np.random.default_rng(1)
        chains = rngen.standard_normal((4, 20000))
        assert 0.99 < gelman_rubin(chains) < 1.01

    def test_separated_means_flagged(self):
        rngen = np.random.default_rng(2)
        chains = rngen.standard_normal((3, 500)) + np.array([[0.0], [50.0], [100.0]])
        assert gelman_rubin(chains) > 3.0

    def test_affine_invariance(self):
        rngen = np.random.default_rng(3)
        chains = rngen.standard_normal((3, 400)) + np.array([[0.0], [1.0], [2.0]])
        a = gelman_rubin(chains)
        b = gelman_rubin(5.0 * chains - 7.0)
        assert a == pytest.approx(b, rel=1e-12)

    def test_constant_chains(self):
        const = np.ones(100)
        assert gelman_rubin([const, const]) == 1.0
        assert gelman_rubin([const, const + 1.0]) == np.inf

    def test_validation(self):
        with pytest.raises(ValidationError):
            gelman_rubin([np.ones(10)])
        with pytest.raises(ValidationError):
            gelman_rubin(np.ones((2, 1)))


class TestEss:
    def test_iid_near_full_length(self):
        rngen = np.random.default_rng(4)
        x = rngen.standard_normal(20000)
        assert ess(x) > 0.8 * 20000

    def test_ar1_theoretical_rate(self):
        # AR(1) with coefficient phi: ESS/n -> (1-phi)/(1+phi)
        phi = 0.7
        rngen = np.random.default_rng(5)
        n = 200000
        x = np.empty(n)
        x[0] = rngen.standard_normal()
        eps = rngen.standard_normal(n)
        for i in range(1, n):
            x[i] = phi * x[i - 1] + eps[i]
        want = n * (1 - phi) / (1 + phi)
        assert ess(x) == pytest.approx(want, rel=0.1)

    def test_never_exceeds_length(self):
        rngen = np.random.default_rng(6)
        x = -np.repeat(rngen.standard_normal(50), 10)  # strong positive correlation
        assert ess(x) <= 500

    def test_constant_chain_warns(self):
        with pytest.warns(UserWarning, match="constant chain"):
            assert ess(np.ones(100)) == 100.0

    def test_too_short(self):
        with pytest.raises(ValidationError):
            ess(np.arange(5))
