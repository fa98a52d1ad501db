import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import special

from mellinkit import (Beta, BetaT, Exponential, Excess, Gamma, LogNormal, Uniform,
                       check_iteration, check_semigroup, excess, excess_mellin,
                       iterate_discrete, mellin, mellin_distance, survival)
from mellinkit.errors import OutOfDomain, QuadratureFailure

LAMS = np.arange(0.25, 5.01, 0.25)


class TestExcess:
    @pytest.mark.parametrize("theta", [0.5, 1.0, 3.0])
    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 5.0])
    def test_exponential_is_fixed(self, theta, t):
        assert mellin_distance(excess(Exponential(theta), t), Exponential(theta), LAMS) < 1e-8

    def test_uniform_gives_beta_t(self):
        assert mellin_distance(excess(Uniform(0, 1), 2.0), BetaT(3.0), LAMS) < 1e-12
        x = np.linspace(0, 1, 11)
        assert_allclose(survival(excess(Uniform(0, 1), 2.0), x), (1 - x) ** 3, atol=1e-10)

    def test_order_zero_returns_input(self):
        d = Gamma(2.0)
        assert excess(d, 0.0) is d

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            excess(Exponential(1.0), -1.0)


class TestExcessMellin:
    def test_exponential(self):
        assert_allclose(excess_mellin(Exponential(1.0), 3.0, 2.0).value, 2.0, rtol=1e-12)

    def test_lambda_zero(self):
        assert_allclose(excess_mellin(LogNormal(0.0, 1.0), 1.5, 0.0).value, 1.0)

    def test_uniform_mean(self):
        assert_allclose(excess_mellin(Uniform(0, 1), 1.0, 1.0).value, 1 / 3, rtol=1e-12)

    def test_quadrature_path_agrees(self):
        law = Excess(Gamma(2.0), 1.5)
        for lam in (0.5, 2.0, 4.0):
            assert_allclose(mellin(law, lam, method="quadrature").value,
                            excess_mellin(Gamma(2.0), 1.5, lam).value, rtol=1e-7)

    def test_gamma_ratio_formula(self):
        t, lam, a = 1.5, 2.5, 3.0
        want = math.exp(special.gammaln(t + 1) + special.gammaln(lam + 1)
                        - special.gammaln(lam + t + 1) + special.gammaln(a + lam + t)
                        - special.gammaln(a + t))
        assert_allclose(excess_mellin(Gamma(a), t, lam).value, want, rtol=1e-12)


class TestSemigroup:
    def test_lognormal_nested_quadrature(self):
        r = check_semigroup(LogNormal(0.0, 1.0), 1.0, 2.0, tol=1e-5)
        assert r.passed and r.details["method"] == "quadrature"

    def test_zero_step_is_exact(self):
        r = check_semigroup(Gamma(2.0), 0.0, 1.5, method="auto")
        assert r.details["distance"] < 1e-14

    def test_uniform_closed_form(self):
        assert check_semigroup(Uniform(0, 1), 1.0, 1.0, tol=1e-8, method="auto")
        assert mellin_distance(excess(excess(Uniform(0, 1), 1.0), 1.0), BetaT(3.0)) < 1e-8

    def test_commutes(self):
        y = Beta(2.0, 3.0)
        a = excess(excess(y, 0.7), 1.9)
        b = excess(excess(y, 1.9), 0.7)
        assert mellin_distance(a, b) < 1e-12


class TestIteration:
    def test_single_step(self):
        d = LogNormal(0.0, 0.5)
        assert iterate_discrete(d, 1) == excess(d, 1.0)

    def test_uniform_three_steps(self):
        assert check_iteration(Uniform(0, 1), 3, tol=1e-6)
        assert mellin_distance(iterate_discrete(Uniform(0, 1), 3), BetaT(4.0)) < 1e-6

    def test_exponential_five_steps(self):
        assert mellin_distance(iterate_discrete(Exponential(1.0), 5), Exponential(1.0)) < 1e-6

    def test_depth_limit(self):
        with pytest.raises(QuadratureFailure):
            iterate_discrete(Exponential(1.0), 9)

    def test_three_deep_survival_matches_closed_form(self):
        x = np.array([0.2, 0.5])
        assert_allclose(survival(iterate_discrete(Uniform(0, 1), 3), x), (1 - x) ** 4,
                        atol=1e-8)


families = st.one_of(
    st.builds(Exponential, st.floats(0.3, 3.0)),
    st.builds(Gamma, st.floats(0.3, 5.0)),
    st.builds(Beta, st.floats(0.3, 4.0), st.floats(0.3, 4.0)),
    st.builds(LogNormal, st.floats(-1.0, 1.0), st.floats(0.05, 1.0)),
    st.builds(Uniform, st.just(0.0), st.floats(0.5, 3.0)),
)


class TestProperties:
    @settings(max_examples=30, deadline=None)
    @given(families, st.floats(0.1, 3.0), st.floats(0.1, 3.0))
    def test_semigroup(self, spec, s, t):
        assert check_semigroup(spec, s, t, LAMS, tol=1e-10, method="auto")

    @settings(max_examples=20, deadline=None)
    @given(families, st.floats(0.1, 4.0), st.lists(st.floats(0.0, 10.0), min_size=2,
                                                   max_size=10))
    def test_excess_survival_monotone(self, spec, t, xs):
        s = survival(excess(spec, t), np.sort(xs))
        assert np.all(np.diff(s) <= 1e-10)
        assert np.all((s >= 0) & (s <= 1))
