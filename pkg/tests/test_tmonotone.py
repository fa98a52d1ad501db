import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import special

from mellinkit import (Beta, BetaT, Exponential, Gamma, LogNormal, Uniform, beta_mix,
                       check_cm_limit, check_downward_closure, check_k_monotone, density,
                       log_mellin_values, mellin_distance, point_mass, recover_mixing_mellin)
from mellinkit.tmonotone import cm_limit_gaps

LAMS = np.linspace(0.25, 4.0, 16)


class TestBetaMix:
    def test_point_mass_gives_beta_t(self):
        mix = beta_mix(point_mass(1.0), 3.0)
        assert mellin_distance(mix, BetaT(3.0), LAMS) < 1e-12
        x = np.array([0.1, 0.5, 0.9])
        assert_allclose(density(mix, x), 3 * (1 - x) ** 2, rtol=1e-7)

    @pytest.mark.parametrize("t", [0.5, 2.0, 4.5])
    def test_gamma_mixture_is_exponential(self, t):
        assert mellin_distance(beta_mix(Gamma(1.0 + t), t), Exponential(1.0), LAMS) < 1e-10

    def test_product_rule(self):
        mix = beta_mix(Gamma(2.0), 1.5)
        want = log_mellin_values(BetaT(1.5), LAMS)[0] + log_mellin_values(Gamma(2.0), LAMS)[0]
        assert_allclose(log_mellin_values(mix, LAMS)[0], want, atol=1e-12)

    def test_needs_positive_t(self):
        with pytest.raises(ValueError):
            beta_mix(Gamma(2.0), 0.0)


class TestKMonotone:
    def test_beta_t_four(self):
        assert check_k_monotone(BetaT(4.0), 4, [0.0, 1.0])

    def test_exponential_order_six(self):
        assert check_k_monotone(Exponential(1.0), 6, [0.0, 10.0])

    def test_increasing_density_fails(self):
        assert not check_k_monotone(lambda x: 2 * x, 1, [0.0, 1.0])

    def test_uniform_is_1_but_not_2_monotone(self):
        # the density drops to zero at 1, so it is nonincreasing but not convex
        grid = [0.0, 1.0]
        assert check_k_monotone(Uniform(0, 1), 1, grid)
        assert not check_k_monotone(Uniform(0, 1), 2, grid)

    def test_tabulated_input(self):
        # on the checker's own 256-interval grid, interpolation is exact
        x = np.linspace(0, 5, 257)
        assert check_k_monotone((x, np.exp(-x)), 3, [0.0, 5.0])

    def test_order_bounds(self):
        with pytest.raises(ValueError):
            check_k_monotone(Exponential(1.0), 7, [0.0, 1.0])

    def test_violation_is_reported_per_order(self):
        r = check_k_monotone(lambda x: 2 * x, 1, [0.0, 1.0])
        assert r.details["violation_by_order"][1] > 0


class TestDownwardClosure:
    def test_point_mass(self):
        r = check_downward_closure(point_mass(1.0), 3.0, 1.0, tol=1e-10)
        assert r.passed

    def test_equal_orders_degenerate(self):
        assert check_downward_closure(Gamma(2.0), 2.0, 2.0).details["distance"] < 1e-14

    def test_gamma(self):
        assert check_downward_closure(Gamma(1.0), 2.0, 0.5, tol=1e-8)

    def test_needs_ordered_pair(self):
        with pytest.raises(ValueError):
            check_downward_closure(Gamma(1.0), 1.0, 2.0)


class TestCmLimit:
    def test_single_point(self):
        assert_allclose(cm_limit_gaps([1.0], [1.0]), [math.exp(-1)])

    def test_origin(self):
        assert_allclose(cm_limit_gaps([1.0, 5.0, 50.0], [0.0]), 0.0)

    def test_large_t(self):
        gaps = cm_limit_gaps([100.0], np.arange(0, 10.01, 0.1))
        assert gaps[0] < 0.014

    def test_trend(self):
        assert check_cm_limit([1, 2, 5, 10, 20, 50, 100], np.linspace(0, 10, 101))

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            check_cm_limit([2, 1], [0.5])


class TestRecovery:
    @pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
    def test_exponential_recovers_biased_exponential(self, t):
        rec = recover_mixing_mellin(Exponential(1.0), t, LAMS)
        want = np.exp(special.gammaln(LAMS + t + 1) - special.gammaln(t + 1))
        assert_allclose([v.value for v in rec], want, rtol=1e-12)
        assert rec.certificate.passed

    def test_beta_t_recovers_unit_mass(self):
        rec = recover_mixing_mellin(BetaT(2.5), 2.5, LAMS)
        assert_allclose([v.value for v in rec], 1.0, rtol=1e-12)

    def test_uniform_is_rejected(self):
        rec = recover_mixing_mellin(Uniform(0, 1), 2.0, LAMS)
        assert not rec.certificate.passed

    def test_two_points_only_check_positivity(self):
        rec = recover_mixing_mellin(Exponential(1.0), 1.0, [1.0, 2.0])
        assert len(rec) == 2 and rec.certificate.passed


families = st.one_of(
    st.builds(Exponential, st.floats(0.3, 3.0)),
    st.builds(Gamma, st.floats(0.3, 5.0)),
    st.builds(Beta, st.floats(0.5, 4.0), st.floats(0.5, 4.0)),
    st.builds(LogNormal, st.floats(-1.0, 1.0), st.floats(0.05, 1.0)),
)


class TestProperties:
    @settings(max_examples=10, deadline=None)
    @given(families, st.integers(1, 4))
    def test_beta_mix_is_k_monotone(self, y, t):
        mix = beta_mix(y, t)
        span = mix.upper if math.isfinite(mix.upper) else 5.0 * math.exp(
            log_mellin_values(y, [1.0])[0][0])
        for k in range(1, t + 1):
            assert check_k_monotone(mix, k, [0.0, span])

    @settings(max_examples=30, deadline=None)
    @given(families, st.floats(0.2, 5.0), st.floats(0.05, 0.95))
    def test_downward_closure(self, y, t, frac):
        assert check_downward_closure(y, t, frac * t, LAMS, tol=1e-8)

    @settings(max_examples=30, deadline=None)
    @given(families, st.floats(0.2, 5.0))
    def test_recover_after_mix_is_identity(self, y, t):
        got = np.array([v.value for v in recover_mixing_mellin(beta_mix(y, t), t, LAMS)])
        want = np.exp(log_mellin_values(y, LAMS)[0])
        assert_allclose(got, want, rtol=1e-7)
