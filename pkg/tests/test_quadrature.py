import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from mellinkit.errors import QuadratureFailure
from mellinkit.quadrature import integrate, integrate_line, integrate_unit


class TestIntegrate:
    def test_polynomial_is_exact(self):
        v, e = integrate(lambda x: 3 * x ** 2, 0.0, 2.0)
        assert_allclose(v, 8.0, rtol=1e-14)
        assert e < 1e-10

    def test_reversed_limits_flip_sign(self):
        assert_allclose(integrate(np.sin, math.pi, 0.0)[0], -2.0, rtol=1e-12)

    def test_empty_interval(self):
        assert integrate(np.exp, 1.0, 1.0) == (0.0, 0.0)

    def test_batched_integrand(self):
        ks = np.arange(1, 6)
        v, _ = integrate(lambda x: x[:, None] ** ks[None, :], 0.0, 1.0)
        assert_allclose(v, 1.0 / (ks + 1), rtol=1e-12)

    def test_infinite_limits_rejected(self):
        with pytest.raises(ValueError):
            integrate(np.exp, 0.0, math.inf)

    def test_budget_exhaustion_raises(self):
        with pytest.raises(QuadratureFailure):
            integrate(lambda x: np.sign(x - 1 / 3) + 1.0 / np.sqrt(np.abs(x - 1 / 3)),
                      0.0, 1.0, atol=1e-15, rtol=1e-15, max_panels=64)


class TestLineAndUnit:
    def test_gaussian_line(self):
        v, _ = integrate_line(lambda y: np.exp(-0.5 * y * y))
        assert_allclose(v, math.sqrt(2 * math.pi), rtol=1e-10)

    def test_shifted_gaussian_far_from_center_hint(self):
        v, _ = integrate_line(lambda y: np.exp(-0.5 * (y - 50.0) ** 2), center=0.0, scale=1.0)
        assert_allclose(v, math.sqrt(2 * math.pi), rtol=1e-9)

    def test_lower_endpoint_singularity(self):
        v, _ = integrate_unit(lambda q: q ** -0.7)
        assert_allclose(v, 1 / 0.3, rtol=1e-9)

    def test_upper_endpoint_singularity(self):
        with np.errstate(divide="ignore"):
            v, _ = integrate_unit(lambda q: (1.0 - q) ** -0.5)
        assert_allclose(v, 2.0, rtol=1e-8)

    def test_log_singularity(self):
        v, _ = integrate_unit(lambda q: -np.log(q))
        assert_allclose(v, 1.0, rtol=1e-10)


class TestProperties:
    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.2, 8.0), st.floats(0.0, 6.0))
    def test_gamma_integral_matches_closed_form(self, a, lam):
        # int_R exp((a+lam) y - e^y) dy = Gamma(a + lam)
        v, _ = integrate_line(lambda y: np.exp((a + lam) * y - np.exp(y)),
                              center=math.log(a + lam), scale=1.0)
        assert_allclose(v, math.gamma(a + lam), rtol=1e-7)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.1, 5.0), st.floats(0.5, 5.0))
    def test_beta_integral_matches_closed_form(self, a, b):
        # the upper end resolves 1 - q only down to ~1e-16, so b stays >= 0.5
        with np.errstate(divide="ignore"):
            v, _ = integrate_unit(lambda q: q ** (a - 1) * (1 - q) ** (b - 1))
        want = math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
        assert_allclose(v, want, rtol=1e-7)
