import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from mellinkit import (Beta, BetaT, Exponential, Gamma, LogNormal, Scaled, SizeBiased,
                       Uniform, biased_survival, check_dominance, check_properties, mellin,
                       mellin_distance, point_mass, size_bias)


class TestSizeBias:
    def test_gamma_promotion(self):
        b = size_bias(Gamma(2.0), 1.5)
        assert isinstance(b, Gamma) and b.shape == 3.5

    def test_beta_promotion(self):
        b = size_bias(Beta(2.0, 3.0), 1.0)
        assert isinstance(b, Beta) and (b.a, b.b) == (3.0, 3.0)

    def test_exponential_promotion(self):
        assert mellin_distance(size_bias(Exponential(2.0), 2.0), Scaled(Gamma(3.0), 0.5)) < 1e-12

    def test_order_zero_is_identity(self):
        d = Uniform(0, 1)
        assert mellin_distance(size_bias(d, 0.0), d) == 0.0

    def test_lognormal_scales(self):
        b = size_bias(LogNormal(0.0, 1.0), 2.0)
        assert_allclose(mellin(b, 1.0).value, math.exp(2.0) * math.exp(0.5), rtol=1e-12)

    def test_unpromotable_wraps(self):
        assert isinstance(size_bias(Uniform(0.5, 1.0), 1.0), SizeBiased)


class TestBiasedSurvival:
    def test_at_origin(self):
        assert_allclose(biased_survival(Exponential(1.0), 1.0, 0.0), 1.0)

    def test_uniform(self):
        assert_allclose(biased_survival(Uniform(0, 1), 1.0, 0.5), 0.75, rtol=1e-9)

    def test_exponential_order_two(self):
        assert_allclose(biased_survival(Exponential(1.0), 2.0, 1.0), 2.5 * math.exp(-1),
                        rtol=1e-9)


class TestProperties:
    def test_semigroup_on_gamma(self):
        r = check_properties(Gamma(1.0), 1.0, 2.0)
        assert r.passed
        parts = {c["name"]: c for c in r.details["components"]}
        assert parts["P2_semigroup"]["details"]["distance"] < 1e-10

    def test_product_rule(self):
        r = check_properties(Gamma(1.0), 1.0, 1.0, partner=Beta(1.0, 1.0))
        parts = {c["name"]: c for c in r.details["components"]}
        assert parts["P4_product"]["passed"]

    def test_power_with_unit_exponent(self):
        r = check_properties(LogNormal(0, 1), 1.0, 1.5)
        parts = {c["name"]: c for c in r.details["components"]}
        assert parts["P3_power"]["details"]["distance"] < 1e-12

    def test_dominance_cases(self):
        assert check_dominance(Exponential(1.0), 1.0, np.arange(0, 5.01, 0.5))
        assert check_dominance(Uniform(0, 1), 3.0, np.linspace(0, 1, 11))
        r = check_dominance(Gamma(2.0), 0.0, np.linspace(0, 5, 11))
        assert r.passed and abs(r.worst_violation) < 1e-12


families = st.one_of(
    st.builds(Exponential, st.floats(0.3, 3.0)),
    st.builds(Gamma, st.floats(0.3, 5.0)),
    st.builds(Beta, st.floats(0.3, 4.0), st.floats(0.3, 4.0)),
    st.builds(LogNormal, st.floats(-1.0, 1.0), st.floats(0.05, 1.0)),
    st.builds(Uniform, st.just(0.0), st.floats(0.5, 3.0)),
    st.builds(BetaT, st.floats(0.3, 5.0)),
)


class TestInvariants:
    @settings(max_examples=30, deadline=None)
    @given(families, st.floats(0.0, 5.0), st.floats(0.1, 3.0))
    def test_composition_rule(self, spec, t, s):
        # biasing by s then t equals biasing by s + t
        lams = np.linspace(0.25, 4.0, 8)
        assert mellin_distance(size_bias(size_bias(spec, s), t), size_bias(spec, s + t),
                               lams) < 1e-8

    @settings(max_examples=30, deadline=None)
    @given(families, st.floats(0.0, 5.0), st.floats(0.1, 3.0))
    def test_all_properties(self, spec, t, s):
        assert check_properties(spec, s, t, np.linspace(0.25, 4.0, 8))

    @settings(max_examples=20, deadline=None)
    @given(families, st.floats(0.0, 5.0))
    def test_dominance(self, spec, t):
        top = spec.upper if math.isfinite(spec.upper) else 5.0 * mellin(spec, 1.0).value
        assert check_dominance(spec, t, np.linspace(0.0, top, 11))

    def test_point_mass_is_fixed(self):
        d = point_mass(2.0)
        assert mellin_distance(size_bias(d, 3.0), d) < 1e-12
