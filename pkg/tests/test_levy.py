import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from mellinkit import (CompoundPoisson, FiniteAtoms, LevySpec, LogNormal, delta_formula,
                       dist_from_levy, estimate_c, levy_exponent, mellin, mellin_distance,
                       sample)
from mellinkit.errors import InvalidSpec


class TestExponent:
    def test_gaussian(self):
        assert levy_exponent(LevySpec(0.0, 1.0), 2.0) == pytest.approx(2.0, abs=1e-15)

    def test_single_atom(self):
        spec = LevySpec(0.0, 0.0, FiniteAtoms(((1.0, 0.5),)))
        assert_allclose(levy_exponent(spec, 1.0), math.exp(-0.5) - 1 + 0.5, rtol=1e-14)

    def test_atom_above_one_has_no_compensator(self):
        spec = LevySpec(0.0, 0.0, FiniteAtoms(((2.0, 1.5),)))
        assert_allclose(levy_exponent(spec, 1.0), 2 * math.expm1(-1.5), rtol=1e-14)

    def test_compound_poisson_against_quadrature(self):
        from scipy.integrate import quad
        j = CompoundPoisson(1.3, 0.7)
        spec = LevySpec(0.2, 0.0, j)
        lam = 1.7
        dens = lambda x: j.rate / j.jump_mean * math.exp(-x / j.jump_mean)
        integrand = lambda x: (math.exp(-lam * x) - 1 + lam * x * (x <= 1)) * dens(x)
        want = 0.2 * lam + quad(integrand, 0, 1)[0] + quad(integrand, 1, np.inf)[0]
        assert_allclose(levy_exponent(spec, lam), want, rtol=1e-10)

    def test_zero(self):
        assert levy_exponent(LevySpec(1.0, 2.0, CompoundPoisson(1.0, 1.0)), 0.0) == 0.0

    def test_negative_lambda(self):
        with pytest.raises(ValueError):
            levy_exponent(LevySpec(), -1.0)

    def test_vector(self):
        assert levy_exponent(LevySpec(0.0, 1.0), np.array([1.0, 2.0])).shape == (2,)


class TestDelta:
    @pytest.mark.parametrize("t,s", [(1.0, 1.0), (7.0, 0.3), (50.0, 2.0)])
    def test_gaussian(self, t, s):
        assert_allclose(delta_formula(LevySpec(0.0, 0.4), t, s), 0.4 * s, rtol=1e-14)

    def test_atom(self):
        spec = LevySpec(0.0, 0.0, FiniteAtoms(((2.0, 1.0),)))
        want = 2 * math.exp(-1) * (1 - math.exp(-1)) ** 2
        assert_allclose(delta_formula(spec, 1.0, 1.0), want, rtol=1e-14)

    def test_needs_positive_arguments(self):
        with pytest.raises(ValueError):
            delta_formula(LevySpec(), 0.0, 1.0)


class TestDistFromLevy:
    def test_gaussian_is_lognormal(self):
        law = dist_from_levy(LevySpec(0.3, 0.8))
        assert mellin_distance(law, LogNormal(0.3, 0.8)) < 1e-10

    def test_mellin_is_exp_of_exponent(self):
        spec = LevySpec(0.1, 0.2, CompoundPoisson(1.0, 1.0))
        assert_allclose(mellin(dist_from_levy(spec), 2.5).value,
                        math.exp(levy_exponent(spec, 2.5)), rtol=1e-12)

    def test_atoms_monte_carlo(self):
        spec = LevySpec(0.0, 0.0, FiniteAtoms(((1.0, 0.5), (0.5, 2.0))))
        law = dist_from_levy(spec)
        v = sample(law, 200_000, 9).values
        for lam in (0.5, 1.0, 2.0):
            xl = v ** lam
            se = xl.std(ddof=1) / math.sqrt(v.size)
            assert abs(xl.mean() - math.exp(levy_exponent(spec, lam))) < 4 * se

    def test_compound_poisson_monte_carlo(self):
        spec = LevySpec(0.0, 0.4, CompoundPoisson(1.0, 1.0))
        v = sample(dist_from_levy(spec), 200_000, 4).values
        xl = v ** 1.0
        se = xl.std(ddof=1) / math.sqrt(v.size)
        assert abs(xl.mean() - math.exp(levy_exponent(spec, 1.0))) < 4 * se

    def test_c_estimate_near_sigma2(self):
        law = dist_from_levy(LevySpec(0.0, 0.4, CompoundPoisson(1.0, 1.0)))
        assert abs(estimate_c(law, 50.0, 1.0).value - 0.4) < 0.01


class TestValidation:
    @pytest.mark.parametrize("make", [
        lambda: LevySpec(0.0, -1.0), lambda: LevySpec(math.inf, 0.0),
        lambda: CompoundPoisson(0.0, 1.0), lambda: CompoundPoisson(1.0, -1.0),
        lambda: FiniteAtoms(()), lambda: FiniteAtoms(((1.0, -0.5),)),
    ])
    def test_rejects(self, make):
        with pytest.raises(InvalidSpec):
            make()


def jumps():
    cp = st.builds(CompoundPoisson, st.floats(0.1, 3.0), st.floats(0.1, 3.0))
    atoms = st.lists(st.tuples(st.floats(0.1, 3.0), st.floats(0.05, 3.0)),
                     min_size=1, max_size=4).map(lambda xs: FiniteAtoms(tuple(xs)))
    return st.one_of(st.none(), cp, atoms)


levy_specs = st.builds(LevySpec, st.floats(-1.0, 1.0), st.floats(0.0, 2.0), jumps())


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(levy_specs)
    def test_convex_exponent_with_concave_slope(self, spec):
        lam = np.linspace(0.0, 10.0, 201)
        g = levy_exponent(spec, lam)
        assert g[0] == 0.0
        scale = 1.0 + np.abs(g).max()
        assert np.all(g[:-2] + g[2:] - 2 * g[1:-1] >= -1e-12 * scale)
        slope = np.diff(g)
        assert np.all(slope[:-2] + slope[2:] - 2 * slope[1:-1] <= 1e-12 * scale)

    @settings(max_examples=60, deadline=None)
    @given(levy_specs, st.floats(0.1, 20.0), st.floats(0.1, 3.0))
    def test_delta_formula_matches_differences(self, spec, t, s):
        g = levy_exponent(spec, np.array([t, t + s, t + 1.0, t + 1.0 + s]))
        fd = g[3] - g[2] - g[1] + g[0]
        assert abs(delta_formula(spec, t, s) - fd) < 1e-10 * max(1.0, np.abs(g).max())

    @settings(max_examples=40, deadline=None)
    @given(levy_specs, st.floats(0.1, 3.0))
    def test_correction_nonnegative_and_decreasing(self, spec, s):
        t = np.linspace(0.5, 50.0, 100)
        corr = delta_formula(spec, t, s) - spec.sigma2 * s
        assert np.all(corr >= -1e-14)
        assert np.all(np.diff(corr) <= 1e-14)
