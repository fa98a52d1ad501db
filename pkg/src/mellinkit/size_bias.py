"""Size biasing ``X -> X_(t)`` with law ``x**t P(X in dx) / E[X**t]``."""

import numpy as np

from .checks import CheckResult, combine
from .dist import (ProductIndep, SizeBiased, Uniform, mellin_domain,
                   promote_size_bias, scale, survival)
from .errors import OutOfDomain
from .mellin import DEFAULT_LAMBDAS, log_mellin_values, mellin_distance


def _require_t(spec, t):
    if t < 0 or not mellin_domain(spec).contains(t):
        raise OutOfDomain("t=%g is not in the Mellin domain of %s" % (t, spec.variant))


def size_bias(spec, t):
    """Law of ``X_(t)``, as a closed-form family whenever one is known."""
    t = float(t)
    _require_t(spec, t)
    promoted = promote_size_bias(spec, t)
    return promoted if promoted is not None else SizeBiased(spec, t)


def biased_survival(spec, t, x):
    """``E[X**t 1{X > x}] / E[X**t]`` by quadrature over the base survival.

    Uses ``E[X**t 1{X>x}] = x**t S(x) + t int_x^inf u**(t-1) S(u) du``, so
    no density is needed.
    """
    t = float(t)
    _require_t(spec, t)
    return survival(SizeBiased(spec, t), x)


class _Power:
    """``X**s`` seen only through its Mellin transform ``M_X(s lam)``."""

    def __init__(self, spec, s):
        self.spec, self.s = spec, float(s)

    def log_mellin(self, lams):
        return log_mellin_values(self.spec, self.s * np.asarray(lams, dtype=float))[0]


def _log_distance(ga, gb):
    va, vb = np.exp(ga), np.exp(gb)
    return float(np.max(np.abs(va - vb) / np.maximum(va, 1.0)))


def check_properties(spec, s, t, lambdas=DEFAULT_LAMBDAS, tol=1e-8, partner=None, k=2.0):
    """Mellin-distance checks of the size-biasing rules.

    P0: ``(kX)_(t) = k X_(t)`` and ``X_(0) = X``;
    P1: ``M_{X_(t)}(lam) = M_X(t + lam) / M_X(t)``;
    P2: ``(X_(s))_(t) = X_(s+t)``;
    P3: ``(X**s)_(t) = (X_(st))**s``;
    P4: ``(XY)_(t) = X_(t) Y_(t)`` for ``Y = partner`` independent of ``X``
    (``Uniform(0, 1)`` by default).
    """
    lams = np.asarray(lambdas, dtype=float)
    partner = Uniform(0.0, 1.0) if partner is None else partner
    results = []

    def record(name, dist):
        results.append(CheckResult(name, dist <= tol, dist - tol, {"distance": dist}))

    biased = size_bias(spec, t)
    record("P0_scale", mellin_distance(scale(biased, k), size_bias(scale(spec, k), t), lams))
    record("P0_identity", mellin_distance(size_bias(spec, 0.0), spec, lams))

    g_t = log_mellin_values(spec, [t])[0][0]
    ratio = log_mellin_values(spec, lams + t)[0] - g_t
    record("P1_ratio", _log_distance(log_mellin_values(biased, lams)[0], ratio))

    record("P2_semigroup", mellin_distance(size_bias(size_bias(spec, s), t),
                                           size_bias(spec, s + t), lams))

    power = _Power(spec, s)
    left = power.log_mellin(lams + t) - power.log_mellin([t])[0]
    right = log_mellin_values(size_bias(spec, s * t), s * lams)[0]
    record("P3_power", _log_distance(left, right))

    prod = SizeBiased(ProductIndep(spec, partner), t)
    record("P4_product", mellin_distance(
        prod, ProductIndep(size_bias(spec, t), size_bias(partner, t)), lams))
    return combine("size_bias_properties", results, s=s, t=t)


def check_dominance(spec, t, x_grid, tol=1e-9):
    """``X_(t)`` stochastically dominates ``X``: biased survival >= survival - tol."""
    x = np.asarray(x_grid, dtype=float)
    biased = np.atleast_1d(biased_survival(spec, t, x))
    base = np.atleast_1d(survival(spec, x))
    gap = base - biased
    worst = float(np.max(gap))
    return CheckResult("dominance", bool(worst <= tol), worst,
                       {"t": t, "x": x.tolist(), "biased": biased.tolist(),
                        "base": base.tolist()})
