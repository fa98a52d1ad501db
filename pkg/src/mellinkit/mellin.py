"""Mellin transforms ``E[X**lam]`` and the structural checks built on them."""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from . import quadrature as quad
from .checks import CheckResult
from .dist import (Excess, PerturbedLogNormal, ProductIndep, Scaled, SizeBiased,
                   density, mellin_domain, sample, survival)
from .errors import OutOfDomain, QuadratureFailure

DEFAULT_LAMBDAS = np.round(np.arange(0.25, 5.0 + 1e-9, 0.25), 12)
DEFAULT_TOL = 1e-8
LOG_X_FLOOR = -700.0

CLOSED_FORM = "closed_form"
QUADRATURE = "quadrature"
MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class MellinValue:
    lam: float
    value: float
    abs_error: float
    method: str


@dataclass(frozen=True)
class LogMellinProfile:
    """``g(lam) = log E[X**lam]`` on a strictly increasing grid."""

    lambdas: np.ndarray
    g_values: np.ndarray
    abs_errors: np.ndarray

    def to_dict(self):
        return {"lambdas": self.lambdas.tolist(), "g_values": self.g_values.tolist(),
                "abs_errors": self.abs_errors.tolist()}


def _check_domain(spec, lams):
    dom = mellin_domain(spec)
    for lam in lams:
        if not dom.contains(lam):
            raise OutOfDomain("lambda=%g outside (%g, %g) for %s"
                              % (lam, dom.mu_X, dom.lambda_X, spec.variant))


def _beta_t_log_mellin(t, lams):
    return (special.gammaln(t + 1.0) + special.gammaln(lams + 1.0)
            - special.gammaln(lams + t + 1.0))


def _merge(*methods):
    return CLOSED_FORM if all(m == CLOSED_FORM for m in methods) else QUADRATURE


def _evaluate(spec, lams, tol, method):
    """``log E[X**lam]``, relative errors and method for every ``lam``.

    Working with logarithms keeps high-order moments (``t`` of several
    dozens for log-normal laws) representable.
    """
    lams = np.asarray(lams, dtype=float)
    if method == QUADRATURE:
        return _quadrature(spec, lams, tol)
    closed = spec._closed_log_mellin(lams)
    if closed is not None:
        closed = np.asarray(closed, dtype=float)
        return closed, np.full(closed.shape, 1e-14), CLOSED_FORM
    sub = "auto" if method != CLOSED_FORM else CLOSED_FORM
    if isinstance(spec, Scaled):
        g, e, m = _evaluate(spec.base, lams, tol, sub)
        return g + lams * math.log(spec.factor), e, m
    if isinstance(spec, SizeBiased):
        g, e, m1 = _evaluate(spec.base, lams + spec.t, tol, sub)
        n, ne, m2 = _evaluate(spec.base, np.array([spec.t]), tol, sub)
        return g - n[0], e + ne[0], _merge(m1, m2)
    if isinstance(spec, Excess):
        g, e, m1 = _evaluate(spec.base, lams + spec.t, tol, sub)
        n, ne, m2 = _evaluate(spec.base, np.array([spec.t]), tol, sub)
        return _beta_t_log_mellin(spec.t, lams) + g - n[0], e + ne[0], _merge(m1, m2)
    if isinstance(spec, ProductIndep):
        ga, ea, m1 = _evaluate(spec.a, lams, tol, sub)
        gb, eb, m2 = _evaluate(spec.b, lams, tol, sub)
        return ga + gb, ea + eb, _merge(m1, m2)
    if method == CLOSED_FORM:
        raise OutOfDomain("no closed form for %s" % spec.variant)
    return _quadrature(spec, lams, tol)


def _quadrature(spec, lams, tol):
    vals = np.ones(lams.shape)
    errs = np.zeros(lams.shape)
    use_density = isinstance(spec, PerturbedLogNormal)
    pos = (lams > 0) & (not use_density)
    dens = (lams != 0) & ~pos
    if pos.any():
        v, e = _survival_route(spec, lams[pos], tol)
        vals[pos], errs[pos] = v, e
    if dens.any():
        if not spec.has_density:
            raise QuadratureFailure("negative Mellin argument needs a density for %s"
                                    % spec.variant)
        v, e = _density_route(spec, lams[dens], tol)
        vals[dens], errs[dens] = v, e
    if np.any(vals <= 0):
        raise QuadratureFailure("nonpositive Mellin value from quadrature")
    return np.log(vals), errs / vals, QUADRATURE


def _survival_route(spec, lams, tol):
    """``lam * int x**(lam-1) S(x) dx`` for ``lam > 0``."""
    stol = max(tol * 1e-2, 1e-13)
    # in y = log x the integrand is exp(lam y) S(exp(y)), whose left tail
    # decays at rate lam
    return _log_scale_line(spec, lams, lams, tol, lambda x: survival(spec, x, stol),
                           weight=lams)


def _density_route(spec, lams, tol):
    """``int x**lam f(x) dx``; the left tail in log x decays at ``lam - mu_X``."""
    lower = mellin_domain(spec).mu_X
    decay = lams - lower if math.isfinite(lower) else np.ones(lams.shape)

    def f(x):
        return np.maximum(density(spec, x), 0.0)

    return _log_scale_line(spec, lams + 1.0, decay, tol, f)


def _log_scale_line(spec, powers, decay, tol, h, weight=None):
    """``w int exp(p y) h(exp(y)) dy`` per column, integrated in ``v = r y``.

    ``decay`` holds each column's left-tail rate in ``y``; with ``r`` the
    smallest of them (capped at one) every tail decays in ``v`` at least like
    ``exp(v)``, however close a column sits to the edge of the Mellin domain.
    All columns share the nodes, so ``h`` is evaluated once per node.
    """
    m, s = spec._log_location()
    r = min(1.0, float(np.min(decay)))
    ratio = powers / r
    # decay / r is at least one; the tail below log x = -700 (where exp(y)
    # underflows) is continued at that rate from its value there
    slope = decay / r
    # w / r enters through the exponent: for a subnormal lam both overflow alone
    log_w = (np.zeros(powers.shape) if weight is None else np.log(weight)) - math.log(r)

    def g(v):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            y = np.maximum(v / r, LOG_X_FLOOR)
            logh = np.log(h(np.exp(y)))
            vy = r * y
            return np.exp(ratio[None, :] * vy[:, None] + logh[:, None]
                          + slope[None, :] * (v - vy)[:, None] + log_w[None, :])

    scale = max(1.0, r * s)
    guess = r * (m + (float(np.median(powers)) - 1.0) * s * s)
    # the log-normal guess can be far off for skewed laws; the probe covers
    # every representable log x
    probe = np.linspace(min(-745.0 * r, -40.0), max(710.0 * r, 40.0), 513)
    # a small r squeezes the bulk of log x into a sliver of v; fence it in
    breaks = r * (m + s * np.array([-40.0, -10.0, -3.0, 0.0, 3.0, 10.0, 40.0]))
    # GK nodes miss a kink lying within ~1% of a panel edge, so known kinks
    # become panel edges outright
    kinks = np.array([k for k in spec.kinks if k > 0], dtype=float)
    breaks = np.concatenate([breaks, r * np.log(kinks)])
    return quad.integrate_line(g, center=guess, scale=scale, atol=1e-13, rtol=tol,
                               breaks=breaks, probe=probe)


@lru_cache(maxsize=4096)
def _cached(spec, lams, tol, method):
    g, e, m = _evaluate(spec, np.array(lams), tol, method)
    return tuple(g), tuple(e), m


def log_mellin_values(spec, lams, tol=DEFAULT_TOL, method="auto"):
    """Arrays ``(g, rel_errors)`` with ``g = log E[X**lam]`` over ``lams``."""
    lams = tuple(float(x) for x in np.atleast_1d(lams))
    _check_domain(spec, lams)
    g, e, _ = _cached(spec, lams, float(tol), method)
    return np.array(g), np.array(e)


def mellin_values(spec, lams, tol=DEFAULT_TOL, method="auto"):
    """Arrays ``(values, abs_errors)`` of ``E[X**lam]`` over ``lams``."""
    g, e = log_mellin_values(spec, lams, tol, method)
    v = np.exp(g)
    return v, v * e


def mellin(spec, lam, tol=DEFAULT_TOL, method="auto"):
    """``E[X**lam]`` by closed form, composition rule or quadrature.

    ``method`` is ``"auto"`` (closed form or composition whenever possible),
    ``"closed_form"`` or ``"quadrature"`` (force the survival/density
    integral at the top level).  ``tol`` is a relative tolerance.
    """
    lam = float(lam)
    _check_domain(spec, [lam])
    g, e, m = _cached(spec, (lam,), float(tol), method)
    v = math.exp(g[0])
    return MellinValue(lam, v, v * e[0], m)


def mellin_monte_carlo(spec, lam, n=100_000, seed=0):
    """Sample mean of ``X**lam``; ``abs_error`` is one standard error."""
    x = sample(spec, n, seed).values ** float(lam)
    return MellinValue(float(lam), float(x.mean()), float(x.std(ddof=1) / math.sqrt(n)),
                       MONTE_CARLO)


def log_mellin_profile(spec, lambdas, tol=DEFAULT_TOL, method="auto"):
    lams = np.asarray(lambdas, dtype=float)
    if lams.ndim != 1 or np.any(np.diff(lams) <= 0):
        raise ValueError("lambda grid must be strictly increasing")
    g, e = log_mellin_values(spec, lams, tol, method)
    return LogMellinProfile(lams, g, e)


def check_log_convexity(profile, tol=1e-9, strict=False):
    """Midpoint (chord) test of convexity of ``g`` on consecutive triples.

    With ``strict=True`` each interior point must also sit below its chord
    by at least ``1e-9`` relative.
    """
    lam, g = profile.lambdas, profile.g_values
    if lam.size < 3:
        raise ValueError("need at least three grid points")
    w = (lam[2:] - lam[1:-1]) / (lam[2:] - lam[:-2])
    chord = w * g[:-2] + (1 - w) * g[2:]
    excess = g[1:-1] - chord
    scale = np.maximum(1.0, np.abs(g[1:-1]))
    viol = excess - tol * scale
    passed = bool(np.all(viol <= 0))
    if strict:
        passed = passed and bool(np.all(-excess >= 1e-9 * scale))
    return CheckResult("log_convexity", passed, float(np.max(excess)),
                       {"slack": (-excess).tolist(), "strict": strict})


def check_ratio_monotone(spec, lam, t_grid, tol=1e-9, strict=None):
    """``t -> M(lam + t) / M(t)`` must be nondecreasing along ``t_grid``."""
    t = np.asarray(t_grid, dtype=float)
    if lam <= 0 or np.any(np.diff(t) <= 0):
        raise ValueError("need lam > 0 and an increasing t grid")
    if strict is None:
        strict = not spec.is_deterministic
    lams = np.unique(np.concatenate([t, t + lam]))
    gv, _ = log_mellin_values(spec, lams)
    g = dict(zip(lams.tolist(), gv.tolist()))
    log_ratio = np.array([g[a + lam] - g[a] for a in t.tolist()])
    ratios = np.exp(log_ratio)
    drops = ratios[:-1] - ratios[1:]
    scale = np.maximum(1.0, np.abs(ratios[:-1]))
    passed = bool(np.all(drops <= tol * scale))
    if strict and t.size > 1:
        rise = np.diff(log_ratio)
        passed = passed and bool(np.all(rise >= 1e-9 * np.maximum(1.0, np.abs(log_ratio[:-1]))))
    return CheckResult("ratio_monotone", passed, float(np.max(drops, initial=-np.inf)),
                       {"t": t.tolist(), "ratios": ratios.tolist(), "strict": strict})


def check_lyapunov(spec, lambda_pairs, tol=1e-9):
    """``M(lam)**(1/lam) <= M(lam0)**(1/lam0)`` for ``0 < lam <= lam0``."""
    worst = -np.inf
    rows = []
    for lam, lam0 in lambda_pairs:
        if not (0 < lam <= lam0):
            raise ValueError("need 0 < lam <= lam0")
        g, _ = log_mellin_values(spec, [lam, lam0])
        lhs = math.exp(g[0] / lam)
        rhs = math.exp(g[1] / lam0)
        worst = max(worst, (lhs - rhs) / max(1.0, rhs))
        rows.append((lam, lam0, lhs, rhs))
    return CheckResult("lyapunov", bool(worst <= tol), float(worst), {"rows": rows})


def mellin_distance(spec_a, spec_b, lambdas=DEFAULT_LAMBDAS, tol=DEFAULT_TOL):
    """``max |M_A - M_B| / max(M_A, 1)`` over the grid."""
    va, _ = mellin_values(spec_a, lambdas, tol)
    vb, _ = mellin_values(spec_b, lambdas, tol)
    return float(np.max(np.abs(va - vb) / np.maximum(va, 1.0)))
