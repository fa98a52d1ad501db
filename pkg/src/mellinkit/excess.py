"""Continuous-time stationary-excess operator ``E_t``.

``E_t(X)`` has survival ``E[(X - x)_+^t] / E[X^t]`` and the same law as
``b_t X_(t)`` with ``b_t ~ Beta(1, t)`` independent of ``X_(t)``.
"""

import math

import numpy as np

from .checks import CheckResult
from .dist import MAX_NESTING, Excess, mellin_domain
from .errors import OutOfDomain, QuadratureFailure
from .mellin import (CLOSED_FORM, DEFAULT_LAMBDAS, QUADRATURE, MellinValue,
                     _beta_t_log_mellin, log_mellin_values)


def excess(spec, t):
    t = float(t)
    if t < 0 or not mellin_domain(spec).contains(t):
        raise OutOfDomain("t=%g is not in the Mellin domain of %s" % (t, spec.variant))
    return spec if t == 0 else Excess(spec, t)


def _excess_log_mellin(spec, t, lams, method="auto"):
    """Gamma-ratio formula ``M_{b_t}(lam) M_X(lam + t) / M_X(t)`` in logs."""
    lams = np.asarray(lams, dtype=float)
    if t == 0:
        return log_mellin_values(spec, lams, method=method)[0]
    g, _ = log_mellin_values(spec, np.concatenate([[t], lams + t]), method=method)
    return _beta_t_log_mellin(t, lams) + g[1:] - g[0]


def excess_mellin(spec, t, lam):
    """``E[E_t(X)**lam] = Gamma(t+1) Gamma(lam+1) E[X**(lam+t)] / (Gamma(lam+t+1) E[X**t])``."""
    t, lam = float(t), float(lam)
    dom = mellin_domain(spec)
    if not (dom.contains(t) and dom.contains(lam + t) and lam > -1):
        raise OutOfDomain("lambda=%g, t=%g outside the domain of %s" % (lam, t, spec.variant))
    g = _excess_log_mellin(spec, t, [lam])[0]
    closed = spec._closed_log_mellin(np.array([t])) is not None
    value = math.exp(g)
    return MellinValue(lam, value, value * (1e-14 if closed else 1e-8),
                       CLOSED_FORM if closed else QUADRATURE)


def _distance(ga, gb):
    va, vb = np.exp(ga), np.exp(gb)
    return float(np.max(np.abs(va - vb) / np.maximum(va, 1.0)))


def check_semigroup(spec, s, t, lambdas=DEFAULT_LAMBDAS, tol=1e-5, method="quadrature"):
    """``E_t(E_s(X)) = E_{s+t}(X)`` in Mellin distance.

    With ``method="quadrature"`` the moments of the inner law ``E_s(X)`` are
    integrated from its survival function (itself an integral over the
    survival of ``X``), so the left side never touches a moment formula of
    ``E_s``.
    """
    lams = np.asarray(lambdas, dtype=float)
    inner = excess(spec, s)
    left = _excess_log_mellin(inner, t, lams, method=method if s > 0 else "auto")
    right = _excess_log_mellin(spec, s + t, lams)
    dist = _distance(left, right)
    return CheckResult("semigroup", dist <= tol, dist - tol,
                       {"s": s, "t": t, "distance": dist, "method": method})


def iterate_discrete(spec, n):
    """``E_1`` applied ``n`` times (``n <= 8``)."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_NESTING:
        raise QuadratureFailure("at most %d nested excess operators" % MAX_NESTING)
    out = spec
    for _ in range(n):
        out = excess(out, 1.0)
    return out


def check_iteration(spec, n, lambdas=DEFAULT_LAMBDAS, tol=1e-6):
    """``E_1`` iterated ``n`` times against ``E_n`` in Mellin distance."""
    lams = np.asarray(lambdas, dtype=float)
    left = log_mellin_values(iterate_discrete(spec, n), lams)[0]
    right = _excess_log_mellin(spec, float(n), lams)
    dist = _distance(left, right)
    return CheckResult("discrete_iteration", dist <= tol, dist - tol,
                       {"n": n, "distance": dist})
