"""t-monotone densities through the factorization ``Z = b_t Y``.

A density is t-monotone exactly when its law is ``b_t * Y`` with
``b_t ~ Beta(1, t)`` independent of a nonnegative ``Y``.  Integer orders
can also be certified directly by finite differences of the density.
"""

import math
from dataclasses import dataclass

import numpy as np

from .checks import CheckResult, combine
from .dist import Beta, BetaT, DistributionSpec, ProductIndep, density, point_mass
from .mellin import (DEFAULT_LAMBDAS, LogMellinProfile, MellinValue,
                     _beta_t_log_mellin, check_log_convexity, log_mellin_values,
                     mellin_distance)

MAX_ORDER = 6
GRID_INTERVALS = 256


def beta_mix(y_spec, t):
    """Law of ``b_t * Y`` with independent factors."""
    if not t > 0:
        raise ValueError("t must be positive")
    return ProductIndep(BetaT(float(t)), y_spec)


def _density_on(source, x):
    if isinstance(source, DistributionSpec):
        return np.asarray(density(source, x), dtype=float)
    if callable(source):
        return np.asarray(source(x), dtype=float)
    xs, fs = (np.asarray(v, dtype=float) for v in source)
    return np.interp(x, xs, fs)


def check_k_monotone(source, k, grid, tol=None):
    """Finite-difference certificate of monotonicity of order ``k``.

    ``source`` is a law with a density, a callable density, or a tabulated
    pair ``(x, f)``.  The density is sampled with uniform spacing
    ``h = range / 256`` over the span of ``grid`` and the forward
    differences must satisfy ``(-1)**j Delta_h^j f >= -tol`` for
    ``j = 0..k``: nonnegative, nonincreasing and, for ``k >= 2``, with the
    ``(k-2)``-th difference nonincreasing and convex.  Default ``tol`` is
    ``1e-7 * max|f|``.
    """
    k = int(k)
    if not 1 <= k <= MAX_ORDER:
        raise ValueError("k must be between 1 and %d" % MAX_ORDER)
    g = np.asarray(grid, dtype=float)
    x = np.linspace(g.min(), g.max(), GRID_INTERVALS + 1)
    f = _density_on(source, x)
    if tol is None:
        tol = 1e-7 * float(np.max(np.abs(f)))
    worst, per_order = -np.inf, []
    diff = f
    for j in range(k + 1):
        signed = (-1) ** j * diff
        violation = float(np.max(-signed)) - tol
        per_order.append(violation)
        worst = max(worst, violation)
        diff = np.diff(diff)
    return CheckResult("k_monotone", bool(worst <= 0), worst,
                       {"k": k, "h": float(x[1] - x[0]), "tol": tol,
                        "violation_by_order": per_order})


def check_downward_closure(y_spec, t, s, lambdas=DEFAULT_LAMBDAS, tol=1e-8):
    """``b_t Y = b_s (b_{1+s, t-s} Y)`` in Mellin distance, so t-monotone implies s-monotone."""
    if not 0 < s <= t:
        raise ValueError("need 0 < s <= t")
    left = ProductIndep(BetaT(float(t)), y_spec)
    # b_{1+s, 0} is the unit mass
    middle = point_mass(1.0) if s == t else Beta(1.0 + s, t - s)
    right = ProductIndep(BetaT(float(s)), ProductIndep(middle, y_spec))
    dist = mellin_distance(left, right, lambdas)
    return CheckResult("downward_closure", dist <= tol, dist - tol,
                       {"t": t, "s": s, "distance": dist})


def cm_limit_gaps(t_list, x_grid):
    """``sup_x |(1 - x/t)_+^t - exp(-x)|`` for every ``t``."""
    x = np.asarray(x_grid, dtype=float)
    out = []
    for t in t_list:
        approx = np.clip(1.0 - x / t, 0.0, None) ** t
        out.append(float(np.max(np.abs(approx - np.exp(-x)))))
    return np.array(out)


def check_cm_limit(t_list, x_grid):
    """The sups must decrease strictly and end below ``e / (2 t_max)``."""
    t = np.asarray(t_list, dtype=float)
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("t_list must be positive and increasing")
    gaps = cm_limit_gaps(t, x_grid)
    bound = math.e / (2.0 * t[-1])
    decreasing = bool(np.all(np.diff(gaps) < 0))
    passed = decreasing and gaps[-1] < bound
    return CheckResult("cm_limit", passed, float(gaps[-1] - bound),
                       {"t": t.tolist(), "sup_gap": gaps.tolist(), "bound": bound,
                        "decreasing": decreasing})


@dataclass
class MixingRecovery:
    """Mellin transform of the would-be mixing variable ``Y`` with its certificate."""

    t: float
    values: list
    certificate: CheckResult

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def recover_mixing_mellin(z_spec, t, lambdas=DEFAULT_LAMBDAS):
    """``M_Z(lam) / M_{b_t}(lam)``, the Mellin transform of ``Y`` if ``Z = b_t Y``.

    The certificate requires a positive and log-convex profile; a failure
    proves that ``Z`` is not t-monotone.
    """
    lams = np.asarray(lambdas, dtype=float)
    g_z, err = log_mellin_values(z_spec, lams)
    g_y = g_z - _beta_t_log_mellin(float(t), lams)
    values = [MellinValue(float(l), float(np.exp(g)), float(np.exp(g) * e), "closed_form"
                          if e <= 1e-13 else "quadrature")
              for l, g, e in zip(lams, g_y, err)]
    parts = [CheckResult("positive", bool(np.all(np.isfinite(g_y))), 0.0)]
    if lams.size >= 3:
        parts.append(check_log_convexity(LogMellinProfile(lams, g_y, err)))
    return MixingRecovery(float(t), values, combine("mixing_recovery", parts))
