"""Log-normal limits of size-biased and stationary-excess families.

For a law ``X`` with all positive moments and ``rho_t = alpha M(t+1)/M(t)``,

* ``X_t = X_(t) / rho_t`` converges to ``X_inf = LogNormal(log alpha - c/2, c)``,
* ``Z_t = t E_t(X) / rho_t`` converges to ``Z_inf = e * X_inf`` with ``e``
  standard exponential,

whenever ``exp(Delta_1 Delta_s g(t)) -> exp(c s)``, ``g = log M``.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from .checks import CheckResult, combine, to_jsonable
from .dist import (Exponential, LogNormal, PerturbedLogNormal, ProductIndep,
                   derive_seed, mellin_domain, sample, scale, survival)
from .errors import OutOfDomain
from .excess import excess
from .mellin import (DEFAULT_LAMBDAS, _beta_t_log_mellin, log_mellin_values,
                     mellin_values)
from .size_bias import size_bias

S_CHOICES = (0.5, 1.0, 2.0)
DEFAULT_X_LADDER = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)


# ---------------------------------------------------------------- normalization


@dataclass
class NormalizationCurve:
    alpha: float
    t_grid: np.ndarray
    rho: np.ndarray
    monotone: bool

    def to_dict(self):
        return {"alpha": self.alpha, "t_grid": self.t_grid.tolist(),
                "rho": self.rho.tolist(), "monotone": self.monotone}


def _log_rho(spec, t_grid):
    t = np.asarray(t_grid, dtype=float)
    g, _ = log_mellin_values(spec, np.concatenate([t, t + 1.0]))
    return g[t.size:] - g[:t.size]


def rho_curve(spec, alpha, t_grid, tol=1e-9):
    """``rho_t = alpha E[X**(t+1)] / E[X**t]``, flagged when not nondecreasing."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    t = np.asarray(t_grid, dtype=float)
    rho = alpha * np.exp(_log_rho(spec, t))
    drops = rho[:-1] - rho[1:]
    monotone = bool(np.all(drops <= tol * np.maximum(1.0, rho[:-1])))
    return NormalizationCurve(float(alpha), t, rho, monotone)


@dataclass(frozen=True)
class CEstimate:
    t: float
    s: float
    value: float


def estimate_c(spec, t, s=1.0):
    """``(1/s) [g(t+1+s) - g(t+1) - g(t+s) + g(t)]`` with ``g = log E[X**.]``."""
    t, s = float(t), float(s)
    if not s > 0:
        raise ValueError("s must be positive")
    if not mellin_domain(spec).contains(t + 1.0 + s):
        raise OutOfDomain("t + 1 + s = %g outside the Mellin domain" % (t + 1 + s))
    g, _ = log_mellin_values(spec, [t, t + s, t + 1.0, t + 1.0 + s])
    return CEstimate(t, s, float((g[3] - g[2] - g[1] + g[0]) / s))


@dataclass(frozen=True)
class CFit:
    """``c`` read off at the largest grid point, with an ``s``-agreement flag."""

    c: float
    t: float
    s: float
    by_s: dict
    converged: bool


def fit_c(spec, t_grid, s=1.0, agree_tol=1e-3):
    t_max = float(np.max(t_grid))
    by_s = {float(u): estimate_c(spec, t_max, u).value for u in S_CHOICES}
    c = estimate_c(spec, t_max, s).value
    spread = max(by_s.values()) - min(by_s.values())
    return CFit(c, t_max, float(s), by_s, bool(spread <= agree_tol * max(1.0, abs(c))))


# ---------------------------------------------------------------- limit law


@dataclass(frozen=True)
class LimitLaw:
    """``X_inf = LogNormal(a - c/2, c)`` and ``Z_inf = e * X_inf``."""

    a: float
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.c >= 0):
            raise ValueError("need finite a and c >= 0")

    @property
    def alpha(self):
        return math.exp(self.a)

    @property
    def x_inf(self):
        return LogNormal(self.a - 0.5 * self.c, self.c)

    @property
    def z_inf(self):
        return ProductIndep(Exponential(1.0), self.x_inf)

    def log_mellin_x(self, lams):
        lams = np.asarray(lams, dtype=float)
        return (self.a - 0.5 * self.c) * lams + 0.5 * self.c * lams * lams

    def log_mellin_z(self, lams):
        lams = np.asarray(lams, dtype=float)
        return special.gammaln(lams + 1.0) + self.log_mellin_x(lams)

    def mellin_x(self, lams):
        return np.exp(self.log_mellin_x(lams))

    def mellin_z(self, lams):
        return np.exp(self.log_mellin_z(lams))

    def functional_equation_gap(self, s, mu):
        """Relative gap in ``h(s + mu) = exp(c s mu) h(s) h(mu)`` for ``h = M_{X_inf}``."""
        lhs = self.log_mellin_x(s + mu)
        rhs = self.c * s * mu + self.log_mellin_x(s) + self.log_mellin_x(mu)
        return float(np.max(np.abs(np.expm1(np.asarray(lhs - rhs)))))

    def to_dict(self):
        return {"a": self.a, "c": self.c, "alpha": self.alpha}


def limit_law(alpha, c):
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return LimitLaw(math.log(alpha), max(float(c), 0.0))


def normalized_family(spec, alpha, t, kind="bias"):
    """``X_t = X_(t) / rho_t`` (``kind="bias"``) or ``Z_t = t E_t(X) / rho_t``."""
    t = float(t)
    rho = alpha * math.exp(_log_rho(spec, [t])[0])
    if kind == "bias":
        return scale(size_bias(spec, t), 1.0 / rho)
    if kind == "excess":
        if not t > 0:
            raise ValueError("the excess family needs t > 0")
        return scale(excess(spec, t), t / rho)
    raise ValueError("kind must be 'bias' or 'excess'")


# ---------------------------------------------------------------- diagnostics


def _x_t_log_mellin(spec, alpha, t, lams):
    """``log E[X_t**lam]`` for ``X_t = X_(t) / rho_t``."""
    g, _ = log_mellin_values(spec, np.concatenate([[t, t + 1.0], t + lams]))
    log_rho = math.log(alpha) + g[1] - g[0]
    return g[2:] - g[0] - lams * log_rho


@dataclass
class ConvergenceReport:
    curve: NormalizationCurve
    c_estimates: list
    law: LimitLaw
    c_fit: CFit
    lambdas: np.ndarray
    mellin_errors: np.ndarray          # (len(t_grid), len(lambdas))
    ks_stats: np.ndarray               # (len(t_grid),)
    ui_lambda: float
    x_ladder: np.ndarray
    ui_tail: np.ndarray                # (len(t_grid), len(x_ladder))
    verdict: CheckResult
    config: dict = field(default_factory=dict)
    notes: tuple = (
        "the verdict is numeric evidence on finite grids, not a proof",
        "ui_tail[t, x] is the supremum over the finite ladder t' >= t only",
    )

    def to_dict(self):
        return to_jsonable({
            "config": self.config,
            "curve": self.curve.to_dict(),
            "c_estimates": [vars(c) for c in self.c_estimates],
            "c_fit": vars(self.c_fit),
            "limit_law": self.law.to_dict(),
            "lambdas": self.lambdas,
            "mellin_errors": self.mellin_errors,
            "ks_stats": self.ks_stats,
            "ui_lambda": self.ui_lambda,
            "x_ladder": self.x_ladder,
            "ui_tail": self.ui_tail,
            "verdict": self.verdict.to_dict(),
            "notes": list(self.notes),
        })

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self, digest=""):
        """Flat table: one row per ``(t, lambda)`` error and per ``t`` KS value."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["config_digest", "kind", "t", "lambda", "value"])
        for i, t in enumerate(self.curve.t_grid):
            for j, lam in enumerate(self.lambdas):
                w.writerow([digest, "mellin_rel_error", repr(float(t)), repr(float(lam)),
                            repr(float(self.mellin_errors[i, j]))])
        for i, t in enumerate(self.curve.t_grid):
            w.writerow([digest, "ks", repr(float(t)), "", repr(float(self.ks_stats[i]))])
        return buf.getvalue()


def _nonincreasing(values, slack):
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) <= slack))


def convergence_report(spec, alpha=1.0, t_grid=(5.0, 10.0, 20.0, 40.0),
                       lambdas=DEFAULT_LAMBDAS, n_samples=100_000, seed=0, s=1.0,
                       x_ladder=DEFAULT_X_LADDER, ui_lambda=1.0,
                       mellin_threshold=1e-2, ks_threshold=1e-2):
    """Full diagnostic bundle for ``X_t -> X_inf`` and ``Z_t -> Z_inf``.

    The Z_t batches for every ``t`` are drawn from the same derived seed
    (common random numbers) so that the KS sequence reflects the change in
    ``t`` rather than fresh sampling noise; ``Z_inf`` uses an independent seed.
    The verdict requires nonincreasing Mellin errors and KS statistics along
    the grid with final values under the thresholds.
    """
    t = np.asarray(t_grid, dtype=float)
    lams = np.asarray(lambdas, dtype=float)
    if t.size == 0 or lams.size == 0:
        raise ValueError("empty grid")
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("t grid must be positive and increasing")
    curve = rho_curve(spec, alpha, t)
    c_est = [estimate_c(spec, ti, s) for ti in t]
    c_fit = fit_c(spec, t, s)
    law = limit_law(alpha, c_fit.c)

    target = law.log_mellin_x(lams)
    errors = np.array([np.abs(np.expm1(_x_t_log_mellin(spec, alpha, ti, lams) - target))
                       for ti in t])

    z_seed = derive_seed(seed, "limit.z_t")
    z_inf = sample(law.z_inf, n_samples, derive_seed(seed, "limit.z_inf")).values
    ks = np.array([
        stats.ks_2samp(sample(normalized_family(spec, alpha, ti, "excess"),
                              n_samples, z_seed).values, z_inf).statistic
        for ti in t])

    xs = np.asarray(x_ladder, dtype=float)
    tails = np.empty((t.size, xs.size))
    for i, ti in enumerate(t):
        xt = normalized_family(spec, alpha, ti, "bias")
        m = mellin_values(xt, [ui_lambda])[0][0]
        tails[i] = m * np.atleast_1d(survival(size_bias(xt, ui_lambda), xs))
    ui = np.maximum.accumulate(tails[::-1], axis=0)[::-1]

    worst_err = errors.max(axis=1)
    parts = [
        CheckResult("mellin_errors_nonincreasing", _nonincreasing(worst_err, 1e-9),
                    float(np.max(np.diff(worst_err), initial=0.0))),
        CheckResult("mellin_error_final", bool(worst_err[-1] < mellin_threshold),
                    float(worst_err[-1] - mellin_threshold)),
        CheckResult("ks_nonincreasing", _nonincreasing(ks, 0.0),
                    float(np.max(np.diff(ks), initial=0.0))),
        CheckResult("ks_final", bool(ks[-1] < ks_threshold), float(ks[-1] - ks_threshold)),
    ]
    config = {"variant": spec.variant, "alpha": alpha, "t_grid": t.tolist(),
              "lambdas": lams.tolist(), "n_samples": int(n_samples), "seed": int(seed),
              "s": s, "ui_lambda": ui_lambda, "x_ladder": xs.tolist(),
              "mellin_threshold": mellin_threshold, "ks_threshold": ks_threshold}
    return ConvergenceReport(curve, c_est, law, c_fit, lams, errors, ks, float(ui_lambda),
                             xs, ui, combine("convergence", parts), config)


def check_fixed_point(law, s, lambdas=DEFAULT_LAMBDAS, tol=1e-12):
    """``(X_inf)_(s) = e^{cs} X_inf`` and ``Z_inf = e^{-cs} b_s (Z_inf)_(s)`` in Mellin form."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    lams = np.asarray(lambdas, dtype=float)
    s = float(s)
    gx = law.log_mellin_x
    x_gap = np.abs(np.expm1(gx(s + lams) - gx(s) - (law.c * s * lams + gx(lams))))
    gz = law.log_mellin_z
    b = _beta_t_log_mellin(s, lams) if s > 0 else np.zeros_like(lams)
    z_gap = np.abs(np.expm1(-law.c * s * lams + b + gz(s + lams) - gz(s) - gz(lams)))
    parts = [CheckResult("x_bias_identity", bool(x_gap.max() <= tol), float(x_gap.max() - tol)),
             CheckResult("z_excess_identity", bool(z_gap.max() <= tol), float(z_gap.max() - tol))]
    return combine("fixed_point", parts, a=law.a, c=law.c, s=s)


# ---------------------------------------------------------------- indeterminacy


@dataclass
class IndeterminacyReport:
    """Integer moments and non-integer Mellin values of two laws."""

    integer_rows: list      # (k, lognormal, perturbed, relative gap)
    probe_rows: list        # (lambda, lognormal, perturbed, gap)
    exact_probe_rows: list  # same columns from the closed form of both laws
    integer_max_gap: float
    probe_gap: float

    def to_dict(self):
        return to_jsonable(vars(self))


def perturbed_lognormal_mellin(mu, sigma2, eps, lams):
    """Closed form ``M_LN(lam) (1 + eps exp(-2 pi^2 / sigma2) sin(2 pi lam))``."""
    lams = np.asarray(lams, dtype=float)
    base = np.exp(mu * lams + 0.5 * sigma2 * lams * lams)
    return base * (1.0 + eps * math.exp(-2.0 * math.pi ** 2 / sigma2) * np.sin(2 * math.pi * lams))


def indeterminacy_demo(mu=0.0, sigma2=1.0, eps=0.5, k_max=8, lambda_probe=0.5, tol=1e-10):
    """Compare ``LogNormal(mu, sigma2)`` with its sinusoidal perturbation.

    Both tables are computed by quadrature.  The perturbation shares every
    integer moment; its non-integer Mellin values move by
    ``eps exp(-2 pi^2 / sigma2) sin(2 pi lam)`` relative, which is tiny unless
    ``sigma2`` is large.
    """
    base = LogNormal(mu, sigma2)
    pert = PerturbedLogNormal(mu, sigma2, eps)
    ks = np.arange(1, int(k_max) + 1, dtype=float)
    mb, _ = mellin_values(base, ks, tol, method="quadrature")
    mp, _ = mellin_values(pert, ks, tol, method="quadrature")
    rel = np.abs(mp - mb) / mb
    integer_rows = [(0, 1.0, 1.0, 0.0)] + [
        (int(k), float(a), float(b), float(r)) for k, a, b, r in zip(ks, mb, mp, rel)]

    probes = np.atleast_1d(np.asarray(lambda_probe, dtype=float))
    pb, _ = mellin_values(base, probes, tol, method="quadrature")
    pp, _ = mellin_values(pert, probes, tol, method="quadrature")
    gaps = np.abs(pp - pb) / np.maximum(pb, 1.0)
    eb = np.exp(mu * probes + 0.5 * sigma2 * probes ** 2)
    ep = perturbed_lognormal_mellin(mu, sigma2, eps, probes)
    exact = [(float(l), float(a), float(b), float(abs(b - a) / max(a, 1.0)))
             for l, a, b in zip(probes, eb, ep)]
    return IndeterminacyReport(
        integer_rows,
        [(float(l), float(a), float(b), float(g)) for l, a, b, g in zip(probes, pb, pp, gaps)],
        exact, float(rel.max(initial=0.0)), float(gaps.max()))
