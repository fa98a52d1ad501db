"""Randomized batteries of the structural checks."""

import math

import numpy as np

from . import dist
from .checks import CheckResult, combine
from .excess import check_iteration, check_semigroup, excess
from .levy import CompoundPoisson, FiniteAtoms, LevySpec, delta_formula, levy_exponent
from .limit import check_fixed_point, limit_law
from .mellin import (check_log_convexity, check_lyapunov, check_ratio_monotone,
                     log_mellin_profile, log_mellin_values, mellin_distance)
from .size_bias import check_dominance, check_properties
from .tmonotone import (beta_mix, check_cm_limit, check_downward_closure,
                        check_k_monotone, recover_mixing_mellin)


def random_family(rng):
    """A nondegenerate analytic law with random parameters."""
    kind = rng.integers(6)
    if kind == 0:
        return dist.Exponential(float(rng.uniform(0.3, 3.0)))
    if kind == 1:
        return dist.Gamma(float(rng.uniform(0.3, 5.0)))
    if kind == 2:
        return dist.Beta(float(rng.uniform(0.3, 4.0)), float(rng.uniform(0.3, 4.0)))
    if kind == 3:
        return dist.LogNormal(float(rng.uniform(-1.0, 1.0)), float(rng.uniform(0.05, 1.0)))
    if kind == 4:
        return dist.Uniform(0.0, float(rng.uniform(0.5, 3.0)))
    return dist.BetaT(float(rng.uniform(0.3, 5.0)))


def default_x_grid(spec):
    if math.isfinite(spec.upper):
        return np.linspace(0.0, spec.upper, 11)
    mean = math.exp(log_mellin_values(spec, [1.0])[0][0])
    return np.linspace(0.0, 5.0 * mean, 11)


def structural_draw(rng, tol=1e-8):
    """Every structural check on one random ``(family, t, s, lambda)`` draw."""
    spec = random_family(rng)
    t = float(rng.uniform(0.0, 5.0))
    s = float(rng.uniform(0.1, 3.0))
    lams = np.sort(rng.uniform(0.25, 4.0, 5))
    t_grid = np.sort(rng.uniform(0.0, 5.0, 4))
    lam = float(rng.uniform(0.25, 4.0))
    pairs = [tuple(sorted(rng.uniform(0.25, 4.0, 2))) for _ in range(3)]
    parts = [
        check_log_convexity(log_mellin_profile(spec, lams), tol=1e-9),
        check_ratio_monotone(spec, lam, t_grid, tol=1e-9),
        check_lyapunov(spec, pairs, tol=1e-9),
        check_dominance(spec, t, default_x_grid(spec), tol=1e-9),
        check_properties(spec, s, t, lams, tol=tol),
    ]
    return combine("structural_draw", parts, spec=repr(spec), t=t, s=s)


def structural_suite(seed=0, n_draws=200):
    rng = np.random.default_rng(seed)
    draws = [structural_draw(rng) for _ in range(n_draws)]
    failed = [d.details["spec"] for d in draws if not d.passed]
    return combine("structural_suite", draws, n_draws=n_draws, failed=failed)


def tmonotone_suite(seed=0, n_draws=20):
    rng = np.random.default_rng(seed)
    parts = []
    for _ in range(n_draws):
        y = random_family(rng)
        t_int = int(rng.integers(1, 5))
        mix = beta_mix(y, t_int)
        span = mix.upper if math.isfinite(mix.upper) else default_x_grid(y)[-1]
        for k in range(1, t_int + 1):
            parts.append(check_k_monotone(mix, k, [0.0, span]))
        t = float(rng.uniform(0.2, 5.0))
        s = float(rng.uniform(0.05, 0.95)) * t
        lams = np.linspace(0.25, 4.0, 16)
        parts.append(check_downward_closure(y, t, s, lams, tol=1e-8))
        rec = recover_mixing_mellin(beta_mix(y, t), t, lams)
        got = np.array([v.value for v in rec])
        want = np.exp(log_mellin_values(y, lams)[0])
        gap = float(np.max(np.abs(got / want - 1.0)))
        parts.append(CheckResult("recover_mix_identity", gap < 1e-7, gap - 1e-7))
        parts.append(rec.certificate)
    parts.append(check_cm_limit([1, 2, 5, 10, 20, 50, 100], np.linspace(0.0, 10.0, 101)))
    uniform = check_k_monotone(dist.Uniform(0.0, 1.0), 2, [0.0, 1.0])
    parts.append(CheckResult("uniform_not_2_monotone", not uniform.passed, 0.0,
                             {"k_monotone": uniform.to_dict()}))
    rec = recover_mixing_mellin(dist.Uniform(0.0, 1.0), 2.0)
    parts.append(CheckResult("uniform_recovery_rejected", not rec.certificate.passed, 0.0))
    return combine("tmonotone_suite", parts)


def random_levy(rng):
    kind = rng.integers(3)
    sigma2 = float(rng.uniform(0.0, 1.0))
    d = float(rng.uniform(-1.0, 1.0))
    if kind == 0:
        return LevySpec(d, max(sigma2, 0.05), None)
    if kind == 1:
        return LevySpec(d, sigma2, CompoundPoisson(float(rng.uniform(0.2, 3.0)),
                                                   float(rng.uniform(0.2, 2.0))))
    atoms = tuple((float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.1, 3.0)))
                  for _ in range(int(rng.integers(1, 4))))
    return LevySpec(d, sigma2, FiniteAtoms(atoms))


def levy_suite(seed=0, n_draws=30):
    rng = np.random.default_rng(seed)
    parts = []
    lam = np.linspace(0.0, 6.0, 61)
    for _ in range(n_draws):
        spec = random_levy(rng)
        g = levy_exponent(spec, lam)
        parts.append(CheckResult("g_at_zero", abs(g[0]) == 0.0, abs(g[0])))
        mid_excess = g[1:-1] - 0.5 * (g[:-2] + g[2:])
        parts.append(CheckResult("g_convex", bool(np.all(mid_excess <= 1e-12)),
                                 float(mid_excess.max() - 1e-12)))
        slope = np.diff(g) / np.diff(lam)
        slope_gap = 0.5 * (slope[:-2] + slope[2:]) - slope[1:-1]
        parts.append(CheckResult("g_prime_concave", bool(np.all(slope_gap <= 1e-9)),
                                 float(slope_gap.max() - 1e-9)))
        t, s = float(rng.uniform(0.1, 20.0)), float(rng.uniform(0.1, 3.0))
        fd = (levy_exponent(spec, t + 1 + s) - levy_exponent(spec, t + 1)
              - levy_exponent(spec, t + s) + levy_exponent(spec, t))
        gap = abs(fd - delta_formula(spec, t, s)) - 1e-10 * max(1.0, abs(fd))
        parts.append(CheckResult("delta_formula", gap < 0, gap))
        if spec.jumps is not None:
            ts = np.linspace(0.5, 50.0, 100)
            corr = delta_formula(spec, ts, s) - spec.sigma2 * s
            ok = bool(np.all(corr >= -1e-12) and np.all(np.diff(corr) <= 1e-15))
            parts.append(CheckResult("correction_decreasing", ok, float(-corr.min() - 1e-12)))
    return combine("levy_suite", parts)


def excess_suite(seed=0, n_draws=20):
    rng = np.random.default_rng(seed)
    parts = []
    lams = np.linspace(0.25, 5.0, 20)
    for _ in range(n_draws):
        theta = float(rng.uniform(0.3, 3.0))
        t = float(rng.uniform(0.1, 5.0))
        dist_exp = mellin_distance(excess(dist.Exponential(theta), t),
                                   dist.Exponential(theta), lams)
        parts.append(CheckResult("exponential_fixed_point", dist_exp < 1e-8, dist_exp - 1e-8))
        y = random_family(rng)
        s = float(rng.uniform(0.1, 3.0))
        parts.append(check_semigroup(y, s, t, lams, tol=1e-8, method="auto"))
        comm = mellin_distance(excess(excess(y, s), t), excess(excess(y, t), s), lams)
        parts.append(CheckResult("commutativity", comm < 1e-6, comm - 1e-6))
    parts.append(check_iteration(dist.Uniform(0.0, 1.0), 3))
    parts.append(check_iteration(dist.Exponential(1.0), 5))
    return combine("excess_suite", parts)


def limit_suite(seed=0, n_draws=25):
    rng = np.random.default_rng(seed)
    parts = []
    for _ in range(n_draws):
        law = limit_law(float(rng.uniform(0.2, 5.0)), float(rng.choice([0.0, rng.uniform(0, 2)])))
        parts.append(check_fixed_point(law, float(rng.uniform(0.0, 5.0))))
        gap = law.functional_equation_gap(rng.uniform(-3, 3, 8), rng.uniform(-3, 3, 8))
        parts.append(CheckResult("functional_equation", gap < 1e-12, gap - 1e-12))
    return combine("limit_suite", parts)


def full_suite(seed=0, n_structural=200):
    """Every randomized battery; the ``check-suite`` subcommand runs this."""
    return combine("check_suite", [
        structural_suite(seed, n_structural),
        tmonotone_suite(seed),
        excess_suite(seed),
        levy_suite(seed),
        limit_suite(seed),
    ], seed=seed)
