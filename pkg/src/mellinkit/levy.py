"""Laws whose logarithm is infinitely divisible.

The exponent of ``log X`` is

    g(lam) = d lam + sigma2 lam**2 / 2 + int (exp(-lam x) - 1 + lam x 1{x <= 1}) pi(dx)

so the Mellin transform of ``X`` is ``exp(g)``.  Only finite jump measures
are supported: exponential compound-Poisson jumps and finitely many atoms.
Both give closed forms for ``g`` and for its second difference.
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import special, stats

from . import quadrature as quad
from .errors import DensityUnavailable, InvalidSpec


@dataclass(frozen=True)
class CompoundPoisson:
    """Jump measure ``rate * Exp(mean=jump_mean)``."""

    rate: float
    jump_mean: float

    def __post_init__(self):
        if not (self.rate > 0 and self.jump_mean > 0):
            raise InvalidSpec("compound Poisson needs rate > 0 and jump_mean > 0")


@dataclass(frozen=True)
class FiniteAtoms:
    """Jump measure ``sum mass_i * delta(atom_i)``."""

    atoms: tuple  # of (mass, atom) pairs

    def __post_init__(self):
        pairs = tuple((float(m), float(a)) for m, a in self.atoms)
        if not pairs:
            raise InvalidSpec("FiniteAtoms needs at least one atom")
        if any(m <= 0 or a <= 0 for m, a in pairs):
            raise InvalidSpec("atom masses and locations must be positive")
        object.__setattr__(self, "atoms", pairs)


Jumps = Optional[Union[CompoundPoisson, FiniteAtoms]]


@dataclass(frozen=True)
class LevySpec:
    d: float = 0.0
    sigma2: float = 0.0
    jumps: Jumps = None

    def __post_init__(self):
        if not math.isfinite(self.d):
            raise InvalidSpec("drift must be finite")
        if not (math.isfinite(self.sigma2) and self.sigma2 >= 0):
            raise InvalidSpec("sigma2 must be nonnegative")

    # -- exponent ---------------------------------------------------------

    def _compensator(self):
        """``int x 1{x <= 1} pi(dx)``."""
        j = self.jumps
        if j is None:
            return 0.0
        if isinstance(j, CompoundPoisson):
            m = j.jump_mean
            return j.rate * m * (1.0 - math.exp(-1.0 / m) * (1.0 + 1.0 / m))
        return sum(mass * a for mass, a in j.atoms if a <= 1.0)

    def exponent(self, lam):
        lam = np.asarray(lam, dtype=float)
        g = self.d * lam + 0.5 * self.sigma2 * lam * lam
        j = self.jumps
        if isinstance(j, CompoundPoisson):
            g = g + j.rate * (1.0 / (1.0 + lam * j.jump_mean) - 1.0)
        elif isinstance(j, FiniteAtoms):
            for mass, a in j.atoms:
                g = g + mass * np.expm1(-lam * a)
        return g + lam * self._compensator()

    def second_difference(self, t, s):
        """``g(t+1+s) - g(t+1) - g(t+s) + g(t)`` in closed form."""
        t = np.asarray(t, dtype=float)
        out = self.sigma2 * s + 0.0 * t
        j = self.jumps
        if isinstance(j, CompoundPoisson):
            m = j.jump_mean
            out = out + j.rate * (1 / (1 + t * m) - 1 / (1 + (t + 1) * m)
                                  - 1 / (1 + (t + s) * m) + 1 / (1 + (t + 1 + s) * m))
        elif isinstance(j, FiniteAtoms):
            for mass, a in j.atoms:
                out = out + mass * np.exp(-t * a) * (-math.expm1(-a)) * (-math.expm1(-s * a))
        return out

    # -- moments of log X ---------------------------------------------------

    def log_mean(self):
        j = self.jumps
        if isinstance(j, CompoundPoisson):
            m = j.jump_mean
            return self.d - j.rate * math.exp(-1.0 / m) * (1.0 + m)
        if isinstance(j, FiniteAtoms):
            return self.d - sum(mass * a for mass, a in j.atoms if a > 1.0)
        return self.d

    def log_var(self):
        j = self.jumps
        if isinstance(j, CompoundPoisson):
            return self.sigma2 + 2.0 * j.rate * j.jump_mean ** 2
        if isinstance(j, FiniteAtoms):
            return self.sigma2 + sum(mass * a * a for mass, a in j.atoms)
        return self.sigma2

    def log_max(self):
        """Largest value of ``log X`` when there is no Gaussian part."""
        return self.d + self._compensator()

    def lower_mellin_bound(self):
        if isinstance(self.jumps, CompoundPoisson):
            return -1.0 / self.jumps.jump_mean
        return -math.inf

    # -- size biasing -----------------------------------------------------

    def tilted(self, t):
        """Spec of ``log X_(t)``: exponent ``g(lam + t) - g(t)``."""
        j = self.jumps
        if j is None:
            new_jumps = None
        elif isinstance(j, CompoundPoisson):
            k = 1.0 + t * j.jump_mean
            new_jumps = CompoundPoisson(j.rate / k, j.jump_mean / k)
        else:
            new_jumps = FiniteAtoms(tuple((mass * math.exp(-t * a), a) for mass, a in j.atoms))
        shifted = LevySpec(0.0, self.sigma2, new_jumps)
        d = self.d + self.sigma2 * t + self._compensator() - shifted._compensator()
        return LevySpec(d, self.sigma2, new_jumps)

    # -- law of the jump part ---------------------------------------------

    def _atom_table(self, floor=1e-17):
        """Values and probabilities of the jump sum for finitely many atoms."""
        table = {0.0: 1.0}
        for mass, a in self.jumps.atoms:
            kmax = int(stats.poisson.isf(floor, mass)) + 1
            pk = stats.poisson.pmf(np.arange(kmax + 1), mass)
            nxt = {}
            for v, p in table.items():
                for k in range(kmax + 1):
                    q = p * pk[k]
                    if q > floor:
                        key = v + k * a
                        nxt[key] = nxt.get(key, 0.0) + q
            table = nxt
        vals = np.array(list(table.keys()))
        probs = np.array(list(table.values()))
        return vals, probs

    def _poisson_terms(self, floor=1e-17):
        r = self.jumps.rate
        nmax = int(stats.poisson.isf(floor, r)) + 1
        return np.arange(nmax + 1), stats.poisson.pmf(np.arange(nmax + 1), r)

    def _gamma_average(self, n, fn, cols):
        """``E[fn(G)]`` for ``G ~ Gamma(n, jump_mean)``, batched over columns."""
        m = self.jumps.jump_mean
        gmax = m * (n + 12.0 * math.sqrt(n) + 40.0)
        logc = -special.gammaln(n) - n * math.log(m)

        def f(g):
            with np.errstate(divide="ignore"):
                w = np.exp((n - 1) * np.log(g) - g / m + logc)
            return w[:, None] * fn(g[:, None] + 0.0 * cols[None, :])

        val, _ = quad.integrate(f, 0.0, gmax, atol=1e-14, rtol=1e-10)
        return np.atleast_1d(val)

    def _expect_jump(self, h, y):
        """``E[h(y + J)]`` where ``J`` is the (positive) jump sum."""
        y = np.asarray(y, dtype=float)
        j = self.jumps
        if j is None:
            return h(y)
        if isinstance(j, FiniteAtoms):
            vals, probs = self._atom_table()
            return (probs[:, None] * h(y[None, :] + vals[:, None])).sum(axis=0)
        ns, ps = self._poisson_terms()
        out = ps[0] * h(y)
        for n, p in zip(ns[1:], ps[1:]):
            out = out + p * self._gamma_average(int(n), lambda g: h(y[None, :] + g), y)
        return out

    def survival_of_exp(self, x):
        """``P(exp(L) > x)``."""
        with np.errstate(divide="ignore"):
            y = np.log(x) - self.log_max()
        if self.sigma2 > 0:
            s = math.sqrt(self.sigma2)
            return self._expect_jump(lambda z: special.ndtr(-z / s), y)
        if isinstance(self.jumps, CompoundPoisson):
            ns, ps = self._poisson_terms()
            m = self.jumps.jump_mean
            neg = np.maximum(-y, 0.0)
            out = ps[0] * (y < 0)
            for n, p in zip(ns[1:], ps[1:]):
                out = out + p * special.gammainc(n, neg / m)
            return out
        return self._expect_jump(lambda z: (z < 0).astype(float), y)

    def density_of_exp(self, x):
        if self.sigma2 == 0:
            raise DensityUnavailable("log X has atoms when sigma2 = 0")
        s = math.sqrt(self.sigma2)
        xc = np.where(x > 0, x, 1.0)
        y = np.log(xc) - self.log_max()
        fy = self._expect_jump(lambda z: np.exp(-0.5 * (z / s) ** 2) / (s * math.sqrt(2 * math.pi)), y)
        return np.where(x > 0, fy / xc, 0.0)

    def sample_log(self, n, seed):
        rng = np.random.default_rng(seed)
        out = self.log_max() + math.sqrt(self.sigma2) * rng.standard_normal(n)
        j = self.jumps
        if isinstance(j, CompoundPoisson):
            counts = rng.poisson(j.rate, n)
            out = out - rng.gamma(counts, j.jump_mean)
        elif isinstance(j, FiniteAtoms):
            for mass, a in j.atoms:
                out = out - a * rng.poisson(mass, n)
        return out


def levy_exponent(spec, lam):
    """``g(lam) = log E[X**lam]`` for ``lam >= 0``."""
    if np.any(np.asarray(lam) < 0):
        raise ValueError("the exponent is evaluated for lam >= 0")
    g = spec.exponent(lam)
    return float(g) if np.ndim(g) == 0 else g


def delta_formula(spec, t, s):
    """Closed-form ``Delta_1 Delta_s g(t) = sigma2 s + int e^{-tx}(1-e^{-x})(1-e^{-sx}) pi(dx)``."""
    if not (np.all(np.asarray(t) > 0) and s > 0):
        raise ValueError("t and s must be positive")
    out = spec.second_difference(t, s)
    return float(out) if np.ndim(out) == 0 else out


def dist_from_levy(spec):
    """Distribution spec of ``X = exp(L)``."""
    from .dist import LevyLog
    return LevyLog(spec)
