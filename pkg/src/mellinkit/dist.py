"""Nonnegative laws: data model, survival and density evaluation, sampling.

Every law is an immutable dataclass.  Leaf families (exponential, gamma,
beta, log-normal, ...) carry closed forms; derived laws (scaled, size biased,
stationary excess, independent products) reference a base law and are
evaluated by quadrature on top of it.
"""

import math
import zlib
from dataclasses import dataclass, field
from functools import cached_property
import numpy as np
from scipy import special
from scipy.interpolate import PchipInterpolator

from . import quadrature as quad
from .errors import (DensityUnavailable, InvalidSpec, QuadratureFailure,
                     SamplerUnavailable)
from .levy import LevySpec

MAX_NESTING = 8
SURVIVAL_TOL = 1e-9
CHUNK = 4096


@dataclass(frozen=True)
class MellinDomain:
    """Real interval ``(mu_X, lambda_X)`` on which ``E[X**lam]`` is finite."""

    mu_X: float
    lambda_X: float
    lower_included: bool = False
    upper_included: bool = False

    def __post_init__(self):
        if not (self.mu_X <= 0.0 <= self.lambda_X):
            raise InvalidSpec("a Mellin domain always contains 0")

    def contains(self, lam, interior=False):
        lam = float(lam)
        if lam < self.mu_X or lam > self.lambda_X:
            return False
        if lam == self.mu_X and (interior or not self.lower_included):
            return lam == 0.0
        if lam == self.lambda_X and (interior or not self.upper_included):
            return lam == 0.0
        return True


@dataclass(frozen=True)
class SampleBatch:
    seed: int
    n: int
    values: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        if np.any(self.values < 0):
            raise ValueError("samples of a nonnegative law must be >= 0")


def derive_seed(seed, tag):
    """Child seed for an independent factor of a derived law."""
    ss = np.random.SeedSequence([int(seed) % 2 ** 64, zlib.crc32(tag.encode())])
    return int(ss.generate_state(1, np.uint64)[0])


def _positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise InvalidSpec("%s must be positive, got %r" % (name, value))


def _nonneg(name, value):
    if not (np.isfinite(value) and value >= 0):
        raise InvalidSpec("%s must be nonnegative, got %r" % (name, value))


def _moment(spec, t):
    from .mellin import mellin_values
    return float(mellin_values(spec, [t])[0][0])


def _quiet(fn):
    """Far-tail overflow is expected inside integrands; the integrator zeroes it."""
    def wrapped(*args):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return fn(*args)
    return wrapped


def _shifted_integral(x, p, upper, phi, center, scale, atol, rtol):
    """Batch of ``int_0^W phi(u, v, x) dw`` with ``v = w**(1/p)``, ``u = x + v``.

    ``W = (upper - x)**p`` for bounded support and ``+inf`` otherwise.  The
    power substitution absorbs the ``(u - x)**(p - 1)`` factor of the
    integrands below, so their endpoint singularity disappears.
    """
    x = np.asarray(x, dtype=float)
    if x.size > CHUNK:
        # nested laws multiply batch sizes; bound the memory of each pass
        return np.concatenate([
            _shifted_integral(x[i:i + CHUNK], p, upper, phi, center, scale, atol, rtol)
            for i in range(0, x.size, CHUNK)])
    out = np.zeros_like(x)
    live = x < upper if np.isfinite(upper) else np.ones(x.shape, bool)
    if not live.any():
        return out
    xs = x[live]
    if np.isfinite(upper):
        W = (upper - xs) ** p

        @_quiet
        def g(q):
            v = (W[None, :] * q[:, None]) ** (1.0 / p)
            u = xs[None, :] + v
            vals = phi(u.ravel(), v.ravel(), np.broadcast_to(xs, u.shape).ravel())
            return vals.reshape(u.shape) * W[None, :]

        val, _ = quad.integrate_unit(g, atol=atol, rtol=rtol)
    else:
        @_quiet
        def g(y):
            v = np.exp(y / p)[:, None] * np.ones((1, xs.size))
            u = xs[None, :] + v
            vals = phi(u.ravel(), v.ravel(), np.broadcast_to(xs, u.shape).ravel())
            return vals.reshape(u.shape) * np.exp(y)[:, None]

        val, _ = quad.integrate_line(g, center=p * center, scale=max(p * scale, 1.0),
                                     atol=atol, rtol=rtol)
    out[live] = val
    return out


def _segmented_tail(x, t, base, phi, p, center, scale, tol, norm):
    """``int_x^inf t u**(t-1) S(u) du`` for a batch, as suffix sums over segments.

    Integrating between consecutive sorted points keeps each kink of ``S`` in
    one column only, and the suffix sums of positive pieces keep small tails
    accurate.
    """
    flat = x.ravel()
    # kinks of S become segment ends, out of the blind spots of the GK nodes
    kinks = [k for k in base.kinks if flat.min() < k < flat.max()]
    pts = np.unique(np.concatenate([flat, kinks]))
    inv = np.searchsorted(pts, flat)
    last = pts[-1:]
    top = _shifted_integral(last, p, base.upper, phi, center, scale,
                            atol=tol * norm * 0.1, rtol=tol)
    pieces = np.zeros(pts.size)
    if pts.size > 1:
        a, b = pts[:-1], pts[1:]
        stol = tol * 0.1
        width = b - a
        atol = tol * norm * 0.1 / pts.size

        def piece(lo, w):
            @_quiet
            def g(q):
                u = lo[None, :] + w[None, :] * q[:, None]
                vals = t * u ** (t - 1.0) * survival(base, u.ravel(), stol).reshape(u.shape)
                return vals * w[None, :]
            return g

        first = 1 if (t < 1 and a[0] == 0) else 0
        if first:
            # u**(t-1) blows up at the origin; the log map absorbs it
            pieces[:1], _ = quad.integrate_unit(piece(a[:1], width[:1]), atol=atol, rtol=tol)
        if a.size > first:
            pieces[first:-1], _ = quad.integrate(piece(a[first:], width[first:]), 0.0, 1.0,
                                                 atol=atol, rtol=tol)
    pieces[-1] = top[0]
    suffix = np.cumsum(pieces[::-1])[::-1]
    return suffix[inv].reshape(x.shape)


class DistributionSpec:
    """Base class of every law; subclasses are frozen dataclasses."""

    variant = "abstract"

    # subclasses override the pieces they support
    def _sf(self, x, tol):
        raise NotImplementedError

    def _pdf(self, x):
        raise DensityUnavailable("%s has no density" % self.variant)

    def _draw(self, n, seed):
        raise SamplerUnavailable("%s has no sampler" % self.variant)

    def _domain(self):
        raise NotImplementedError

    def _closed_log_mellin(self, lams):
        """``log E[X**lam]`` in closed form, or ``None``."""
        return None

    def _log_location(self):
        return 0.0, 1.0

    @property
    def upper(self):
        """Right end of the support (``inf`` when unbounded)."""
        return math.inf

    @property
    def kinks(self):
        """Points where the survival function may fail to be smooth."""
        return (self.upper,) if math.isfinite(self.upper) else ()

    @property
    def is_deterministic(self):
        return False

    @property
    def has_density(self):
        return False

    @property
    def depth(self):
        return 0


# ---------------------------------------------------------------- leaves


@dataclass(frozen=True)
class Exponential(DistributionSpec):
    rate: float = 1.0
    variant = "exponential"

    def __post_init__(self):
        _positive("rate", self.rate)

    def _sf(self, x, tol):
        return np.exp(-self.rate * x)

    def _pdf(self, x):
        return self.rate * np.exp(-self.rate * x)

    def _draw(self, n, seed):
        return np.random.default_rng(seed).exponential(1.0 / self.rate, n)

    def _domain(self):
        return MellinDomain(-1.0, math.inf)

    def _closed_log_mellin(self, lams):
        return special.gammaln(lams + 1.0) - lams * math.log(self.rate)

    def _log_location(self):
        return -math.log(self.rate) - np.euler_gamma, math.pi / math.sqrt(6.0)

    @property
    def has_density(self):
        return True


@dataclass(frozen=True)
class Gamma(DistributionSpec):
    shape: float
    variant = "gamma"

    def __post_init__(self):
        _positive("shape", self.shape)

    def _sf(self, x, tol):
        return special.gammaincc(self.shape, x)

    def _pdf(self, x):
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(special.xlogy(self.shape - 1.0, x) - x - special.gammaln(self.shape))

    def _draw(self, n, seed):
        return np.random.default_rng(seed).gamma(self.shape, 1.0, n)

    def _domain(self):
        return MellinDomain(-self.shape, math.inf)

    def _closed_log_mellin(self, lams):
        return special.gammaln(self.shape + lams) - special.gammaln(self.shape)

    def _log_location(self):
        return float(special.digamma(self.shape)), math.sqrt(special.polygamma(1, self.shape))

    @property
    def has_density(self):
        return True


@dataclass(frozen=True)
class Beta(DistributionSpec):
    a: float
    b: float
    variant = "beta"

    def __post_init__(self):
        _positive("a", self.a)
        _positive("b", self.b)

    def _sf(self, x, tol):
        return special.betaincc(self.a, self.b, np.clip(x, 0.0, 1.0))

    def _pdf(self, x):
        inside = (x >= 0) & (x < 1)
        xc = np.where(inside, x, 0.5)
        with np.errstate(divide="ignore", over="ignore"):
            val = np.exp(special.xlogy(self.a - 1, xc) + (self.b - 1) * np.log1p(-xc)
                         - special.betaln(self.a, self.b))
        return np.where(inside, val, 0.0)

    def _draw(self, n, seed):
        return np.random.default_rng(seed).beta(self.a, self.b, n)

    def _domain(self):
        return MellinDomain(-self.a, math.inf)

    def _closed_log_mellin(self, lams):
        return special.betaln(self.a + lams, self.b) - special.betaln(self.a, self.b)

    def _log_location(self):
        m = special.digamma(self.a) - special.digamma(self.a + self.b)
        v = special.polygamma(1, self.a) - special.polygamma(1, self.a + self.b)
        return float(m), math.sqrt(v)

    @property
    def upper(self):
        return 1.0

    @property
    def has_density(self):
        return True


@dataclass(frozen=True)
class BetaT(DistributionSpec):
    """Beta(1, t) law with density ``t (1 - x)**(t - 1)``; ``t = 0`` is the unit mass."""

    t: float
    variant = "beta_t"

    def __post_init__(self):
        _nonneg("t", self.t)

    def _sf(self, x, tol):
        if self.t == 0:
            return np.where(x < 1.0, 1.0, 0.0)
        return np.clip(1.0 - x, 0.0, 1.0) ** self.t

    def _pdf(self, x):
        if self.t == 0:
            raise DensityUnavailable("BetaT(0) is a point mass")
        inside = (x >= 0) & (x < 1)
        return np.where(inside, self.t * np.clip(1.0 - x, 0.0, 1.0) ** (self.t - 1.0), 0.0)

    def _draw(self, n, seed):
        if self.t == 0:
            return np.ones(n)
        e = np.random.default_rng(seed).exponential(1.0, n)
        return -np.expm1(-e / self.t)

    def _domain(self):
        if self.t == 0:
            return MellinDomain(-math.inf, math.inf)
        return MellinDomain(-1.0, math.inf)

    def _closed_log_mellin(self, lams):
        if self.t == 0:
            return np.zeros_like(lams)
        return (special.gammaln(self.t + 1.0) + special.gammaln(lams + 1.0)
                - special.gammaln(lams + self.t + 1.0))

    def _log_location(self):
        if self.t == 0:
            return 0.0, 1e-3
        return Beta(1.0, self.t)._log_location()

    @property
    def upper(self):
        return 1.0

    @property
    def is_deterministic(self):
        return self.t == 0

    @property
    def has_density(self):
        return self.t > 0


@dataclass(frozen=True)
class LogNormal(DistributionSpec):
    """``exp(N(mu, sigma2))``; ``sigma2 = 0`` is the point mass at ``exp(mu)``."""

    mu: float = 0.0
    sigma2: float = 1.0
    variant = "lognormal"

    def __post_init__(self):
        if not np.isfinite(self.mu):
            raise InvalidSpec("mu must be finite")
        _nonneg("sigma2", self.sigma2)

    def _sf(self, x, tol):
        if self.sigma2 == 0:
            return np.where(x < math.exp(self.mu), 1.0, 0.0)
        with np.errstate(divide="ignore"):
            z = (np.log(x) - self.mu) / math.sqrt(self.sigma2)
        return special.ndtr(-z)

    def _pdf(self, x):
        if self.sigma2 == 0:
            raise DensityUnavailable("deterministic law")
        s = math.sqrt(self.sigma2)
        xc = np.where(x > 0, x, 1.0)
        z = (np.log(xc) - self.mu) / s
        return np.where(x > 0, np.exp(-0.5 * z * z) / (xc * s * math.sqrt(2 * math.pi)), 0.0)

    def _draw(self, n, seed):
        z = np.random.default_rng(seed).standard_normal(n)
        return np.exp(self.mu + math.sqrt(self.sigma2) * z)

    def _domain(self):
        return MellinDomain(-math.inf, math.inf)

    def _closed_log_mellin(self, lams):
        return self.mu * lams + 0.5 * self.sigma2 * lams * lams

    def _log_location(self):
        return self.mu, max(math.sqrt(self.sigma2), 1e-3)

    @property
    def upper(self):
        return math.exp(self.mu) if self.sigma2 == 0 else math.inf

    @property
    def is_deterministic(self):
        return self.sigma2 == 0

    @property
    def has_density(self):
        return self.sigma2 > 0


def point_mass(value=1.0):
    """Deterministic law at ``value`` (a log-normal with zero variance)."""
    _positive("value", value)
    return LogNormal(math.log(value), 0.0)


@dataclass(frozen=True)
class Uniform(DistributionSpec):
    lo: float = 0.0
    hi: float = 1.0
    variant = "uniform"

    def __post_init__(self):
        _nonneg("lo", self.lo)
        if not (np.isfinite(self.hi) and self.hi > self.lo):
            raise InvalidSpec("need hi > lo")

    def _sf(self, x, tol):
        return np.clip((self.hi - x) / (self.hi - self.lo), 0.0, 1.0)

    def _pdf(self, x):
        return np.where((x >= self.lo) & (x < self.hi), 1.0 / (self.hi - self.lo), 0.0)

    def _draw(self, n, seed):
        return np.random.default_rng(seed).uniform(self.lo, self.hi, n)

    def _domain(self):
        if self.lo > 0:
            return MellinDomain(-math.inf, math.inf)
        return MellinDomain(-1.0, math.inf)

    def _closed_log_mellin(self, lams):
        lams = np.asarray(lams, dtype=float)
        p = lams + 1.0
        if self.lo == 0:
            return lams * math.log(self.hi) - np.log(p)
        width = self.hi - self.lo
        # (hi**p - lo**p) / (p width), written to stay finite for large |p|
        r = math.log(self.lo) - math.log(self.hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.log(-np.expm1(p * r) / (p * -r))
        rel = np.where(p == 0, 0.0, rel)
        return p * math.log(self.hi) + rel + math.log(-r) - math.log(width)

    def _log_location(self):
        if self.lo == 0:
            return math.log(self.hi) - 1.0, 1.0
        span = math.log(self.hi) - math.log(self.lo)
        return 0.5 * (math.log(self.lo) + math.log(self.hi)), max(span / 3, 1e-3)

    @property
    def upper(self):
        return self.hi

    @property
    def kinks(self):
        return (self.lo, self.hi) if self.lo > 0 else (self.hi,)

    @property
    def has_density(self):
        return True


@dataclass(frozen=True)
class GridSurvival(DistributionSpec):
    """Survival function tabulated on knots, interpolated monotonically.

    Below the first knot the curve starts from ``(0, 1)`` when ``x[0] > 0``;
    beyond the last knot the survival is 0 (an atom sits there if
    ``s[-1] > 0``).
    """

    x: tuple
    s: tuple
    variant = "grid_survival"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        s = np.asarray(self.s, dtype=float)
        object.__setattr__(self, "x", tuple(x.tolist()))
        object.__setattr__(self, "s", tuple(s.tolist()))
        if x.ndim != 1 or x.size != s.size or x.size < 2:
            raise InvalidSpec("grid needs at least two (x, S) pairs")
        if x[0] < 0 or np.any(np.diff(x) <= 0):
            raise InvalidSpec("grid x must be nonnegative and strictly increasing")
        if np.any(np.diff(s) > 0) or s[0] > 1 or s[-1] < 0:
            raise InvalidSpec("grid S must be nonincreasing within [0, 1]")

    @cached_property
    def _interp(self):
        x = np.asarray(self.x)
        s = np.asarray(self.s)
        if x[0] > 0:
            x = np.concatenate([[0.0], x])
            s = np.concatenate([[1.0], s])
        return PchipInterpolator(x, s, extrapolate=False)

    def _sf(self, x, tol):
        x = np.asarray(x, dtype=float)
        out = np.clip(np.nan_to_num(self._interp(np.clip(x, 0.0, self.upper)), nan=0.0), 0.0, 1.0)
        return np.where(x > self.upper, 0.0, out)

    def _pdf(self, x):
        raise DensityUnavailable("grid survival carries no density")

    def _draw(self, n, seed):
        u = np.random.default_rng(seed).uniform(0.0, 1.0, n)
        return _invert_survival(lambda z: self._sf(z, 0.0), u, 0.0, self.upper)

    def _domain(self):
        if self.x[0] == 0 and self.s[0] < 1:
            return MellinDomain(0.0, math.inf, lower_included=True)
        return MellinDomain(-1.0, math.inf)

    def _log_location(self):
        x = np.linspace(0, self.upper, 513)[1:]
        sv = self._sf(x, 0.0)
        q = np.interp([0.75, 0.5, 0.25], sv[::-1], x[::-1])
        q = np.maximum(q, self.upper * 1e-6)
        return math.log(q[1]), max(math.log(q[2] / q[0]), 0.1)

    @property
    def upper(self):
        return self.x[-1]

    @property
    def kinks(self):
        return tuple(float(v) for v in self.x if v > 0)


@dataclass(frozen=True)
class PerturbedLogNormal(DistributionSpec):
    """Density ``(1 + eps sin(2 pi (ln x - mu) / sigma2)) f_LN(x)``.

    Shares every integer moment with ``LogNormal(mu, sigma2)``.
    """

    mu: float = 0.0
    sigma2: float = 1.0
    eps: float = 0.5
    variant = "perturbed_lognormal"

    def __post_init__(self):
        if not np.isfinite(self.mu):
            raise InvalidSpec("mu must be finite")
        _positive("sigma2", self.sigma2)
        if not (0.0 <= self.eps < 1.0):
            raise InvalidSpec("eps must lie in [0, 1)")

    @property
    def _freq(self):
        return 2.0 * math.pi / math.sqrt(self.sigma2)

    def _sf(self, x, tol):
        base = LogNormal(self.mu, self.sigma2)._sf(x, tol)
        if self.eps == 0:
            return base
        with np.errstate(divide="ignore"):
            a = (np.log(np.asarray(x, dtype=float)) - self.mu) / math.sqrt(self.sigma2)
        a = np.abs(a)  # the perturbation tail is even in a
        k = self._freq
        finite = np.isfinite(a)
        af = np.where(finite, a, 0.0)
        # int_a^inf sin(k z) phi(z) dz = Im[exp(-a^2/2 + i a k) w((k + i a)/sqrt2)] / 2
        term = np.exp(-0.5 * af * af + 1j * af * k) * special.wofz((k + 1j * af) / math.sqrt(2))
        pert = np.where(finite, 0.5 * term.imag, 0.0)
        return base + self.eps * pert

    def _pdf(self, x):
        base = LogNormal(self.mu, self.sigma2)._pdf(x)
        xc = np.where(np.asarray(x) > 0, x, 1.0)
        wave = np.sin(2 * math.pi * (np.log(xc) - self.mu) / self.sigma2)
        return base * (1.0 + self.eps * wave)

    def _draw(self, n, seed):
        rng = np.random.default_rng(seed)
        s = math.sqrt(self.sigma2)
        out = np.empty(0)
        while out.size < n:
            m = int(1.2 * (n - out.size) * (1 + self.eps)) + 16
            y = self.mu + s * rng.standard_normal(m)
            accept = rng.uniform(0.0, 1.0 + self.eps, m) < 1.0 + self.eps * np.sin(
                2 * math.pi * (y - self.mu) / self.sigma2)
            out = np.concatenate([out, np.exp(y[accept])])
        return out[:n]

    def _domain(self):
        return MellinDomain(-math.inf, math.inf)

    def _log_location(self):
        return self.mu, math.sqrt(self.sigma2)

    @property
    def has_density(self):
        return True


@dataclass(frozen=True)
class LevyLog(DistributionSpec):
    """Law of ``exp(L)`` for an infinitely divisible ``L`` (see :mod:`levy`)."""

    levy: LevySpec
    variant = "levy_log"

    def _sf(self, x, tol):
        return self.levy.survival_of_exp(np.asarray(x, dtype=float))

    def _pdf(self, x):
        return self.levy.density_of_exp(np.asarray(x, dtype=float))

    def _draw(self, n, seed):
        return np.exp(self.levy.sample_log(n, seed))

    def _domain(self):
        lo = self.levy.lower_mellin_bound()
        return MellinDomain(lo, math.inf)

    def _closed_log_mellin(self, lams):
        return self.levy.exponent(np.asarray(lams, dtype=float))

    def _log_location(self):
        return self.levy.log_mean(), max(math.sqrt(self.levy.log_var()), 1e-3)

    @property
    def is_deterministic(self):
        return self.levy.sigma2 == 0 and self.levy.jumps is None

    @property
    def upper(self):
        if self.levy.sigma2 == 0:
            return math.exp(self.levy.log_max())
        return math.inf

    @property
    def has_density(self):
        return self.levy.sigma2 > 0


# ---------------------------------------------------------------- derived


@dataclass(frozen=True)
class Scaled(DistributionSpec):
    base: DistributionSpec
    factor: float
    variant = "scaled"

    def __post_init__(self):
        _positive("factor", self.factor)

    def _sf(self, x, tol):
        return survival(self.base, np.asarray(x) / self.factor, tol)

    def _pdf(self, x):
        return density(self.base, np.asarray(x) / self.factor) / self.factor

    def _draw(self, n, seed):
        return self.factor * sample(self.base, n, derive_seed(seed, "scaled")).values

    def _domain(self):
        return mellin_domain(self.base)

    def _log_location(self):
        m, s = self.base._log_location()
        return m + math.log(self.factor), s

    @property
    def upper(self):
        return self.factor * self.base.upper

    @property
    def kinks(self):
        return tuple(self.factor * k for k in self.base.kinks)

    @property
    def is_deterministic(self):
        return self.base.is_deterministic

    @property
    def has_density(self):
        return self.base.has_density

    @property
    def depth(self):
        return self.base.depth


@dataclass(frozen=True)
class SizeBiased(DistributionSpec):
    """Law reweighted by ``x**t / E[X**t]``."""

    base: DistributionSpec
    t: float
    variant = "size_biased"

    def __post_init__(self):
        if not np.isfinite(self.t):
            raise InvalidSpec("t must be finite")

    def _sf(self, x, tol):
        x = np.asarray(x, dtype=float)
        t = self.t
        if t == 0:
            return survival(self.base, x, tol)
        norm = _moment(self.base, t)
        m, s = self.base._log_location()
        base = self.base

        # w = v**p removes the (u - x)**(t - 1) endpoint singularity when t < 1
        p = min(t, 1.0)

        def phi(u, v, x0):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                jac = (t / p) * u ** (t - 1.0) * v ** (1.0 - p)
            return jac * survival(base, u, tol * 0.1)

        if t > 0 and x.size > 1:
            tail = _segmented_tail(x, t, base, phi, p, m, s, tol, norm)
        else:
            tail = _shifted_integral(x, p, base.upper, phi, m, s, atol=tol * norm * 0.1,
                                     rtol=tol)
        with np.errstate(divide="ignore", invalid="ignore"):
            head = np.where(x > 0, x ** t * survival(base, x, tol * 0.1), 0.0)
        out = (head + tail) / norm
        out = np.where(x <= 0, np.where(t > 0, 1.0, out), out)
        return np.clip(out, 0.0, 1.0)

    def _pdf(self, x):
        x = np.asarray(x, dtype=float)
        return x ** self.t * density(self.base, x) / _moment(self.base, self.t)

    def _draw(self, n, seed):
        promoted = promote_size_bias(self.base, self.t)
        if promoted is not None:
            return sample(promoted, n, seed).values
        return _numeric_inverse_draw(self, n, seed)

    def _domain(self):
        d = mellin_domain(self.base)
        return MellinDomain(d.mu_X - self.t, d.lambda_X - self.t,
                            d.lower_included, d.upper_included)

    def _log_location(self):
        m, s = self.base._log_location()
        return m + self.t * s * s, s

    @property
    def upper(self):
        return self.base.upper

    @property
    def kinks(self):
        return self.base.kinks

    @property
    def is_deterministic(self):
        return self.base.is_deterministic

    @property
    def has_density(self):
        return self.base.has_density

    @property
    def depth(self):
        return self.base.depth


@dataclass(frozen=True)
class Excess(DistributionSpec):
    """Continuous-time stationary-excess law with survival ``E[(X-x)_+^t]/E[X^t]``."""

    base: DistributionSpec
    t: float
    variant = "excess"

    def __post_init__(self):
        _nonneg("t", self.t)
        if self.depth > MAX_NESTING:
            raise QuadratureFailure("excess nesting deeper than %d" % MAX_NESTING)

    def _sf(self, x, tol):
        x = np.asarray(x, dtype=float)
        t = self.t
        if t == 0:
            return survival(self.base, x, tol)
        norm = _moment(self.base, t)
        m, s = self.base._log_location()
        base = self.base

        def phi(u, v, x0):
            return survival(base, u, tol * 0.1)

        if t == 1 and x.size > 1:
            # the kernel no longer depends on x, so one pass of suffix sums serves the batch
            val = _segmented_tail(x, 1.0, base, phi, 1.0, m, s, tol, norm)
        else:
            val = _shifted_integral(x, t, base.upper, phi, m, s,
                                    atol=tol * norm * 0.1, rtol=tol)
        return np.clip(val / norm, 0.0, 1.0)

    def _pdf(self, x):
        x = np.asarray(x, dtype=float)
        t = self.t
        if t == 0:
            return density(self.base, x)
        norm = _moment(self.base, t)
        if t == 1:
            return survival(self.base, x) / norm
        base = self.base
        if not base.has_density:
            raise DensityUnavailable("excess of a law without density")
        m, s = base._log_location()

        def phi(u, v, x0):
            return density(base, u)

        val = _shifted_integral(x, t, base.upper, phi, m, s,
                                atol=1e-12 * norm, rtol=1e-9)
        return val / norm

    def _draw(self, n, seed):
        beta = sample(BetaT(self.t), n, derive_seed(seed, "excess.beta")).values
        biased = sample(SizeBiased(self.base, self.t), n,
                        derive_seed(seed, "excess.biased")).values
        return beta * biased

    def _domain(self):
        d = mellin_domain(self.base)
        lo = d.mu_X - self.t
        if self.t == 0:
            return d
        if lo > -1.0:
            lower, inc = lo, d.lower_included
        else:
            lower, inc = -1.0, False
        return MellinDomain(lower, d.lambda_X - self.t, inc, d.upper_included)

    def _log_location(self):
        m, s = SizeBiased(self.base, self.t)._log_location()
        if self.t == 0:
            return m, s
        mb, sb = Beta(1.0, self.t)._log_location()
        return m + mb, math.hypot(s, sb)

    @property
    def upper(self):
        return self.base.upper

    @property
    def kinks(self):
        return self.base.kinks

    @property
    def has_density(self):
        return self.t == 1 or (self.t > 0 and self.base.has_density) or (
            self.t == 0 and self.base.has_density)

    @property
    def is_deterministic(self):
        return self.t == 0 and self.base.is_deterministic

    @property
    def depth(self):
        return self.base.depth + 1


@dataclass(frozen=True)
class ProductIndep(DistributionSpec):
    """Law of ``A * B`` with ``A`` and ``B`` independent."""

    a: DistributionSpec
    b: DistributionSpec
    variant = "product"

    def _beta_split(self):
        if isinstance(self.a, BetaT) and self.a.t > 0:
            return self.a.t, self.b
        if isinstance(self.b, BetaT) and self.b.t > 0:
            return self.b.t, self.a
        return None

    def _sf(self, x, tol):
        x = np.asarray(x, dtype=float)
        for one, other in ((self.a, self.b), (self.b, self.a)):
            if one.is_deterministic:
                k = _deterministic_value(one)
                return survival(other, x / k, tol)
        split = self._beta_split()
        if split is not None:
            t, y = split
            m, s = y._log_location()

            def phi(u, v, x0):
                return x0 * u ** (-t - 1.0) * survival(y, u, tol * 0.1)

            val = _shifted_integral(x, t, y.upper, phi, m, s, atol=tol * 0.1, rtol=tol)
            at_zero = survival(y, np.zeros(1), tol)[0]
            return np.clip(np.where(x > 0, val, at_zero), 0.0, 1.0)
        for one, other in ((self.b, self.a), (self.a, self.b)):
            if one.has_density:
                return _mix_over_density(one, lambda z: survival(other, z, tol * 0.1), x, tol)
        raise DensityUnavailable("product of two laws without density")

    def _pdf(self, x):
        x = np.asarray(x, dtype=float)
        for one, other in ((self.a, self.b), (self.b, self.a)):
            if one.is_deterministic:
                k = _deterministic_value(one)
                return density(other, x / k) / k
        split = self._beta_split()
        if split is not None and split[1].has_density:
            t, y = split
            m, s = y._log_location()

            def phi(u, v, x0):
                return u ** (-t) * density(y, u)

            return _shifted_integral(x, t, y.upper, phi, m, s, atol=1e-12, rtol=1e-9)
        if self.a.has_density and self.b.has_density:
            a = self.a
            return _mix_over_density(self.b, lambda z: density(a, z), x, 1e-9, weight=True)
        raise DensityUnavailable("product law without a usable density")

    def _draw(self, n, seed):
        va = sample(self.a, n, derive_seed(seed, "product.a")).values
        vb = sample(self.b, n, derive_seed(seed, "product.b")).values
        return va * vb

    def _domain(self):
        da, db = mellin_domain(self.a), mellin_domain(self.b)
        if da.mu_X > db.mu_X:
            lo, lo_inc = da.mu_X, da.lower_included
        elif db.mu_X > da.mu_X:
            lo, lo_inc = db.mu_X, db.lower_included
        else:
            lo, lo_inc = da.mu_X, da.lower_included and db.lower_included
        if da.lambda_X < db.lambda_X:
            hi, hi_inc = da.lambda_X, da.upper_included
        elif db.lambda_X < da.lambda_X:
            hi, hi_inc = db.lambda_X, db.upper_included
        else:
            hi, hi_inc = da.lambda_X, da.upper_included and db.upper_included
        return MellinDomain(lo, hi, lo_inc, hi_inc)

    def _log_location(self):
        ma, sa = self.a._log_location()
        mb, sb = self.b._log_location()
        return ma + mb, math.hypot(sa, sb)

    @property
    def upper(self):
        return self.a.upper * self.b.upper

    @property
    def is_deterministic(self):
        return self.a.is_deterministic and self.b.is_deterministic

    @property
    def has_density(self):
        if self.is_deterministic:
            return False
        split = self._beta_split()
        if self.a.is_deterministic or self.b.is_deterministic:
            return (self.a.has_density or self.b.has_density)
        return (split is not None and split[1].has_density) or (
            self.a.has_density and self.b.has_density)

    @property
    def depth(self):
        return max(self.a.depth, self.b.depth)


def _deterministic_value(spec):
    """Location of a deterministic law."""
    if isinstance(spec, LogNormal):
        return math.exp(spec.mu)
    if isinstance(spec, BetaT):
        return 1.0
    if isinstance(spec, Scaled):
        return spec.factor * _deterministic_value(spec.base)
    if isinstance(spec, SizeBiased):
        return _deterministic_value(spec.base)
    if isinstance(spec, Excess):
        return _deterministic_value(spec.base)
    if isinstance(spec, ProductIndep):
        return _deterministic_value(spec.a) * _deterministic_value(spec.b)
    if isinstance(spec, LevyLog):
        return math.exp(spec.levy.d)
    raise InvalidSpec("law is not deterministic")


def _mix_over_density(mixer, fn, x, tol, weight=False):
    """``E[fn(x / M)]`` (or ``E[fn(x / M) / M]``) over a mixer ``M`` with density."""
    m, s = mixer._log_location()

    def g(y):
        v = np.exp(y)
        f = density(mixer, v) * v
        inner = fn((x[None, :] / v[:, None]).ravel()).reshape(v.size, x.size)
        if weight:
            inner = inner / v[:, None]
        return f[:, None] * inner

    val, _ = quad.integrate_line(g, center=m, scale=s, atol=tol * 0.1, rtol=tol)
    return np.atleast_1d(val)


def _invert_survival(sf, u, lo, hi, xtol=1e-10):
    """Vectorized bisection for ``sf(x) = u`` on ``[lo, hi]``."""
    u = np.asarray(u, dtype=float)
    if not np.isfinite(hi):
        hi = 1.0
        while np.any(sf(np.array([hi]))[0] > u.min()) and hi < 1e300:
            hi *= 2.0
    a = np.full(u.shape, float(lo))
    b = np.full(u.shape, float(hi))
    for _ in range(200):
        mid = 0.5 * (a + b)
        right = sf(mid) > u
        a = np.where(right, mid, a)
        b = np.where(right, b, mid)
        if np.all(b - a <= xtol * np.maximum(1.0, b)):
            break
    return 0.5 * (a + b)


def _numeric_inverse_draw(spec, n, seed, cdf_tol=1e-8):
    """Inverse-CDF sampling from a survival tabulated on an adaptive log grid."""
    m, s = spec._log_location()
    upper = spec.upper
    lo, hi = m - 10 * s, m + 10 * s
    if np.isfinite(upper):
        hi = min(hi, math.log(upper))
    for _ in range(40):
        ends = survival(spec, np.exp([lo, hi]))
        grow_lo = ends[0] < 1 - 1e-10
        grow_hi = ends[1] > 1e-10 and not (np.isfinite(upper) and hi >= math.log(upper))
        if not (grow_lo or grow_hi):
            break
        if grow_lo:
            lo -= 4 * s
        if grow_hi:
            hi = hi + 4 * s
            if np.isfinite(upper):
                hi = min(hi, math.log(upper))
    else:
        raise SamplerUnavailable("could not bracket the support of %s" % spec.variant)

    ys = np.linspace(lo, hi, 129)
    vals = survival(spec, np.exp(ys))
    for _ in range(6):
        mids = 0.5 * (ys[1:] + ys[:-1])
        exact = survival(spec, np.exp(mids))
        approx = PchipInterpolator(ys, vals)(mids)
        order = np.argsort(np.concatenate([ys, mids]))
        ys = np.concatenate([ys, mids])[order]
        vals = np.concatenate([vals, exact])[order]
        if np.max(np.abs(approx - exact)) < cdf_tol:
            break
    table = PchipInterpolator(ys, np.minimum.accumulate(vals))
    u = np.random.default_rng(seed).uniform(0.0, 1.0, n)
    y = _invert_survival(lambda z: table(np.clip(z, lo, hi)), u, lo, hi)
    return np.exp(y)


# ---------------------------------------------------------------- public API


def survival(spec, x, tol=SURVIVAL_TOL):
    """``P(X > x)`` for scalar or array ``x >= 0``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("survival needs x >= 0")
    out = np.asarray(spec._sf(np.atleast_1d(xa), tol), dtype=float)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if xa.ndim == 0 else out.reshape(xa.shape)


def density(spec, x):
    """Density of an absolutely continuous law at ``x > 0``."""
    xa = np.asarray(x, dtype=float)
    out = np.asarray(spec._pdf(np.atleast_1d(xa)), dtype=float)
    return float(out[0]) if xa.ndim == 0 else out.reshape(xa.shape)


def sample(spec, n, seed):
    """``n`` i.i.d. draws; identical ``(spec, seed, n)`` give identical batches."""
    if n < 1:
        raise ValueError("n must be >= 1")
    values = np.asarray(spec._draw(int(n), int(seed)), dtype=float)
    return SampleBatch(int(seed), int(n), values)


def scale(spec, k):
    """Law of ``k X``."""
    _positive("k", k)
    if isinstance(spec, Scaled):
        return Scaled(spec.base, spec.factor * k)
    return Scaled(spec, float(k))


def mellin_domain(spec):
    return spec._domain()


def promote_size_bias(spec, t):
    """Closed-form law of the size-biased variable, or ``None`` if unknown."""
    if t == 0:
        return spec
    if isinstance(spec, Gamma):
        return Gamma(spec.shape + t)
    if isinstance(spec, Exponential):
        g = Gamma(1.0 + t)
        return g if spec.rate == 1 else Scaled(g, 1.0 / spec.rate)
    if isinstance(spec, Beta):
        return Beta(spec.a + t, spec.b)
    if isinstance(spec, BetaT):
        return spec if spec.t == 0 else Beta(1.0 + t, spec.t)
    if isinstance(spec, LogNormal):
        return spec if spec.sigma2 == 0 else Scaled(spec, math.exp(spec.sigma2 * t))
    if isinstance(spec, Uniform) and spec.lo == 0:
        b = Beta(1.0 + t, 1.0)
        return b if spec.hi == 1 else Scaled(b, spec.hi)
    if isinstance(spec, LevyLog):
        return LevyLog(spec.levy.tilted(t))
    if isinstance(spec, Scaled):
        inner = promote_size_bias(spec.base, t)
        return None if inner is None else scale(inner, spec.factor)
    return None
