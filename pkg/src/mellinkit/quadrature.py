"""Vectorized adaptive Gauss-Kronrod quadrature.

All integrands take a 1-D array of nodes and return either an array of the
same length or a 2-D array ``(len(nodes), m)`` when a batch of ``m``
integrals sharing the same variable is computed at once.  Panels are refined
jointly for the whole batch, which keeps the number of Python-level calls
small when integrals are nested.
"""

import numpy as np

from .errors import QuadratureFailure

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
_XK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.zeros(15)
_WG[1::2] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
]

DEFAULT_ATOL = 1e-10
DEFAULT_RTOL = 1e-8
PANEL_BUDGET = 2 ** 15


def _as_batch(values, n_nodes):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[0] != n_nodes:
        raise ValueError("integrand returned %d rows for %d nodes"
                         % (values.shape[0], n_nodes))
    # inf * 0 far in the tails produces nan; those regions carry no mass
    return np.nan_to_num(values, nan=0.0, posinf=0.0, neginf=0.0)


def integrate(f, a, b, atol=DEFAULT_ATOL, rtol=DEFAULT_RTOL,
              max_panels=PANEL_BUDGET, init_panels=16, breaks=()):
    """Integrate ``f`` over the finite interval ``[a, b]``.

    ``breaks`` are extra initial panel edges; placing them around a narrow
    feature keeps it from hiding between the nodes of a wide panel.

    Returns ``(value, abs_error)``; both are scalars for scalar integrands
    and arrays of length ``m`` for batched integrands.

    Raises
    ------
    QuadratureFailure
        If the error estimate exceeds ``max(atol, rtol*|value|)`` once the
        panel budget is spent.
    """
    a, b = float(a), float(b)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("integrate needs finite limits; use integrate_line")
    if b == a:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    length = b - a

    edges = np.linspace(a, b, init_panels + 1)
    inner = np.asarray(breaks, dtype=float).ravel()
    inner = inner[(inner > a) & (inner < b)]
    if inner.size:
        edges = np.unique(np.concatenate([edges, inner]))
    lo, hi = edges[:-1], edges[1:]
    done_val = None
    done_err = None
    squeeze = False
    n_panels = init_panels
    while True:
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        nodes = (mid[:, None] + half[:, None] * _XK[None, :]).ravel()
        raw = f(nodes)
        if done_val is None:
            squeeze = np.ndim(raw) == 1
        vals = _as_batch(raw, nodes.size).reshape(lo.size, 15, -1)
        kron = np.einsum("pkm,k->pm", vals, _WK) * half[:, None]
        gauss = np.einsum("pkm,k->pm", vals, _WG) * half[:, None]
        err = np.abs(kron - gauss)
        if done_val is None:
            done_val = np.zeros(kron.shape[1])
            done_err = np.zeros(kron.shape[1])

        total = done_val + kron.sum(axis=0)
        tol = np.maximum(atol, rtol * np.abs(total))
        share = tol[None, :] * ((hi - lo) / length)[:, None]
        ok = np.all(err <= share, axis=1)

        done_val = done_val + kron[ok].sum(axis=0)
        done_err = done_err + err[ok].sum(axis=0)
        if ok.all():
            break
        bad_lo, bad_hi = lo[~ok], hi[~ok]
        if n_panels + bad_lo.size > max_panels or np.any(bad_hi - bad_lo < 1e-14 * length):
            done_val = done_val + kron[~ok].sum(axis=0)
            done_err = done_err + err[~ok].sum(axis=0)
            if np.any(done_err > np.maximum(atol, rtol * np.abs(done_val))):
                raise QuadratureFailure(
                    "panel budget exhausted: error %.3g" % done_err.max())
            break
        n_panels += bad_lo.size
        bad_mid = 0.5 * (bad_lo + bad_hi)
        lo = np.concatenate([bad_lo, bad_mid])
        hi = np.concatenate([bad_mid, bad_hi])

    if squeeze:
        return sign * float(done_val[0]), float(done_err[0])
    return sign * done_val, done_err


def _support_window(g, center, scale, floor):
    """Locate the window of the real line where ``|g|`` is not negligible."""
    scale = max(float(scale), 1e-3)
    half_width = 40.0
    while True:
        ys = center + scale * np.linspace(-half_width, half_width, 641)
        vals = np.abs(_as_batch(g(ys), ys.size))
        peak = vals.max(axis=0)
        live = peak > 0
        if not live.any():
            return None
        rel = vals[:, live] / peak[live]
        keep = np.flatnonzero(np.any(rel > floor, axis=1))
        i0, i1 = keep[0], keep[-1]
        touches = i0 == 0 or i1 == ys.size - 1
        if not touches or scale * half_width > 700.0:
            step = ys[1] - ys[0]
            return ys[i0] - step, ys[i1] + step
        half_width *= 2.0


def integrate_line(g, center=0.0, scale=1.0, atol=DEFAULT_ATOL,
                   rtol=DEFAULT_RTOL, max_panels=PANEL_BUDGET, floor=1e-17, breaks=(),
                   probe=None):
    """Integrate ``g`` over the whole real line.

    The integrand must decay in both directions; ``center`` and ``scale``
    give the rough location and width of its mass and only guide the scan
    that picks a finite integration window.  When that scan sees nothing,
    the point of ``probe`` (an array of candidate locations) carrying the
    most mass becomes the new center.
    """
    window = _support_window(g, center, scale, floor)
    if window is None and probe is not None:
        probe = np.asarray(probe, dtype=float)
        vals = np.abs(_as_batch(g(probe), probe.size))
        peak = vals.max(axis=0)
        if np.any(peak > 0):
            score = (vals[:, peak > 0] / peak[peak > 0]).sum(axis=1)
            window = _support_window(g, float(probe[np.argmax(score)]), scale, floor)
    if window is None:
        if np.ndim(g(np.array([center]))) == 1:
            return 0.0, 0.0
        zero = np.zeros(_as_batch(g(np.array([center])), 1).shape[1])
        return zero, zero
    return integrate(g, window[0], window[1], atol=atol, rtol=rtol,
                     max_panels=max_panels, init_panels=32, breaks=breaks)


def _log_tail(h, flip, atol, rtol, max_panels, floor):
    """``int_0^{1/2} h(q) dq`` (or ``h(1 - q)``) in the variable ``y = log q``."""
    def g(y):
        e = np.exp(y)
        raw = h(1.0 - e if flip else e)
        if np.ndim(raw) == 1:
            return np.asarray(raw, dtype=float) * e
        return np.asarray(raw, dtype=float) * e[:, None]

    top = -np.log(2.0)
    lo = -8.0
    while lo > -745.0:
        ys = np.linspace(lo, top, 257)
        vals = np.abs(_as_batch(g(ys), ys.size))
        peak = vals.max(axis=0)
        live = peak > 0
        if not live.any() or np.all(vals[0, live] <= floor * peak[live]):
            break
        lo *= 2.0
    return integrate(g, max(lo, -745.0), top, atol=0.5 * atol, rtol=rtol,
                     max_panels=max_panels, init_panels=16)


def integrate_unit(h, atol=DEFAULT_ATOL, rtol=DEFAULT_RTOL, max_panels=PANEL_BUDGET,
                   floor=1e-17):
    """Integrate ``h`` over ``[0, 1]`` with a logarithmic map towards each end.

    Power-type singularities ``q**a`` or ``(1 - q)**a`` (``a > -1``) become
    exponentially decaying tails, which the adaptive rule handles well.
    """
    v0, e0 = _log_tail(h, False, atol, rtol, max_panels, floor)
    v1, e1 = _log_tail(h, True, atol, rtol, max_panels, floor)
    return v0 + v1, e0 + e1
