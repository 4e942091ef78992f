"""Power-log integrals and log-substituted Gauss-Legendre quadrature.

Everything here integrates functions of the form ``t**a * (1 + |log t|)**b``
(possibly multiplied by a smooth factor) over subintervals of (0, inf).
Divergent integrals return ``math.inf`` rather than raising.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate

_GL_NODES = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_NODES)
# Widest log-interval handled by a single Gauss-Legendre panel.
_MAX_PANEL = 0.5


def converges_at_zero(a: float, b: float) -> bool:
    """Whether t^a (1+|log t|)^b is integrable near 0."""
    return a > -1.0 or (a == -1.0 and b < -1.0)


def converges_at_infinity(a: float, b: float) -> bool:
    """Whether t^a (1+|log t|)^b is integrable near infinity."""
    return a < -1.0 or (a == -1.0 and b < -1.0)


def _pow_integral(a: float, x0: float, x1: float) -> float:
    # b == 0 branch; x0 < x1, either end possibly 0 or inf (convergence checked).
    k = a + 1.0
    if k == 0.0:
        return math.log(x1 / x0)
    if x0 == 0.0:
        return x1 ** k / k
    if math.isinf(x1):
        return -(x0 ** k) / k
    r = k * math.log(x1 / x0)
    if abs(r) > 1.0:
        return (x1 ** k - x0 ** k) / k
    # expm1 keeps accuracy when k is tiny
    return x0 ** k * math.expm1(r) / k


def _exp_log_integral(kappa: float, b: float, u0: float, u1: float) -> float:
    """Integral of exp(kappa*u) * (1+u)**b over [u0, u1] with 0 <= u0 < u1 <= inf."""
    if u0 >= u1:
        return 0.0
    if kappa == 0.0:
        if b == -1.0:
            return math.log1p(u1) - math.log1p(u0) if not math.isinf(u1) else math.inf
        if math.isinf(u1):
            return -((1.0 + u0) ** (b + 1.0)) / (b + 1.0)
        return ((1.0 + u1) ** (b + 1.0) - (1.0 + u0) ** (b + 1.0)) / (b + 1.0)
    if math.isinf(u1):
        val, _ = integrate.quad(
            lambda u: math.exp(kappa * (u - u0)) * (1.0 + u) ** b,
            u0, math.inf, epsabs=0.0, epsrel=1e-13, limit=400,
        )
        return math.exp(kappa * u0) * val
    # finite range: composite Gauss-Legendre in u, scaled by the largest exponential
    shift = kappa * (u1 if kappa > 0 else u0)
    n = max(1, int(math.ceil((u1 - u0) / _MAX_PANEL)))
    edges = np.linspace(u0, u1, n + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    u = mid + half * _GL_X[None, :]
    vals = np.exp(kappa * u - shift) * (1.0 + u) ** b
    total = float(np.sum(half * vals * _GL_W[None, :]))
    return total * math.exp(shift)


@lru_cache(maxsize=200_000)
def powerlog_integral(a: float, b: float, x0: float, x1: float) -> float:
    """Integral of ``t**a * (1 + |log t|)**b`` over ``(x0, x1)``.

    ``x0`` may be 0 and ``x1`` may be ``inf``. Returns ``math.inf`` for a
    divergent integral and 0 for an empty range.
    """
    if not x1 > x0:
        return 0.0
    if x0 == 0.0 and not converges_at_zero(a, b):
        return math.inf
    if math.isinf(x1) and not converges_at_infinity(a, b):
        return math.inf
    if b == 0.0:
        return _pow_integral(a, x0, x1)
    k = a + 1.0
    total = 0.0
    if x0 < 1.0:
        # t = exp(-u) on (x0, min(x1, 1))
        lo = -math.log(min(x1, 1.0))
        hi = math.inf if x0 == 0.0 else -math.log(x0)
        total += _exp_log_integral(-k, b, lo, hi)
    if x1 > 1.0:
        lo = math.log(max(x0, 1.0))
        hi = math.inf if math.isinf(x1) else math.log(x1)
        total += _exp_log_integral(k, b, lo, hi)
    return total


def powerlog_integral_vec(a: float, b: float, x0, x1) -> np.ndarray:
    """Vectorised :func:`powerlog_integral` over arrays of endpoints."""
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    x0, x1 = np.broadcast_arrays(x0, x1)
    out = np.zeros(x0.shape)
    live = x1 > x0
    if not np.any(live):
        return out
    if b == 0.0:
        lo, hi = x0[live], x1[live]
        k = a + 1.0
        res = np.empty(lo.shape)
        zero = lo == 0.0
        inf = np.isinf(hi)
        if np.any(zero) and not converges_at_zero(a, b):
            res[zero] = np.inf
        if np.any(inf) and not converges_at_infinity(a, b):
            res[inf] = np.inf
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if k == 0.0:
                body = np.log(hi / lo)
            else:
                r = k * np.log(hi / lo)
                near = np.where(np.abs(r) > 1.0, (hi ** k - lo ** k) / k, lo ** k * np.expm1(r) / k)
                body = np.where(zero, hi ** k / k, np.where(inf, -(lo ** k) / k, near))
        ok = ~((zero & (not converges_at_zero(a, b))) | (inf & (not converges_at_infinity(a, b))))
        res[ok] = body[ok]
        out[live] = res
        return out
    idx = np.flatnonzero(live.ravel())
    flat = out.ravel()
    x0f, x1f = x0.ravel(), x1.ravel()
    for i in idx:
        flat[i] = powerlog_integral(float(a), float(b), float(x0f[i]), float(x1f[i]))
    return flat.reshape(out.shape)


def log_gl_segments(lo, hi, max_width: float = _MAX_PANEL):
    """Split finite positive segments into log-panels and return GL nodes.

    Returns ``(t, wts, owner)`` where ``t`` and ``wts`` have shape
    ``(npanels, nodes)``; ``sum(wts * f(t))`` grouped by ``owner`` gives the
    integral of ``f`` over each input segment.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    slo, shi = np.log(lo), np.log(hi)
    counts = np.maximum(1, np.ceil((shi - slo) / max_width).astype(int))
    owner = np.repeat(np.arange(lo.size), counts)
    start = np.repeat(slo, counts)
    step = np.repeat((shi - slo) / counts, counts)
    offs = np.arange(owner.size) - np.repeat(np.cumsum(counts) - counts, counts)
    a = start + offs * step
    mid = (a + 0.5 * step)[:, None]
    half = (0.5 * step)[:, None]
    s = mid + half * _GL_X[None, :]
    t = np.exp(s)
    wts = half * _GL_W[None, :] * t
    return t, wts, owner


def integrate_segments(lo, hi, fn, max_width: float = _MAX_PANEL) -> np.ndarray:
    """Integrate ``fn(t, owner)`` over each finite segment ``(lo[i], hi[i])``.

    ``fn`` receives node array ``t`` of shape ``(npanels, nodes)`` and the
    owning-segment index per panel (shape ``(npanels, 1)``).
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if lo.size == 0:
        return np.zeros(0)
    t, wts, owner = log_gl_segments(lo, hi, max_width)
    vals = fn(t, owner[:, None])
    per_panel = np.sum(wts * vals, axis=1)
    return np.bincount(owner, weights=per_panel, minlength=lo.size)


def log_quad(fn, lo: float, hi: float, breaks=(), rtol: float = 1e-10) -> float:
    """Adaptive log-substituted quadrature of ``fn`` over finite ``(lo, hi)``.

    ``breaks`` are points where ``fn`` may be non-smooth. The panel width is
    halved until two successive estimates agree to ``rtol``.
    """
    pts = np.unique(np.concatenate(([lo, hi], [b for b in breaks if lo < b < hi])))
    seg_lo, seg_hi = pts[:-1], pts[1:]

    def call(t, _owner):
        return fn(t)

    width = _MAX_PANEL
    prev = float(np.sum(integrate_segments(seg_lo, seg_hi, call, width)))
    for _ in range(8):
        width /= 2.0
        cur = float(np.sum(integrate_segments(seg_lo, seg_hi, call, width)))
        if abs(cur - prev) <= rtol * abs(cur) or cur == prev:
            return cur
        prev = cur
    return prev
