"""Generalized quasi-concave cones, their extremal kernels and the operator K.

Functions ``f`` in the cone ``Omega(alpha, beta)`` have ``t**alpha f``
non-decreasing and ``t**-beta f`` non-increasing; ``P(xi, r)`` adds that
``t**-r f`` is constant on ``(0, xi)``. The kernel sections
``k_t(x) = min(x**beta t**-alpha, x**-alpha t**beta)`` are the extreme
rays, and ``K h(x) = int_xi^inf k(x, t) h(t) dt`` maps non-negative
functions into ``P(xi, beta) & Omega(alpha, beta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._quad import log_quad, powerlog_integral, powerlog_integral_vec
from .stepfn import DecreasingStep, StepFunction
from .weights import Weight


@dataclass(frozen=True)
class ConeParams:
    alpha: float
    beta: float
    xi: float = 0.0

    def __post_init__(self):
        if not self.alpha + self.beta > 0:
            raise ValueError(f"need alpha + beta > 0, got {self.alpha} + {self.beta}")
        if self.xi < 0:
            raise ValueError("xi must be non-negative")


class InfiniteValue(ValueError):
    """A cone integral diverges."""


def _pow_int(a: float, lo, hi):
    return powerlog_integral_vec(a, 0.0, lo, hi)


class _PowerShape:
    """Shared integration logic for functions equal to ``C0 x**beta`` on
    ``(0, L)`` and ``Cinf x**-alpha`` on ``(R, inf)``."""

    alpha: float
    beta: float
    L: float
    R: float
    C0: float
    Cinf: float

    def _middle(self, x):
        raise NotImplementedError

    def _middle_breaks(self):
        return ()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            head = self.C0 * x ** self.beta
            tail = self.Cinf * x ** (-self.alpha)
        out = np.where(x <= self.L, head, np.where(x >= self.R, tail, 0.0))
        mid = (x > self.L) & (x < self.R)
        if np.any(mid):
            out = np.where(mid, self._middle(np.where(mid, x, self.L if self.L > 0 else 1.0)), out)
        return out

    def power_integral(self, r: float, w: Weight, lo: float = 0.0, hi: float = math.inf) -> float:
        """``int_lo^hi f**r w``; ``inf`` on divergence."""
        total = 0.0
        h = min(hi, self.L)
        if h > lo and self.C0 > 0:
            total += self.C0 ** r * w.moment(lo, h, s=self.beta * r)
        l = max(lo, self.R)
        if hi > l and self.Cinf > 0:
            total += self.Cinf ** r * w.moment(l, hi, s=-self.alpha * r)
        a, b = max(lo, self.L), min(hi, self.R)
        if b > a:
            if a <= 0:
                raise ValueError("support must start away from the origin")
            breaks = list(self._middle_breaks()) + list(w.smooth_breaks())
            total += log_quad(lambda x: self._middle(x) ** r * w(x), a, b, breaks)
        return total

    def mean(self, lo: float, hi: float) -> float:
        """Average of ``f`` over ``(lo, hi)``."""
        return self.power_integral(1.0, Weight.power(0.0), lo, hi) / (hi - lo)

    def norm(self, r: float, w: Weight, averaging=None) -> float:
        """``||A f||_{r,w}`` (``A`` the identity when ``averaging`` is None)."""
        if r <= 0:
            raise ValueError("exponent must be positive")
        if averaging is None or not averaging.intervals:
            total = self.power_integral(r, w)
        else:
            total = 0.0
            prev = 0.0
            for a, b in averaging.intervals:
                if a > prev:
                    total += self.power_integral(r, w, prev, a)
                m = self.mean(a, b)
                total += m ** r * w.moment(a, b) if m > 0 else 0.0
                prev = b
            total += self.power_integral(r, w, prev, math.inf)
        return total ** (1.0 / r)

    def certify(self, grid=None, xi: float = 0.0, rtol: float = 1e-9) -> bool:
        return certify_cone(self, self.alpha, self.beta, xi, grid, rtol)


class KernelSection(_PowerShape):
    """``x -> min(x**beta t**-alpha, x**-alpha t**beta)``."""

    def __init__(self, alpha: float, beta: float, t: float):
        if not alpha + beta > 0:
            raise ValueError("need alpha + beta > 0")
        if not t > 0:
            raise ValueError("t must be positive")
        self.alpha, self.beta, self.t = float(alpha), float(beta), float(t)
        self.L = self.R = self.t
        self.C0 = t ** (-alpha)
        self.Cinf = t ** beta

    def pieces(self):
        """``[(lo, hi, c, a)]`` with the section equal to ``c x**a`` on each piece."""
        return [(0.0, self.t, self.C0, self.beta), (self.t, math.inf, self.Cinf, -self.alpha)]

    def powered(self, q: float) -> "KernelSection":
        """``k_t**q``, which is again a kernel section."""
        return KernelSection(q * self.alpha, q * self.beta, self.t)


def kernel(alpha: float, beta: float, t: float) -> KernelSection:
    return KernelSection(alpha, beta, t)


class ConeElement(_PowerShape):
    """``K h`` for a finitely supported step function ``h``, in closed form.

    Not itself a step function: between the cell edges of ``h`` it is a
    combination of ``x**-alpha``, ``x**beta`` and ``x**(1 - alpha)`` type
    terms, evaluated exactly.
    """

    def __init__(self, params: ConeParams, h: StepFunction, scale: float = 1.0):
        if h.tail is not None:
            raise ValueError("h must have bounded support")
        self.params = params
        self.scale = float(scale)
        self.alpha, self.beta, self.xi = params.alpha, params.beta, params.xi
        edges = h.edges
        lo = np.maximum(edges[:-1], params.xi)
        hi = edges[1:]
        keep = (hi > lo) & (h.values > 0)
        self.lo, self.hi, self.v = lo[keep], hi[keep], scale * h.values[keep]
        self.h = h
        if self.v.size == 0:
            self.L = self.R = 1.0
            self.C0 = self.Cinf = 0.0
            return
        self.L = float(max(self.lo[0], params.xi))
        self.R = float(self.hi[-1])
        self.C0 = float(np.sum(self.v * _pow_int(-self.alpha, self.lo, self.hi)))
        self.Cinf = float(np.sum(self.v * _pow_int(self.beta, self.lo, self.hi)))
        if not (math.isfinite(self.C0) and math.isfinite(self.Cinf)):
            raise InfiniteValue("K h diverges")

    def _middle(self, x):
        x = np.asarray(x, dtype=float)
        shape = x.shape
        xs = x.reshape(-1, 1)
        lo, hi = self.lo[None, :], self.hi[None, :]
        below = np.clip(xs, lo, hi)
        left = self.v * _pow_int(self.beta, np.broadcast_to(lo, below.shape), below)
        right = self.v * _pow_int(-self.alpha, below, np.broadcast_to(hi, below.shape))
        out = xs[:, 0] ** (-self.alpha) * left.sum(axis=1) + xs[:, 0] ** self.beta * right.sum(axis=1)
        return out.reshape(shape)

    def _middle_breaks(self):
        return tuple(np.concatenate((self.lo, self.hi)))

    def __add__(self, other: "ConeElement") -> "ConeElement":
        if other.params != self.params:
            raise ValueError("cone parameters differ")
        return ConeElement(self.params, _scaled_step(self.h, self.v, self.lo, self.hi)
                           + _scaled_step(other.h, other.v, other.lo, other.hi))

    def __mul__(self, k: float) -> "ConeElement":
        if k < 0:
            raise ValueError("scalar must be non-negative")
        return ConeElement(self.params, self.h, k * self.scale)

    __rmul__ = __mul__

    def certify(self, grid=None, rtol: float = 1e-9) -> bool:
        return certify_cone(self, self.alpha, self.beta, self.xi, grid, rtol)


def _scaled_step(h, v, lo, hi) -> StepFunction:
    bp = np.unique(np.concatenate((lo, hi)))
    left = np.concatenate(([0.0], bp[:-1]))
    mids = 0.5 * (left + bp)
    vals = np.zeros(bp.size)
    for a, b, c in zip(lo, hi, v):
        vals[(mids > a) & (mids < b)] += c
    return StepFunction(bp, vals)


def apply_K(params: ConeParams, h: StepFunction) -> ConeElement:
    """``K_xi^{alpha,beta} h`` in closed form."""
    return ConeElement(params, h)


def certify_cone(f, alpha: float, beta: float, xi: float = 0.0, grid=None,
                 rtol: float = 1e-9) -> bool:
    """Grid check of cone membership for any callable ``f``."""
    if grid is None:
        grid = np.geomspace(1e-3, 1e3, 6 * 64 + 1)
    grid = np.asarray(grid, dtype=float)
    vals = np.asarray(f(grid), dtype=float)
    if np.any(vals < 0) or not np.all(np.isfinite(vals)):
        return False
    up = grid ** alpha * vals
    down = grid ** (-beta) * vals
    ok = np.all(np.diff(up) >= -rtol * np.abs(up[:-1]))
    ok &= np.all(np.diff(down) <= rtol * np.abs(down[:-1]))
    head = down[grid < xi]
    if head.size > 1:
        ok &= bool(np.all(np.abs(head - head[0]) <= rtol * abs(head[0])))
    return bool(ok)


# -- approximation of concave functions ------------------------------------


@dataclass(frozen=True, eq=False)
class ConcaveProfile:
    """A concave ``g~`` described by its right derivative ``phi``.

    ``phi(t) = c0[i] + c1[i] t`` on ``[edges[i], edges[i+1])`` and
    ``phi = phi_inf`` beyond ``edges[-1]``. ``a`` is ``g~(xi) - xi phi(xi)``
    (or ``g~(0+)`` when ``xi = 0``).
    """

    edges: np.ndarray
    c0: np.ndarray
    c1: np.ndarray
    phi_inf: float
    a: float
    xi: float

    def __post_init__(self):
        for name in ("edges", "c0", "c1"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        e = self.edges
        if e[0] != 0 or np.any(np.diff(e) <= 0) or self.c0.size != e.size - 1:
            raise ValueError("malformed profile cells")
        if self.a < 0 or self.phi_inf < 0:
            raise ValueError("a and phi(inf) must be non-negative")
        left = self.c0 + self.c1 * e[:-1]
        right = self.c0 + self.c1 * e[1:]
        seq = np.empty(2 * left.size + 1)
        seq[0:-1:2], seq[1:-1:2], seq[-1] = left, right, self.phi_inf
        scale = max(1.0, float(np.max(np.abs(seq))))
        if np.any(np.diff(seq) > 1e-12 * scale) or np.any(seq < -1e-12 * scale):
            raise ValueError("phi must be non-negative and non-increasing")

    @classmethod
    def from_majorant(cls, maj, xi: float = 0.0) -> "ConcaveProfile":
        """Profile of a concave piecewise-linear majorant through the origin."""
        d = maj.derivative()
        if d.tail is not None and (d.tail.a != 0 or d.tail.b != 0):
            raise ValueError("only constant slopes at infinity are supported")
        phi_inf = 0.0 if d.tail is None else d.tail.c
        edges = d.edges
        a = 0.0
        if xi > 0:
            a = float(maj(xi)) - xi * float(d(xi))
        return cls(edges, d.values, np.zeros(d.values.size), phi_inf, max(a, 0.0), xi)

    @classmethod
    def from_kernel_image(cls, h: StepFunction, xi: float = 0.0, a: float = 0.0,
                          phi_inf: float = 0.0) -> "ConcaveProfile":
        """Profile of ``a min(x/xi, 1) + phi_inf x + K_xi^{0,1} h``."""
        if h.tail is not None:
            raise ValueError("h must have bounded support")
        e = h.edges
        lo = np.maximum(e[:-1], xi)
        hi = e[1:]
        keep = hi > lo
        lo, hi, v = lo[keep], hi[keep], h.values[keep]
        # H(t) = int_t^inf h, linear on each cell
        mass = v * (hi - lo)
        after = np.concatenate((np.cumsum(mass[::-1])[::-1][1:], [0.0]))
        c0 = phi_inf + v * hi + after
        c1 = -v
        edges, C0, C1 = [0.0], [], []
        head = phi_inf + (a / xi if xi > 0 else 0.0) + (float(np.sum(mass)))
        if xi > 0:
            edges.append(xi)
            C0.append(head)
            C1.append(0.0)
        prev = xi
        total_after = float(np.sum(mass))
        for i in range(lo.size):
            if lo[i] > prev:
                # gap: H is constant
                edges.append(float(lo[i]))
                C0.append(phi_inf + total_after)
                C1.append(0.0)
            edges.append(float(hi[i]))
            C0.append(float(c0[i]))
            C1.append(float(c1[i]))
            total_after = float(after[i])
            prev = float(hi[i])
        if len(edges) == 1:
            edges.append(max(xi, 1.0))
            C0.append(head)
            C1.append(0.0)
        return cls(np.array(edges), np.array(C0), np.array(C1), phi_inf, a, xi)

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        if self.c0.size == 0:
            return np.full(t.shape, self.phi_inf)
        idx = np.searchsorted(self.edges, t, side="right") - 1
        inside = idx < self.c0.size
        i = np.minimum(idx, self.c0.size - 1)
        return np.where(inside, self.c0[i] + self.c1[i] * t, self.phi_inf)

    def _F1(self, x):
        """``int_0^x (phi - phi_inf)``."""
        x = np.asarray(x, dtype=float)
        e = self.edges
        d0 = self.c0 - self.phi_inf
        cell = d0 * np.diff(e) + 0.5 * self.c1 * (e[1:] ** 2 - e[:-1] ** 2)
        cum = np.concatenate(([0.0], np.cumsum(cell)))
        idx = np.clip(np.searchsorted(e, x, side="right") - 1, 0, self.c0.size)
        i = np.minimum(idx, self.c0.size - 1)
        xe = np.minimum(x, e[-1])
        part = d0[i] * (xe - e[i]) + 0.5 * self.c1[i] * (xe ** 2 - e[i] ** 2)
        return cum[idx] + np.where(idx < self.c0.size, part, 0.0)

    def _F0(self, x):
        """``int_x^inf (phi - phi_inf) / t``; requires ``x > 0``."""
        x = np.asarray(x, dtype=float)
        e = self.edges
        d0 = self.c0 - self.phi_inf
        with np.errstate(divide="ignore"):
            logs = np.log(e[1:] / np.where(e[:-1] > 0, e[:-1], np.nan))
        cell = d0 * logs + self.c1 * np.diff(e)
        cell = np.where(np.isnan(cell), np.inf, cell)  # first cell from 0
        suffix = np.concatenate((np.cumsum(cell[::-1])[::-1], [0.0]))
        idx = np.clip(np.searchsorted(e, x, side="right") - 1, 0, self.c0.size)
        i = np.minimum(idx, self.c0.size - 1)
        xe = np.minimum(x, e[-1])
        nxt = np.minimum(idx + 1, self.c0.size)
        part = d0[i] * np.log(e[np.minimum(i + 1, e.size - 1)] / xe) + self.c1[i] * (
            e[np.minimum(i + 1, e.size - 1)] - xe)
        return np.where(idx < self.c0.size, part + suffix[nxt], 0.0)

    def __call__(self, x):
        """``g~(x)``."""
        x = np.asarray(x, dtype=float)
        base = self.a if self.xi == 0 else 0.0
        return base + self._F1(x) + self.phi_inf * x

    def _J(self, X, L):
        """``int_L^inf min(X, t) psi(t)/t dt`` with ``psi = phi - phi_inf``."""
        M = np.maximum(L, X)
        return self._F1(M) - self._F1(L) + X * self._F0(M)


@dataclass(frozen=True, eq=False)
class EllN:
    """The n-th approximating function for a concave profile."""

    profile: ConcaveProfile
    n: int
    _lam: float = field(init=False)

    def __post_init__(self):
        if self.n <= self.profile.xi:
            raise ValueError("n must exceed xi")
        object.__setattr__(self, "_lam", (self.n + 1) / self.n)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        pr, n, lam = self.profile, self.n, self._lam
        first = pr.phi_inf * ((t > n) & (t < n + 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            second = np.where((t > pr.xi) & (t < pr.xi + 1.0 / n), pr.a * n / t, 0.0)
            third = (pr.phi(t) - pr.phi(lam * t)) / (t * math.log(lam))
        return first + second + third

    def apply_K01(self, x):
        """``K_xi^{0,1} ell_n(x)`` in closed form."""
        x = np.asarray(x, dtype=float)
        pr, n, lam, xi = self.profile, self.n, self._lam, self.profile.xi
        # first term: phi_inf * int_n^{n+1} min(x, t) dt
        lo, hi = n, n + 1.0
        c = np.clip(x, lo, hi)
        t1 = pr.phi_inf * (0.5 * (c ** 2 - lo ** 2) + x * (hi - c))
        # second term: a n int_xi^{xi+1/n} min(x/t, 1) dt
        e = xi + 1.0 / n
        if xi > 0:
            inner = np.where(x <= xi, x * math.log(e / xi),
                             np.where(x >= e, 1.0 / n, (x - xi) + x * np.log(e / np.maximum(x, xi))))
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                inner = np.where(x >= e, 1.0 / n, x + x * np.log(e / x))
        t2 = pr.a * n * inner
        # third term
        Lx = np.full(x.shape, xi, dtype=float)
        if xi > 0:
            t3 = (pr._J(x, Lx) - pr._J(lam * x, lam * Lx) / lam) / math.log(lam)
        else:
            t3 = self._third_from_zero(x)
        return t1 + t2 + t3

    def _third_from_zero(self, x):
        # with xi = 0: int_0^inf min(x,t)(psi(t) - psi(lam t))/t dt
        #   = int_0^x (psi - psi(lam .)) dt + x int_x^inf (psi - psi(lam .))/t dt
        #   = F1(x) - F1(lam x)/lam + x (int_x^{lam x} psi / t)
        pr, lam = self.profile, self._lam
        return (pr._F1(x) - pr._F1(lam * x) / lam + x * (pr._F0(x) - pr._F0(lam * x))) / math.log(lam)


def ell_n(profile: ConcaveProfile, n: int) -> EllN:
    return EllN(profile, int(n))


# -- sampling and ratio suprema --------------------------------------------


def random_step(rng: np.random.Generator, lo: float, hi: float, max_cells: int = 6) -> StepFunction:
    """Random non-negative step with log-uniform cells in ``(lo, hi)``."""
    k = int(rng.integers(1, max_cells + 1))
    pts = np.sort(np.exp(rng.uniform(math.log(lo), math.log(hi), 2 * k)))
    vals = np.zeros(2 * k)
    vals[1::2] = rng.exponential(1.0, k)
    pts = np.unique(pts)
    vals = vals[: pts.size]
    return StepFunction(pts, vals).canonical()


def sample_cone(params: ConeParams, seed: int, count: int, spread: float = 1e3) -> list[ConeElement]:
    """Deterministic random elements ``K h`` of ``P(xi, beta) & Omega(alpha, beta)``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    base = params.xi if params.xi > 0 else 1e-2
    out = []
    while len(out) < count:
        h = random_step(rng, base, base * spread)
        if not np.any(h.values > 0):
            continue
        out.append(ConeElement(params, h))
    return out


@dataclass(frozen=True)
class RatioBounds:
    lower: float
    upper: float
    factor: float
    argmax_t: float
    sampled: float
    sampled_random: float
    grid: dict

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "factor": self.factor,
                "argmax_t": self.argmax_t, "sampled": self.sampled,
                "sampled_random": self.sampled_random, "grid": self.grid}


def ratio_supremum_bounds(params: ConeParams, u: Weight, v: Weight, p: float, q: float,
                          averaging=None, *, samples: int = 200, seed: int = 0,
                          t_min: float | None = None, t_max: float = 1e6,
                          per_decade: int = 64) -> RatioBounds:
    """Bracket ``sup_f ||A f||_{q,u} / ||f||_{p,v}`` over the cone.

    The lower bound is the kernel-section supremum on a geometric grid of
    ``t > xi``; the upper bound multiplies it by ``2**(1/q)`` (identity) or
    by 2 (averaging operator, needs ``p <= 1 <= q``).
    """
    if not (p > 0 and q > 0):
        raise ValueError("exponents must be positive")
    identity = averaging is None or not getattr(averaging, "intervals", ())
    if identity:
        if not p <= q:
            raise ValueError("hypothesis 0 < p <= q violated")
        factor = 2.0 ** (1.0 / q)
    else:
        if not (p <= 1.0 <= q):
            raise ValueError("hypothesis 0 < p <= 1 <= q violated")
        factor = 2.0
    A = None if identity else averaging
    lo = t_min if t_min is not None else max(params.xi, 1e-6)
    n = int(round(math.log10(t_max / lo) * per_decade)) + 1
    ts = np.geomspace(lo, t_max, n)
    if params.xi > 0:
        ts = ts[ts > params.xi]
        ts = np.concatenate(([params.xi * (1 + 1e-9)], ts))

    def ratio(f):
        den = f.norm(p, v)
        if den == 0:
            return 0.0
        return f.norm(q, u, A) / den

    kr = np.array([ratio(KernelSection(params.alpha, params.beta, t)) for t in ts])
    i = int(np.nanargmax(kr))
    lower = float(kr[i])
    rnd = 0.0
    if samples:
        for f in sample_cone(params, seed, samples):
            rnd = max(rnd, ratio(f))
    return RatioBounds(lower, factor * lower, factor, float(ts[i]), max(rnd, lower), rnd,
                       {"t_min": float(ts[0]), "t_max": float(ts[-1]), "per_decade": per_decade,
                        "points": int(ts.size), "samples": samples, "seed": seed})
