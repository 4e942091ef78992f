"""Piecewise-constant functions, rearrangements and Hardy averages.

A :class:`StepFunction` is constant on the cells ``[0, b_1), [b_1, b_2), ...``
given by its increasing ``breakpoints``; beyond the last breakpoint it is
zero, or follows an optional power-log ``tail``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from ._quad import integrate_segments, powerlog_integral
from .weights import Weight, WeightTerm


class NonRearrangeableError(ValueError):
    """Raised when a superlevel set has infinite measure."""


@dataclass(frozen=True)
class PowerLogTail:
    c: float
    a: float
    b: float = 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.c * t ** self.a * (1.0 + np.abs(np.log(t))) ** self.b

    def limit(self) -> float:
        if self.a > 0 or (self.a == 0 and self.b > 0):
            return math.inf
        if self.a == 0 and self.b == 0:
            return self.c
        return 0.0

    def integral(self, x0: float, x1: float, power: float = 1.0) -> float:
        """Integral of ``tail**power`` over ``(x0, x1)``."""
        return self.c ** power * powerlog_integral(self.a * power, self.b * power, x0, x1)

    def is_decreasing_from(self, start: float) -> bool:
        if self.a > 0 or (self.a == 0 and self.b > 0 and start >= 1):
            return False
        grid = np.geomspace(start, start * 1e12, 769)
        vals = self(grid)
        return bool(np.all(np.diff(vals) <= 1e-12 * vals[:-1]))


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Non-negative piecewise-constant function on (0, inf) or [0, 1]."""

    breakpoints: np.ndarray
    values: np.ndarray
    tail: PowerLogTail | None = None
    domain: str = "halfline"

    def __post_init__(self):
        bp = np.array(self.breakpoints, dtype=float).ravel()
        vals = np.array(self.values, dtype=float).ravel()
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if bp.size != vals.size:
            raise ValueError("need one value per cell")
        if bp.size and (bp[0] <= 0 or np.any(np.diff(bp) <= 0)):
            raise ValueError("breakpoints must be positive and strictly increasing")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("values must be finite and non-negative")
        if self.domain not in ("halfline", "unit"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.domain == "unit":
            if self.tail is not None:
                raise ValueError("unit-interval functions cannot have a tail")
            if bp.size and bp[-1] > 1.0 + 1e-15:
                raise ValueError("unit-interval breakpoints must not exceed 1")
        bp.setflags(write=False)
        vals.setflags(write=False)

    # -- constructors -------------------------------------------------

    @classmethod
    def indicator(cls, a: float, b: float, height: float = 1.0, domain: str = "halfline"):
        if a == 0:
            return cls([b], [height], domain=domain)
        return cls([a, b], [0.0, height], domain=domain)

    @classmethod
    def from_sequence(cls, seq) -> "StepFunction":
        """Function equal to ``seq[j]`` on ``[j, j+1)``."""
        seq = np.asarray(seq, dtype=float)
        return cls(np.arange(1, seq.size + 1, dtype=float), np.abs(seq))

    @classmethod
    def from_json(cls, data) -> "StepFunction":
        if isinstance(data, str):
            data = json.loads(data)
        tail = data.get("tail")
        tail = None if tail is None else PowerLogTail(tail["c"], tail["a"], tail.get("b", 0.0))
        domain = {"halfline": "halfline", "unit": "unit"}[data.get("domain", "halfline")]
        return cls(data["breakpoints"], data["values"], tail, domain)

    def to_json(self) -> dict:
        tail = None if self.tail is None else {"c": self.tail.c, "a": self.tail.a, "b": self.tail.b}
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist(),
                "tail": tail, "domain": self.domain}

    # -- basic access --------------------------------------------------

    @property
    def edges(self) -> np.ndarray:
        return np.concatenate(([0.0], self.breakpoints))

    @property
    def end(self) -> float:
        """Last breakpoint (start of the tail region)."""
        return float(self.breakpoints[-1]) if self.breakpoints.size else 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        vals = np.concatenate((self.values, [0.0]))
        out = vals[np.minimum(idx, self.values.size)]
        if self.tail is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(t >= self.end, self.tail(np.maximum(t, 1e-300)), out)
        return out

    def __add__(self, other: "StepFunction") -> "StepFunction":
        if self.tail is not None or other.tail is not None:
            raise ValueError("addition of functions with tails is not supported")
        bp = np.union1d(self.breakpoints, other.breakpoints)
        left = np.concatenate(([0.0], bp[:-1]))
        mids = 0.5 * (left + bp)
        domain = "unit" if self.domain == other.domain == "unit" else "halfline"
        return StepFunction(bp, self(mids) + other(mids), domain=domain)

    def __mul__(self, k: float) -> "StepFunction":
        if k < 0:
            raise ValueError("scalar must be non-negative")
        tail = None if self.tail is None else PowerLogTail(k * self.tail.c, self.tail.a, self.tail.b)
        if tail is not None and k == 0:
            tail = None
        return StepFunction(self.breakpoints, k * self.values, tail, self.domain)

    __rmul__ = __mul__

    def canonical(self) -> "StepFunction":
        """Merge equal neighbouring cells and drop trailing zero cells."""
        bp, vals = self.breakpoints, self.values
        if bp.size == 0:
            return self
        keep = np.ones(vals.size, dtype=bool)
        keep[:-1] = vals[:-1] != vals[1:]
        bp, vals = bp[keep], vals[keep]
        if self.tail is None:
            nz = np.flatnonzero(vals)
            last = nz[-1] + 1 if nz.size else 0
            bp, vals = bp[:last], vals[:last]
        return StepFunction(bp, vals, self.tail, self.domain)

    def equals(self, other: "StepFunction", rtol: float = 0.0) -> bool:
        a, b = self.canonical(), other.canonical()
        if a.breakpoints.size != b.breakpoints.size or a.tail != b.tail:
            return False
        return bool(np.allclose(a.breakpoints, b.breakpoints, rtol=rtol, atol=0)
                    and np.allclose(a.values, b.values, rtol=rtol, atol=0))

    def cumulative(self, x):
        """``int_0^x f`` (vectorised)."""
        x = np.asarray(x, dtype=float)
        edges = self.edges
        cum = np.concatenate(([0.0], np.cumsum(self.values * np.diff(edges))))
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, self.values.size)
        vals = np.concatenate((self.values, [0.0]))
        out = cum[idx] + vals[idx] * (np.minimum(x, self.end) - edges[idx])
        if self.tail is not None:
            far = np.atleast_1d(x > self.end)
            if np.any(far):
                xs = np.atleast_1d(x)
                extra = np.array([self.tail.integral(self.end, float(v)) if f else 0.0
                                  for v, f in zip(xs.ravel(), far.ravel())]).reshape(xs.shape)
                out = np.atleast_1d(out) + extra
                out = out.reshape(x.shape)
        return out

    def total(self) -> float:
        t = float(np.sum(self.values * np.diff(self.edges)))
        if self.tail is not None:
            t += self.tail.integral(self.end, math.inf)
        return t

    def as_weight(self) -> Weight:
        """The same function as a :class:`Weight` (zero cells dropped)."""
        edges = self.edges
        terms = [WeightTerm(float(v), 0.0, 0.0, float(edges[i]), float(edges[i + 1]))
                 for i, v in enumerate(self.values) if v > 0]
        if self.tail is not None and self.tail.c > 0:
            terms.append(WeightTerm(self.tail.c, self.tail.a, self.tail.b, self.end, math.inf))
        return Weight(tuple(terms))

    def truncate_tail(self, t_max: float = 1e6, per_decade: int = 64) -> "StepFunction":
        """Replace the tail on ``(end, t_max)`` by exact cell averages; drop it beyond."""
        if self.tail is None:
            return self
        start = self.end if self.end > 0 else min(1e-6, t_max / 10)
        n = max(2, int(math.ceil(math.log10(t_max / start) * per_decade)) + 1)
        grid = np.geomspace(start, t_max, n)
        vals = [self.tail.integral(grid[i], grid[i + 1]) / (grid[i + 1] - grid[i])
                for i in range(n - 1)]
        bp = np.concatenate((self.breakpoints, grid[1:])) if self.end > 0 else grid
        head = [] if self.end > 0 else [self.tail.integral(0.0, start) / start]
        values = np.concatenate((self.values, head, vals))
        return StepFunction(bp, values, None, self.domain)


class DecreasingStep(StepFunction):
    """A :class:`StepFunction` certified non-increasing."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(np.diff(self.values) > 0):
            raise ValueError("values must be non-increasing")
        if self.tail is not None:
            first = float(self.tail(self.end)) if self.end > 0 else math.inf
            if self.tail.a > 0 or not self.tail.is_decreasing_from(max(self.end, 1e-12)):
                raise ValueError("tail must be non-increasing")
            if self.values.size and first > self.values[-1] * (1 + 1e-12):
                raise ValueError("tail starts above the last cell value")


def distribution(f, lam: float) -> float:
    """Measure of ``{|f| > lam}`` for a StepFunction or a Weight."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if isinstance(f, Weight):
        if not f.has_disjoint_supports():
            raise ValueError("distribution of a weight needs non-overlapping terms")
        return sum(_level_measure(t, t.lo, t.hi, lam) for t in f.terms)
    lengths = np.diff(f.edges)
    total = float(np.sum(lengths[f.values > lam]))
    if f.tail is not None:
        total += _level_measure(f.tail, f.end, math.inf, lam)
    return total


def _level_measure(fn, lo: float, hi: float, lam: float) -> float:
    """Measure of ``{t in (lo, hi): fn(t) > lam}`` for a power-log ``fn``."""
    limit = fn.limit() if hasattr(fn, "limit") else fn.limit_at_infinity()
    if math.isinf(hi) and limit > lam:
        raise NonRearrangeableError(f"superlevel set at {lam} has infinite measure")
    a = max(lo, 1e-300)
    b = hi if math.isfinite(hi) else max(a, 1.0) * 1e30
    start = max(a, 1e-30)
    n = int(math.ceil(math.log10(b / start) * 64)) + 2
    grid = np.geomspace(start, b, n)
    if lo < start:
        grid = np.concatenate(([a], grid))

    def g(s):
        return float(fn(math.exp(s))) - lam

    vals = fn(grid) - lam
    total = 0.0
    s_grid = np.log(grid)
    # beginning of an above-level run
    run_start = lo if vals[0] > 0 else None
    for i in range(len(grid) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if (v0 > 0) != (v1 > 0):
            root = math.exp(optimize.brentq(g, s_grid[i], s_grid[i + 1], xtol=1e-15, rtol=1e-15))
            if v0 <= 0:
                run_start = root
            else:
                total += root - run_start
                run_start = None
    if run_start is not None:
        total += (hi if math.isfinite(hi) else grid[-1]) - run_start
    return total


def rearrange(f: StepFunction) -> DecreasingStep:
    """Decreasing rearrangement, ties kept in original cell order."""
    lengths = np.diff(f.edges)
    order = np.argsort(-f.values, kind="stable")
    vals = f.values[order]
    lens = lengths[order]
    keep = vals > 0
    vals, lens = vals[keep], lens[keep]
    tail = None
    if f.tail is not None:
        if f.tail.limit() > 0:
            raise NonRearrangeableError("tail does not decay to zero")
        if not f.tail.is_decreasing_from(max(f.end, 1e-12)):
            raise ValueError("non-monotone tail; call truncate_tail() first")
        top = float(f.tail(f.end)) if f.end > 0 else math.inf
        if np.any(f.values < top):
            raise ValueError("tail interleaves with the cells; call truncate_tail() first")
        tail = f.tail
    bp = np.cumsum(lens)
    out = StepFunction(bp, vals, tail, f.domain).canonical()
    return DecreasingStep(out.breakpoints, out.values, out.tail, out.domain)


def hardy_average(fs: StepFunction, t):
    """``f**(t) = (1/t) int_0^t f*``; ``fs`` must already be decreasing."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    return fs.cumulative(t) / t


def weighted_integral(f: StepFunction, w: Weight, p: float = 1.0) -> float:
    """``int_0^inf f(t)**p w(t) dt``; returns ``inf`` on divergence."""
    if p <= 0:
        raise ValueError("p must be positive")
    edges = f.edges
    nz = np.flatnonzero(f.values)
    total = 0.0
    if nz.size:
        cell = w.moment(edges[nz], edges[nz + 1])
        total = float(np.sum(f.values[nz] ** p * cell))
    if f.tail is not None:
        for t in w.terms:
            lo, hi = max(f.end, t.lo), t.hi
            if hi > lo:
                total += t.c * f.tail.c ** p * powerlog_integral(
                    f.tail.a * p + t.a, f.tail.b * p + t.b, lo, hi)
    return total


def omega(z: float, power: float = 1.0) -> DecreasingStep:
    """``min(z**-2, t**-2) ** power`` as a decreasing step with a power tail."""
    return DecreasingStep([z], [z ** (-2.0 * power)], PowerLogTail(1.0, -2.0 * power))


def hardy_power_integral(fs: StepFunction, w: Weight, p: float) -> float:
    """``int_0^inf (f**)^p w`` for a decreasing step ``fs`` (``Gamma`` functional)."""
    edges = fs.edges
    vals = fs.values
    if vals.size == 0:
        return 0.0
    cum = np.concatenate(([0.0], np.cumsum(vals * np.diff(edges))))
    total = vals[0] ** p * w.moment(0.0, edges[1]) if vals[0] > 0 else 0.0
    # cells i >= 1: f** = vals[i] + (cum[i] - vals[i]*edges[i]) / t
    A = vals[1:]
    B = cum[1:-1] - vals[1:] * edges[1:-1]
    lo, hi = edges[1:-1], edges[2:]
    if lo.size:
        cuts = w.smooth_breaks()
        seg_lo, seg_hi, owner = _split_at(lo, hi, cuts)

        def fn(t, own):
            return (A[own] + B[own] / t) ** p * w(t)

        parts = integrate_segments(seg_lo, seg_hi, lambda t, o: fn(t, owner[o]))
        total += float(np.sum(parts))
    end = fs.end
    if fs.tail is None:
        total += cum[-1] ** p * w.moment(end, math.inf, s=-p)
    else:
        C, tail = cum[-1], fs.tail

        def g(s):
            t = math.exp(s)
            return ((C + tail.integral(end, t)) / t) ** p * float(w(t)) * t

        knots = [math.log(end)] + sorted(math.log(b) for b in w.smooth_breaks() if b > end)
        knots.append(math.inf)
        total += sum(integrate.quad(g, a, b, epsrel=1e-11, limit=400)[0]
                     for a, b in zip(knots[:-1], knots[1:]))
    return total


def _split_at(lo, hi, cuts):
    """Split segments ``(lo[i], hi[i])`` at every cut point; returns owners too."""
    seg_lo, own = lo.copy(), np.arange(lo.size)
    out_lo, out_hi, out_own = [], [], []
    for c in cuts:
        inside = (seg_lo < c) & (c < hi)
        if np.any(inside):
            out_lo.append(seg_lo[inside])
            out_hi.append(np.full(int(inside.sum()), c))
            out_own.append(own[inside])
            seg_lo = np.where(inside, c, seg_lo)
    out_lo.append(seg_lo)
    out_hi.append(hi)
    out_own.append(own)
    return np.concatenate(out_lo), np.concatenate(out_hi), np.concatenate(out_own)
