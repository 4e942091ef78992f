"""Least concave majorants and level functions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .stepfn import DecreasingStep, PowerLogTail, StepFunction
from .weights import Weight, WeightTerm


class UnboundedMajorantError(ValueError):
    """The input lies under no line; the majorant requires a limiting construction."""

    def __init__(self, detail: str = ""):
        msg = "requires limiting construction"
        super().__init__(f"{msg}: {detail}" if detail else msg)


@dataclass(frozen=True, eq=False)
class ConcaveMajorant:
    """Concave piecewise-linear function through ``(x[i], y[i])``.

    Beyond the last node it continues with ``tail_slope``, or follows
    ``y[-1] + int tail`` when a power-log ``tail`` is attached.
    """

    x: np.ndarray
    y: np.ndarray
    tail_slope: float = 0.0
    tail: PowerLogTail | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.size < 1 or np.any(np.diff(x) <= 0):
            raise ValueError("majorant nodes must be strictly increasing")

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.y) / np.diff(self.x)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.interp(t, self.x, self.y)
        far = t > self.x[-1]
        if np.any(far):
            if self.tail is None:
                extra = self.tail_slope * (t - self.x[-1])
            else:
                xs = np.atleast_1d(t)
                extra = np.array([self.tail.integral(self.x[-1], float(v)) if v > self.x[-1] else 0.0
                                  for v in xs.ravel()]).reshape(xs.shape)
            out = np.where(far, self.y[-1] + extra, out)
        return out

    def derivative(self) -> DecreasingStep:
        """Right derivative as a decreasing step function."""
        # roundoff can leave nearly collinear slopes a few ulps out of order
        slopes = np.minimum.accumulate(self.slopes)
        bp = self.x[1:]
        if self.x[0] > 0:
            raise ValueError("majorant must start at the origin to be differentiated")
        if self.tail is not None:
            return DecreasingStep(bp, slopes, self.tail)
        if self.tail_slope > 0:
            return DecreasingStep(bp, slopes, PowerLogTail(self.tail_slope, 0.0, 0.0))
        return DecreasingStep(bp, slopes)


def _upper_hull(x: np.ndarray, y: np.ndarray) -> list[int]:
    hull: list[int] = []
    for i in range(x.size):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o])
            if cross >= 0:  # a lies on or below the chord o-i
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def least_concave_majorant(x, y, tail_slope: float = 0.0, *,
                           keep_touching: bool = False) -> ConcaveMajorant:
    """Least concave majorant of the piecewise-linear function through the nodes.

    ``tail_slope`` is the slope of the input beyond its last node; an
    infinite slope means the input lies under no line. With
    ``keep_touching`` the last node survives when its incoming slope equals
    ``tail_slope`` (used when a curved tail starts there).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size == 0:
        raise ValueError("x and y must be non-empty and the same length")
    if not math.isfinite(tail_slope):
        raise UnboundedMajorantError("slope at infinity is infinite")
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    if np.any(np.diff(x) == 0):
        # keep the highest value at repeated abscissae
        uniq, start = np.unique(x, return_index=True)
        y = np.maximum.reduceat(y, start)
        x = uniq
    hull = _upper_hull(x, y)
    while len(hull) >= 2:
        a, b = hull[-2], hull[-1]
        slope = (y[b] - y[a]) / (x[b] - x[a])
        if slope < tail_slope or (slope == tail_slope and not keep_touching):
            hull.pop()
        else:
            break
    return ConcaveMajorant(x[hull], y[hull], tail_slope)


def level_function(u, *, t_min: float = 1e-6, t_max: float = 1e6, per_decade: int = 64,
                   nodes=()):
    """Level function ``u°``.

    A :class:`StepFunction` gives an exact :class:`DecreasingStep`. A
    :class:`Weight` is returned unchanged when already non-increasing;
    otherwise it is converted to a step function (exactly when every term is
    constant, else by cell averages on a geometric grid) and the result is
    returned as a :class:`Weight`. Extra ``nodes`` join the grid; the
    discrete majorant is then exact at each of them, which keeps
    ``int h w <= int h w°`` for any decreasing ``h`` that jumps only there.
    """
    if isinstance(u, Weight):
        if u.is_decreasing():
            return u
        step = weight_to_step(u, t_min, t_max, per_decade, nodes)
        return level_function(step).as_weight()
    if not isinstance(u, StepFunction):
        raise TypeError("level_function expects a StepFunction or a Weight")
    if isinstance(u, DecreasingStep):
        return u
    try:
        return DecreasingStep(u.breakpoints, u.values, u.tail, u.domain)
    except ValueError:
        pass
    tail = u.tail
    if tail is not None:
        lim = tail.limit()
        if math.isinf(lim):
            raise UnboundedMajorantError("tail grows without bound")
        if not tail.is_decreasing_from(max(u.end, 1e-12)):
            return level_function(u.truncate_tail(t_max, per_decade))
    edges = u.edges
    cum = np.concatenate(([0.0], np.cumsum(u.values * np.diff(edges))))
    if tail is None:
        maj = least_concave_majorant(edges, cum, 0.0)
        return maj.derivative()
    if u.end == 0:
        return DecreasingStep([], [], tail)
    start = float(tail(u.end))
    if tail.a == 0 and tail.b == 0:
        return least_concave_majorant(edges, cum, tail.c).derivative()
    maj = least_concave_majorant(edges, cum, start, keep_touching=True)
    if maj.x[-1] == u.end:
        return ConcaveMajorant(maj.x, maj.y, tail=tail).derivative()
    joined = _tangent_to_tail(maj, edges, cum, tail)
    if joined is not None:
        return joined
    return level_function(u.truncate_tail(t_max, per_decade))


def _tangent_to_tail(maj: ConcaveMajorant, edges, cum, tail: PowerLogTail):
    """Join the node hull to a concave tail curve by a tangent segment.

    The cumulative beyond ``B = edges[-1]`` is ``G(T) = cum[-1] + int_B^T tail``.
    Walking back along the hull, the first vertex ``V`` whose tangent slope
    to the curve is below its incoming slope is the last vertex; the
    majorant follows the tangent from ``V`` to the contact point and the
    curve afterwards.
    """
    B, GB = float(edges[-1]), float(cum[-1])
    full = least_concave_majorant(edges, cum, 0.0)
    xs, ys = full.x, full.y

    def gap(T, xv, yv):
        return float(tail(T)) * (T - xv) - (GB + tail.integral(B, T) - yv)

    for k in range(xs.size - 1, -1, -1):
        xv, yv = float(xs[k]), float(ys[k])
        if xv == B:
            continue
        if gap(B, xv, yv) <= 0:
            continue
        hi = B * 2.0
        while gap(hi, xv, yv) > 0:
            hi *= 2.0
            if hi > 1e300:
                return None
        T = optimize.brentq(lambda t: gap(t, xv, yv), B, hi, xtol=1e-15 * B, rtol=1e-15)
        slope = float(tail(T))
        if k > 0 and (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]) <= slope:
            continue
        bp = np.concatenate((xs[1:k + 1], [T]))
        vals = np.concatenate((np.minimum.accumulate(np.diff(ys[:k + 1]) / np.diff(xs[:k + 1])),
                               [slope]))
        return DecreasingStep(bp, vals, tail)
    return None


def weight_to_step(w: Weight, t_min: float = 1e-6, t_max: float = 1e6,
                   per_decade: int = 64, nodes=()) -> StepFunction:
    """Step function with the same cumulative integral as ``w`` at grid nodes.

    Exact when every term is a constant on a finite interval; a single
    unbounded power-log term is carried as the tail.
    """
    if w.is_zero:
        return StepFunction([], [])
    unbounded = [t for t in w.terms if math.isinf(t.hi)]
    if len(unbounded) > 1:
        raise ValueError("at most one term may extend to infinity")
    tail_term = unbounded[0] if unbounded else None
    finite = w.breakpoints()
    end = float(max(finite.max() if finite.size else 0.0,
                    tail_term.lo if tail_term is not None else 0.0))
    pts = set(finite.tolist())
    if not all(t.a == 0 and t.b == 0 for t in w.terms):
        hi_edge = max(end, t_min)
        n = max(2, int(math.ceil(math.log10(hi_edge / t_min) * per_decade)) + 1)
        pts |= set(np.geomspace(t_min, hi_edge, n).tolist())
        end = hi_edge
    pts |= {float(x) for x in nodes if 0 < x < end}
    bp = np.array(sorted(p for p in pts if 0 < p <= end))
    if bp.size == 0:
        t = tail_term
        return StepFunction([], [], PowerLogTail(t.c, t.a, t.b))
    rest = Weight(tuple(t for t in w.terms if t is not tail_term))
    if tail_term is not None:
        rest = rest + Weight((WeightTerm(tail_term.c, tail_term.a, tail_term.b,
                                         tail_term.lo, bp[-1]),)) if tail_term.lo < bp[-1] else rest
    left = np.concatenate(([0.0], bp[:-1]))
    mass = rest.moment(left, bp) if not rest.is_zero else np.zeros(bp.size)
    vals = np.asarray(mass) / (bp - left)
    tail = None if tail_term is None else PowerLogTail(tail_term.c, tail_term.a, tail_term.b)
    return StepFunction(bp, vals, tail)


def lcm_segment_check(x, y, xi: float, c: float, tail_slope: float = 0.0,
                      rtol: float = 1e-12) -> bool:
    """Check that the majorant of ``g`` is linear on ``(0, xi)``.

    ``g`` is given by nodes ``(x, y)`` and must equal ``c*x`` on ``[0, xi]``
    with ``xi`` among the nodes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if xi <= 0 or not np.any(np.isclose(x, xi, rtol=1e-15, atol=0)):
        raise ValueError("xi must be a positive node of g")
    head = x <= xi
    if not np.any(x == 0.0):
        raise ValueError("g must include the origin")
    scale = max(1.0, float(np.max(np.abs(y[head]))))
    if np.any(np.abs(y[head] - c * x[head]) > 1e-12 * scale):
        raise ValueError("g is not linear with the given slope on (0, xi)")
    maj = least_concave_majorant(x, y, tail_slope)
    gxi = float(maj(xi))
    probe = np.concatenate((x[(x > 0) & (x < xi)], np.linspace(0, xi, 33)[1:-1]))
    line = probe * gxi / xi
    return bool(np.all(np.abs(maj(probe) - line) <= rtol * max(gxi, 1e-300) + 1e-15))


def hull_segments(u, *, t_min: float = 1e-6, t_max: float = 1e6, per_decade: int = 64):
    """Maximal intervals on which the majorant lies strictly above the cumulative.

    These are the intervals where ``u°`` is the average of ``u``.
    """
    step = weight_to_step(u, t_min, t_max, per_decade) if isinstance(u, Weight) else u
    if step.tail is not None:
        step = step.truncate_tail(t_max, per_decade)
    edges = step.edges
    cum = np.concatenate(([0.0], np.cumsum(step.values * np.diff(edges))))
    maj = least_concave_majorant(edges, cum, 0.0)
    gap = maj(edges) - cum
    scale = max(float(cum[-1]), 1e-300)
    out = []
    for a, b in zip(maj.x[:-1], maj.x[1:]):
        inside = (edges > a) & (edges < b)
        if np.any(gap[inside] > 1e-12 * scale):
            out.append((float(a), float(b)))
    return out
