"""Averaging operators: replace a function by its mean on each of finitely
many disjoint intervals and leave it unchanged elsewhere."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .stepfn import StepFunction
from .weights import Weight, WeightTerm


@dataclass(frozen=True)
class AveragingOp:
    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        ivs = tuple(sorted((float(a), float(b)) for a, b in self.intervals))
        for a, b in ivs:
            if not (0.0 <= a < b < math.inf):
                raise ValueError(f"bad averaging interval ({a}, {b})")
        for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
            if a1 < b0:
                raise ValueError(f"averaging intervals ({a0}, {b0}) and ({a1}, {b1}) overlap")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def parse(cls, text: str | None) -> "AveragingOp":
        """``"a1,b1;a2,b2"``; empty or ``"identity"`` gives the identity."""
        if text is None or not text.strip() or text.strip() == "identity":
            return cls(())
        ivs = []
        for chunk in text.split(";"):
            parts = chunk.split(",")
            if len(parts) != 2:
                raise ValueError(f"expected 'a,b' in averaging string, got {chunk!r}")
            ivs.append((float(parts[0]), float(parts[1])))
        return cls(tuple(ivs))

    @property
    def is_identity(self) -> bool:
        return not self.intervals

    def to_text(self) -> str:
        return ";".join(f"{a:.17g},{b:.17g}" for a, b in self.intervals) or "identity"

    def complement(self):
        """Open gaps between the intervals, as ``(lo, hi)`` pairs."""
        out, prev = [], 0.0
        for a, b in self.intervals:
            if a > prev:
                out.append((prev, a))
            prev = b
        out.append((prev, math.inf))
        return out


def average_weight(A: AveragingOp, f: Weight) -> Weight:
    """``A f`` for a power-log function given as a :class:`Weight`."""
    terms = []
    for lo, hi in A.complement():
        terms.extend(f.restricted(lo, hi).terms)
    for a, b in A.intervals:
        m = f.moment(a, b) / (b - a)
        if not math.isfinite(m):
            raise ValueError(f"function is not integrable on ({a}, {b})")
        if m > 0:
            terms.append(WeightTerm(m, 0.0, 0.0, a, b))
    return Weight(tuple(sorted(terms, key=lambda t: t.lo)))


def apply_averaging(A: AveragingOp, f):
    """``A f``. Step functions without a tail stay step functions; anything
    else is returned as a :class:`Weight`."""
    if isinstance(f, Weight):
        return average_weight(A, f)
    if A.is_identity:
        return f
    if f.tail is not None:
        return average_weight(A, f.as_weight())
    pts = np.unique(np.concatenate((f.breakpoints, np.ravel(A.intervals))))
    pts = pts[pts > 0]
    left = np.concatenate(([0.0], pts[:-1]))
    mids = 0.5 * (left + pts)
    vals = np.asarray(f(mids), dtype=float).copy()
    for a, b in A.intervals:
        inside = (mids > a) & (mids < b)
        vals[inside] = (f.cumulative(b) - f.cumulative(a)) / (b - a)
    return StepFunction(pts, vals, None, f.domain).canonical()


def averaged_norm(A: AveragingOp, f, r: float, w: Weight) -> float:
    """``||A f||_{r,w}`` computed exactly for step or power-log ``f``."""
    g = apply_averaging(A, f)
    if isinstance(g, StepFunction):
        g = g.as_weight()
    return g.raised(r).times(w).moment(0.0, math.inf) ** (1.0 / r)
