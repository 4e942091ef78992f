"""Power-log weights on (0, inf) and the weight expression language.

A :class:`Weight` is a finite sum of terms ``c * t**a * (1 + |log t|)**b``
each restricted to an interval ``(lo, hi)``. Expressions look like::

    t^0 on(0,1) + 2*t^-1.5*L^2 on(1,inf)

where ``L`` stands for ``1 + |log t|``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from ._quad import powerlog_integral, powerlog_integral_vec


@dataclass(frozen=True)
class WeightTerm:
    c: float
    a: float
    b: float = 0.0
    lo: float = 0.0
    hi: float = math.inf

    def __post_init__(self):
        if not self.c > 0 or not math.isfinite(self.c):
            raise ValueError(f"weight coefficient must be positive and finite, got {self.c}")
        if not (0.0 <= self.lo < self.hi):
            raise ValueError(f"weight support ({self.lo}, {self.hi}) has no length")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t > self.lo) & (t < self.hi)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            val = self.c * t ** self.a * (1.0 + np.abs(np.log(t))) ** self.b
        return np.where(inside, val, 0.0)

    def limit_at_infinity(self) -> float:
        if not math.isinf(self.hi):
            return 0.0
        if self.a > 0 or (self.a == 0 and self.b > 0):
            return math.inf
        if self.a == 0 and self.b == 0:
            return self.c
        return 0.0

    def to_expr(self) -> str:
        s = f"{self.c:g}*t^{self.a:g}"
        if self.b:
            s += f"*L^{self.b:g}"
        if self.lo != 0.0 or not math.isinf(self.hi):
            hi = "inf" if math.isinf(self.hi) else f"{self.hi:.17g}"
            s += f" on({self.lo:.17g},{hi})"
        return s


@dataclass(frozen=True)
class Weight:
    """Sum of power-log terms; see module docstring."""

    terms: tuple[WeightTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def power(cls, a: float, b: float = 0.0, c: float = 1.0,
              lo: float = 0.0, hi: float = math.inf) -> "Weight":
        return cls((WeightTerm(c, a, b, lo, hi),))

    @classmethod
    def indicator(cls, lo: float, hi: float, c: float = 1.0) -> "Weight":
        return cls((WeightTerm(c, 0.0, 0.0, lo, hi),))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for term in self.terms:
            out = out + term(t)
        return out

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(self.terms + other.terms)

    def scaled(self, k: float) -> "Weight":
        if k <= 0:
            raise ValueError("scale factor must be positive")
        return Weight(tuple(WeightTerm(k * t.c, t.a, t.b, t.lo, t.hi) for t in self.terms))

    def restricted(self, lo: float, hi: float) -> "Weight":
        out = []
        for t in self.terms:
            l, h = max(lo, t.lo), min(hi, t.hi)
            if h > l:
                out.append(WeightTerm(t.c, t.a, t.b, l, h))
        return Weight(tuple(out))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def breakpoints(self) -> np.ndarray:
        pts = {p for t in self.terms for p in (t.lo, t.hi) if 0 < p < math.inf}
        return np.array(sorted(pts))

    def smooth_breaks(self) -> np.ndarray:
        """Support endpoints plus t = 1 where |log t| has a kink."""
        pts = set(self.breakpoints().tolist())
        if any(t.b != 0 and t.lo < 1.0 < t.hi for t in self.terms):
            pts.add(1.0)
        return np.array(sorted(pts))

    def moment(self, x0=0.0, x1=math.inf, s: float = 0.0, extra_b: float = 0.0):
        """Integral of ``t**s * (1+|log t|)**extra_b * w(t)`` over ``(x0, x1)``.

        Accepts scalars or arrays for the endpoints; divergent pieces give inf.
        """
        scalar = np.ndim(x0) == 0 and np.ndim(x1) == 0
        x0a = np.asarray(x0, dtype=float)
        x1a = np.asarray(x1, dtype=float)
        x0a, x1a = np.broadcast_arrays(x0a, x1a)
        total = np.zeros(x0a.shape)
        for t in self.terms:
            lo = np.maximum(x0a, t.lo)
            hi = np.minimum(x1a, t.hi)
            if scalar:
                val = powerlog_integral(float(t.a + s), float(t.b + extra_b), float(lo), float(hi))
                total = total + t.c * val
            else:
                total = total + t.c * powerlog_integral_vec(t.a + s, t.b + extra_b, lo, hi)
        return float(total) if scalar else total

    def cumulative(self, x):
        """``W(x) = int_0^x w``."""
        return self.moment(0.0, x)

    def tail_moment(self, x, s: float):
        """``int_x^inf t**s w(t) dt``."""
        return self.moment(x, math.inf, s=s)

    def limit_at_infinity(self) -> float:
        return float(sum(t.limit_at_infinity() for t in self.terms))

    def has_disjoint_supports(self) -> bool:
        spans = sorted((t.lo, t.hi) for t in self.terms)
        return all(spans[i][1] <= spans[i + 1][0] for i in range(len(spans) - 1))

    def covers(self, lo: float, hi: float) -> bool:
        """True if the supports cover ``(lo, hi)`` up to a null set."""
        spans = sorted((t.lo, t.hi) for t in self.terms)
        reach = lo
        for l, h in spans:
            if l > reach:
                break
            reach = max(reach, h)
        return reach >= hi

    def raised(self, gamma: float) -> "Weight":
        """``w**gamma`` for a weight with disjoint term supports."""
        if not self.has_disjoint_supports():
            raise ValueError("w**gamma needs non-overlapping terms")
        # a coefficient that underflows to zero leaves nothing on its support
        return Weight(tuple(WeightTerm(t.c ** gamma, t.a * gamma, t.b * gamma, t.lo, t.hi)
                            for t in self.terms if t.c ** gamma != 0.0))

    def times(self, other: "Weight") -> "Weight":
        """Pointwise product, expanded term by term."""
        out = []
        for s in self.terms:
            for t in other.terms:
                lo, hi = max(s.lo, t.lo), min(s.hi, t.hi)
                if hi > lo and s.c * t.c != 0.0:
                    out.append(WeightTerm(s.c * t.c, s.a + t.a, s.b + t.b, lo, hi))
        return Weight(tuple(out))

    def is_decreasing(self, t_min: float = 1e-8, t_max: float = 1e8,
                      per_decade: int = 64) -> bool:
        """Grid test for non-increasing ``w`` (support endpoints probed on both sides)."""
        n = int(round(math.log10(t_max / t_min) * per_decade)) + 1
        grid = np.geomspace(t_min, t_max, n)
        extra = []
        for p in self.breakpoints():
            extra += [p * (1 - 1e-9), p * (1 + 1e-9)]
        grid = np.unique(np.concatenate([grid, extra, [1.0]]))
        # values exactly at a support endpoint are immaterial
        grid = grid[~np.isin(grid, self.breakpoints())]
        vals = self(grid)
        if np.any(np.diff(vals) > 1e-12 * np.maximum(np.abs(vals[:-1]), 1e-300)):
            return False
        # a gap at the origin followed by positive values is an increase
        first = min((t.lo for t in self.terms), default=0.0)
        return first == 0.0 or not self.terms

    def to_expr(self) -> str:
        return " + ".join(t.to_expr() for t in self.terms) if self.terms else "0"

    def to_json(self) -> list[dict]:
        return [{"c": t.c, "a": t.a, "b": t.b, "lo": t.lo,
                 "hi": None if math.isinf(t.hi) else t.hi} for t in self.terms]

    @classmethod
    def from_json(cls, data) -> "Weight":
        return cls(tuple(WeightTerm(d["c"], d["a"], d.get("b", 0.0), d.get("lo", 0.0),
                                    math.inf if d.get("hi") is None else d["hi"])
                         for d in data))


def dual_weight(w: Weight, p: float) -> Weight:
    """``v(t) = t**(p-2) * w(1/t)``, computed term by term."""
    out = []
    for t in w.terms:
        lo = 0.0 if math.isinf(t.hi) else 1.0 / t.hi
        hi = math.inf if t.lo == 0.0 else 1.0 / t.lo
        out.append(WeightTerm(t.c, p - 2.0 - t.a, t.b, lo, hi))
    return Weight(tuple(out))


class WeightSyntaxError(ValueError):
    """Malformed weight expression; ``position`` is the 0-based offset."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.position = position
        self.text = text


_NUM = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise WeightSyntaxError(msg, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        if not self.peek(s):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def number(self, allow_inf=False) -> float:
        self.skip()
        if allow_inf and self.text.startswith("inf", self.pos):
            self.pos += 3
            return math.inf
        m = _NUM.match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return float(m.group())

    def term(self) -> WeightTerm:
        start = self.pos
        c = 1.0
        if not self.peek("t"):
            c = self.number()
            if self.peek("*"):
                self.expect("*")
        self.expect("t^")
        a = self.number()
        b = 0.0
        if self.peek("*"):
            self.expect("*")
            self.expect("L^")
            b = self.number()
        lo, hi = 0.0, math.inf
        if self.peek("on"):
            self.expect("on")
            self.expect("(")
            lo = self.number()
            self.expect(",")
            hi = self.number(allow_inf=True)
            self.expect(")")
        if c <= 0:
            raise WeightSyntaxError("coefficient must be positive", self.text, start)
        try:
            return WeightTerm(c, a, b, lo, hi)
        except ValueError as exc:
            raise WeightSyntaxError(str(exc), self.text, start) from None

    def parse(self) -> Weight:
        terms = [self.term()]
        while self.peek("+"):
            self.expect("+")
            terms.append(self.term())
        self.skip()
        if self.pos != len(self.text):
            self.error("unexpected trailing input")
        return Weight(tuple(terms))


def parse_weight(expr: str) -> Weight:
    """Parse a weight expression (grammar in the module docstring)."""
    return _Parser(expr).parse()
