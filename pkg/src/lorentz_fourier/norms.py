"""Lorentz functionals and the B-class constants of a weight."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .averaging import AveragingOp, averaged_norm
from .grids import DEFAULT_DENSITY, DEFAULT_T_MAX, DEFAULT_T_MIN, sup_average_beyond, sup_on_grid
from .level import hull_segments, level_function
from .stepfn import DecreasingStep, StepFunction, hardy_power_integral, rearrange, weighted_integral
from .weights import Weight

EXACT, LOWER, UPPER, BOUNDS = "exact", "lower-bound", "upper-bound", "bounds"


@dataclass(frozen=True)
class NormValue:
    """A computed quantity; ``math.inf`` stands for "infinite"."""

    value: float
    kind: str = EXACT
    lower: float | None = None
    upper: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.lower is not None and self.upper is not None
                and self.lower > self.upper * (1 + 1e-9)):
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def infinite(self) -> bool:
        return math.isinf(self.value)

    def __mul__(self, k: float) -> "NormValue":
        sc = lambda x: None if x is None else x * k  # noqa: E731
        return NormValue(self.value * k, self.kind, sc(self.lower), sc(self.upper), self.meta)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        enc = lambda x: "infinite" if x is not None and math.isinf(x) else x  # noqa: E731
        out = {"value": enc(self.value), "kind": self.kind}
        if self.lower is not None:
            out["lower"] = enc(self.lower)
        if self.upper is not None:
            out["upper"] = enc(self.upper)
        if self.meta:
            out["meta"] = self.meta
        return out


def _as_step(f) -> StepFunction:
    if isinstance(f, StepFunction):
        return f
    return StepFunction.from_sequence(np.abs(np.asarray(f, dtype=float)))


def _root(x: float, p: float) -> float:
    return math.inf if math.isinf(x) else x ** (1.0 / p)


# -- B classes --------------------------------------------------------------


def bp_constant(w: Weight, p: float, t_min: float = DEFAULT_T_MIN, t_max: float = DEFAULT_T_MAX,
                per_decade: int = DEFAULT_DENSITY) -> NormValue:
    """Grid estimate of the smallest ``b`` with
    ``int_t^inf w(s) s**-p ds <= b t**-p int_0^t w``."""
    if not p > 1:
        raise ValueError("B_p needs p > 1")
    if math.isinf(w.moment(1.0, math.inf, s=-p)):
        return NormValue(math.inf, LOWER, meta={"reason": "tail integral diverges"})

    def ratio(t):
        num = t ** p * w.moment(t, math.inf, s=-p)
        den = w.cumulative(t)
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)

    res = sup_on_grid(ratio, t_min, t_max, per_decade)
    return NormValue(res.value, LOWER, meta={"verdict": res.verdict, **res.meta()})


def b1inf_constant(w: Weight, t_min: float = DEFAULT_T_MIN, t_max: float = DEFAULT_T_MAX,
                   per_decade: int = DEFAULT_DENSITY) -> NormValue:
    """Grid estimate of ``sup_{0<x<y} (W(y)/y) / (W(x)/x)``."""
    lim = w.limit_at_infinity()

    def ratio(x):
        x = np.atleast_1d(x)
        Wx = w.cumulative(x)
        best = sup_average_beyond(w.cumulative, x, w.breakpoints(), lim, per_decade=per_decade)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(Wx > 0, best * x / np.where(Wx > 0, Wx, 1.0), np.inf)

    res = sup_on_grid(ratio, t_min, t_max, per_decade)
    return NormValue(res.value, LOWER, meta={"verdict": res.verdict, **res.meta()})


# -- Lorentz functionals ----------------------------------------------------


def lambda_norm(f, p: float, w: Weight) -> NormValue:
    """``||f*||_{p,w}``; sequences use the counting-measure convention."""
    fs = rearrange(_as_step(f))
    return NormValue(_root(weighted_integral(fs, w, p), p), EXACT)


def gamma_norm(f, p: float, w: Weight) -> NormValue:
    """``||f**||_{p,w}``."""
    if p <= 0:
        raise ValueError("p must be positive")
    fs = rearrange(_as_step(f))
    return NormValue(_root(hardy_power_integral(fs, w, p), p), EXACT)


def averaging_family(w: Weight, h: StepFunction, per_decade: int = 8,
                     t_min: float = DEFAULT_T_MIN, t_max: float = DEFAULT_T_MAX) -> list[AveragingOp]:
    """Finite family of averaging operators used for lower bounds.

    Identity; every hull segment of ``w`` alone and all of them together;
    initial intervals ``(0, g)`` for ``g`` on a geometric grid, alone and
    followed by the hull segments lying beyond ``g``.
    """
    segs = hull_segments(w, t_min=t_min, t_max=t_max)
    fam = [AveragingOp(())]
    fam += [AveragingOp((s,)) for s in segs]
    if len(segs) > 1:
        fam.append(AveragingOp(tuple(segs)))
    pts = set(np.geomspace(t_min, t_max, int(math.log10(t_max / t_min) * per_decade) + 1).tolist())
    pts |= set(h.breakpoints.tolist()) | set(w.breakpoints().tolist())
    for g in sorted(pts):
        fam.append(AveragingOp(((0.0, g),)))
        later = tuple(s for s in segs if s[0] >= g)
        if later:
            fam.append(AveragingOp(((0.0, g),) + later))
    return fam


def theta_norm(h, p: float, w: Weight, family: list[AveragingOp] | None = None) -> NormValue:
    """Bounds for ``sup_{k** <= h**} ||k*||_{p,w}`` with ``h`` decreasing.

    ``p = 1`` is exact (``||h||_{1,w°}``). For ``p > 1`` the lower bound is
    the best ``||A h||_{p,w}`` over a finite averaging family and the upper
    bound is ``min(||h||_{p,w°}, ||h**||_{p,w})``.
    """
    if p < 1:
        raise ValueError("outside implemented regime: exponent must be at least 1")
    h = _as_step(h)
    if not isinstance(h, DecreasingStep):
        h = rearrange(h)
    wo = level_function(w, nodes=h.breakpoints)
    wo_w = wo if isinstance(wo, Weight) else wo.as_weight()
    level = _root(weighted_integral(h, wo_w, p), p)
    if p == 1:
        return NormValue(level, EXACT, level, level, {"level_bound": level})
    gamma = gamma_norm(h, p, w).value
    fam = family if family is not None else averaging_family(w, h)
    best, best_op = 0.0, None
    for A in fam:
        val = averaged_norm(A, h, p, w)
        if val > best:
            best, best_op = val, A
    upper = min(level, gamma)
    return NormValue(upper, BOUNDS, best, upper,
                     {"level_bound": level, "gamma_bound": gamma, "family_size": len(fam),
                      "best_operator": None if best_op is None else best_op.to_text()})
