"""Weight conditions for Fourier coefficient inequalities between Lorentz spaces.

Every supremum over ``z > 1`` (equivalently ``0 < x = 1/z < 1``) is taken
on a geometric grid with divergence detection; see :mod:`.grids`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .averaging import AveragingOp, apply_averaging  # noqa: F401  (re-exported)
from .cones import KernelSection
from .grids import DEFAULT_DENSITY, GridSup, sup_average_beyond, sup_on_grid
from .level import level_function
from .weights import Weight, dual_weight  # noqa: F401  (re-exported)

Z_MAX = 1e6


@dataclass(frozen=True)
class ConditionReport:
    name: str
    params: dict
    value: float | None = None
    lower: float | None = None
    upper: float | None = None
    verdict: str = "finite"  # finite | infinite | undecided | pass | fail | trivial
    kind: str = "grid-sup"
    grid: dict = field(default_factory=dict)
    reasons: tuple = ()

    def __post_init__(self):
        if self.lower is not None and self.upper is not None and self.lower > self.upper * (1 + 1e-9):
            raise ValueError("lower bound exceeds upper bound")
        if self.value is not None and math.isinf(self.value) and self.verdict == "finite":
            raise ValueError("an infinite value cannot have a finite verdict")

    @property
    def fails(self) -> bool:
        return self.verdict in ("infinite", "fail")

    def to_json(self) -> dict:
        enc = lambda x: "infinite" if x is not None and math.isinf(x) else x  # noqa: E731
        out = {"name": self.name, "params": self.params, "verdict": self.verdict, "kind": self.kind}
        if self.value is not None:
            out["value"] = enc(self.value)
        if self.lower is not None or self.upper is not None:
            out["bounds"] = [enc(self.lower), enc(self.upper)]
        if self.grid:
            out["grid"] = self.grid
        if self.reasons:
            out["reasons"] = list(self.reasons)
        return out


def _report(name, params, res: GridSup, kind="grid-sup") -> ConditionReport:
    return ConditionReport(name, params, value=res.value, verdict=res.verdict, kind=kind,
                           grid=res.meta())


def _level_weight(u: Weight) -> Weight:
    uo = level_function(u)
    return uo if isinstance(uo, Weight) else uo.as_weight()


def omega_norm(z: float, r: float, w: Weight) -> float:
    """``||omega_z||_{r,w}`` with ``omega_z = min(z**-2, t**-2)``."""
    return KernelSection(2.0, 0.0, z).norm(r, w)


def hardy_denominator(x, w: Weight, p: float):
    """``x**-p int_0^x w + int_x^inf w(t) t**-p dt``."""
    x = np.asarray(x, dtype=float)
    return x ** (-p) * w.moment(0.0, x) + w.moment(x, math.inf, s=-p)


def _check_pq(p: float, q: float | None = None):
    if not p > 0:
        raise ValueError("hypothesis 0 < p violated")
    if q is not None and not q > 0:
        raise ValueError("hypothesis 0 < q violated")


# -- C_omega and C_xy -------------------------------------------------------


def c_omega(u: Weight, w: Weight, p: float, q: float, *, z_max: float = Z_MAX,
            per_decade: int = DEFAULT_DENSITY) -> ConditionReport:
    """``sup_{z>1} ||omega_z||_{Theta_{q/2}(u)} / ||omega_z||_{p/2,v}``.

    ``q = 2`` is evaluated through the level function of ``u``; for
    ``q > 2`` the identity operator and the level function give a bracket.
    """
    _check_pq(p, q)
    if q < 2:
        raise ValueError("hypothesis q >= 2 violated")
    v = dual_weight(w, p)
    uo = _level_weight(u)
    params = {"p": p, "q": q, "u": u.to_expr(), "w": w.to_expr()}

    def ratio(weight):
        def f(z):
            den = omega_norm(z, p / 2, v)
            if den == 0:
                return math.inf
            return omega_norm(z, q / 2, weight) / den
        return f

    upper = sup_on_grid(ratio(uo), 1.0, z_max, per_decade, extend="high", floor=1.0)
    if q == 2:
        return _report("comega", params, upper, kind="level-exact")
    lower = sup_on_grid(ratio(u), 1.0, z_max, per_decade, extend="high", floor=1.0)
    verdict = "infinite" if lower.verdict == "infinite" else upper.verdict
    if verdict == "infinite" and upper.verdict == "finite":
        verdict = "undecided"
    return ConditionReport("comega", params, value=upper.value, lower=lower.value,
                           upper=upper.value, verdict=verdict, kind="bounds",
                           grid={"lower": lower.meta(), "upper": upper.meta()})


def _avg_beyond(u: Weight, z):
    return sup_average_beyond(u.cumulative, z, u.breakpoints(), u.limit_at_infinity())


def c_xy(u: Weight, w: Weight, p: float, *, z_max: float = Z_MAX,
         per_decade: int = DEFAULT_DENSITY) -> ConditionReport:
    """``sup_{1<1/x<y} ((1/(xy)) int_0^y u)^{1/2} (x**-p W(x) + int_x^inf w t**-p)^{-1/p}``.

    The inner supremum over ``y`` is ``z * sup_{y>=z} U(y)/y`` with ``z = 1/x``.
    """
    _check_pq(p)
    if p > 2:
        raise ValueError("hypothesis 0 < p <= 2 violated")
    params = {"p": p, "u": u.to_expr(), "w": w.to_expr()}

    def f(z):
        z = np.atleast_1d(z)
        return np.sqrt(z * _avg_beyond(u, z)) * hardy_denominator(1.0 / z, w, p) ** (-1.0 / p)

    return _report("cxy", params, sup_on_grid(f, 1.0, z_max, per_decade, extend="high", floor=1.0))


def nolevel_condition(u: Weight, w: Weight, p: float, q: float, *, z_max: float = Z_MAX,
                      per_decade: int = DEFAULT_DENSITY) -> ConditionReport:
    """``sup_{0<x<1} (int_0^{1/x} u)^{1/q} (x**-p W(x) + int_x^inf w t**-p)^{-1/p}``."""
    _check_pq(p, q)
    if not (p <= q and q >= 2):
        raise ValueError("hypotheses p <= q and q >= 2 violated")
    params = {"p": p, "q": q, "u": u.to_expr(), "w": w.to_expr()}

    def f(z):
        z = np.atleast_1d(z)
        return u.cumulative(z) ** (1.0 / q) * hardy_denominator(1.0 / z, w, p) ** (-1.0 / p)

    return _report("nolevel", params, sup_on_grid(f, 1.0, z_max, per_decade, extend="high", floor=1.0))


def bhc_condition(u: Weight, w: Weight, p: float, q: float, *, z_max: float = Z_MAX,
                  per_decade: int = DEFAULT_DENSITY) -> ConditionReport:
    """``sup_{0<x<1} x (int_0^{1/x} u)^{1/q} (int_0^x w)^{-1/p}``."""
    _check_pq(p, q)
    params = {"p": p, "q": q, "u": u.to_expr(), "w": w.to_expr()}

    def f(z):
        z = np.atleast_1d(z)
        Wx = np.asarray(w.cumulative(1.0 / z))
        with np.errstate(divide="ignore"):
            return np.where(Wx > 0, (1.0 / z) * u.cumulative(z) ** (1.0 / q)
                            * np.where(Wx > 0, Wx, 1.0) ** (-1.0 / p), np.inf)

    return _report("bhc", params, sup_on_grid(f, 1.0, z_max, per_decade, extend="high", floor=1.0))


def _ess_inf(w: Weight, x: float, per_decade: int) -> float:
    """Essential infimum of ``w`` on ``(0, x)``; zero if ``w`` has gaps there."""
    if not w.covers(0.0, x):
        return 0.0
    if any(t.lo < min(x, 1e-300) for t in w.terms if t.a > 0):
        return 0.0
    lo = 1e-12 * x
    grid = np.geomspace(lo, x, int(12 * per_decade) + 1)
    vals = w(grid[:-1] * (1 + 1e-12))
    return float(np.min(vals)) if vals.size else 0.0


def hardy_dual_condition(u: Weight, w: Weight, p: float, q: float, *, z_max: float = Z_MAX,
                         per_decade: int = DEFAULT_DENSITY) -> ConditionReport:
    """``sup_{0<x<1} (int_0^{1/x} u°)^{1/q} (int_0^x w^{1-p'})^{1/p'}``.

    At ``p = 1`` the second factor is the essential supremum of ``1/w`` on ``(0, x)``.
    """
    _check_pq(p, q)
    if not (p <= q and q >= 2):
        raise ValueError("hypotheses p <= q and q >= 2 violated")
    uo = _level_weight(u)
    params = {"p": p, "q": q, "u": u.to_expr(), "w": w.to_expr()}
    if p == 1:
        def second(x):
            m = _ess_inf(w, float(x), per_decade)
            return math.inf if m == 0 else 1.0 / m
    else:
        pc = p / (p - 1.0)
        try:
            wp = w.raised(1.0 - pc)
        except ValueError as exc:
            raise ValueError(f"{exc} (needed for w^(1-p'))") from None

        def second(x):
            if not w.covers(0.0, x):
                return math.inf
            return wp.cumulative(x) ** (1.0 / pc)

    def f(z):
        return uo.cumulative(z) ** (1.0 / q) * second(1.0 / z)

    return _report("hardy-dual", params,
                   sup_on_grid(f, 1.0, z_max, per_decade, extend="high", floor=1.0))


def llogl_condition(u: Weight, q: float, *, z_max: float = Z_MAX,
                    per_decade: int = DEFAULT_DENSITY) -> ConditionReport:
    """``sup_{z>1} z (1 + log z)**-q sup_{y>z} (1/y) int_0^y u``."""
    _check_pq(1.0, q)
    if q < 2:
        raise ValueError("hypothesis q >= 2 violated")
    params = {"q": q, "u": u.to_expr()}

    def f(z):
        z = np.atleast_1d(z)
        return z / (1.0 + np.log(z)) ** q * _avg_beyond(u, z)

    return _report("llogl", params, sup_on_grid(f, 1.0, z_max, per_decade, extend="high", floor=1.0))


# -- Lorentz-Zygmund indices -------------------------------------------------


def lz_admissible(r: float, p: float, alpha: float, s: float, q: float, beta: float) -> ConditionReport:
    """Necessary conditions for the Fourier map from ``L^{r,p}(log L)^alpha``
    into ``l^{s,q}(log l)^beta`` (``r`` and ``s`` may be ``inf``)."""
    params = {"r": r, "p": p, "alpha": alpha, "s": s, "q": q, "beta": beta}
    if not (0 < p < math.inf and 0 < q < math.inf and r > 0 and s > 0):
        raise ValueError("indices out of range: need p, q in (0, inf) and r, s in (0, inf]")
    nontrivial = math.isfinite(r) or alpha * p < -1
    if not nontrivial:
        return ConditionReport("lz", params, verdict="trivial", kind="rule",
                               reasons=("domain space is trivial: need r < inf or alpha*p < -1",))
    reasons = []
    ok1 = s > 2 or (s == 2 and beta <= 0)
    if not ok1:
        reasons.append("s>2, or s=2 and beta<=0: violated"
                       + (" (s=2 and beta<=0 violated)" if s == 2 else " (s<2)"))
    inv = (0.0 if math.isinf(r) else 1.0 / r) + (0.0 if math.isinf(s) else 1.0 / s)
    tie = math.isclose(inv, 1.0, rel_tol=1e-12, abs_tol=1e-15)
    ok2 = (inv < 1 and not tie) or (tie and beta <= alpha)
    if not ok2:
        reasons.append("1/r+1/s<1, or 1/r+1/s=1 and beta<=alpha: violated"
                       + (" (1/r+1/s=1 and beta<=alpha violated)" if tie else " (1/r+1/s>1)"))
    verdict = "pass" if ok1 and ok2 else "fail"
    return ConditionReport("lz", params, verdict=verdict, kind="rule", reasons=tuple(reasons))
