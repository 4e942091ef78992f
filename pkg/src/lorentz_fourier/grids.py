"""Suprema over geometric parameter grids with divergence detection."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_T_MIN = 1e-6
DEFAULT_T_MAX = 1e6
DEFAULT_DENSITY = 64
DIVERGENCE_THRESHOLD = 1e12


@dataclass(frozen=True)
class GridSup:
    value: float
    argmax: float
    verdict: str  # "finite" | "infinite" | "undecided"
    lo: float
    hi: float
    per_decade: int
    points: int
    notes: tuple = field(default_factory=tuple)

    def meta(self) -> dict:
        return {"t_min": self.lo, "t_max": self.hi, "per_decade": self.per_decade,
                "points": self.points, "argmax": self.argmax, "notes": list(self.notes)}


def geometric_grid(lo: float, hi: float, per_decade: int = DEFAULT_DENSITY) -> np.ndarray:
    if not 0 < lo < hi:
        raise ValueError("grid needs 0 < lo < hi")
    if per_decade < 8:
        raise ValueError("grid density must be at least 8 points per decade")
    n = int(math.ceil(math.log10(hi / lo) * per_decade - 1e-9)) + 1
    return np.geomspace(lo, hi, n)


def _eval(objective, t: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(objective(t), dtype=float)
        if vals.shape == t.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([float(objective(float(x))) for x in t])


def _rising(vals: np.ndarray, tol: float = 1e-6) -> bool:
    """Monotone rise toward the end of ``vals`` with net relative gain above ``tol``."""
    if vals.size < 2 or not np.all(np.isfinite(vals)):
        return False
    if np.any(np.diff(vals) < -1e-12 * np.abs(vals[1:])):
        return False
    return bool(vals[-1] > vals[0] * (1 + tol) and vals[-1] > 0)


def sup_on_grid(objective, lo: float = DEFAULT_T_MIN, hi: float = DEFAULT_T_MAX,
                per_decade: int = DEFAULT_DENSITY, extend: str | None = "both",
                threshold: float = DIVERGENCE_THRESHOLD, max_extra_decades: int = 40,
                floor: float = 0.0, ceiling: float = math.inf) -> GridSup:
    """Supremum of ``objective`` over a geometric grid on ``[lo, hi]``.

    When the objective is still rising over the last decade at an edge
    listed in ``extend`` ("low", "high", "both" or None), the grid is pushed
    out one decade at a time (never past ``floor``/``ceiling``). A value
    above ``threshold`` while rising gives the verdict "infinite"; a rise
    that is still going when the extension budget is spent gives
    "undecided".
    """
    t = geometric_grid(lo, hi, per_decade)
    vals = _eval(objective, t)
    notes = []
    verdict = "finite"
    if np.any(np.isposinf(vals)):
        i = int(np.argmax(np.isposinf(vals)))
        return GridSup(math.inf, float(t[i]), "infinite", float(t[0]), float(t[-1]),
                       per_decade, int(t.size), ("objective is infinite on the grid",))
    sides = {"both": ("low", "high"), "low": ("low",), "high": ("high",), None: ()}[extend]
    for side in sides:
        used = 0
        while True:
            seg = vals[-per_decade - 1:] if side == "high" else vals[per_decade::-1]
            if not _rising(seg):
                break
            edge = seg[-1]
            if edge > threshold:
                verdict = "infinite"
                notes.append(f"monotone rise past {threshold:g} at the {side} edge")
                break
            if used >= max_extra_decades:
                verdict = "undecided"
                notes.append(f"still rising at the {side} edge after {used} extra decades")
                break
            if side == "high":
                new_hi = t[-1] * 10.0
                if new_hi > ceiling:
                    break
                ext = geometric_grid(t[-1], new_hi, per_decade)[1:]
                t = np.concatenate((t, ext))
                vals = np.concatenate((vals, _eval(objective, ext)))
            else:
                new_lo = t[0] / 10.0
                if new_lo < floor or new_lo <= 0:
                    break
                ext = geometric_grid(new_lo, t[0], per_decade)[:-1]
                t = np.concatenate((ext, t))
                vals = np.concatenate((_eval(objective, ext), vals))
            used += 1
            if np.any(np.isposinf(vals)):
                verdict = "infinite"
                notes.append("objective became infinite")
                break
        if used:
            notes.append(f"extended {used} decade(s) at the {side} edge")
        if verdict != "finite":
            break
    finite = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(finite))
    value = math.inf if verdict == "infinite" else float(finite[i])
    return GridSup(value, float(t[i]), verdict, float(t[0]), float(t[-1]), per_decade,
                   int(t.size), tuple(notes))


def sup_average_beyond(cumulative, z, breakpoints=(), limit: float = 0.0,
                       y_max_factor: float = 1e8, per_decade: int = DEFAULT_DENSITY):
    """``sup_{y >= z} U(y)/y`` for each ``z`` (vectorised).

    ``cumulative`` evaluates ``U``; ``limit`` is ``lim U(y)/y`` at infinity.
    The supremum is taken over the merged grid of all ``z``, the supplied
    ``breakpoints`` (where ``U/y`` can peak) and a geometric grid reaching
    ``y_max_factor * max(z)``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    top = float(z.max()) * y_max_factor
    bps = np.asarray([b for b in breakpoints if b > 0], dtype=float)
    grid = np.unique(np.concatenate((z, bps[(bps >= z.min()) & (bps <= top)],
                                     geometric_grid(float(z.min()), top, per_decade))))
    ratio = np.asarray(cumulative(grid), dtype=float) / grid
    suffix = np.maximum.accumulate(ratio[::-1])[::-1]
    idx = np.searchsorted(grid, z, side="left")
    return np.maximum(suffix[idx], limit)
