"""Fourier coefficients of modulated step functions on the circle.

A :class:`ModulatedStep` is ``g(x) = sum_i a_i e^{i theta_i} e^{2 pi i m_i x}``
on disjoint intervals ``[x0_i, x1_i)`` of ``[0, 1)``. Its coefficients
``g^(n) = int_0^1 e^{-2 pi i n x} g(x) dx`` are evaluated in closed form.
The module also builds the extremal test functions, checks the
rearrangement inequality with constant 8 and estimates Fourier inequality constants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .averaging import AveragingOp
from .stepfn import DecreasingStep, StepFunction, rearrange
from .weights import Weight

DEFAULT_N = 65536
JT_CONSTANT = 8.0
C1 = 183.0
C_ALL = 549.0
_MAX_FREQ = 2 ** 52  # integer frequencies stay exact in float64


# -- functions and coefficients ---------------------------------------------


@dataclass(frozen=True, eq=False)
class ModulatedStep:
    """Pieces are rows ``(x0, x1, amplitude, frequency, phase)``."""

    pieces: np.ndarray

    def __post_init__(self):
        p = np.array(self.pieces, dtype=float).reshape(-1, 5)
        order = np.argsort(p[:, 0], kind="stable")
        p = p[order]
        x0, x1, amp, freq = p[:, 0], p[:, 1], p[:, 2], p[:, 3]
        if np.any(x0 < 0) or np.any(x1 > 1.0 + 1e-15) or np.any(x1 <= x0):
            raise ValueError("pieces must be non-empty intervals inside [0, 1)")
        if np.any(x0[1:] < x1[:-1] - 1e-15):
            raise ValueError("pieces must be pairwise disjoint")
        if np.any(amp < 0) or not np.all(np.isfinite(p)):
            raise ValueError("amplitudes must be finite and non-negative")
        if np.any(freq != np.round(freq)) or np.any(np.abs(freq) > _MAX_FREQ):
            raise ValueError("frequencies must be integers below 2**52")
        p.setflags(write=False)
        object.__setattr__(self, "pieces", p)

    @classmethod
    def indicator(cls, a: float, b: float) -> "ModulatedStep":
        return cls([[a, b, 1.0, 0.0, 0.0]])

    @classmethod
    def from_json(cls, data) -> "ModulatedStep":
        return cls([[q["x0"], q["x1"], q["amp"], q["freq"], q.get("phase", 0.0)]
                    for q in data["pieces"]])

    def to_json(self) -> dict:
        return {"pieces": [{"x0": r[0], "x1": r[1], "amp": r[2], "freq": int(r[3]), "phase": r[4]}
                           for r in self.pieces.tolist()]}

    @property
    def carriers(self) -> np.ndarray:
        return np.unique(self.pieces[:, 3].astype(np.int64))

    @property
    def l1(self) -> float:
        return float(np.sum(self.pieces[:, 2] * (self.pieces[:, 1] - self.pieces[:, 0])))

    @property
    def l2sq(self) -> float:
        return float(np.sum(self.pieces[:, 2] ** 2 * (self.pieces[:, 1] - self.pieces[:, 0])))

    def modulus(self) -> StepFunction:
        """``|g|`` as a step function on ``[0, 1]``."""
        pts = np.unique(np.concatenate((self.pieces[:, :2].ravel(), [1.0])))
        pts = pts[pts > 0]
        vals = np.zeros(pts.size)
        left = np.concatenate(([0.0], pts[:-1]))
        for x0, x1, amp, _, _ in self.pieces:
            vals[(left >= x0) & (pts <= x1)] = amp
        return StepFunction(pts, vals, domain="unit")

    def translated(self, X: float) -> "ModulatedStep":
        """``x -> g(x - X)``."""
        p = self.pieces.copy()
        p[:, :2] += X
        p[:, 4] -= 2 * math.pi * ((p[:, 3] * X) % 1.0)
        return ModulatedStep(p)

    def modulated(self, M: int) -> "ModulatedStep":
        """``x -> e^{2 pi i M x} g(x)``."""
        p = self.pieces.copy()
        p[:, 3] += M
        return ModulatedStep(p)

    def coefficient(self, n) -> np.ndarray:
        """Exact ``g^(n)`` for integer ``n`` (array-valued)."""
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape, dtype=complex)
        for x0, x1, amp, m, th in self.pieces:
            k = (n - np.int64(m)).astype(float)
            out += (amp * (x1 - x0) * np.sinc(k * (x1 - x0))
                    * np.exp(1j * (th - math.pi * np.fmod(k * (x0 + x1), 2.0))))
        return out

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for x0, x1, amp, m, th in self.pieces:
            inside = (x >= x0) & (x < x1)
            out = np.where(inside, amp * np.exp(1j * (th + 2 * math.pi * m * x)), out)
        return out


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """``g^(n)`` on the union of the windows ``|n - m| <= N`` around every
    carrier ``m``; every omitted coefficient is at most ``tail_bound``."""

    N: int
    n: np.ndarray
    values: np.ndarray
    tail_bound: float

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)

    def to_json(self) -> dict:
        return {"N": self.N, "tail_bound": self.tail_bound, "n": self.n.tolist(),
                "re": self.values.real.tolist(), "im": self.values.imag.tolist()}


def truncation_bound(g: ModulatedStep, N: int) -> float:
    """Bound on ``|g^(n)|`` when ``|n - m| > N`` for every carrier ``m``."""
    lens = g.pieces[:, 1] - g.pieces[:, 0]
    return float(np.sum(g.pieces[:, 2] * np.minimum(lens, 1.0 / (math.pi * (N + 1)))))


def coefficients(g: ModulatedStep, N: int = DEFAULT_N) -> CoefficientTable:
    if N < 1:
        raise ValueError("N must be at least 1")
    idx = []
    lo_prev = hi_prev = None
    for m in g.carriers.tolist():
        lo, hi = m - N, m + N
        if hi_prev is not None and lo <= hi_prev + 1:
            hi_prev = hi
            continue
        if hi_prev is not None:
            idx.append(np.arange(lo_prev, hi_prev + 1, dtype=np.int64))
        lo_prev, hi_prev = lo, hi
    idx.append(np.arange(lo_prev, hi_prev + 1, dtype=np.int64))
    n = np.concatenate(idx)
    return CoefficientTable(N, n, g.coefficient(n), truncation_bound(g, N))


@dataclass(frozen=True, eq=False)
class CoefficientStar:
    """Decreasing rearrangement of the tabulated ``|g^(n)|``.

    ``step`` is a pointwise lower bound for the true ``g^*``; the two agree
    wherever ``step`` is at least ``tail_bound``, and ``g^*`` never exceeds
    ``max(step, tail_bound)``.
    """

    step: DecreasingStep
    tail_bound: float

    @property
    def values(self) -> np.ndarray:
        return self.step.values

    def __call__(self, y):
        return self.step(y)

    def upper(self, y):
        return np.maximum(self.step(y), self.tail_bound)

    def exact_up_to(self) -> int:
        """Number of leading cells known exactly."""
        return int(np.searchsorted(-self.values, -self.tail_bound, side="right"))


def coeff_rearrangement(table: CoefficientTable) -> CoefficientStar:
    """Magnitudes sorted in decreasing order, one per cell ``[j, j+1)``."""
    mags = np.sort(table.magnitudes)[::-1]
    mags = mags[mags > 0]
    step = DecreasingStep(np.arange(1, mags.size + 1, dtype=float), mags)
    return CoefficientStar(step, table.tail_bound)


# -- rearrangement inequality ----------------------------------------------


def _inv_sq_integral(a, b, s0, s1):
    """``int_{s0}^{s1} ((a + b s)/s)**2 ds``, with ``a = 0`` allowed at ``s0 = 0``."""
    a, b, s0, s1 = map(np.asarray, (a, b, s0, s1))
    with np.errstate(divide="ignore", invalid="ignore"):
        head = np.where(a != 0, a * a * (1.0 / s0 - 1.0 / s1) + 2 * a * b * np.log(s1 / s0), 0.0)
    return head + b * b * (s1 - s0)


def _hardy_sq(values, edges, z):
    """``int_0^z ((1/t) int_0^t h)**2 dt`` for a step ``h``, vectorised in ``z``."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    cum = np.concatenate(([0.0], np.cumsum(values * np.diff(edges))))
    a = cum[:-1] - values * edges[:-1]
    full = np.concatenate(([0.0], np.cumsum(_inv_sq_integral(a, values, edges[:-1], edges[1:]))))
    k = np.searchsorted(edges, z, side="right") - 1
    out = np.empty(z.shape)
    inside = k < values.size
    ki = k[inside]
    out[inside] = full[ki] + _inv_sq_integral(a[ki], values[ki], edges[ki], z[inside])
    out[~inside] = full[-1] + cum[-1] ** 2 * (1.0 / edges[-1] - 1.0 / z[~inside])
    return out


def jt_rhs(f: ModulatedStep, z) -> np.ndarray:
    """``int_0^z (int_0^{1/t} f^*)**2 dt``."""
    fs = rearrange(f.modulus())
    z = np.atleast_1d(np.asarray(z, dtype=float))
    e = fs.edges
    G = np.concatenate(([0.0], np.cumsum(fs.values * np.diff(e))))
    # substitute s = 1/t: int_{1/z}^inf G(s)**2 s**-2 ds, G(s) = c + v s on a cell
    c = G[:-1] - fs.values * e[:-1]
    cell = _inv_sq_integral(c, fs.values, e[:-1], e[1:])
    suffix = np.concatenate((np.cumsum(cell[::-1])[::-1], [0.0]))
    last = G[-1] ** 2 / e[-1]
    s = 1.0 / z
    out = np.empty(z.shape)
    beyond = s >= e[-1]
    out[beyond] = G[-1] ** 2 / s[beyond]
    k = np.searchsorted(e, s[~beyond], side="right") - 1
    out[~beyond] = (suffix[k + 1]
                    + _inv_sq_integral(c[k], fs.values[k], s[~beyond], e[k + 1]) + last)
    return out


@dataclass(frozen=True)
class JTReport:
    z: list
    lhs_lower: list
    lhs_upper: list
    rhs: list
    max_ratio: float
    passed: bool
    tail_bound: float
    N: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def jt_check(f: ModulatedStep, z_grid, N: int = DEFAULT_N) -> JTReport:
    """Check ``int_0^z (g^**)**2 <= 8 int_0^z (int_0^{1/t} f^*)**2`` on ``z_grid``.

    The left side is bracketed using the tabulated coefficients: the lower
    value drops omitted coefficients, the upper one raises every value to at
    least the truncation bound. The ratio uses the upper value.
    """
    z = np.asarray(sorted(z_grid), dtype=float)
    star = coeff_rearrangement(coefficients(f, N))
    vals = star.values
    edges = np.arange(vals.size + 1, dtype=float)
    lo = _hardy_sq(vals, edges, z)
    top = max(int(math.ceil(z.max())), vals.size) + 1
    up_vals = np.maximum(np.concatenate((vals, np.zeros(top - vals.size))), star.tail_bound)
    hi = _hardy_sq(up_vals, np.arange(top + 1, dtype=float), z)
    rhs = jt_rhs(f, z)
    ratio = float(np.max(hi / rhs))
    return JTReport(z.tolist(), lo.tolist(), hi.tolist(), rhs.tolist(), ratio,
                    ratio <= JT_CONSTANT, star.tail_bound, N)


def random_modulated(rng: np.random.Generator, max_pieces: int = 6,
                     max_freq: int = 64) -> ModulatedStep:
    k = int(rng.integers(1, max_pieces + 1))
    cuts = np.sort(rng.uniform(0, 1, 2 * k))
    rows = []
    for i in range(k):
        x0, x1 = cuts[2 * i], cuts[2 * i + 1]
        if x1 > x0:
            rows.append([x0, x1, rng.uniform(0.1, 2.0), int(rng.integers(-max_freq, max_freq + 1)),
                         rng.uniform(0, 2 * math.pi)])
    return ModulatedStep(rows or [[0.0, 0.5, 1.0, 0.0, 0.0]])


# -- test functions ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Certificate:
    """Outcome of checking a lower bound on ``g^*`` at the integers ``0..y_max``.

    The tabulated rearrangement never exceeds the true one, so a bound it
    meets is proved. A miss is a genuine failure only where the table is
    exact (value at least the truncation bound); elsewhere it is reported as
    unverifiable. ``y_checked`` ends the leading run of proved points.
    """

    passed: bool
    y_checked: int
    worst_margin: float
    failures: int
    unverifiable: int
    notes: tuple = ()

    def to_json(self) -> dict:
        return {"passed": self.passed, "y_checked": self.y_checked,
                "worst_margin": self.worst_margin, "failures": self.failures,
                "unverifiable": self.unverifiable, "notes": list(self.notes)}


def _certify(star: CoefficientStar, target, y_max: int, rtol: float = 1e-12) -> Certificate:
    y = np.arange(0, y_max + 1)
    tgt = np.asarray(target(y.astype(float)), dtype=float)
    have = np.zeros(y.size)
    inside = y < star.values.size
    have[inside] = star.values[y[inside]]
    ok = (tgt <= 0) | (have >= tgt * (1 - rtol))
    exact = have >= star.tail_bound
    fails = int(np.sum(~ok & exact))
    unknown = int(np.sum(~ok & ~exact))
    run = y_max if ok.all() else int(np.argmin(ok)) - 1
    pos = tgt > 0
    worst = float(np.min(have[pos & ok] / tgt[pos & ok] - 1.0)) if np.any(pos & ok) else math.inf
    notes = () if run == y_max else (f"unverifiable at this N beyond y={run}",)
    return Certificate(fails == 0 and run >= 0, run, worst, fails, unknown, notes)


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A test function with the lower bound claimed for its coefficients."""

    g: ModulatedStep
    bound: object  # y -> claimed lower bound for g^*(y)
    eps: float
    params: dict = field(default_factory=dict)

    def certify(self, N: int = DEFAULT_N, y_max: int | None = None) -> Certificate:
        star = coeff_rearrangement(coefficients(self.g, N))
        return _certify(star, self.bound, N if y_max is None else y_max)


def basic_bound(z: float):
    return lambda y: 1.0 / (3 * math.pi * np.asarray(y) + 9 * math.pi * z)


def testfun_basic(z: float) -> TestFunction:
    """``chi_[0,1/z)`` with ``f^*(y) >= 1/(3 pi y + 9 pi z)``."""
    if z < 3:
        raise ValueError("hypothesis z >= 3 violated")
    return TestFunction(ModulatedStep.indicator(0.0, 1.0 / z), basic_bound(z), 0.0, {"z": z})


def _star_of(g: ModulatedStep, N: int) -> CoefficientStar:
    return coeff_rearrangement(coefficients(g, N))


def testfun_dilated(k: int, z: float, eps: float) -> TestFunction:
    """``sum_j e^{2 pi i j M x} chi_[0,1/(kz))(x - j/(kz))`` with ``M = ceil(2k/(pi eps))``.

    ``|g| = chi_[0,1/z)``; claimed bound ``g^*(y) >= f^*(y/k) - eps`` for
    ``f = chi_[0,1/(kz))``. The bound callable evaluates ``f^*`` from its own
    table, so it is exact only where that table is.
    """
    k = int(k)
    if k < 1 or z <= 1 or not eps > 0:
        raise ValueError("need k >= 1, z > 1 and eps > 0")
    M = 0 if k == 1 else int(math.ceil(2 * k / (math.pi * eps)))
    if (k - 1) * M > _MAX_FREQ:
        raise ValueError("eps too small: frequencies overflow")
    L = 1.0 / (k * z)
    rows = [[j * L, (j + 1) * L, 1.0, j * M, 0.0] for j in range(k)]
    rows[-1][1] = 1.0 / z
    g = ModulatedStep(rows)
    fstar = _star_of(ModulatedStep.indicator(0.0, L), DEFAULT_N)

    def bound(y):
        return np.asarray(fstar.upper(np.asarray(y) / k)) - eps

    return TestFunction(g, bound, eps, {"k": k, "z": z, "M": M})


def testfun_combined(z: float, r: float, eps: float) -> TestFunction:
    """``|g| = chi_[0,1/z)`` and ``g^*(y) >= 1/(3 pi y/r + 9 pi (r+1) z) - eps``."""
    if z < 3 or not r > 0:
        raise ValueError("need z >= 3 and r > 0")
    k = max(1, int(math.ceil(r - 1e-12)))
    base = testfun_dilated(k, z, eps)

    def bound(y):
        return 1.0 / (3 * math.pi * np.asarray(y) / r + 9 * math.pi * (r + 1) * z) - eps

    return TestFunction(base.g, bound, eps, {**base.params, "r": r})


def _span(g: ModulatedStep):
    c = g.carriers
    return int(c.min()), int(c.max()), int(c.size)


def assemble(parts: list[ModulatedStep], eps: float) -> tuple[ModulatedStep, list[int], list[float]]:
    """Place components side by side in ``[0, 1)`` and shift their spectra apart.

    Component ``j`` (1-based) is translated by ``X_j`` (the total length of the
    earlier components) and modulated by ``M_j``. With ``k_j`` carriers its
    exclusion zone reaches ``h_j = k_j 2**j/(pi eps)`` beyond its extreme
    carriers; consecutive zones are made disjoint with a margin of one.
    """
    out, shifts, offsets = [], [], []
    X = 0.0
    prev_top = None
    for j, part in enumerate(parts, start=1):
        lo, hi, k = _span(part)
        h = k * 2.0 ** j / (math.pi * eps)
        if prev_top is None:
            M = -lo
        else:
            M = int(math.ceil(prev_top + h + 1 - lo))
        if abs(hi + M) + h > _MAX_FREQ:
            raise ValueError("eps too small: frequencies overflow")
        length = float(np.max(part.pieces[:, 1]))
        out.append(part.translated(X).modulated(M).pieces)
        shifts.append(M)
        offsets.append(X)
        X += length
        prev_top = hi + M + h
    if X > 1.0 + 1e-12:
        raise ValueError("total length of the components exceeds 1")
    return ModulatedStep(np.vstack(out)), shifts, offsets


def testfun_assembled(lengths, eps: float) -> TestFunction:
    """``g = sum_j e^{2 pi i M_j x} chi_[0,p_j)(x - X_j)``: ``|g| = chi_[0,p_0)``
    with ``p_0 = sum p_j`` and ``g^* >= f_j^* - eps`` for each ``f_j = chi_[0,p_j)``."""
    lengths = [float(p) for p in lengths if p > 0]
    if not lengths or sum(lengths) > 1.0 + 1e-12:
        raise ValueError("need positive lengths with total at most 1")
    if not eps > 0:
        raise ValueError("eps must be positive")
    parts = [ModulatedStep.indicator(0.0, p) for p in lengths]
    g, shifts, offsets = assemble(parts, eps)
    stars = [_star_of(p, DEFAULT_N) for p in parts]

    def bound(y):
        return np.max([s.upper(y) for s in stars], axis=0) - eps

    return TestFunction(g, bound, eps, {"lengths": lengths, "M": shifts, "X": offsets})


def averaged_omega(A: AveragingOp, z: float, y) -> np.ndarray:
    """Right-continuous ``(A omega_z)(y)`` with ``omega_z = min(z**-2, t**-2)``."""
    y = np.asarray(y, dtype=float)

    def Om(t):
        t = np.asarray(t, dtype=float)
        return np.where(t <= z, t / z ** 2, 2.0 / z - 1.0 / np.maximum(t, z))

    with np.errstate(divide="ignore"):
        out = np.minimum(z ** -2.0, 1.0 / y ** 2)
    for a, b in A.intervals:
        mean = (Om(b) - Om(a)) / (b - a)
        out = np.where((y >= a) & (y < b), mean, out)
    return out


def testfun_full(z: float, A: AveragingOp, eps: float | None = None,
                 y_max: int = DEFAULT_N) -> TestFunction:
    """Test function with ``f^* <= chi_[0,1/z)`` and
    ``(A omega_z)**(1/2) <= 549 (f^^* + eps)``.

    Components: ``chi_[0,1/(4z))``; a dilated piece of length ``3/(8z)``
    when ``z`` lies inside an interval ``(a_0, b_0)`` of ``A``; one dilated
    piece of length ``3/(16 a_j)`` for each interval with ``z <= a_j <= b_j/2``.
    For ``1 <= z < 3`` everything is built at ``z = 3``.
    """
    if z < 1:
        raise ValueError("hypothesis z >= 1 violated")
    ze = max(float(z), 3.0)
    if eps is None:
        eps = 1e-3 * math.sqrt(float(averaged_omega(A, z, y_max))) / C_ALL
    half = eps / 2
    parts = [ModulatedStep.indicator(0.0, 1.0 / (4 * ze))]
    roles = [{"piece": "f0", "length": 1.0 / (4 * ze)}]
    home = [(a, b) for a, b in A.intervals if a < ze < b]
    if home:
        a0, b0 = home[0]
        tf = testfun_combined(8 * ze / 3, math.sqrt(b0 / (8 * ze)), half)
        parts.append(tf.g)
        roles.append({"piece": "g0", "interval": [a0, b0], "k": tf.params["k"],
                      "length": 3.0 / (8 * ze)})
    for a, b in A.intervals:
        if (a, b) not in home and ze <= a <= b / 2:
            tf = testfun_combined(16 * a / 3, math.sqrt(b / (16 * a)), half)
            parts.append(tf.g)
            roles.append({"piece": "gj", "interval": [a, b], "k": tf.params["k"],
                          "length": 3.0 / (16 * a)})
    total = sum(r["length"] for r in roles)
    if total > 1.0 / ze * (1 + 1e-12):
        raise AssertionError("component lengths exceed 1/z")
    g, shifts, _ = assemble(parts, half)

    def bound(y):
        return np.sqrt(averaged_omega(A, z, y)) / C_ALL - eps

    return TestFunction(g, bound, eps, {"z": z, "z_eff": ze, "averaging": A.to_text(),
                                        "components": roles, "M": shifts, "length": total})


# -- inequality verifier -----------------------------------------------------


def parallel_map(fn, items, workers: int = 1) -> list:
    """Order-preserving map, threaded when ``workers > 1``."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))

ADVERSARIAL_Z = tuple(2.0 ** k for k in range(2, 9))


def adversarial_families(z: float, depth: int = 5) -> list[AveragingOp]:
    """Identity, an interval around ``z``, dyadic chains above ``z`` and both."""
    chain = tuple((z * 2.0 ** i, z * 2.0 ** (i + 1)) for i in range(1, depth + 1))
    return [AveragingOp(()),
            AveragingOp(((z / 2, 2 * z),)),
            AveragingOp(((0.0, 2 * z),)),
            AveragingOp(chain),
            AveragingOp(((z / 2, 2 * z),) + chain),
            AveragingOp(((z, 4 * z),)),
            AveragingOp(((z / 2, 16 * z),))]


def adversarial_suite(z_values=ADVERSARIAL_Z, families=adversarial_families):
    out = []
    for z in z_values:
        for A in families(z):
            tf = testfun_full(z, A)
            out.append((f"full z={z:g} A={A.to_text()}", tf.g, {"z": z, "averaging": A.to_text()}))
    return out


def random_suite(count: int = 100, seed: int = 0):
    rng = np.random.default_rng(seed)
    return [(f"random #{i}", random_modulated(rng), {"seed": seed, "index": i})
            for i in range(count)]


def parse_suite(text: str, seed: int = 0):
    """``"random:100+adversarial"`` style specifications."""
    out = []
    for part in text.split("+"):
        name, _, arg = part.strip().partition(":")
        if name == "random":
            out += random_suite(int(arg) if arg else 100, seed)
        elif name == "adversarial":
            zs = tuple(float(v) for v in arg.split(",")) if arg else ADVERSARIAL_Z
            out += adversarial_suite(zs)
        else:
            raise ValueError(f"unknown suite {name!r}; use random[:count] or adversarial[:z1,z2,...]")
    return out


def _lhs(star: CoefficientStar, q: float, u: Weight, kind: str) -> float:
    from .norms import gamma_norm, lambda_norm
    f = star.step
    return (gamma_norm(f, q, u) if kind == "gamma" else lambda_norm(f, q, u)).value


def _rhs(g: ModulatedStep, p: float, w: Weight, kind: str) -> float:
    from .norms import gamma_norm, lambda_norm
    f = g.modulus()
    return (gamma_norm(f, p, w) if kind == "gamma" else lambda_norm(f, p, w)).value


@dataclass(frozen=True)
class VerifyReport:
    params: dict
    ratio: float
    argmax: str
    ratios: list
    condition: dict
    ceiling: float | None
    floor: float | None
    verdict: str  # bounded | unbounded | ceiling-violated | no-theory

    def to_json(self) -> dict:
        enc = lambda x: "infinite" if isinstance(x, float) and math.isinf(x) else x  # noqa: E731
        return {"params": self.params, "ratio": self.ratio, "argmax": self.argmax,
                "ceiling": enc(self.ceiling), "floor": enc(self.floor),
                "floor_certified": None if self.floor is None else bool(self.ratio >= self.floor),
                "floor_slack": None if not self.floor else enc(self.ratio / self.floor),
                "verdict": self.verdict, "condition": self.condition,
                "ratios": [{"label": lbl, "ratio": r, **meta} for lbl, r, meta in self.ratios]}


def verify_inequality(u: Weight, w: Weight, p: float, q: float, which: str = "gamma-gamma",
                      suite=None, N: int = DEFAULT_N, workers: int = 1) -> VerifyReport:
    """Empirical ``max ||g^||_lhs / ||g||_rhs`` over a suite, against theory.

    The ceiling is ``8 C_xy`` when ``q = 2`` and ``4 sqrt(C_omega)`` when
    ``q > 2`` (both need ``p <= 2``); the floor is the matching lower
    constant divided by 549. Ratios use the tabulated coefficients, so each
    one is a lower bound for the exact ratio.
    """
    from .conditions import c_omega, c_xy
    lhs_kind, _, rhs_kind = which.partition("-")
    if lhs_kind not in ("gamma", "lambda") or rhs_kind not in ("gamma", "lambda"):
        raise ValueError("which must be gamma-gamma, gamma-lambda or lambda-lambda")
    suite = suite if suite is not None else parse_suite("random:100+adversarial")

    def one(item):
        label, g, meta = item
        star = coeff_rearrangement(coefficients(g, N))
        den = _rhs(g, p, w, rhs_kind)
        num = _lhs(star, q, u, lhs_kind)
        return label, float(num / den) if den > 0 else math.inf, meta

    ratios = parallel_map(one, suite, workers)
    best = max(ratios, key=lambda r: r[1])
    ceiling = floor = None
    cond = {}
    verdict = "no-theory"
    if 0 < p <= 2 and q >= 2:
        if q == 2:
            rep = c_xy(u, w, p)
            const_hi, const_lo = rep.value, rep.value
            ceiling_factor = 8.0
        else:
            rep = c_omega(u, w, p, q)
            const_hi, const_lo = math.sqrt(rep.upper), math.sqrt(rep.lower)
            ceiling_factor = 4.0
        cond = rep.to_json()
        floor = const_lo / C_ALL
        if rep.verdict == "infinite":
            verdict = "unbounded"
            ceiling = math.inf
        elif rhs_kind == "gamma":
            ceiling = ceiling_factor * const_hi
            verdict = "bounded" if best[1] <= ceiling * (1 + 1e-6) else "ceiling-violated"
    params = {"p": p, "q": q, "u": u.to_expr(), "w": w.to_expr(), "which": which, "N": N,
              "suite_size": len(suite)}
    return VerifyReport(params, best[1], best[0], ratios, cond, ceiling, floor, verdict)
