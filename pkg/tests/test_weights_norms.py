import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from lorentz_fourier.averaging import AveragingOp, averaged_norm
from lorentz_fourier.norms import (NormValue, averaging_family, b1inf_constant, bp_constant, gamma_norm,
                                   lambda_norm, theta_norm)
from lorentz_fourier.stepfn import DecreasingStep, StepFunction, omega, rearrange
from lorentz_fourier.weights import Weight, WeightSyntaxError, dual_weight, parse_weight

from conftest import step_functions, step_weights


# -- expression language ----------------------------------------------------


def test_parse_examples():
    w = parse_weight("1*t^0 on(0,1)")
    assert w == Weight.indicator(0.0, 1.0)
    w = parse_weight("t^-0.5*L^2")
    assert w(math.e) == pytest.approx(math.e ** -0.5 * 4)
    w = parse_weight("t^0 on(0,1) + t^-1 on(1,inf)")
    assert len(w.terms) == 2 and w(4.0) == pytest.approx(0.25)


@pytest.mark.parametrize("text,pos", [("t^", 2), ("2*t^1 on(0 1)", 11), ("t^0 junk", 4), ("-1*t^0", 0)])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(WeightSyntaxError) as err:
        parse_weight(text)
    assert err.value.position == pos


def test_expression_roundtrip():
    w = parse_weight("2.5*t^-1.5*L^2 on(1,inf) + t^0 on(0,1)")
    assert parse_weight(w.to_expr()) == w
    assert Weight.from_json(w.to_json()) == w


def test_dual_weight():
    v = dual_weight(Weight.indicator(0.0, 1.0), 1.0)
    assert v == Weight.power(-1.0, lo=1.0)
    assert dual_weight(Weight.power(-0.5), 1.5) == Weight.power(0.0)
    w = parse_weight("t^0.3*L^1 on(0.5,4) + 2*t^-2 on(4,inf)")
    back = dual_weight(dual_weight(w, 1.7), 1.7)
    for t0, t1 in zip(back.terms, w.terms):
        assert (t0.c, t0.b, t0.lo, t0.hi) == (t1.c, t1.b, t1.lo, t1.hi)
        assert t0.a == pytest.approx(t1.a, abs=1e-14)


# -- B classes --------------------------------------------------------------


@pytest.mark.parametrize("p", [1.25, 1.5, 1.8])
def test_bp_power_weight_is_constant(p):
    res = bp_constant(Weight.power(p - 2), p)
    assert res.value == pytest.approx(p - 1, rel=1e-9)
    assert res.kind == "lower-bound"


def test_bp_indicator_and_divergent():
    res = bp_constant(Weight.indicator(0.0, 1.0), 2.0)
    assert res.value == pytest.approx(1.0, abs=1e-5)  # sup of 1 - t on the grid
    assert res.value <= 1.0
    assert bp_constant(Weight.power(1.0), 2.0).infinite


def test_b1inf_examples():
    assert b1inf_constant(Weight.power(-0.5)).value <= 1 + 1e-9
    assert b1inf_constant(Weight.power(8.0, hi=1e3)).infinite
    # W(x) = 0 for x < 1 while later averages are positive
    assert b1inf_constant(Weight.indicator(1.0, 2.0)).infinite
    # W(x)/x is 1 up to x = 1 and peaks at 3/2 when y = 2
    assert b1inf_constant(Weight.indicator(0.0, 2.0) + Weight.indicator(1.0, 2.0)).value == pytest.approx(1.5)


# -- norms ------------------------------------------------------------------


def test_lambda_examples():
    chi = Weight.indicator(0.0, 1.0)
    assert lambda_norm(StepFunction([0.5], [1.0]), 1, chi).value == pytest.approx(0.5)
    N = 50
    seq = 1.0 / np.arange(1, N + 1)
    assert lambda_norm(seq, 1, Weight.power(0.0)).value == pytest.approx(seq.sum())


def test_gamma_examples():
    chi = StepFunction([1.0], [1.0])
    assert gamma_norm(chi, 1, Weight.indicator(0.0, 1.0)).value == pytest.approx(1.0)
    # int (f**)^2 = 1 + int_1^inf t^-2 = 2
    assert gamma_norm(chi, 2, Weight.power(0.0)).value == pytest.approx(math.sqrt(2.0))


def test_gamma_matches_quadrature():
    rng = np.random.default_rng(0)
    w = parse_weight("t^-0.5 on(0,3) + t^-2 on(3,inf)")
    for _ in range(10):
        f = rearrange(StepFunction(np.cumsum(rng.uniform(0.1, 1, 4)), rng.exponential(1, 4)))
        p = float(rng.choice([1.0, 2.0, 3.0]))
        ff = lambda t: (f.cumulative(t) / t) ** p * w(t)  # noqa: E731
        pts = sorted(set(f.breakpoints.tolist()) | {3.0})
        ref = sum(integrate.quad(ff, a, b, limit=200)[0] for a, b in zip([0.0] + pts, pts + [np.inf]))
        assert gamma_norm(f, p, w).value ** p == pytest.approx(ref, rel=1e-8)


def test_theta_examples():
    d = Weight.power(-0.5)
    h = DecreasingStep([1.0, 2.0], [2.0, 1.0])
    assert theta_norm(h, 1, d).value == pytest.approx(lambda_norm(h, 1, d).value)
    th = theta_norm(omega(1.0), 1, Weight.indicator(1.0, 2.0))
    assert th.kind == "exact"
    assert th.value == pytest.approx(0.5 * (1.0 + 0.5))
    with pytest.raises(ValueError, match="outside implemented regime"):
        theta_norm(h, 0.5, d)


def test_norm_value_invariants():
    with pytest.raises(ValueError):
        NormValue(1.0, "bounds", 2.0, 1.0)
    assert NormValue(math.inf).to_json()["value"] == "infinite"


def test_theta1_random_family_below_level():
    rng = np.random.default_rng(12)
    for _ in range(50):
        k = int(rng.integers(1, 6))
        h = rearrange(StepFunction(np.cumsum(rng.uniform(0.1, 2, k)), rng.exponential(1, k)))
        w = Weight()
        for _ in range(int(rng.integers(1, 4))):
            lo = rng.uniform(0, 5)
            w = w + Weight.indicator(lo, lo + rng.uniform(0.1, 3), rng.uniform(0.2, 2))
        level = theta_norm(h, 1, w).value
        best_random = 0.0
        for _ in range(200):
            ends = np.sort(rng.uniform(0, 8, 2 * int(rng.integers(1, 3))))
            A = AveragingOp(tuple(zip(ends[::2], ends[1::2])))
            best_random = max(best_random, averaged_norm(A, h, 1, w))
        best_family = max(averaged_norm(A, h, 1, w) for A in averaging_family(w, h))
        assert best_random <= level * (1 + 1e-10)
        assert best_family <= level * (1 + 1e-10)
        assert level - best_family <= level - best_random + 1e-12
        assert best_family == pytest.approx(level, rel=1e-9)


def test_restriction_law():
    f = StepFunction([0.3, 0.8], [2.0, 1.0], domain="unit")
    w1 = parse_weight("t^-0.5 on(0,1) + t^0 on(1,inf)")
    w2 = parse_weight("t^-0.5 on(0,1) + 5*t^3 on(1,7)")
    for p in (1, 2):
        assert lambda_norm(f, p, w1).value == pytest.approx(lambda_norm(f, p, w2).value, rel=1e-14)


@given(step_functions(), step_weights(), st.sampled_from([1.0, 2.0, 3.0]), st.floats(0.1, 10.0))
def test_homogeneity(f, w, p, k):
    for norm in (lambda_norm, gamma_norm):
        assert norm(f * k, p, w).value == pytest.approx(k * norm(f, p, w).value, rel=1e-10)


@given(step_functions(), step_weights(), st.sampled_from([1.0, 2.0, 3.0]))
def test_lambda_theta_gamma_ordering(f, w, p):
    lam = lambda_norm(f, p, w).value
    th = theta_norm(f, p, w)
    gam = gamma_norm(f, p, w).value
    assert lam <= th.lower * (1 + 1e-10) + 1e-14
    assert th.lower <= th.upper * (1 + 1e-10)
    assert th.upper <= gam * (1 + 1e-10) + 1e-14
