import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from lorentz_fourier.stepfn import (DecreasingStep, NonRearrangeableError, PowerLogTail, StepFunction,
                                    distribution, hardy_average, omega, rearrange, weighted_integral)
from lorentz_fourier.weights import Weight

from conftest import step_functions


def test_distribution_examples():
    f = StepFunction([0.25, 0.5], [2.0, 1.0])
    assert distribution(f, 1.5) == pytest.approx(0.25)
    assert distribution(StepFunction([1 / 3], [1.0]), 0.5) == pytest.approx(1 / 3)


def test_distribution_of_inverse_root():
    w = Weight.power(-0.5, hi=1.0)
    assert distribution(w, 2.0) == pytest.approx(0.25, rel=1e-12)
    # grid counting as an independent check
    t = (np.arange(1_000_000) + 0.5) / 1_000_000
    assert np.mean(t ** -0.5 > 2.0) == pytest.approx(0.25, abs=1e-5)


def test_distribution_rejects_infinite_level_sets():
    f = StepFunction([1.0], [1.0], PowerLogTail(1.0, 0.0, 0.0))
    with pytest.raises(NonRearrangeableError):
        distribution(f, 0.5)


def test_rearrange_example():
    f = StepFunction([0.1, 0.2, 0.5, 0.75], [0.0, 2.0, 0.0, 1.0])
    fs = rearrange(f)
    assert isinstance(fs, DecreasingStep)
    np.testing.assert_allclose(fs.breakpoints, [0.1, 0.35])
    np.testing.assert_allclose(fs.values, [2.0, 1.0])


def test_rearrange_fixes_decreasing_input():
    d = DecreasingStep([1.0, 2.0, 4.0], [3.0, 2.0, 0.5])
    assert rearrange(d).equals(d)


def _power_integral_quad(f, p):
    total = 0.0
    for a, b, v in zip(f.edges[:-1], f.edges[1:], f.values):
        total += integrate.quad(lambda t: v ** p, a, b)[0]
    return total


def test_rearrangement_preserves_power_integrals():
    rng = np.random.default_rng(1)
    for _ in range(100):
        k = int(rng.integers(1, 10))
        f = StepFunction(np.cumsum(rng.uniform(0.05, 1.0, k)), rng.exponential(1.0, k))
        fs = rearrange(f)
        for p in (1, 2):
            assert _power_integral_quad(fs, p) == pytest.approx(_power_integral_quad(f, p), rel=1e-10)


def test_hardy_average_examples():
    fs = DecreasingStep([0.5], [1.0])
    assert hardy_average(fs, 0.3) == pytest.approx(1.0)
    assert hardy_average(fs, 2.0) == pytest.approx(0.25)
    assert hardy_average(DecreasingStep([0.25], [1.0]), 1.0) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        hardy_average(fs, 0.0)


def test_weighted_integral_examples():
    chi = StepFunction([1.0], [1.0])
    assert weighted_integral(chi, Weight.indicator(0.0, 1.0)) == pytest.approx(1.0)
    assert weighted_integral(omega(1.0), Weight.power(0.0)) == pytest.approx(2.0)
    log_w = Weight.power(0.0, 1.0, hi=1.0)  # 1 + |log t| = 1 - log t on (0, 1)
    ref = integrate.quad(lambda t: 1 - math.log(t), 0, 1)[0]
    assert weighted_integral(chi, log_w) == pytest.approx(ref, rel=1e-10)
    assert ref == pytest.approx(2.0)


def test_weighted_integral_divergence_is_infinite():
    assert math.isinf(weighted_integral(StepFunction([1.0], [1.0]), Weight.power(-1.0)))


def test_unit_domain_invariants():
    with pytest.raises(ValueError):
        StepFunction([0.5, 1.5], [1.0, 1.0], domain="unit")
    with pytest.raises(ValueError):
        StepFunction([0.5], [1.0], PowerLogTail(1.0, -1.0, 0.0), domain="unit")


def test_json_roundtrip():
    f = StepFunction([1.0, 2.0], [3.0, 1.0], PowerLogTail(0.5, -2.0, 1.0))
    assert StepFunction.from_json(f.to_json()).equals(f)


@given(step_functions())
def test_rearrange_idempotent(f):
    fs = rearrange(f)
    assert rearrange(fs).equals(fs)


@given(step_functions(), st.floats(0.0, 10.0))
def test_equimeasurable(f, lam):
    assert distribution(rearrange(f), lam) == pytest.approx(distribution(f, lam), rel=1e-12, abs=1e-12)


@given(step_functions())
def test_hardy_average_dominates_and_decreases(f):
    fs = rearrange(f)
    t = np.geomspace(1e-3, 100, 200)
    ff = hardy_average(fs, t)
    assert np.all(np.diff(ff) <= 1e-12 * ff[:-1])
    assert np.all(ff >= fs(t) * (1 - 1e-12))


@given(step_functions(), step_functions())
def test_double_star_subadditive(f, g):
    t = np.geomspace(1e-3, 100, 100)
    lhs = hardy_average(rearrange(f + g), t)
    rhs = hardy_average(rearrange(f), t) + hardy_average(rearrange(g), t)
    assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-12)
