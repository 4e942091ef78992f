import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lorentz_fourier.averaging import AveragingOp
from lorentz_fourier import fourier as lf
from lorentz_fourier.fourier import (ModulatedStep, assemble, coeff_rearrangement, coefficients, jt_check,
                                     jt_rhs, random_modulated, truncation_bound)
from lorentz_fourier.stepfn import rearrange


def piece_coefficient(rows, n):
    """Termwise antiderivative of ``a e^{i th} e^{2 pi i (m - n) x}``."""
    total = 0j
    for x0, x1, a, m, th in rows:
        k = m - n
        if k == 0:
            total += a * cmath.exp(1j * th) * (x1 - x0)
        else:
            total += (a * cmath.exp(1j * th)
                      * (cmath.exp(2j * math.pi * k * x1) - cmath.exp(2j * math.pi * k * x0))
                      / (2j * math.pi * k))
    return total


def test_indicator_quarter_examples():
    g = ModulatedStep.indicator(0.0, 0.25)
    assert abs(g.coefficient(2)) == pytest.approx(1 / (2 * math.pi), rel=1e-14)
    assert g.coefficient(0) == pytest.approx(0.25)
    assert abs(g.coefficient(4)) < 1e-16


def test_coefficients_match_termwise_formula():
    rng = np.random.default_rng(11)
    for _ in range(30):
        g = random_modulated(rng)
        n = np.array([-300, -17, -1, 0, 1, 5, 64, 999])
        ref = [piece_coefficient(g.pieces.tolist(), int(k)) for k in n]
        np.testing.assert_allclose(g.coefficient(n), ref, rtol=1e-10, atol=1e-14)


def test_large_frequencies_stay_accurate():
    g = ModulatedStep([[0.1, 0.3, 1.0, 2 ** 40, 0.0]])
    # the spectrum is a shifted copy of the unmodulated one
    base = ModulatedStep.indicator(0.1, 0.3)
    n = np.array([2 ** 40 - 3, 2 ** 40, 2 ** 40 + 7])
    np.testing.assert_allclose(np.abs(g.coefficient(n)), np.abs(base.coefficient(n - 2 ** 40)), rtol=1e-12)


def test_full_indicator_rearrangement():
    star = coeff_rearrangement(coefficients(ModulatedStep.indicator(0.0, 1.0), 256))
    assert star(0.5) == pytest.approx(1.0)
    assert np.all(star.values[1:] < 1e-15)


def test_conjugate_symmetry_for_real_functions():
    rng = np.random.default_rng(3)
    for _ in range(10):
        g = random_modulated(rng, max_freq=0)
        g = ModulatedStep(np.column_stack((g.pieces[:, :4], np.zeros(len(g.pieces)))))
        n = np.arange(1, 200)
        np.testing.assert_allclose(g.coefficient(-n), np.conj(g.coefficient(n)), atol=1e-15)


def test_parseval_and_sup_bound():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = random_modulated(rng)
        tab = coefficients(g, 4096)
        energy = float(np.sum(tab.magnitudes ** 2))
        assert energy <= g.l2sq * (1 + 1e-12)
        assert energy >= g.l2sq * 0.99
        assert tab.magnitudes.max() <= g.l1 * (1 + 1e-12)


def test_truncation_bound_holds_outside_windows():
    rng = np.random.default_rng(8)
    for _ in range(30):
        g = random_modulated(rng)
        N = int(rng.integers(4, 200))
        bound = truncation_bound(g, N)
        cands = np.arange(-5000, 5001)
        far = cands[np.all(np.abs(cands[:, None] - g.carriers[None, :]) > N, axis=1)]
        assert np.max(np.abs(g.coefficient(far))) <= bound * (1 + 1e-12)


@given(st.floats(0.0, 0.5), st.integers(-50, 50), st.integers(0, 2 ** 20))
def test_translation_and_modulation_laws(X, M, seed):
    rng = np.random.default_rng(seed)
    a, b = np.sort(rng.uniform(0, 0.5, 2))
    if b - a < 1e-6:
        b = a + 0.1
    g = ModulatedStep([[a, b, rng.uniform(0.1, 2), int(rng.integers(-9, 10)), rng.uniform(0, 6)]])
    n = np.arange(-40, 41)
    np.testing.assert_allclose(g.translated(X).coefficient(n),
                               np.exp(-2j * math.pi * n * X) * g.coefficient(n), atol=1e-13)
    np.testing.assert_allclose(g.modulated(M).coefficient(n), g.coefficient(n - M), atol=1e-13)


def test_invalid_pieces_rejected():
    with pytest.raises(ValueError):
        ModulatedStep([[0.0, 0.5, 1.0, 0.0, 0.0], [0.4, 0.6, 1.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        ModulatedStep([[0.0, 0.5, 1.0, 0.5, 0.0]])
    with pytest.raises(ValueError):
        ModulatedStep([[0.5, 1.5, 1.0, 0.0, 0.0]])


# -- inequality of rearrangements ---------------------------------------------


def test_jt_constant_function_closed_form():
    z = np.array([0.5, 1.0, 3.0, 100.0])
    ref = np.where(z <= 1, z, 2 - 1 / z)
    f = ModulatedStep.indicator(0.0, 1.0)
    np.testing.assert_allclose(jt_rhs(f, z), ref, rtol=1e-14)
    rep = jt_check(f, z, N=1024)
    np.testing.assert_allclose(rep.lhs_lower, ref, rtol=1e-12)
    # the upper value pads every cell with the tail bound
    assert rep.passed and 1.0 <= rep.max_ratio < 1.01


def test_jt_rhs_quarter_indicator():
    z = np.array([1.0, 4.0, 10.0])
    ref = np.where(z <= 4, z / 16, 0.5 - 1 / z)
    np.testing.assert_allclose(jt_rhs(ModulatedStep.indicator(0.0, 0.25), z), ref, rtol=1e-14)


def test_jt_lower_value_matches_direct_sum():
    g = ModulatedStep.indicator(0.0, 0.25)
    rep = jt_check(g, [7.0], N=512)
    vals = coeff_rearrangement(coefficients(g, 512)).values
    # integrate (g**)^2 with g** = (1/t) sum of the first cells, on a fine grid per cell
    total = 0.0
    cum = 0.0
    for j in range(7):
        v = vals[j]
        t = np.linspace(j, j + 1, 20001)[1:]
        inner = ((cum + v * (t - j)) / t) ** 2
        total += float(np.mean(inner))
        cum += v
    assert rep.lhs_lower[0] == pytest.approx(total, rel=1e-4)


# -- test functions ----------------------------------------------------------


def test_basic_bound_certified():
    for z in (3, 4, 16):
        cert = lf.testfun_basic(z).certify(N=4096, y_max=2000)
        assert cert.passed and cert.failures == 0 and cert.y_checked == 2000
    with pytest.raises(ValueError, match="z >= 3"):
        lf.testfun_basic(2.0)


def _is_indicator(g, length):
    m = g.modulus()
    fs = rearrange(m)
    return np.allclose(fs.values, 1.0) and fs.end == pytest.approx(length, rel=1e-12)


def test_dilated_modulus_and_bound():
    tf = lf.testfun_dilated(3, 4.0, 0.05)
    assert tf.params["M"] == math.ceil(6 / (math.pi * 0.05))
    assert _is_indicator(tf.g, 0.25)
    cert = tf.certify(N=8192, y_max=3000)
    assert cert.passed and cert.failures == 0


def test_combined_modulus():
    tf = lf.testfun_combined(6.0, 2.5, 0.05)
    assert tf.params["k"] == 3 and _is_indicator(tf.g, 1 / 6)
    assert tf.certify(N=8192, y_max=2000).passed


def test_assembled_components():
    lengths = [0.1, 0.05, 0.2]
    tf = lf.testfun_assembled(lengths, 0.02)
    assert _is_indicator(tf.g, 0.35)
    assert tf.params["X"] == pytest.approx([0.0, 0.1, 0.15])
    assert tf.certify(N=8192, y_max=2000).passed
    with pytest.raises(ValueError):
        lf.testfun_assembled([0.7, 0.6], 0.1)


def test_assemble_separates_spectra():
    parts = [ModulatedStep.indicator(0.0, 0.2), ModulatedStep.indicator(0.0, 0.3)]
    g, shifts, _ = assemble(parts, 0.1)
    h1 = 2 / (math.pi * 0.1)
    h2 = 4 / (math.pi * 0.1)
    assert shifts[0] == 0 and shifts[1] - h2 > h1


@pytest.mark.parametrize("z", [1.0, 5.0, 32.0])
def test_full_testfun_support_and_certificate(z):
    A = AveragingOp(((z / 2, 2 * z), (4 * z, 8 * z)))
    tf = lf.testfun_full(z, A)
    fs = rearrange(tf.g.modulus())
    assert np.all(fs.values <= 1.0) and fs.end <= 1 / max(z, 3.0) * (1 + 1e-12)
    cert = tf.certify(y_max=1000)
    assert cert.passed and cert.failures == 0
    with pytest.raises(ValueError):
        lf.testfun_full(0.5, A)
