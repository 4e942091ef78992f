"""
Fourier coefficients, rearrangement inequalities and test functions
===================================================================

Exact coefficients of modulated step functions, the rearrangement
inequality with constant 8, certified test functions and an empirical
estimate of a Fourier inequality constant.
"""

import math

import numpy as np

from lorentz_fourier import fourier as lf
from lorentz_fourier.averaging import AveragingOp
from lorentz_fourier.weights import parse_weight

# chi_[0,1/4): |g^(2)| = 1/(2 pi), and every fourth coefficient vanishes.
g = lf.ModulatedStep.indicator(0.0, 0.25)
print("|g^(n)|, n=0..8:", np.round(np.abs(g.coefficient(np.arange(9))), 6))
print("1/(2 pi) =", 1 / (2 * math.pi))

# The coefficient table keeps a window of radius N around each carrier
# frequency; anything outside is bounded by the truncation bound.
star = lf.coeff_rearrangement(lf.coefficients(g, 4096))
print("g^* head:", np.round(star.values[:6], 6), "tail bound:", star.tail_bound)

# int_0^z (g^**)^2 <= 8 int_0^z (int_0^{1/t} g^*)^2 on a random family.
worst = max(lf.jt_check(h, [2.0 ** k for k in range(11)], N=4096).max_ratio
            for _, h, _ in lf.random_suite(20, seed=1))
print(f"largest ratio over 20 random functions: {worst:.4f} (constant 8)")

# A basic test function and its certified lower bound 1/(3 pi y + 9 pi z).
cert = lf.testfun_basic(4).certify(N=8192, y_max=5000)
print("basic test function certified up to y =", cert.y_checked, "worst margin", cert.worst_margin)

# The assembled test function for z = 16 and an averaging operator.
A = AveragingOp(((8.0, 32.0), (64.0, 128.0)))
tf = lf.testfun_full(16.0, A)
print("components:", [c["piece"] for c in tf.params["components"]], "total length", tf.params["length"])
print("certificate:", tf.certify(y_max=2000).to_json())

# Empirical constant for u = w = chi_(0,1), p = 1, q = 2 on a small suite.
chi = parse_weight("t^0 on(0,1)")
rep = lf.verify_inequality(chi, chi, 1.0, 2.0, suite=lf.parse_suite("random:20+adversarial:8,32"), N=8192)
print(f"ratio {rep.ratio:.4f} at {rep.argmax}; ceiling {rep.ceiling}, floor {rep.floor:.2e}: {rep.verdict}")
