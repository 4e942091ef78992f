"""
Weight conditions for Fourier inequalities
==========================================

Computes the constants that decide whether ||g^||_{Gamma_q(u)} is bounded by
||g||_{Gamma_p(w)}, and shows how each one reports a finite or infinite
verdict together with the grid it searched.
"""

from lorentz_fourier.conditions import (bhc_condition, c_omega, c_xy, llogl_condition,
                                        lz_admissible, nolevel_condition)
from lorentz_fourier.weights import parse_weight

chi = parse_weight("t^0 on(0,1)")
one = parse_weight("t^0")

# Finite case: both weights are the indicator of (0, 1).
rep = c_xy(chi, chi, 1.0)
print("C_xy(chi, chi, p=1):", rep.verdict, rep.value)

# u = 1 against w = chi diverges; the search grid keeps extending while
# the objective still rises and reports where it stopped.
rep = c_xy(one, chi, 1.0)
print("C_xy(1, chi, p=1):", rep.verdict, "| grid notes:", rep.grid.get("notes"))

# For q > 2 the constant comes as a bracket unless the level function is exact.
rep = c_omega(chi, chi, 1.0, 4.0)
print("C_omega(q=4):", rep.kind, rep.lower, rep.upper)

# Sufficient conditions without level functions.
print("no-level:", nolevel_condition(chi, chi, 1.0, 2.0).value)
print("bhc     :", bhc_condition(chi, chi, 2.0, 2.0).value)
print("L log L :", llogl_condition(chi, 2.0).value)

# Lorentz-Zygmund exponents are decided by rules, with reasons attached.
for args in [(1.5, 1, 0, 3, 1, 0), (1.5, 1, 0, 2, 1, 0.1), (4, 1, 0, 2, 1, -1)]:
    rep = lz_admissible(*args)
    print("LZ", args, "->", rep.verdict, rep.reasons)
