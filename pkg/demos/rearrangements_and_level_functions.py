"""
Rearrangements, Lorentz functionals and level functions
=======================================================

A tour of the step-function layer: decreasing rearrangement, the
Hardy average, the three Lorentz functionals and the level function
that sits between them.
"""

import numpy as np

from lorentz_fourier.level import level_function
from lorentz_fourier.norms import gamma_norm, lambda_norm, theta_norm
from lorentz_fourier.stepfn import StepFunction, hardy_average, rearrange
from lorentz_fourier.weights import parse_weight

# A step function with two bumps. Its rearrangement stacks the tall
# cell first and drops the zeros.
f = StepFunction([0.1, 0.2, 0.5, 0.75], [0.0, 2.0, 0.0, 1.0])
fs = rearrange(f)
print("f* breakpoints:", fs.breakpoints, "values:", fs.values)

# f** is the running mean of f*; it never sits below f*.
t = np.array([0.05, 0.1, 0.2, 0.35, 1.0, 4.0])
print("f*(t) :", fs(t))
print("f**(t):", hardy_average(fs, t))

# Weights come from a small expression language.
w = parse_weight("t^0 on(0,1) + t^-2 on(1,inf)")
print("weight:", w.to_expr())

# Lambda uses f*, Gamma uses f**, Theta sits in between.
for p in (1.0, 2.0):
    lam = lambda_norm(f, p, w).value
    th = theta_norm(f, p, w)
    gam = gamma_norm(f, p, w).value
    print(f"p={p:g}: Lambda={lam:.6f}  Theta in [{th.lower:.6f}, {th.upper:.6f}]  Gamma={gam:.6f}")

# The level function of a non-monotone step: the derivative of the least
# concave majorant of its primitive. Decreasing input comes back unchanged.
u = StepFunction([1.0, 2.0, 3.0], [1.0, 0.0, 1.0])
uo = level_function(u)
print("level function of", u.values, "->", uo.values, "on", uo.breakpoints)
grid = np.linspace(0, 4, 9)
print("primitive       :", np.round(u.cumulative(grid), 4))
print("concave majorant:", np.round(uo.cumulative(grid), 4))
