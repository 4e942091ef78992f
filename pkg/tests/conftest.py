import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from lorentz_fourier.stepfn import StepFunction
from lorentz_fourier.weights import Weight

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def step_functions(draw, max_cells=8, lo=0.05, hi=5.0):
    k = draw(st.integers(1, max_cells))
    widths = draw(st.lists(st.floats(lo, hi), min_size=k, max_size=k))
    vals = draw(st.lists(st.floats(0.0, 10.0), min_size=k, max_size=k))
    return StepFunction(np.cumsum(widths), vals)


@st.composite
def step_weights(draw, max_terms=4):
    """Sums of constants on intervals."""
    k = draw(st.integers(1, max_terms))
    w = Weight()
    for _ in range(k):
        lo = draw(st.floats(0.0, 6.0))
        length = draw(st.floats(0.05, 4.0))
        c = draw(st.floats(0.1, 3.0))
        w = w + Weight.indicator(lo, lo + length, c)
    return w
