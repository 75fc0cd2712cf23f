from __future__ import annotations

from hypothesis import strategies as st

from lognormal_kahler.dombrowski import TangentState
from lognormal_kahler.manifold import NaturalPoint

theta1s = st.floats(-3.0, 3.0, allow_nan=False)
theta2s = st.floats(-4.0, -0.05, allow_nan=False)
fibers = st.floats(-2.0, 2.0, allow_nan=False)


@st.composite
def natural_points(draw):
    return NaturalPoint(draw(theta1s), draw(theta2s))


@st.composite
def tangent_states(draw):
    return TangentState(draw(natural_points()), (draw(fibers), draw(fibers)))
