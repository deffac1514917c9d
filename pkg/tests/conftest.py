import math

import pytest
from hypothesis import strategies as st

from eih.intervals import Interval, IntervalUnion
from eih.market import MarketParams

finite_levels = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


@st.composite
def level_sets(draw, max_intervals=4):
    """Random unions over index levels, with occasional 0 / inf endpoints."""
    k = draw(st.integers(0, max_intervals))
    pts = sorted(draw(st.lists(finite_levels, min_size=2 * k, max_size=2 * k)))
    ivs = []
    for i in range(k):
        lo, hi = pts[2 * i], pts[2 * i + 1]
        if i == 0 and draw(st.booleans()):
            lo = draw(st.sampled_from([0.0, -math.inf]))
        if i == k - 1 and draw(st.booleans()):
            hi = math.inf
        ivs.append(Interval(lo, hi, draw(st.booleans()), draw(st.booleans())))
    return IntervalUnion(ivs)


@st.composite
def real_sets(draw, max_intervals=4):
    k = draw(st.integers(0, max_intervals))
    xs = st.floats(min_value=-50, max_value=50, allow_nan=False)
    pts = sorted(draw(st.lists(xs, min_size=2 * k, max_size=2 * k)))
    ivs = [Interval(pts[2 * i], pts[2 * i + 1], draw(st.booleans()), draw(st.booleans()))
           for i in range(k)]
    if k and draw(st.booleans()):
        ivs[0] = Interval(-math.inf, ivs[0].hi, False, ivs[0].hi_closed)
    return IntervalUnion(ivs)


market_params = st.builds(
    MarketParams,
    sigma=st.floats(0.05, 0.6),
    r=st.floats(-0.02, 0.08),
    T=st.floats(0.25, 50.0),
    mu=st.floats(-0.1, 0.2),
    i0=st.floats(0.5, 2.0),
)


@pytest.fixture
def base_params():
    return MarketParams(sigma=0.2, r=0.02, T=10.0, mu=0.07)
