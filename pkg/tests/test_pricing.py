import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import integrate
from scipy.special import ndtri

from eih.intervals import Interval, IntervalUnion, parse_set
from eih.market import MarketParams
from eih.pricing import (ClaimSpec, claim_delta, claim_price, exclusion_set, gaussian_measure,
                         payoff, payoff_array, price_and_delta, thresholds_ab, transformed_set)

from conftest import level_sets, market_params

INF = math.inf


def _density_mass(e):
    f = lambda u: math.exp(-u * u / 2) / math.sqrt(2 * math.pi)
    return sum(integrate.quad(f, iv.lo, iv.hi, epsabs=1e-13)[0] for iv in e)


def test_measure_half_line():
    assert gaussian_measure(IntervalUnion.of((-INF, 0.0))) == 0.5


def test_measure_real_line():
    assert gaussian_measure(IntervalUnion.real_line()) == 1.0


def test_measure_two_tails_against_quadrature():
    e = IntervalUnion.of((-INF, -1.6449), (1.6449, INF))
    ref = _density_mass(e)
    assert gaussian_measure(e) == pytest.approx(0.10, abs=1e-4)
    assert gaussian_measure(e) == pytest.approx(ref, abs=1e-12)


@given(level_sets())
def test_measure_matches_quadrature(e):
    logged = IntervalUnion(Interval(math.log(max(iv.lo, 1e-300)) if iv.lo > 0 else -INF,
                                    math.log(iv.hi) if iv.hi < INF else INF)
                           for iv in e if iv.hi > 0)
    assert gaussian_measure(logged) == pytest.approx(_density_mass(logged), abs=1e-9)


def test_thresholds_example():
    p = MarketParams(sigma=0.2, r=0.02, T=100.0)
    a, b = thresholds_ab(p, 0.1)
    z = float(ndtri(0.95))
    assert a == pytest.approx(math.e**2 * math.exp(2 - 2 * z), rel=1e-12)
    assert b == pytest.approx(math.e**2 * math.exp(2 + 2 * z), rel=1e-12)
    assert a == pytest.approx(2.034, abs=1e-3)  # printed to 3 decimals
    assert a < b


def test_thresholds_transformed_measure_is_delta():
    p = MarketParams(sigma=0.2, r=0.02, T=100.0)
    spec = ClaimSpec(exclusion_set(p, 0.1), p)
    assert gaussian_measure(transformed_set(spec, 0.0, 1.0)) == pytest.approx(0.1, abs=1e-10)


def test_thresholds_collapse_as_delta_to_one():
    p = MarketParams(sigma=0.3, r=0.01, T=5.0)
    a, b = thresholds_ab(p, 1 - 1e-12)
    median = math.exp(p.r * p.T + 0.5 * p.sigma**2 * p.T)
    assert a == pytest.approx(median, rel=1e-9)
    assert b == pytest.approx(median, rel=1e-9)


@pytest.mark.parametrize("delta", [0.0, 1.0, -0.2])
def test_thresholds_reject_bad_delta(delta):
    with pytest.raises(ValueError):
        thresholds_ab(MarketParams(sigma=0.2), delta)


@given(market_params, st.floats(0.05, 20.0), st.floats(0.0, 0.95))
def test_full_set_prices_to_spot(p, spot, frac):
    spec = ClaimSpec(IntervalUnion.positive(), p)
    t = frac * p.T
    assert claim_price(spec, t, spot) == pytest.approx(spot, rel=1e-15)
    assert claim_delta(spec, t, spot) == pytest.approx(1.0, rel=1e-15)


@given(market_params, st.floats(0.001, 0.999))
def test_exclusion_set_prices_to_delta(p, delta):
    spec = ClaimSpec(exclusion_set(p, delta), p)
    assert claim_price(spec, 0.0, p.i0) == pytest.approx(delta * p.i0, rel=1e-9)


def test_empty_set():
    spec = ClaimSpec(IntervalUnion.empty(), MarketParams(sigma=0.2))
    assert claim_price(spec, 0.0, 1.0) == 0.0
    assert claim_delta(spec, 0.0, 1.0) == 0.0


def test_digital_asset_example_against_monte_carlo():
    p = MarketParams(sigma=0.2, r=0.0, T=1.0)
    spec = ClaimSpec(parse_set("[1,inf)"), p)
    price = claim_price(spec, 0.0, 1.0)
    assert price == pytest.approx(0.5398, abs=1e-4)
    # independent oracle: numpy's own generator, risk-neutral terminal values
    g = np.random.default_rng(20240601)
    iT = np.exp(-0.5 * 0.04 + 0.2 * g.standard_normal(1_000_000))
    disc = np.where(iT >= 1.0, iT, 0.0)
    assert abs(disc.mean() - price) < 4 * disc.std() / 1000


@pytest.mark.parametrize("spot", [0.6, 1.0, 1.3])
@pytest.mark.parametrize("t", [0.0, 0.5, 0.9])
def test_delta_matches_central_difference(spot, t):
    p = MarketParams(sigma=0.2, r=0.03, T=1.0)
    spec = ClaimSpec(parse_set("(-inf,0.8]u[1.1,1.5]u[2,inf)"), p)
    h = 1e-5 * spot
    fd = (claim_price(spec, t, spot + h) - claim_price(spec, t, spot - h)) / (2 * h)
    assert claim_delta(spec, t, spot) == pytest.approx(fd, rel=1e-5)


def test_delta_example_point():
    p = MarketParams(sigma=0.2, r=0.0, T=1.0)
    spec = ClaimSpec(parse_set("[1,inf)"), p)
    h = 1e-5
    fd = (claim_price(spec, 0, 1 + h) - claim_price(spec, 0, 1 - h)) / (2 * h)
    assert claim_delta(spec, 0.0, 1.0) == pytest.approx(fd, rel=1e-5)


def test_price_rejects_expiry():
    spec = ClaimSpec(IntervalUnion.positive(), MarketParams(sigma=0.2, T=1.0))
    with pytest.raises(ValueError):
        claim_price(spec, 1.0, 1.0)
    with pytest.raises(ValueError):
        claim_price(spec, 0.5, 0.0)


def test_payoff():
    spec = ClaimSpec(parse_set("[2,inf)"), MarketParams(sigma=0.2))
    assert payoff(spec, 3.0) == 3.0
    assert payoff(spec, 1.0) == 0.0
    assert payoff(spec, 2.0) == 2.0
    assert payoff(ClaimSpec(parse_set("(2,inf)"), spec.params), 2.0) == 0.0
    np.testing.assert_array_equal(payoff_array(spec, [1.0, 2.0, 3.0]), [0.0, 2.0, 3.0])


@given(market_params, level_sets(), st.floats(0.1, 10.0), st.floats(0.0, 0.99))
def test_claim_plus_complement_is_spot(p, e, spot, frac):
    t = frac * p.T
    a = claim_price(ClaimSpec(e, p), t, spot)
    b = claim_price(ClaimSpec(e.complement(), p), t, spot)
    assert a + b == pytest.approx(spot, rel=1e-12)
    assert 0 <= a <= spot * (1 + 1e-15)


@given(market_params, level_sets(), level_sets(), st.floats(0.1, 10.0))
def test_monotone_in_set(p, e, f, spot):
    small = e.intersect(f)
    assert claim_price(ClaimSpec(small, p), 0.0, spot) <= claim_price(ClaimSpec(e, p), 0.0, spot) + 1e-15


@given(market_params, level_sets(), st.booleans(), st.booleans())
def test_openness_never_changes_price(p, e, lc, hc):
    assume(e)
    alt = e.with_openness(lc, hc)
    a = claim_price(ClaimSpec(e, p), 0.0, p.i0)
    b = claim_price(ClaimSpec(alt, p), 0.0, p.i0)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@settings(max_examples=30)
@given(market_params, level_sets())
def test_vectorised_kernel_matches_scalar(p, e):
    spec = ClaimSpec(e, p)
    spots = np.array([0.3, 1.0, 2.5])
    price, delta = price_and_delta(spec, 0.25 * p.T, spots)
    for s, pr, d in zip(spots, price, delta):
        assert pr == pytest.approx(claim_price(spec, 0.25 * p.T, s), rel=1e-12, abs=1e-300)
        assert d == pytest.approx(claim_delta(spec, 0.25 * p.T, s), rel=1e-9, abs=1e-12)


def test_price_is_eih_probability():
    # price at t=0 with spot 1 is the EIH probability of {I_T in E}
    p = MarketParams(sigma=0.25, r=0.01, T=2.0)
    e = parse_set("(0,0.9]u[1.4,2.2)")
    price = claim_price(ClaimSpec(e, p), 0.0, 1.0)
    g = np.random.default_rng(7)
    iT = np.exp((p.r + 0.5 * p.sigma**2) * p.T + p.sigma * math.sqrt(p.T) * g.standard_normal(400_000))
    hit = ((iT > 0) & (iT <= 0.9)) | ((iT >= 1.4) & (iT < 2.2))
    assert abs(hit.mean() - price) < 4 * math.sqrt(price * (1 - price) / iT.size)
