import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate
from scipy.special import ndtri

from eih.gaussian import norm_cdf, norm_pdf, norm_ppf, norm_sf, upper_quantile


@pytest.mark.parametrize("p", [1e-6, 1e-5, 1e-4, 1e-3, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5])
def test_upper_quantile_round_trip(p):
    z = upper_quantile(p)
    assert abs(norm_sf(z) - p) <= 1e-10
    assert abs(float(norm_cdf(z)) - (1 - p)) <= 1e-10


def test_upper_quantile_printed_value():
    # printed as 1.64 in the delta = 0.1 example
    assert upper_quantile(0.05) == pytest.approx(1.6449, abs=1e-3)
    assert round(upper_quantile(0.05), 2) == 1.64


def test_upper_quantile_half_is_zero():
    z = upper_quantile(0.5)
    assert z == 0.0
    assert str(z) == "0.0"


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_upper_quantile_rejects_outside_unit_interval(p):
    with pytest.raises(ValueError):
        upper_quantile(p)


def test_ppf_against_independent_inverse():
    p = np.concatenate([np.logspace(-300, -1, 400), np.linspace(0.01, 0.99, 999),
                        1 - np.logspace(-15, -2, 100)])
    assert np.max(np.abs(norm_ppf(p) - ndtri(p))) < 1e-10


def test_ppf_edges():
    assert norm_ppf(0.0) == -np.inf
    assert norm_ppf(1.0) == np.inf
    assert np.isnan(norm_ppf(-0.5))


@given(st.floats(min_value=1e-12, max_value=1 - 1e-12))
def test_ppf_is_inverse_of_cdf(p):
    x = norm_ppf(p)
    assert abs(float(norm_cdf(x)) - p) <= 1e-12 * max(p, 1e-3)


@pytest.mark.parametrize("x", [-8.0, -1.0, 0.0, 0.7, 5.0])
def test_cdf_matches_quadrature(x):
    ref, _ = integrate.quad(lambda u: np.exp(-u * u / 2) / np.sqrt(2 * np.pi), -np.inf, x,
                            epsabs=1e-14, epsrel=1e-13)
    assert float(norm_cdf(x)) == pytest.approx(ref, rel=1e-9, abs=1e-15)


def test_pdf_at_zero():
    assert float(norm_pdf(0.0)) == pytest.approx(1 / np.sqrt(2 * np.pi), rel=1e-15)
