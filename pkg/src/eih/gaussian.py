"""Standard normal CDF, density and quantile.

Everything downstream (claim prices, thresholds, the path sampler, Wilson
intervals) goes through these three functions, so they are the one place
where Gaussian accuracy is decided.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)

# Acklam's rational approximation (relative error < 1.15e-9 before refinement)
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def norm_cdf(x):
    """Phi(x), accurate in both tails (uses erfc, never 1 - small)."""
    return 0.5 * erfc(-np.asarray(x, dtype=float) / SQRT2)


def norm_sf(x):
    """Upper tail 1 - Phi(x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / SQRT2)


def norm_pdf(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        return np.exp(-0.5 * x * x) / SQRT2PI


def _acklam_lower(p):
    # p in (0, 0.5]
    out = np.empty_like(p)
    tail = p < _P_LOW
    if np.any(tail):
        q = np.sqrt(-2.0 * np.log(p[tail]))
        c, d = _C, _D
        out[tail] = ((((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
                     / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0))
    mid = ~tail
    if np.any(mid):
        q = p[mid] - 0.5
        s = q * q
        a, b = _A, _B
        out[mid] = ((((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * q
                    / (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0))
    return out


def norm_ppf(p):
    """Inverse of Phi on (0, 1), vectorised.

    Rational initial guess followed by one Newton step on ``norm_cdf``; the
    upper half is obtained by symmetry from ``1 - p``, which is exact in
    floating point for ``p >= 0.5``. Endpoints map to -inf/+inf, values
    outside [0, 1] to nan.
    """
    p = np.asarray(p, dtype=float)
    scalar = p.ndim == 0
    p = np.atleast_1d(p)
    out = np.full(p.shape, np.nan)

    upper = p > 0.5
    lo = np.where(upper, 1.0 - p, p)
    ok = (lo > 0.0) & (lo <= 0.5)
    x = _acklam_lower(lo[ok])
    # Newton on Phi(x) = lo
    x = x - (norm_cdf(x) - lo[ok]) / norm_pdf(x)
    out[ok] = x
    out[(lo == 0.0)] = -np.inf
    out = np.where(upper, -out, out)
    return out[0] if scalar else out


def upper_quantile(p: float) -> float:
    """z_p with Phi(z_p) = 1 - p, i.e. N(0,1)([z_p, inf)) = p."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"upper_quantile needs 0 < p < 1, got p={p!r}")
    return float(-norm_ppf(p)) + 0.0  # no signed zero at p = 0.5
