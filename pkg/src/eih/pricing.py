"""Closed-form prices of truncated index claims.

The claim pays ``I_T`` if ``I_T`` lands in a set ``E`` of index levels and
nothing otherwise. Its time-``t`` price with spot ``S`` and ``tau = T - t``
is ``S * N(g(E))`` where ``N`` is the standard Gaussian measure and

    g(x) = (ln x - ln S) / (sigma sqrt(tau)) - (r / sigma) sqrt(tau) - (sigma / 2) sqrt(tau)

(the pushed-forward set under the EIH drift ``r + sigma^2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import norm_cdf, norm_pdf, norm_sf, upper_quantile
from .intervals import Affine, IntervalUnion, Log, map_interval_union
from .market import MarketParams


@dataclass(frozen=True)
class ClaimSpec:
    set: IntervalUnion
    params: MarketParams

    def __post_init__(self):
        if not isinstance(self.set, IntervalUnion):
            raise TypeError("ClaimSpec.set must be an IntervalUnion")


def gaussian_measure(e: IntervalUnion) -> float:
    """Standard normal probability of a union of intervals on the real line."""
    total = 0.0
    for iv in e:
        total += _interval_mass(iv.lo, iv.hi)
    return min(max(total, 0.0), 1.0)


def _interval_mass(a, b):
    # subtract in whichever tail keeps both terms small
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    upper = a >= 0
    return np.where(upper, norm_sf(a) - norm_sf(b), norm_cdf(b) - norm_cdf(a))


def standardizer(params: MarketParams, tau: float, spot: float) -> Affine:
    """Affine part of ``g`` acting on ``ln x``."""
    s = params.sigma * math.sqrt(tau)
    shift = (-math.log(spot) / s
             - (params.r / params.sigma) * math.sqrt(tau)
             - 0.5 * params.sigma * math.sqrt(tau))
    return Affine(1.0 / s, shift)


def transformed_set(spec: ClaimSpec, t: float, spot: float) -> IntervalUnion:
    """``g(E)``: the claim's set mapped to standard-normal coordinates."""
    tau = spec.params.T - t
    return map_interval_union(map_interval_union(spec.set, Log()),
                              standardizer(spec.params, tau, spot))


def _check_time(spec: ClaimSpec, t: float, spot: float) -> float:
    tau = spec.params.T - t
    if not 0 <= t or not tau > 0:
        raise ValueError(f"need 0 <= t < T (T={spec.params.T}), got t={t}")
    if not spot > 0:
        raise ValueError(f"spot must be positive, got {spot}")
    return tau


def claim_price(spec: ClaimSpec, t: float, spot: float) -> float:
    _check_time(spec, t, spot)
    return spot * gaussian_measure(transformed_set(spec, t, spot))


def claim_delta(spec: ClaimSpec, t: float, spot: float) -> float:
    """Index units held by the replicating portfolio (dPrice/dSpot).

    Mass term plus, for each finite positive boundary, the density term
    ``(phi(g(a)) - phi(g(b))) / (sigma sqrt(tau))``.
    """
    tau = _check_time(spec, t, spot)
    g = transformed_set(spec, t, spot)
    edge = 0.0
    for iv in g:
        edge += float(norm_pdf(iv.lo) - norm_pdf(iv.hi))
    return gaussian_measure(g) + edge / (spec.params.sigma * math.sqrt(tau))


def payoff(spec: ClaimSpec, terminal: float) -> float:
    if not terminal > 0:
        raise ValueError(f"terminal level must be positive, got {terminal}")
    return terminal if terminal in spec.set else 0.0


# --- vectorised kernels for cohorts of paths ---------------------------------

def _log_bounds(e: IntervalUnion) -> tuple[np.ndarray, np.ndarray]:
    logged = map_interval_union(e, Log())
    lo = np.array([iv.lo for iv in logged], dtype=float)
    hi = np.array([iv.hi for iv in logged], dtype=float)
    return lo, hi


def price_and_delta(spec: ClaimSpec, t: float, spots) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`claim_price` and :func:`claim_delta` over spot levels."""
    p = spec.params
    tau = p.T - t
    if not tau > 0:
        raise ValueError(f"need t < T, got t={t}")
    spots = np.asarray(spots, dtype=float)
    lo, hi = _log_bounds(spec.set)
    if lo.size == 0:
        zero = np.zeros_like(spots)
        return zero, zero.copy()
    s = p.sigma * math.sqrt(tau)
    c = (p.r / p.sigma) * math.sqrt(tau) + 0.5 * p.sigma * math.sqrt(tau)
    ls = np.log(spots)[..., None]
    with np.errstate(invalid="ignore"):
        ga = (lo - ls) / s - c
        gb = (hi - ls) / s - c
    # -inf - finite stays -inf; inf stays inf
    mass = np.clip(_interval_mass(ga, gb).sum(axis=-1), 0.0, 1.0)
    edge = (norm_pdf(ga) - norm_pdf(gb)).sum(axis=-1)
    return spots * mass, mass + edge / s


def payoff_array(spec: ClaimSpec, terminal) -> np.ndarray:
    terminal = np.asarray(terminal, dtype=float)
    return np.where(in_set(spec.set, terminal), terminal, 0.0)


def in_set(e: IntervalUnion, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    hit = np.zeros(x.shape, dtype=bool)
    for iv in e:
        above = (x > iv.lo) | (iv.lo_closed & (x == iv.lo))
        below = (x < iv.hi) | (iv.hi_closed & (x == iv.hi))
        hit |= above & below
    return hit


# --- thresholds ------------------------------------------------------------

def thresholds_ab(params: MarketParams, delta: float) -> tuple[float, float]:
    """Levels ``A < B`` with ``N(g((-inf, A] u [B, inf))) = delta`` at time 0.

    ``A, B = exp(rT) * exp(sigma^2 T / 2 -/+ z_{delta/2} sigma sqrt(T))``.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    z = upper_quantile(delta / 2)
    return _level(params, -z), _level(params, z)


def _level(params: MarketParams, z: float) -> float:
    # index level whose standardized EIH coordinate is z, scaled by i0
    T = params.T
    return params.i0 * math.exp(params.r * T + 0.5 * params.sigma**2 * T
                                + z * params.sigma * math.sqrt(T))


def exclusion_set(params: MarketParams, delta: float) -> IntervalUnion:
    """``(-inf, A] u [B, inf)``, the payoff region of the two-sided strategy."""
    a, b = thresholds_ab(params, delta)
    return IntervalUnion.of((-math.inf, a), (b, math.inf))
