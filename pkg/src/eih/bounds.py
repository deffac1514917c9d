"""Prediction intervals for I_T and the resulting bounds on the drift mu.

A prudent strategy that pays ``I_T`` on a set of Gaussian (EIH) measure
``delta`` beats the index by ``1/delta`` whenever the set is hit. Reading
that contrapositively gives intervals for ``I_T / exp(rT)``, and, once the
physical drift is brought in, a band around ``r + sigma^2`` for ``mu``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .gaussian import norm_cdf, upper_quantile
from .harness import MIN_PATHS, FreqEstimate
from .intervals import INF, IntervalUnion
from .market import MarketParams, MeasureKind, terminal_values
from .pricing import ClaimSpec, in_set, payoff_array, price_and_delta

VARIANTS = ("two-sided", "one-sided")


@dataclass(frozen=True)
class PredictionInterval:
    """Bounds on ``I_T / (i0 exp(rT))``; the strategy beats the index unless inside.

    ``sided`` is ``"two"``, ``"lower"`` (only a lower bound; ``upper`` is inf)
    or ``"upper"`` (``lower`` is 0). ``trivial`` marks ``delta >= 1``, where
    holding the index already achieves the factor and the interval collapses.
    """

    lower: float
    upper: float
    delta: float
    sided: str
    trivial: bool = False

    @property
    def log_lower(self) -> float:
        return -INF if self.lower == 0 else math.log(self.lower)

    @property
    def log_upper(self) -> float:
        return math.log(self.upper)

    def contains(self, ratio) -> np.ndarray:
        ratio = np.asarray(ratio, dtype=float)
        return (ratio > self.lower) & (ratio < self.upper)

    def exclusion_set(self, params: MarketParams) -> IntervalUnion:
        """Payoff region of the strategy, in index levels."""
        scale = params.i0 * math.exp(params.r * params.T)
        if self.trivial:
            return IntervalUnion.real_line()
        parts = []
        if self.lower > 0:
            parts.append((-INF, self.lower * scale))
        if self.upper < INF:
            parts.append((self.upper * scale, INF))
        return IntervalUnion.of(*parts)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(log_lower=self.log_lower, log_upper=self.log_upper)
        return d


def _ratio_bound(params: MarketParams, z: float) -> float:
    s, T = params.sigma, params.T
    return math.exp(0.5 * s * s * T + z * s * math.sqrt(T))


def two_sided_interval(params: MarketParams, delta: float) -> PredictionInterval:
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if delta >= 1:
        mid = _ratio_bound(params, 0.0)
        return PredictionInterval(mid, mid, delta, "two", trivial=True)
    z = upper_quantile(delta / 2)
    return PredictionInterval(_ratio_bound(params, -z), _ratio_bound(params, z), delta, "two")


def one_sided_intervals(params: MarketParams, delta: float) -> tuple[PredictionInterval, PredictionInterval]:
    """(lower-bound interval, upper-bound interval), each using ``z_delta``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if delta >= 1:
        mid = _ratio_bound(params, 0.0)
        return (PredictionInterval(mid, mid, delta, "lower", trivial=True),
                PredictionInterval(mid, mid, delta, "upper", trivial=True))
    z = upper_quantile(delta)
    return (PredictionInterval(_ratio_bound(params, -z), INF, delta, "lower"),
            PredictionInterval(0.0, _ratio_bound(params, z), delta, "upper"))


@dataclass(frozen=True)
class MuBound:
    center: float
    halfwidth: float
    delta: float
    epsilon: float
    variant: str

    def contains(self, mu: float) -> bool:
        return abs(self.center - mu) < self.halfwidth


def mu_bound(params: MarketParams, delta: float, epsilon: float, variant: str = "two-sided") -> MuBound:
    """Band ``|r + sigma^2 - mu| < (z + z_eps) sigma / sqrt(T)``.

    ``z`` is ``z_{delta/2}`` for the two-sided strategy and
    ``z_delta`` for the one-sided one.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1) for a drift bound, got {delta}")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    z = upper_quantile(delta / 2 if variant == "two-sided" else delta)
    half = (z + upper_quantile(epsilon)) * params.sigma / math.sqrt(params.T)
    return MuBound(params.r + params.sigma**2, half, delta, epsilon, variant)


def standardized_shock(params: MarketParams, terminal) -> np.ndarray:
    """xi with ``ln(I_T / i0) = (mu - sigma^2/2) T + sigma sqrt(T) xi``."""
    p = params
    return ((np.log(np.asarray(terminal) / p.i0) - (p.mu - 0.5 * p.sigma**2) * p.T)
            / (p.sigma * math.sqrt(p.T)))


def strategy_interval(params: MarketParams, delta: float, variant: str) -> PredictionInterval:
    """The interval whose violation the variant's strategy pays on.

    "two-sided" uses the two-sided interval; "one-sided" picks a side by the sign of
    ``r + sigma^2 - mu``: negative (index drifts faster than EIH) bets on a
    high ``I_T`` and is beaten unless the upper bound holds; positive bets
    low. A zero gap is treated as negative.
    """
    if variant == "two-sided":
        return two_sided_interval(params, delta)
    lower, upper = one_sided_intervals(params, delta)
    gap = params.r + params.sigma**2 - params.mu
    return upper if gap <= 0 else lower


@dataclass(frozen=True)
class VerificationReport:
    variant: str
    delta: float
    epsilon: float
    n_paths: int
    seed: int
    event_freq: float
    event_ci: tuple[float, float]
    event_prob_exact: float
    beat_freq: float
    beat_ci: tuple[float, float]
    bound_halfwidth: float
    mu_inside_bound: bool
    hit_beat_factor: float | None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["event_ci"] = list(self.event_ci)
        d["beat_ci"] = list(self.beat_ci)
        return d


def event_probability(params: MarketParams, interval: PredictionInterval) -> float:
    """Physical probability that ``I_T / (i0 exp(rT))`` falls inside ``interval``."""
    p = params
    shift = (p.r + p.sigma**2 - p.mu) * math.sqrt(p.T) / p.sigma
    s = p.sigma * math.sqrt(p.T)
    # ln ratio - sigma^2 T / 2 = sigma sqrt(T) (xi - shift)
    def xi_of(bound):
        if bound == 0:
            return -INF
        if bound == INF:
            return INF
        return (math.log(bound) - 0.5 * s * s) / s + shift
    return float(norm_cdf(xi_of(interval.upper)) - norm_cdf(xi_of(interval.lower)))


def verify_drift_bound(params: MarketParams, delta: float, epsilon: float, variant: str,
                       n_paths: int, seed: int) -> VerificationReport:
    """Monte Carlo check of a drift bound under the physical measure.

    Terminal values are drawn exactly; the strategy's terminal value is its
    closed-form payoff, so no hedging error enters. ``event`` is ``I_T``
    falling inside the prediction interval; ``beat`` is the strategy's
    ``(K_T/I_T)/(K_0/I_0) >= 1/delta``.
    """
    if params.mu is None:
        raise ValueError("verification runs under the physical measure and needs mu")
    if n_paths < MIN_PATHS:
        raise ValueError(f"n_paths must be >= {MIN_PATHS}, got {n_paths}")
    bound = mu_bound(params, delta, epsilon, variant)
    interval = strategy_interval(params, delta, variant)
    spec = ClaimSpec(interval.exclusion_set(params), params)
    k0 = float(price_and_delta(spec, 0.0, params.i0)[0])

    iT = terminal_values(params, MeasureKind.PHYSICAL, n_paths, seed)
    ratio = iT / (params.i0 * math.exp(params.r * params.T))
    event = interval.contains(ratio)
    kT = payoff_array(spec, iT)
    beat_factor = (kT / iT) / (k0 / params.i0)
    # k0 equals delta only up to rounding, so compare with a relative tolerance
    beats = beat_factor >= (1.0 / delta) * (1 - 1e-9)
    hit = in_set(spec.set, iT)

    ev = FreqEstimate.from_indicator(event)
    bt = FreqEstimate.from_indicator(beats)
    return VerificationReport(
        variant=variant, delta=delta, epsilon=epsilon, n_paths=n_paths, seed=seed,
        event_freq=ev.p_hat, event_ci=(ev.wilson_lo, ev.wilson_hi),
        event_prob_exact=event_probability(params, interval),
        beat_freq=bt.p_hat, beat_ci=(bt.wilson_lo, bt.wilson_hi),
        bound_halfwidth=bound.halfwidth,
        mu_inside_bound=bound.contains(params.mu),
        hit_beat_factor=float(np.median(beat_factor[hit])) if hit.any() else None,
    )
