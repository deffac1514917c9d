"""Upper and lower probabilities of terminal events in two numeraires.

With the bond as numeraire the cheapest super-replication of ``1{I_T in E}``
costs the risk-neutral probability of the event; with the index as numeraire
it costs the EIH probability, which is exactly the time-0 price of the
truncated claim ``I_T 1{I_T in E}`` per unit of ``i0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .intervals import Affine, IntervalUnion, Log, Reciprocal, map_interval_union
from .market import MarketParams
from .pricing import ClaimSpec, claim_price, gaussian_measure

NUMERAIRES = ("bond", "index")


@dataclass(frozen=True)
class TerminalEvent:
    """The event ``{I_T in set}``."""

    set: IntervalUnion

    def complement(self) -> "TerminalEvent":
        return TerminalEvent(self.set.complement())


def _as_event(event) -> TerminalEvent:
    return event if isinstance(event, TerminalEvent) else TerminalEvent(event)


def upper_prob_bond(params: MarketParams, event) -> float:
    """Risk-neutral probability of the event."""
    e = _as_event(event).set
    p = params
    s = p.sigma * math.sqrt(p.T)
    std = Affine(1.0 / s, -(math.log(p.i0) + (p.r - 0.5 * p.sigma**2) * p.T) / s)
    return gaussian_measure(map_interval_union(map_interval_union(e, Log()), std))


def upper_prob_index(params: MarketParams, event) -> float:
    """EIH probability of the event, via the claim price."""
    e = _as_event(event).set
    return claim_price(ClaimSpec(e, params), 0.0, params.i0) / params.i0


def upper_prob(params: MarketParams, event, numeraire: str) -> float:
    if numeraire == "bond":
        return upper_prob_bond(params, event)
    if numeraire == "index":
        return upper_prob_index(params, event)
    raise ValueError(f"numeraire must be one of {NUMERAIRES}, got {numeraire!r}")


def lower_prob(params: MarketParams, event, numeraire: str) -> float:
    return 1.0 - upper_prob(params, _as_event(event).complement(), numeraire)


def reciprocal_event(params: MarketParams, event) -> TerminalEvent:
    """Image of the event under ``x -> exp(2 r T) / x``."""
    e = _as_event(event).set
    return TerminalEvent(map_interval_union(e, Reciprocal(math.exp(2 * params.r * params.T))))


def dual_params(params: MarketParams) -> MarketParams:
    """Parameters of the reciprocal process, which starts at ``1 / i0``."""
    return params.with_(i0=1.0 / params.i0)
