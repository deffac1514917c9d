"""Equity premium predicted by the EIH and its accuracy band.

The EIH drift ``r + sigma^2`` makes the equity premium ``sigma^2``. Over a
horizon of ``T`` years the realised premium should lie within
``z_{delta/2} sigma / sqrt(T)`` of it unless a prespecified prudent strategy
beats the index by ``1/delta``.

Historical data are compared through the arithmetic mean of annual excess
returns; simulated paths through the continuous-time log form
:func:`realized_log_premium`. The two are deliberately kept apart.
"""

from __future__ import annotations

import csv
import math
from decimal import Decimal
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path as FsPath

import numpy as np

from .gaussian import upper_quantile
from .market import MarketParams, Path

HEADER = ["year", "equity_return", "riskless_return"]


class UnitWarning(UserWarning):
    """Returns look like percentages rather than decimal fractions."""


@dataclass(frozen=True)
class ReturnRow:
    year: int
    equity_return: float
    riskless_return: float


@dataclass(frozen=True)
class ReturnSeries:
    rows: tuple[ReturnRow, ...]

    def __post_init__(self):
        if not self.rows:
            raise ValueError("return series is empty")
        years = [row.year for row in self.rows]
        if any(b <= a for a, b in zip(years, years[1:])):
            raise ValueError("years must be strictly increasing")
        for row in self.rows:
            for name in ("equity_return", "riskless_return"):
                v = getattr(row, name)
                if not math.isfinite(v):
                    raise ValueError(f"non-finite {name} in year {row.year}")
                if v <= -1:
                    raise ValueError(f"{name} {v} <= -1 in year {row.year}")
        if any(abs(v) > 1 for row in self.rows for v in (row.equity_return, row.riskless_return)):
            warnings.warn("some |return| > 1; are the values percentages?", UnitWarning, stacklevel=3)

    @property
    def years(self) -> int:
        """Number of annual observations; used as the horizon T."""
        return len(self.rows)

    @property
    def gaps(self) -> list[tuple[int, int]]:
        """(previous year, next year) pairs where the annual sequence skips."""
        ys = [row.year for row in self.rows]
        return [(a, b) for a, b in zip(ys, ys[1:]) if b != a + 1]

    def excess(self) -> list[float]:
        return [row.equity_return - row.riskless_return for row in self.rows]


def read_returns_csv(src) -> ReturnSeries:
    own = isinstance(src, (str, FsPath))
    fh = open(src, newline="", encoding="utf-8") if own else src
    try:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header != HEADER:
            raise ValueError(f"expected header {','.join(HEADER)}, got {','.join(header)}")
        rows = []
        for line_no, rec in enumerate(reader, start=2):
            if not rec or all(not f.strip() for f in rec):
                continue
            if len(rec) != 3:
                raise ValueError(f"line {line_no}: expected 3 fields, got {len(rec)}")
            rows.append(ReturnRow(int(rec[0]), float(rec[1]), float(rec[2])))
    finally:
        if own:
            fh.close()
    return ReturnSeries(tuple(rows))


@dataclass(frozen=True)
class PremiumReport:
    predicted: float
    halfwidth: float
    realized: float
    inside: bool
    T: float
    delta: float
    sigma: float

    def to_dict(self) -> dict:
        return asdict(self)


def predicted_premium(params) -> float:
    """sigma squared. Accepts MarketParams or a bare volatility (which may be 0).

    The square is taken of sigma's shortest decimal form and rounded once, so
    a quoted 0.2 yields exactly 0.04 rather than ``0.2 * 0.2``.
    """
    sigma = params.sigma if isinstance(params, MarketParams) else float(params)
    if not sigma >= 0 or not math.isfinite(sigma):
        raise ValueError(f"sigma must be finite and non-negative, got {sigma}")
    return float(Decimal(repr(sigma)) ** 2)


def premium_halfwidth(params: MarketParams, delta: float) -> float:
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return upper_quantile(delta / 2) * params.sigma / math.sqrt(params.T)


def premium_report(realized: float, params: MarketParams, delta: float) -> PremiumReport:
    """Compare a realised premium with ``sigma^2 +/- halfwidth`` over ``params.T`` years."""
    if not math.isfinite(realized):
        raise ValueError(f"realized premium must be finite, got {realized}")
    pred = predicted_premium(params)
    half = premium_halfwidth(params, delta)
    return PremiumReport(pred, half, realized, abs(realized - pred) < half,
                         params.T, delta, params.sigma)


def analyze(series: ReturnSeries, params: MarketParams, delta: float) -> PremiumReport:
    """Arithmetic-mean premium of the series against the prediction.

    The horizon is the number of annual rows; ``params.T`` is ignored.
    """
    excess = series.excess()
    realized = math.fsum(excess) / len(excess)
    return premium_report(realized, params.with_(T=float(series.years)), delta)


def realized_log_premium(path: Path, params: MarketParams) -> float:
    """``(ln(I_T/I_0) + sigma^2 T/2 - rT - sigma^2 T) / T`` over the path's horizon."""
    T = path.T
    s2 = params.sigma**2
    return (math.log(path.terminal / path.values[0]) + 0.5 * s2 * T - params.r * T - s2 * T) / T


def realized_log_premium_array(terminal, params: MarketParams):
    """Vectorised form over terminal levels at horizon ``params.T``."""
    T = params.T
    s2 = params.sigma**2
    return (np.log(np.asarray(terminal) / params.i0) + 0.5 * s2 * T - params.r * T - s2 * T) / T
