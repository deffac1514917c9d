"""Index dynamics under the physical, risk-neutral and EIH measures.

All three regimes are geometric Brownian motions ``dI/I = m dt + sigma dW``
with drift ``m`` equal to ``mu``, ``r`` or ``r + sigma**2``. Paths are
sampled exactly from the log-normal solution, so the number of grid steps
never changes the law of ``I_T``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path as FsPath

import numpy as np

from . import rng

RECIPROCAL_PHYSICAL = "reciprocal-physical"


class MeasureKind(enum.Enum):
    PHYSICAL = "physical"
    RISK_NEUTRAL = "risk-neutral"
    EIH = "eih"

    @classmethod
    def parse(cls, text: str) -> "MeasureKind":
        key = text.strip().lower().replace("_", "-")
        aliases = {"rn": "risk-neutral", "riskneutral": "risk-neutral", "p": "physical"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True)
class MarketParams:
    """Market inputs: drift, volatility, rate, horizon and initial level.

    ``mu`` is only consulted under the physical measure and may be left as
    ``None`` otherwise.
    """

    sigma: float
    r: float = 0.0
    T: float = 1.0
    mu: float | None = None
    i0: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError(f"T must be positive and finite, got {self.T}")
        if not (math.isfinite(self.i0) and self.i0 > 0):
            raise ValueError(f"i0 must be positive and finite, got {self.i0}")
        if not math.isfinite(self.r):
            raise ValueError(f"r must be finite, got {self.r}")
        if self.mu is not None and not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")

    def with_(self, **changes) -> "MarketParams":
        return replace(self, **changes)


def drift(params: MarketParams, kind: MeasureKind) -> float:
    if kind is MeasureKind.PHYSICAL:
        if params.mu is None:
            raise ValueError("physical-measure drift needs params.mu")
        return params.mu
    if kind is MeasureKind.RISK_NEUTRAL:
        return params.r
    return params.r + params.sigma**2


@dataclass(frozen=True, eq=False)
class Path:
    times: np.ndarray
    values: np.ndarray
    measure: MeasureKind
    seed: int | None = None
    path_index: int = 0
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("path times must be strictly increasing")
        if np.any(~(self.values > 0)):
            raise ValueError("index levels must be strictly positive")

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def terminal(self) -> float:
        return float(self.values[-1])

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1


def time_grid(T: float, n_steps: int) -> np.ndarray:
    times = np.linspace(0.0, T, n_steps + 1)
    times[-1] = T
    return times


def log_increments(params: MarketParams, kind: MeasureKind, n_steps: int,
                   seed: int, path_indices) -> np.ndarray:
    """Exact Gaussian log-increments, shape ``(len(path_indices), n_steps)``."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    dt = params.T / n_steps
    z = rng.normals(seed, path_indices, n_steps)
    m = drift(params, kind)
    return (m - 0.5 * params.sigma**2) * dt + params.sigma * math.sqrt(dt) * z


def simulate_paths(params: MarketParams, kind: MeasureKind, n_paths: int,
                   n_steps: int, seed: int, first_path: int = 0) -> np.ndarray:
    """Index levels for paths ``first_path .. first_path + n_paths - 1``.

    Returns an array of shape ``(n_paths, n_steps + 1)`` whose column 0 is
    ``i0``. Row ``k`` equals ``sample_path(..., path_index=first_path + k)``.
    """
    idx = np.arange(first_path, first_path + n_paths, dtype=np.uint64)
    return simulate_indexed(params, kind, idx, n_steps, seed)


def simulate_indexed(params: MarketParams, kind: MeasureKind, path_indices,
                     n_steps: int, seed: int) -> np.ndarray:
    """Like :func:`simulate_paths` for an explicit array of path indices."""
    idx = np.atleast_1d(np.asarray(path_indices, dtype=np.uint64))
    n_paths = len(idx)
    inc = log_increments(params, kind, n_steps, seed, idx)
    logs = np.zeros((n_paths, n_steps + 1))
    np.cumsum(inc, axis=1, out=logs[:, 1:])
    return params.i0 * np.exp(logs)


def terminal_values(params: MarketParams, kind: MeasureKind, n_paths: int,
                    seed: int) -> np.ndarray:
    """``I_T`` for ``n_paths`` single-step paths."""
    return simulate_paths(params, kind, n_paths, 1, seed)[:, -1]


def sample_path(params: MarketParams, kind: MeasureKind, n_steps: int, seed: int,
                path_index: int = 0) -> Path:
    values = simulate_paths(params, kind, 1, n_steps, seed, first_path=path_index)[0]
    return Path(time_grid(params.T, n_steps), values, kind, seed, path_index)


def reciprocal_values(times, values, r: float) -> np.ndarray:
    """Pointwise ``exp(2 r t) / I_t`` (broadcasts over leading path axes)."""
    return np.exp(2.0 * r * np.asarray(times)) / np.asarray(values)


def reciprocal_drift(params: MarketParams, kind: MeasureKind) -> float:
    """Drift of ``exp(2rt)/I_t`` when ``I`` has the drift of ``kind``: ``2r + sigma^2 - m``."""
    return 2.0 * params.r + params.sigma**2 - drift(params, kind)


def reciprocal_path(path: Path, params: MarketParams) -> Path:
    """The dual process ``I*_t = exp(2 r t) / I_t``.

    Risk-neutral and EIH tags swap. A physical path stays tagged physical,
    carries the ``reciprocal-physical`` flag, and has drift
    ``2r + sigma^2 - mu`` (see :func:`reciprocal_drift`); applying the map
    twice removes the flag again.
    """
    flags = path.flags
    if path.measure is MeasureKind.RISK_NEUTRAL:
        measure = MeasureKind.EIH
    elif path.measure is MeasureKind.EIH:
        measure = MeasureKind.RISK_NEUTRAL
    else:
        measure = MeasureKind.PHYSICAL
        if RECIPROCAL_PHYSICAL in flags:
            flags = tuple(f for f in flags if f != RECIPROCAL_PHYSICAL)
        else:
            flags = flags + (RECIPROCAL_PHYSICAL,)
    values = reciprocal_values(path.times, path.values, params.r)
    return Path(path.times, values, measure, path.seed, path.path_index, flags)


# --- CSV ---------------------------------------------------------------------

def path_to_csv(path: Path, dest) -> None:
    """Write ``t,value`` rows using shortest round-trip float formatting."""
    own = isinstance(dest, (str, FsPath))
    fh = open(dest, "w", newline="", encoding="utf-8") if own else dest
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(path.times, path.values):
            w.writerow([repr(float(t)), repr(float(v))])
    finally:
        if own:
            fh.close()


def path_from_csv(src, measure: MeasureKind = MeasureKind.PHYSICAL) -> Path:
    own = isinstance(src, (str, FsPath))
    fh = open(src, newline="", encoding="utf-8") if own else src
    try:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["t", "value"]:
            raise ValueError(f"expected header t,value, got {header}")
        rows = [(float(a), float(b)) for a, b in reader]
    finally:
        if own:
            fh.close()
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    return Path(arr[:, 0], arr[:, 1], measure)
