"""Monte Carlo runner and the frequency statistics used by every report."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gaussian import upper_quantile

MIN_PATHS = 100

# generator(path_indices, seed) -> per-path values, shape (n,) or (n, k)
Generator = Callable[[np.ndarray, int], np.ndarray]


class ExperimentError(RuntimeError):
    """A path generator failed; carries what is needed to replay that path."""

    def __init__(self, path_index: int, seed: int, reason: str):
        self.path_index = path_index
        self.seed = seed
        self.sub_seed = (seed, path_index)
        super().__init__(f"path {path_index} failed (replay with seed={seed}, "
                         f"path_index={path_index}): {reason}")


def wilson_interval(hits: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1 or not 0 <= hits <= n:
        raise ValueError(f"need 0 <= hits <= n and n >= 1, got hits={hits}, n={n}")
    z = upper_quantile((1.0 - level) / 2.0)
    p = hits / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n))
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == n else min(1.0, center + half)
    return lo, hi


@dataclass(frozen=True)
class FreqEstimate:
    hits: int
    n: int
    p_hat: float
    wilson_lo: float
    wilson_hi: float
    level: float = 0.95

    @classmethod
    def from_counts(cls, hits: int, n: int, level: float = 0.95) -> "FreqEstimate":
        lo, hi = wilson_interval(hits, n, level)
        return cls(int(hits), int(n), hits / n, lo, hi, level)

    @classmethod
    def from_indicator(cls, flags, level: float = 0.95) -> "FreqEstimate":
        flags = np.asarray(flags, dtype=bool)
        return cls.from_counts(int(flags.sum()), flags.size, level)

    def contains(self, p: float) -> bool:
        return self.wilson_lo <= p <= self.wilson_hi

    def to_dict(self) -> dict:
        return {"hits": self.hits, "n": self.n, "p_hat": self.p_hat,
                "ci": [self.wilson_lo, self.wilson_hi], "level": self.level}


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    n_paths: int
    seed: int
    values: np.ndarray  # (n_paths, k), rows in path-index order
    mean: np.ndarray
    std: np.ndarray
    stderr: np.ndarray

    def freq(self, column: int = 0, level: float = 0.95) -> FreqEstimate:
        col = self.values[:, column]
        if not np.all((col == 0) | (col == 1)):
            raise ValueError(f"column {column} is not an indicator")
        return FreqEstimate.from_counts(int(col.sum()), self.n_paths, level)


def compensated_moments(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and sample std per column, via exactly rounded sums (order-free)."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    means = np.array([math.fsum(c) / n for c in values.T])
    var = np.array([math.fsum((c - m) ** 2) / max(n - 1, 1) for c, m in zip(values.T, means)])
    return means, np.sqrt(var)


def _run_chunk(generator: Generator, idx: np.ndarray, seed: int) -> np.ndarray:
    try:
        out = np.asarray(generator(idx, seed), dtype=float)
        if out.shape[0] != len(idx):
            raise ValueError(f"generator returned {out.shape[0]} rows for {len(idx)} paths")
        bad = ~np.isfinite(out.reshape(len(idx), -1)).all(axis=1)
        if bad.any():
            i = int(idx[np.argmax(bad)])
            raise ExperimentError(i, seed, "non-finite value")
        return out
    except ExperimentError:
        raise
    except Exception as exc:
        # isolate the first failing path so it can be replayed alone
        for i in idx:
            try:
                generator(np.array([i], dtype=idx.dtype), seed)
            except Exception as inner:
                raise ExperimentError(int(i), seed, repr(inner)) from inner
        raise ExperimentError(int(idx[0]), seed, repr(exc)) from exc


def run_experiment(generator: Generator, n_paths: int, seed: int, *,
                   workers: int = 1, chunk_size: int = 4096) -> ExperimentResult:
    """Evaluate ``generator`` on paths ``0 .. n_paths-1`` and aggregate.

    The generator must be a pure function of ``(path_indices, seed)``; results
    are then identical for any ``workers`` and ``chunk_size``.
    """
    if n_paths < MIN_PATHS:
        raise ValueError(f"n_paths must be >= {MIN_PATHS}, got {n_paths}")
    chunks = [np.arange(s, min(s + chunk_size, n_paths), dtype=np.uint64)
              for s in range(0, n_paths, chunk_size)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _run_chunk(generator, c, seed), chunks))
    else:
        parts = [_run_chunk(generator, c, seed) for c in chunks]
    values = np.concatenate(parts, axis=0).reshape(n_paths, -1)
    mean, std = compensated_moments(values)
    return ExperimentResult(n_paths, seed, values, mean, std, std / math.sqrt(n_paths))
