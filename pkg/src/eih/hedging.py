"""Discrete delta replication of truncated index claims.

The strategy starts with the claim's price, holds ``claim_delta`` index units
and keeps the rest in the bond ``exp(r t)``. Holdings change only on the
rebalancing grid; the path itself may be finer, and the portfolio is marked
at every path point so that intra-period dips show up in the prudence slack.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path as FsPath

import numpy as np

from .harness import run_experiment
from .market import MeasureKind, Path, simulate_indexed, time_grid
from .pricing import ClaimSpec, in_set, payoff_array, price_and_delta

DELTA_CAP = 1e6
NEAR_BOUNDARY = 1e-3


@dataclass(frozen=True, eq=False)
class StrategyLedger:
    """Holdings and value at every point of the path grid.

    Units at a rebalancing time are the post-trade holdings; between trades
    they are carried forward. ``value`` is the mark-to-market ``K_t``.
    """

    times: np.ndarray
    index_units: np.ndarray
    bond_units: np.ndarray
    value: np.ndarray
    rebalance: np.ndarray  # bool mask over times
    capped: int = 0

    @property
    def initial(self) -> float:
        return float(self.value[0])

    @property
    def final(self) -> float:
        return float(self.value[-1])

    @property
    def eps_disc(self) -> float:
        """Discrete prudence slack ``max(0, -min K)``."""
        return max(0.0, -float(self.value.min()))

    def self_financing_residual(self, path: Path, r: float) -> float:
        """Largest relative gap between pre- and post-trade portfolio value."""
        bond = np.exp(r * self.times)
        worst = 0.0
        idx = np.flatnonzero(self.rebalance)
        for prev, k in zip(idx[:-1], idx[1:]):
            pre = self.index_units[prev] * path.values[k] + self.bond_units[prev] * bond[k]
            post = self.index_units[k] * path.values[k] + self.bond_units[k] * bond[k]
            scale = max(abs(pre), abs(self.value[k]), 1e-300)
            worst = max(worst, abs(pre - post) / scale, abs(pre - self.value[k]) / scale)
        return worst

    def to_csv(self, dest) -> None:
        own = isinstance(dest, (str, FsPath))
        fh = open(dest, "w", newline="", encoding="utf-8") if own else dest
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "index_units", "bond_units", "value"])
            for row in zip(self.times, self.index_units, self.bond_units, self.value):
                w.writerow([repr(float(x)) for x in row])
        finally:
            if own:
                fh.close()


@dataclass(frozen=True)
class BeatReport:
    beat_factor: float
    event_hit: bool
    replication_error: float
    target: float | None = None


def _check_claim(spec: ClaimSpec) -> float:
    p = spec.params
    k0 = float(price_and_delta(spec, 0.0, p.i0)[0])
    if not k0 > 0:
        raise ValueError(f"claim on {spec.set} has zero price; the beat ratio 1/K_0 is undefined")
    return k0


def _hedge(spec: ClaimSpec, times: np.ndarray, values: np.ndarray,
           rebalance_steps: int, record: bool):
    """Core loop over a block of paths ``values`` of shape (n_paths, N + 1)."""
    p = spec.params
    n_fine = values.shape[1] - 1
    if rebalance_steps < 1:
        raise ValueError(f"rebalance_steps must be >= 1, got {rebalance_steps}")
    if n_fine % rebalance_steps:
        raise ValueError(f"path grid ({n_fine} steps) does not refine "
                         f"{rebalance_steps} rebalancing steps")
    q = n_fine // rebalance_steps
    bond = np.exp(p.r * times)

    k0, d0 = price_and_delta(spec, 0.0, values[:, 0])
    capped = (np.abs(d0) > DELTA_CAP).astype(int)
    units = np.clip(d0, -DELTA_CAP, DELTA_CAP)
    cash = (k0 - units * values[:, 0]) / bond[0]
    min_k = k0.copy()
    if record:
        iu = np.empty_like(values)
        bu = np.empty_like(values)
        kv = np.empty_like(values)
        iu[:, 0], bu[:, 0], kv[:, 0] = units, cash, k0

    for k in range(rebalance_steps):
        j0, j1 = k * q + 1, (k + 1) * q + 1
        block = units[:, None] * values[:, j0:j1] + cash[:, None] * bond[j0:j1]
        np.minimum(min_k, block.min(axis=1), out=min_k)
        if record:
            iu[:, j0:j1] = units[:, None]
            bu[:, j0:j1] = cash[:, None]
            kv[:, j0:j1] = block
        kj = block[:, -1]
        j = j1 - 1
        if j < n_fine:
            _, d = price_and_delta(spec, times[j], values[:, j])
            capped += np.abs(d) > DELTA_CAP
            units = np.clip(d, -DELTA_CAP, DELTA_CAP)
            cash = (kj - units * values[:, j]) / bond[j]
            if record:
                iu[:, j], bu[:, j] = units, cash
    out = {"k0": k0, "kT": kj, "min_k": min_k, "capped": capped}
    if record:
        out.update(index_units=iu, bond_units=bu, value=kv)
    return out


def replicate(spec: ClaimSpec, path: Path, rebalance_steps: int) -> StrategyLedger:
    _check_claim(spec)
    res = _hedge(spec, path.times, path.values[None, :], rebalance_steps, record=True)
    mask = np.zeros(len(path.times), dtype=bool)
    mask[:: path.n_steps // rebalance_steps] = True
    mask[-1] = False
    return StrategyLedger(path.times, res["index_units"][0], res["bond_units"][0],
                          res["value"][0], mask, int(res["capped"][0]))


def beat_report(ledger: StrategyLedger, path: Path, spec: ClaimSpec,
                delta: float | None = None) -> BeatReport:
    i0, iT = float(path.values[0]), path.terminal
    k0, kT = ledger.initial, ledger.final
    factor = (kT / iT) / (k0 / i0)
    pay = float(payoff_array(spec, iT))
    return BeatReport(factor, bool(in_set(spec.set, iT)), abs(kT - pay),
                      None if delta is None else 1.0 / delta)


# --- cohort backtests ---------------------------------------------------------

@dataclass
class BacktestSummary:
    steps: int
    n_paths: int
    rms_error: float
    median_error: float
    p99_error: float
    near_boundary_p99: float | None
    eps_disc: float
    capped: int
    ratio_mean: float
    ratio_stderr: float
    beat_stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _boundary_levels(spec: ClaimSpec) -> np.ndarray:
    pts = [x for x in spec.set.endpoints() if 0 < x < math.inf]
    return np.array(pts, dtype=float)


def backtest(spec: ClaimSpec, kind: MeasureKind, n_paths: int, steps: list[int],
             seed: int, refinement: int = 4, chunk_size: int = 500,
             workers: int = 1) -> list[BacktestSummary]:
    """Hedge one fixed cohort of paths at several rebalancing frequencies.

    Paths are simulated once on ``max(steps) * refinement`` steps and every
    frequency in ``steps`` is hedged on that same cohort.
    """
    k0 = _check_claim(spec)
    p = spec.params
    steps = sorted(int(s) for s in steps)
    n_fine = steps[-1] * refinement
    times = time_grid(p.T, n_fine)
    bounds = _boundary_levels(spec)

    def generator(idx: np.ndarray, seed_: int) -> np.ndarray:
        vals = simulate_indexed(p, kind, idx, n_fine, seed_)
        iT = vals[:, -1]
        pay = payoff_array(spec, iT)
        cols = [iT, pay]
        for m in steps:
            res = _hedge(spec, times, vals, m, record=False)
            cols += [res["kT"], res["min_k"], res["capped"]]
        return np.column_stack(cols)

    result = run_experiment(generator, n_paths, seed, workers=workers, chunk_size=chunk_size)
    v = result.values
    iT, pay = v[:, 0], v[:, 1]
    hit = in_set(spec.set, iT)
    near = np.zeros(n_paths, dtype=bool)
    if bounds.size:
        near = (np.abs(iT[:, None] / bounds[None, :] - 1.0) < NEAR_BOUNDARY).any(axis=1)

    out = []
    for i, m in enumerate(steps):
        kT = v[:, 2 + 3 * i]
        min_k = v[:, 3 + 3 * i]
        capped = int(v[:, 4 + 3 * i].sum())
        err = np.abs(kT - pay)
        beat = (kT / iT) / (k0 / p.i0)
        ratio = kT / iT
        stats = {
            "hit_fraction": float(hit.mean()),
            "n_hit": int(hit.sum()),
            "target": p.i0 / k0,
            "median_hit_beat": float(np.median(beat[hit])) if hit.any() else None,
            "mean_hit_beat": float(beat[hit].mean()) if hit.any() else None,
            "mean_miss_beat": float(beat[~hit].mean()) if (~hit).any() else None,
        }
        out.append(BacktestSummary(
            steps=m,
            n_paths=n_paths,
            rms_error=math.sqrt(math.fsum(err**2) / n_paths),
            median_error=float(np.median(err)),
            p99_error=float(np.quantile(err, 0.99)),
            near_boundary_p99=float(np.quantile(err[near], 0.99)) if near.any() else None,
            eps_disc=max(0.0, -float(min_k.min())),
            capped=capped,
            ratio_mean=math.fsum(ratio) / n_paths,
            ratio_stderr=float(ratio.std(ddof=1) / math.sqrt(n_paths)),
            beat_stats=stats,
        ))
    return out


def summary_json(summaries: list[BacktestSummary]) -> str:
    return json.dumps([s.to_dict() for s in summaries], indent=2)
