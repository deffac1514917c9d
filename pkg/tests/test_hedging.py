import io
import math

import numpy as np
import pytest

from eih.hedging import DELTA_CAP, backtest, beat_report, replicate
from eih.intervals import IntervalUnion, parse_set
from eih.market import MarketParams, MeasureKind, Path, sample_path, time_grid
from eih.pricing import ClaimSpec, claim_price, exclusion_set

K = MeasureKind


def test_buy_and_hold_is_exact(base_params):
    spec = ClaimSpec(IntervalUnion.positive(), base_params)
    path = sample_path(base_params, K.PHYSICAL, 64, seed=2)
    ledger = replicate(spec, path, 16)
    np.testing.assert_allclose(ledger.value, path.values, rtol=1e-14)
    np.testing.assert_allclose(ledger.index_units, 1.0, rtol=1e-15)
    rep = beat_report(ledger, path, spec)
    assert rep.replication_error < 1e-13
    assert rep.beat_factor == pytest.approx(1.0, rel=1e-13)


def test_deterministic_in_the_money():
    p = MarketParams(sigma=1e-9, r=0.05, T=1.0)
    spec = ClaimSpec(IntervalUnion.of((math.exp(0.05) * 0.999, math.inf)), p)
    path = sample_path(p, K.RISK_NEUTRAL, 64, seed=0)
    ledger = replicate(spec, path, 16)
    assert ledger.final == pytest.approx(path.terminal, rel=1e-9)
    assert ledger.index_units[-2] == pytest.approx(1.0, abs=1e-9)


def test_initial_capital_is_price(base_params):
    spec = ClaimSpec(exclusion_set(base_params, 0.1), base_params)
    ledger = replicate(spec, sample_path(base_params, K.PHYSICAL, 128, seed=1), 32)
    assert ledger.initial == pytest.approx(claim_price(spec, 0.0, 1.0), rel=1e-15)
    assert ledger.initial == pytest.approx(0.1, abs=1e-12)


def test_self_financing(base_params):
    spec = ClaimSpec(parse_set("(-inf,1.1]u[1.6,3.0]"), base_params)
    path = sample_path(base_params, K.PHYSICAL, 512, seed=4)
    ledger = replicate(spec, path, 128)
    assert ledger.self_financing_residual(path, base_params.r) < 1e-12
    assert ledger.rebalance.sum() == 128


def test_grid_must_refine(base_params):
    spec = ClaimSpec(IntervalUnion.positive(), base_params)
    path = sample_path(base_params, K.PHYSICAL, 10, seed=0)
    with pytest.raises(ValueError):
        replicate(spec, path, 4)
    with pytest.raises(ValueError):
        replicate(spec, path, 0)


def test_zero_price_claim_rejected(base_params):
    path = sample_path(base_params, K.PHYSICAL, 8, seed=0)
    with pytest.raises(ValueError):
        replicate(ClaimSpec(IntervalUnion.empty(), base_params), path, 8)


def test_beat_factor_hit_and_miss(base_params):
    spec = ClaimSpec(exclusion_set(base_params, 0.1), base_params)
    lo, hi = spec.set.intervals[0].hi, spec.set.intervals[1].lo
    hits, misses = [], []
    for i in range(300):
        path = sample_path(base_params, K.PHYSICAL, 1024, seed=17, path_index=i)
        far = abs(math.log(path.terminal / lo)) > 0.3 and abs(math.log(path.terminal / hi)) > 0.3
        if not far:
            continue
        rep = beat_report(replicate(spec, path, 1024), path, spec, delta=0.1)
        (hits if rep.event_hit else misses).append(rep.beat_factor)
        assert rep.target == pytest.approx(10.0)
    assert hits and misses
    assert np.median(hits) == pytest.approx(10.0, rel=0.02)
    assert np.median(np.abs(misses)) < 0.05


def test_exact_replication_beats_by_reciprocal():
    # a ledger that replicates exactly: K_0 = delta, K_T = I_T on a hit
    from eih.hedging import StrategyLedger
    p = MarketParams(sigma=0.2, r=0.0, T=1.0)
    spec = ClaimSpec(exclusion_set(p, 0.1), p)
    path = Path(np.array([0.0, 1.0]), np.array([1.0, 5.0]), K.PHYSICAL)
    ledger = StrategyLedger(path.times, np.zeros(2), np.zeros(2), np.array([0.1, 5.0]),
                            np.array([True, False]))
    rep = beat_report(ledger, path, spec, 0.1)
    assert rep.event_hit and rep.beat_factor == pytest.approx(10.0, rel=1e-14)


def test_ledger_csv(base_params):
    spec = ClaimSpec(exclusion_set(base_params, 0.2), base_params)
    ledger = replicate(spec, sample_path(base_params, K.PHYSICAL, 16, seed=0), 4)
    buf = io.StringIO()
    ledger.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,index_units,bond_units,value"
    assert len(lines) == 18
    assert float(lines[-1].split(",")[3]) == ledger.final


def test_prudence_slack_reported(base_params):
    spec = ClaimSpec(exclusion_set(base_params, 0.1), base_params)
    ledger = replicate(spec, sample_path(base_params, K.PHYSICAL, 256, seed=3), 64)
    assert ledger.eps_disc == max(0.0, -ledger.value.min())


def test_delta_cap_flags():
    # a near-expiry boundary produces a huge delta that must be clipped, not propagated
    p = MarketParams(sigma=0.2, r=0.0, T=1.0)
    spec = ClaimSpec(parse_set("[1.0,inf)"), p)
    times = time_grid(1.0, 4)
    path = Path(times, np.array([1.0, 1.0, 1.0, 1.0 + 1e-12, 1.0]), K.PHYSICAL)
    ledger = replicate(spec, path, 4)
    assert np.all(np.isfinite(ledger.value))
    assert np.all(np.abs(ledger.index_units) <= DELTA_CAP)


def test_median_error_small_and_decreasing(base_params):
    spec = ClaimSpec(exclusion_set(base_params, 0.1), base_params)
    res = backtest(spec, K.PHYSICAL, 10_000, [64, 256, 512, 1024], seed=8)
    by = {s.steps: s for s in res}
    assert by[512].median_error <= 0.02 * base_params.i0
    assert by[64].median_error > by[256].median_error > by[1024].median_error
    assert all(s.n_paths == 10_000 for s in res)


def test_index_numeraire_martingale():
    # K/I is a martingale under the EIH measure for any self-financing strategy
    p = MarketParams(sigma=0.2, r=0.02, T=10.0)
    spec = ClaimSpec(exclusion_set(p, 0.1), p)
    (s,) = backtest(spec, K.EIH, 10_000, [64], seed=12)
    assert abs(s.ratio_mean - 0.1) < 4 * s.ratio_stderr


def test_backtest_deterministic(base_params):
    spec = ClaimSpec(exclusion_set(base_params, 0.1), base_params)
    a = backtest(spec, K.PHYSICAL, 300, [8, 32], seed=1)
    b = backtest(spec, K.PHYSICAL, 300, [8, 32], seed=1, chunk_size=37, workers=3)
    assert [x.to_dict() for x in a] == [x.to_dict() for x in b]
