"""Command-line interface.

Every JSON report has the shape ``{"config": ..., "result": ...}``; feeding the
report back through ``eih replay`` re-runs the embedded config and gives the
same bytes. Exit codes: 0 success, 1 numeric/runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path as FsPath

import numpy as np

from . import bounds, gtp, hedging, market, premium, pricing
from .intervals import parse_set
from .market import MarketParams, MeasureKind
from .plotting import FigureData, render, write_plot_csv

SEED_ENV = "EIH_SEED"
COMMANDS = ("interval", "price", "hedge", "mu", "verify", "gtp", "premium", "simulate")


@dataclass
class RunConfig:
    subcommand: str
    sigma: float
    r: float = 0.0
    T: float = 1.0
    mu: float | None = None
    i0: float = 1.0
    delta: float | None = None
    epsilon: float | None = None
    set: str | None = None
    n_paths: int | None = None
    steps: list[int] | int | None = None
    seed: int = 0
    output: str | None = None
    options: dict = field(default_factory=dict)

    def params(self, T: float | None = None) -> MarketParams:
        return MarketParams(sigma=self.sigma, r=self.r, T=self.T if T is None else T,
                            mu=self.mu, i0=self.i0)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(**d)


class UsageError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def dumps_report(config: RunConfig, result: dict) -> str:
    return json.dumps(_jsonable({"config": config.to_dict(), "result": result}), indent=2)


# --- subcommand bodies --------------------------------------------------------
# each returns (result dict, list of FigureData)

def _need(cfg: RunConfig, *names):
    for n in names:
        if getattr(cfg, n) is None:
            raise UsageError(f"{cfg.subcommand} needs --{n.replace('_', '-')}")


def _claim_set(cfg: RunConfig):
    if cfg.set is not None:
        return parse_set(cfg.set)
    if cfg.delta is not None:
        return pricing.exclusion_set(cfg.params(), cfg.delta)
    raise UsageError(f"{cfg.subcommand} needs --set or --delta")


def _measure(cfg: RunConfig, default: str) -> MeasureKind:
    try:
        kind = MeasureKind.parse(cfg.options.get("measure", default))
    except ValueError:
        raise UsageError(f"unknown measure {cfg.options.get('measure')!r}") from None
    if kind is MeasureKind.PHYSICAL and cfg.mu is None:
        raise UsageError("the physical measure needs --mu")
    return kind


def run_interval(cfg: RunConfig):
    _need(cfg, "delta")
    p = cfg.params()
    sided = cfg.options.get("sided", "two")
    out, notes = {}, []
    if sided == "two":
        ivs = {"two": bounds.two_sided_interval(p, cfg.delta)}
    else:
        lower, upper = bounds.one_sided_intervals(p, cfg.delta)
        ivs = {"lower": lower, "upper": upper} if sided == "both" else {sided: {"lower": lower, "upper": upper}[sided]}
    for k, iv in ivs.items():
        d = iv.to_dict()
        d["exclusion_set"] = str(iv.exclusion_set(p))
        out[k] = d
        if iv.trivial:
            notes.append(f"delta={cfg.delta} >= 1: trivial, holding the index already beats it by 1/delta")
    out["notes"] = notes
    s = p.sigma * math.sqrt(p.T)
    m = 0.5 * p.sigma**2 * p.T
    xs = np.linspace(m - 4.5 * s, m + 4.5 * s, 241)
    dens = np.exp(-0.5 * ((xs - m) / s) ** 2) / (s * math.sqrt(2 * math.pi))
    fig = FigureData("interval", "ln(I_T / e^{rT})", "EIH density",
                     title=f"prediction interval, delta={cfg.delta}")
    fig.add("eih_density", xs, dens)
    top = float(dens.max())
    for k, iv in ivs.items():
        for side, v in (("lower", iv.log_lower), ("upper", iv.log_upper)):
            if math.isfinite(v):
                fig.add(f"{k}_{side}", [v, v], [0.0, top], ls="--")
    return out, [fig]


def run_price(cfg: RunConfig):
    p = cfg.params()
    spec = pricing.ClaimSpec(_claim_set(cfg), p)
    t = float(cfg.options.get("t", 0.0))
    spot = float(cfg.options.get("spot") or p.i0)
    result = {"set": str(spec.set), "t": t, "spot": spot,
              "price": pricing.claim_price(spec, t, spot),
              "delta_units": pricing.claim_delta(spec, t, spot)}
    spots = spot * np.exp(np.linspace(-3 * p.sigma * math.sqrt(p.T - t) - 0.5,
                                      3 * p.sigma * math.sqrt(p.T - t) + 0.5, 201))
    price, delta = pricing.price_and_delta(spec, t, spots)
    f1 = FigureData("price", "spot", "claim price", title=f"claim on {spec.set}, t={t}")
    f1.add("price", spots, price).add("spot", spots, spots, ls=":")
    f2 = FigureData("delta", "spot", "index units").add("delta", spots, delta)
    return result, [f1, f2]


def run_hedge(cfg: RunConfig):
    p = cfg.params()
    kind = _measure(cfg, "physical")
    steps = cfg.steps if isinstance(cfg.steps, list) else [cfg.steps or 256]
    n_paths = cfg.n_paths or 1000
    spec = pricing.ClaimSpec(_claim_set(cfg), p)
    refinement = int(cfg.options.get("refinement", 4))
    summaries = hedging.backtest(spec, kind, n_paths, steps, cfg.seed, refinement=refinement)
    result = {"set": str(spec.set), "measure": kind.value, "initial_capital": float(
        pricing.price_and_delta(spec, 0.0, p.i0)[0]), "backtests": [s.to_dict() for s in summaries]}
    ledger_csv = cfg.options.get("ledger_csv")
    if ledger_csv:
        path = market.sample_path(p, kind, steps[-1] * refinement, cfg.seed, 0)
        hedging.replicate(spec, path, steps[-1]).to_csv(ledger_csv)
    xs = [s.steps for s in summaries]
    fig = FigureData("hedge", "rebalancing steps", "|K_T - payoff|", logx=True, logy=True,
                     title=f"replication error, {n_paths} paths")
    fig.add("rms_error", xs, [s.rms_error for s in summaries])
    fig.add("median_error", xs, [s.median_error for s in summaries])
    fig.add("p99_error", xs, [s.p99_error for s in summaries])
    return result, [fig]


def run_mu(cfg: RunConfig):
    _need(cfg, "delta", "epsilon")
    p = cfg.params()
    variant = cfg.options.get("variant", "two-sided")
    b = bounds.mu_bound(p, cfg.delta, cfg.epsilon, variant)
    result = asdict(b)
    result["interval"] = [b.center - b.halfwidth, b.center + b.halfwidth]
    if p.mu is not None:
        result["mu"] = p.mu
        result["mu_inside"] = b.contains(p.mu)
    Ts = np.linspace(max(p.T / 20, 1e-3), 4 * p.T, 120)
    fig = FigureData("mu", "T", "halfwidth of |r + sigma^2 - mu|", title="drift band")
    for v in bounds.VARIANTS:
        fig.add(v, Ts, [bounds.mu_bound(p.with_(T=float(T)), cfg.delta, cfg.epsilon, v).halfwidth
                        for T in Ts])
    return result, [fig]


def run_verify(cfg: RunConfig):
    _need(cfg, "delta", "epsilon", "mu")
    p = cfg.params()
    variant = cfg.options.get("variant", "two-sided")
    rep = bounds.verify_drift_bound(p, cfg.delta, cfg.epsilon, variant, cfg.n_paths or 10_000, cfg.seed)
    fig = FigureData("verify", "0 = interval event, 1 = strategy beats", "frequency",
                     title=f"{variant}: empirical frequencies with 95% Wilson bounds")
    fig.add("empirical", [0, 1], [rep.event_freq, rep.beat_freq], ls="none")
    fig.add("wilson_lo", [0, 1], [rep.event_ci[0], rep.beat_ci[0]], ls="none", marker="_")
    fig.add("wilson_hi", [0, 1], [rep.event_ci[1], rep.beat_ci[1]], ls="none", marker="_")
    fig.add("exact", [0, 1], [rep.event_prob_exact, 1 - rep.event_prob_exact], ls="none", marker="x")
    return rep.to_dict(), [fig]


def run_gtp(cfg: RunConfig):
    _need(cfg, "set")
    p = cfg.params()
    numeraire = cfg.options.get("numeraire", "bond")
    event = gtp.TerminalEvent(parse_set(cfg.set))
    return {"set": str(event.set), "numeraire": numeraire,
            "upper": gtp.upper_prob(p, event, numeraire),
            "lower": gtp.lower_prob(p, event, numeraire)}, []


def run_premium(cfg: RunConfig):
    _need(cfg, "delta")
    csv_path = cfg.options.get("csv")
    realized = cfg.options.get("realized")
    if csv_path:
        series = premium.read_returns_csv(csv_path)
        rep = premium.analyze(series, cfg.params(), cfg.delta)
        result = rep.to_dict()
        result["gaps"] = series.gaps
        result["mean"] = "arithmetic"
        excess = np.array(series.excess())
        years = np.array([row.year for row in series.rows], dtype=float)
        n = np.arange(1, len(excess) + 1)
        running = np.cumsum(excess) / n
        half = np.array([premium.premium_halfwidth(cfg.params(T=float(k)), cfg.delta) for k in n])
        pred = premium.predicted_premium(cfg.params())
        fig = FigureData("premium", "year", "equity premium", title="running mean vs sigma^2 band")
        fig.add("running_mean", years, running)
        fig.add("band_lo", years, pred - half, ls="--").add("band_hi", years, pred + half, ls="--")
        fig.add("predicted", years, np.full_like(years, pred), ls=":")
        return result, [fig]
    if realized is None:
        raise UsageError("premium needs --csv or --realized")
    rep = premium.premium_report(float(realized), cfg.params(), cfg.delta)
    Ts = np.linspace(10, max(2 * cfg.T, 20), 100)
    half = np.array([premium.premium_halfwidth(cfg.params(T=float(T)), cfg.delta) for T in Ts])
    fig = FigureData("premium", "T (years)", "equity premium", title="sigma^2 band")
    fig.add("band_lo", Ts, rep.predicted - half, ls="--").add("band_hi", Ts, rep.predicted + half, ls="--")
    fig.add("realized", [cfg.T], [rep.realized], ls="none")
    return rep.to_dict(), [fig]


def run_simulate(cfg: RunConfig):
    p = cfg.params()
    kind = _measure(cfg, "eih")
    n_steps = cfg.steps if isinstance(cfg.steps, int) else (cfg.steps or [252])[0]
    n = cfg.n_paths or 1
    paths = [market.sample_path(p, kind, n_steps, cfg.seed, i) for i in range(n)]
    if cfg.options.get("reciprocal"):
        paths = [market.reciprocal_path(x, p) for x in paths]
    buf = io.StringIO()
    if n == 1:
        market.path_to_csv(paths[0], buf)
    else:
        buf.write("path,t,value\n")
        for i, x in enumerate(paths):
            for t, v in zip(x.times, x.values):
                buf.write(f"{i},{float(t)!r},{float(v)!r}\n")
    fig = FigureData("simulate", "t", "index level", title=f"{n} {kind.value} path(s)")
    for i, x in enumerate(paths[:50]):
        fig.add(f"path{i}", x.times, x.values)
    return buf.getvalue(), [fig]


RUNNERS = {
    "interval": run_interval, "price": run_price, "hedge": run_hedge, "mu": run_mu,
    "verify": run_verify, "gtp": run_gtp, "premium": run_premium, "simulate": run_simulate,
}


def execute(cfg: RunConfig):
    """Run a config; returns (result, figures). ``simulate`` returns CSV text."""
    return RUNNERS[cfg.subcommand](cfg)


# --- argument parsing -----------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("step counts must be positive integers")
    return vals


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eih", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sigma", type=float, default=0.2)
    common.add_argument("--r", type=float, default=0.0)
    common.add_argument("--T", type=float, default=1.0)
    common.add_argument("--mu", type=float, default=None)
    common.add_argument("--i0", type=float, default=1.0)
    common.add_argument("--seed", type=int, default=None,
                        help=f"default: ${SEED_ENV} or 0")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    plots = argparse.ArgumentParser(add_help=False)
    plots.add_argument("--plot-csv", default=None, help="tidy figure,series,x,y CSV")
    plots.add_argument("--plot", default=None, help="render the same figure data to an image")

    p = sub.add_parser("interval", parents=[common, plots], help="prediction interval for I_T")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--sided", choices=("two", "lower", "upper", "both"), default="two")

    p = sub.add_parser("price", parents=[common, plots], help="closed-form claim price and delta")
    p.add_argument("--set")
    p.add_argument("--delta", type=float, help="use the two-sided exclusion set at this level")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--spot", type=float, default=None)

    p = sub.add_parser("hedge", parents=[common, plots], help="discrete replication backtest")
    p.add_argument("--set")
    p.add_argument("--delta", type=float)
    p.add_argument("--steps", type=_int_list, default=[64, 256, 1024])
    p.add_argument("--n", type=int, default=1000, dest="n_paths")
    p.add_argument("--measure", default="physical")
    p.add_argument("--refinement", type=int, default=4)
    p.add_argument("--ledger-csv", default=None)

    p = sub.add_parser("mu", parents=[common, plots], help="band on mu around r + sigma^2")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--variant", choices=bounds.VARIANTS, default="two-sided")

    p = sub.add_parser("verify", parents=[common, plots], help="Monte Carlo check of a drift bound")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--variant", choices=bounds.VARIANTS, default="two-sided")
    p.add_argument("--n", type=int, default=10_000, dest="n_paths")

    p = sub.add_parser("gtp", parents=[common], help="upper/lower probability of {I_T in set}")
    p.add_argument("--numeraire", choices=gtp.NUMERAIRES, required=True)
    p.add_argument("--set", required=True)

    p = sub.add_parser("premium", parents=[common, plots], help="equity premium vs sigma^2")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--csv", default=None, help="year,equity_return,riskless_return")
    p.add_argument("--realized", type=float, default=None, help="realised premium over --T years")

    p = sub.add_parser("simulate", parents=[common, plots], help="sample paths as CSV")
    p.add_argument("--measure", default="eih")
    p.add_argument("--steps", type=int, default=252)
    p.add_argument("--n", type=int, default=1, dest="n_paths")
    p.add_argument("--reciprocal", action="store_true")

    p = sub.add_parser("replay", help="re-run the config embedded in a JSON report")
    p.add_argument("report")
    p.add_argument("--out", default=None)
    return parser


_CONFIG_FIELDS = ("sigma", "r", "T", "mu", "i0", "delta", "epsilon", "set", "n_paths", "steps")
_OPTION_FIELDS = ("sided", "t", "spot", "measure", "refinement", "ledger_csv", "variant",
                  "numeraire", "csv", "realized", "reciprocal")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kw = {k: getattr(ns, k) for k in _CONFIG_FIELDS if hasattr(ns, k)}
    opts = {k: getattr(ns, k) for k in _OPTION_FIELDS if getattr(ns, k, None) is not None}
    seed = ns.seed if ns.seed is not None else _default_seed()
    return RunConfig(subcommand=ns.subcommand, seed=seed, output=ns.out, options=opts, **kw)


def _emit(text: str, dest: str | None) -> None:
    if dest:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.subcommand == "replay":
        try:
            doc = json.loads(FsPath(ns.report).read_text(encoding="utf-8"))
            cfg = RunConfig.from_dict(doc["config"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            parser.error(f"cannot read report {ns.report}: {exc}")
        dest = ns.out
        plot_csv = plot_png = None
    else:
        cfg = config_from_args(ns)
        dest = cfg.output
        plot_csv, plot_png = getattr(ns, "plot_csv", None), getattr(ns, "plot", None)
    try:
        cfg.params()
        if cfg.set is not None:
            parse_set(cfg.set)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        result, figures = execute(cfg)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        inputs = json.dumps(_jsonable(cfg.to_dict()))
        print(f"eih {cfg.subcommand}: error: {exc}\n  inputs: {inputs}", file=sys.stderr)
        return 1
    text = result if isinstance(result, str) else dumps_report(cfg, result)
    _emit(text, dest)
    if plot_csv and figures:
        write_plot_csv(figures, plot_csv)
    if plot_png and figures:
        render(figures, plot_png)
    return 0


if __name__ == "__main__":
    sys.exit(main())
