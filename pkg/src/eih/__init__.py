"""Efficient-index toolkit: truncated index claims, their replication, and
the prediction intervals, drift bounds and numeraire probabilities that
follow from them under the BSM model."""

from .bounds import (MuBound, PredictionInterval, VerificationReport, mu_bound,
                     one_sided_intervals, two_sided_interval, verify_drift_bound)
from .gaussian import norm_cdf, norm_ppf, upper_quantile
from .gtp import TerminalEvent, lower_prob, upper_prob_bond, upper_prob_index
from .harness import FreqEstimate, run_experiment, wilson_interval
from .hedging import BeatReport, StrategyLedger, backtest, beat_report, replicate
from .intervals import Interval, IntervalUnion, format_set, map_interval_union, parse_set
from .market import (MarketParams, MeasureKind, Path, drift, reciprocal_path, sample_path,
                     simulate_paths)
from .premium import (PremiumReport, ReturnSeries, analyze, predicted_premium,
                      premium_halfwidth, realized_log_premium)
from .pricing import (ClaimSpec, claim_delta, claim_price, exclusion_set, gaussian_measure,
                      payoff, thresholds_ab)

__version__ = "0.1.0"
