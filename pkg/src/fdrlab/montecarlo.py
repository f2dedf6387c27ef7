"""Batched simulation of two-sample t experiments.

Experiment i of a batch draws its observations from `RngStream(master_seed,
i)`, so any slice of a batch can be recomputed independently and the result
of `run_batch` is bitwise identical no matter how many worker threads run
it.  Work is sharded into fixed-size chunks of experiment indices; partial
aggregates are merged strictly in chunk order.

P values are binned on a fixed 0.001 grid at collection time (bin k covers
the half-open cell (k/1000, (k+1)/1000]), so a batch has flat memory cost
and any grid-aligned interval count is exact.  Raw p values can optionally
be retained for debugging via ``SimConfig.keep_pvalues``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from . import power as power_mod
from .distributions import RngStream, normal_quantile
from .errors import ConfigurationError, DomainError, UndefinedResultError
from .fdr_calculus import Breakdown, TestScenario, significance_breakdown
from .ttest import batch_two_sample_t

DEFAULT_MASTER_SEED = 12345

# Experiments per shard.  Fixed: the shard layout (not the thread count)
# determines summation order, so changing this constant would perturb last
# bits of the moment sums.
_CHUNK = 4096

_N_BINS = 1000
_BIN_EDGES = np.arange(_N_BINS + 1) / 1000.0


def grid_index(value: float, name: str = "value") -> int:
    """Index of `value` on the 0.001 p-value grid; rejects off-grid input."""
    value = float(value)
    idx = int(round(value * 1000.0))
    if not 0 <= idx <= _N_BINS or value != _BIN_EDGES[idx]:
        raise DomainError(f"{name} must lie on the 0.001 grid in [0, 1]; got {value}")
    return idx


@dataclass(frozen=True)
class SimConfig:
    """Full specification of one simulation batch."""

    n_per_group: int
    true_mean_control: float = 0.0
    true_mean_treatment: float = 0.0
    sd: float = 1.0
    n_sims: int = 100_000
    alpha: float = 0.05
    master_seed: int = DEFAULT_MASTER_SEED
    keep_pvalues: bool = False

    def __post_init__(self):
        if not isinstance(self.n_per_group, (int, np.integer)) or self.n_per_group < 2:
            raise ConfigurationError("n_per_group must be an integer >= 2")
        if not isinstance(self.n_sims, (int, np.integer)) or self.n_sims < 1:
            raise ConfigurationError("n_sims must be a positive integer")
        for name in ("true_mean_control", "true_mean_treatment", "sd"):
            if not math.isfinite(float(getattr(self, name))):
                raise ConfigurationError(f"{name} must be finite")
        if self.sd <= 0.0:
            raise ConfigurationError("sd must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError("alpha must lie strictly inside (0, 1)")
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise ConfigurationError("master_seed must fit in an unsigned 64-bit integer")

    @property
    def true_diff(self) -> float:
        return self.true_mean_treatment - self.true_mean_control

    def to_dict(self) -> dict:
        return {
            "n_per_group": self.n_per_group,
            "true_mean_control": self.true_mean_control,
            "true_mean_treatment": self.true_mean_treatment,
            "sd": self.sd,
            "n_sims": self.n_sims,
            "alpha": self.alpha,
            "master_seed": self.master_seed,
        }


@dataclass(frozen=True, eq=False)
class SimSummary:
    """Aggregated outcomes of one batch (see `run_batch`)."""

    config: SimConfig
    count_significant: int
    p_histogram: np.ndarray
    mean_diff_all: float
    sd_diff_all: float
    mean_diff_significant: float
    count_wrong_sign_significant: int
    p_values: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_sims(self) -> int:
        return self.config.n_sims

    @property
    def fraction_significant(self) -> float:
        return self.count_significant / self.config.n_sims

    def count_in_interval(self, lo: float, hi: float) -> int:
        """Number of p values in (lo, hi], both bounds on the 0.001 grid.

        The left bound is exclusive and the right inclusive, matching the
        half-open histogram cells; with a grid-aligned alpha,
        ``count_in_interval(0, alpha) == count_significant`` exactly, since
        p values are never 0.
        """
        lo_idx = grid_index(lo, "lo")
        hi_idx = grid_index(hi, "hi")
        if lo_idx >= hi_idx:
            raise DomainError("interval must satisfy lo < hi")
        return int(self.p_histogram[lo_idx:hi_idx].sum())

    def to_dict(self) -> dict:
        mean_sig = self.mean_diff_significant
        return {
            "config": self.config.to_dict(),
            "count_significant": self.count_significant,
            "fraction_significant": self.fraction_significant,
            "mean_diff_all": self.mean_diff_all,
            "sd_diff_all": self.sd_diff_all,
            "mean_diff_significant": None if math.isnan(mean_sig) else mean_sig,
            "count_wrong_sign_significant": self.count_wrong_sign_significant,
            "p_histogram_bin_width": 0.001,
            "p_histogram": self.p_histogram.tolist(),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


class _Partial(NamedTuple):
    count: int
    sum_diff: float
    sum_diff_sq: float
    count_sig: int
    sum_diff_sig: float
    count_wrong_sign: int
    histogram: np.ndarray
    p_values: np.ndarray | None


def _simulate_chunk(config: SimConfig, start: int, stop: int) -> _Partial:
    n = config.n_per_group
    m = stop - start
    u = np.empty((m, 2 * n))
    for row, index in enumerate(range(start, stop)):
        u[row] = RngStream(config.master_seed, index).uniforms(2 * n)
    z = normal_quantile(u)
    control = config.true_mean_control + config.sd * z[:, :n]
    treatment = config.true_mean_treatment + config.sd * z[:, n:]

    _, _, p, diff, _ = batch_two_sample_t(control, treatment)

    sig = p <= config.alpha
    true_sign = np.sign(config.true_diff)
    if true_sign == 0.0:
        wrong = 0
    else:
        wrong = int(np.count_nonzero(sig & (np.sign(diff) == -true_sign)))

    hist = np.bincount(np.searchsorted(_BIN_EDGES, p, side="left") - 1,
                       minlength=_N_BINS).astype(np.int64)
    return _Partial(
        count=m,
        sum_diff=float(diff.sum()),
        sum_diff_sq=float((diff * diff).sum()),
        count_sig=int(np.count_nonzero(sig)),
        sum_diff_sig=float(diff[sig].sum()),
        count_wrong_sign=wrong,
        histogram=hist,
        p_values=p.copy() if config.keep_pvalues else None,
    )


def run_batch(config: SimConfig, threads: int | None = None) -> SimSummary:
    """Simulate `config.n_sims` experiments and aggregate the outcomes.

    `threads` only sets the worker pool size; it never affects the result,
    which is bitwise reproducible from `config` alone.
    """
    ranges = [(start, min(start + _CHUNK, config.n_sims))
              for start in range(0, config.n_sims, _CHUNK)]
    if threads is None or threads <= 1 or len(ranges) == 1:
        partials = [_simulate_chunk(config, a, b) for a, b in ranges]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(lambda r: _simulate_chunk(config, *r), ranges))

    # Merge strictly in chunk order.
    count = 0
    sum_diff = 0.0
    sum_diff_sq = 0.0
    count_sig = 0
    sum_diff_sig = 0.0
    count_wrong = 0
    hist = np.zeros(_N_BINS, dtype=np.int64)
    kept = [] if config.keep_pvalues else None
    for part in partials:
        count += part.count
        sum_diff += part.sum_diff
        sum_diff_sq += part.sum_diff_sq
        count_sig += part.count_sig
        sum_diff_sig += part.sum_diff_sig
        count_wrong += part.count_wrong_sign
        hist += part.histogram
        if kept is not None:
            kept.append(part.p_values)

    mean = sum_diff / count
    if count > 1:
        var = max(sum_diff_sq - sum_diff * sum_diff / count, 0.0) / (count - 1)
    else:
        var = 0.0
    mean_sig = sum_diff_sig / count_sig if count_sig > 0 else math.nan

    return SimSummary(
        config=config,
        count_significant=count_sig,
        p_histogram=hist,
        mean_diff_all=mean,
        sd_diff_all=math.sqrt(var),
        mean_diff_significant=mean_sig,
        count_wrong_sign_significant=count_wrong,
        p_values=None if kept is None else np.concatenate(kept),
    )


def diff_distribution_stats(summary: SimSummary) -> tuple[float, float]:
    """Mean and SD of the observed mean differences across the whole batch."""
    return summary.mean_diff_all, summary.sd_diff_all


@dataclass(frozen=True)
class MixtureSpec:
    """A prevalence-weighted blend of a null batch and an effect batch."""

    prevalence: float
    null_summary: SimSummary
    effect_summary: SimSummary

    def __post_init__(self):
        if not 0.0 <= float(self.prevalence) <= 1.0:
            raise DomainError("prevalence must lie in [0, 1]")
        a = self.null_summary.config
        b = self.effect_summary.config
        mismatched = [name for name in ("n_per_group", "sd", "alpha", "n_sims")
                      if getattr(a, name) != getattr(b, name)]
        if mismatched:
            raise ConfigurationError(
                "null and effect summaries disagree on: " + ", ".join(mismatched)
            )


def mixture_fdr(spec: MixtureSpec) -> Breakdown:
    """False discovery breakdown of the mixture, from simulated rates.

    Delegates the tree arithmetic to `significance_breakdown` with the
    batches' significant fractions standing in for alpha and power, so the
    simulated and closed-form routes share one formula.
    """
    fp_rate = spec.null_summary.count_significant / spec.null_summary.n_sims
    tp_rate = spec.effect_summary.count_significant / spec.effect_summary.n_sims
    scenario = TestScenario(prevalence=spec.prevalence, power=tp_rate, alpha=fp_rate)
    return significance_breakdown(scenario)


def interval_fdr(spec: MixtureSpec, lo: float, hi: float) -> float:
    """False discovery rate among tests whose p value falls in (lo, hi].

    Both bounds must sit on the 0.001 grid.  Raises `UndefinedResultError`
    when neither batch put any test in the interval.
    """
    null_count = spec.null_summary.count_in_interval(lo, hi)
    effect_count = spec.effect_summary.count_in_interval(lo, hi)
    fp_mass = (1.0 - spec.prevalence) * (null_count / spec.null_summary.n_sims)
    tp_mass = spec.prevalence * (effect_count / spec.effect_summary.n_sims)
    if fp_mass + tp_mass <= 0.0:
        raise UndefinedResultError(
            f"no simulated tests produced a p value in ({lo}, {hi}]"
        )
    return fp_mass / (fp_mass + tp_mass)


def inflation_stats(summary: SimSummary) -> tuple[float, int]:
    """Mean signed observed difference over significant tests, and how many
    of those significant tests had the wrong sign."""
    if summary.count_significant == 0:
        raise UndefinedResultError("no significant tests in this batch")
    return summary.mean_diff_significant, summary.count_wrong_sign_significant


class InflationPoint(NamedTuple):
    n_per_group: int
    power: float
    mean_diff_significant: float


def inflation_curve(n_values: Sequence[int], base_config: SimConfig,
                    threads: int | None = None) -> list[InflationPoint]:
    """Effect-size inflation versus per-group sample size.

    Each point runs a fresh deterministic batch (seed offset by n, so points
    never share streams) and pairs the simulated conditional mean difference
    with the analytic power at that n.
    """
    for n in n_values:
        if not isinstance(n, (int, np.integer)) or n < 3:
            raise DomainError("every n in the curve must be an integer >= 3")
    d = base_config.true_diff / base_config.sd
    points = []
    for n in n_values:
        cfg = replace(base_config, n_per_group=int(n),
                      master_seed=(base_config.master_seed + int(n)) % 2 ** 64)
        summary = run_batch(cfg, threads=threads)
        analytic = power_mod.power_two_sample(int(n), d, base_config.alpha)
        points.append(InflationPoint(int(n), analytic, summary.mean_diff_significant))
    return points


def make_mixture(prevalence: float, n_per_group: int, delta: float, sd: float,
                 n_sims: int, alpha: float, master_seed: int,
                 threads: int | None = None) -> MixtureSpec:
    """Run the paired null and effect batches behind a mixture analysis.

    The null batch uses `master_seed` and the effect batch `master_seed + 1`,
    so the two never share substreams.
    """
    null_cfg = SimConfig(n_per_group=n_per_group, true_mean_control=0.0,
                         true_mean_treatment=0.0, sd=sd, n_sims=n_sims,
                         alpha=alpha, master_seed=master_seed)
    effect_cfg = replace(null_cfg, true_mean_treatment=delta,
                         master_seed=(master_seed + 1) % 2 ** 64)
    return MixtureSpec(
        prevalence=prevalence,
        null_summary=run_batch(null_cfg, threads=threads),
        effect_summary=run_batch(effect_cfg, threads=threads),
    )


def histogram_rows(summary: SimSummary, bin_width: float = 0.05) -> list[tuple[float, int]]:
    """Coarsen the 0.001 histogram to `bin_width` rows of (bin_left, count).

    The width must be a multiple of 0.001 that divides 1 evenly.
    """
    ticks = int(round(bin_width * 1000.0))
    if ticks < 1 or abs(bin_width - ticks / 1000.0) > 0.0 or _N_BINS % ticks != 0:
        raise DomainError(
            "bin width must be a multiple of 0.001 that divides 1 evenly"
        )
    counts = summary.p_histogram.reshape(-1, ticks).sum(axis=1)
    return [(i * ticks / 1000.0, int(c)) for i, c in enumerate(counts)]


def write_histogram_csv(summary: SimSummary, path, bin_width: float = 0.05) -> None:
    """Write the p-value histogram as two-column CSV: bin_left,count."""
    rows = histogram_rows(summary, bin_width)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("bin_left,count\n")
        for left, count in rows:
            fh.write(f"{left!r},{count}\n")
