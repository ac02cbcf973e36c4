"""Experiment harness: full runs, longevity metrics, protocol comparisons, CSV.

A run steps one protocol engine from deployment until every node is dead or
the round budget is exhausted, collecting one RoundOutcome per round. The
comparison driver repeats that over a protocol set and a seed list (same seed
means same topology for every protocol) and aggregates medians, totals, and
ratios against the baseline protocol. Identical invocations produce
byte-identical CSV output; every emitted file opens with provenance comments
(package version, resolved settings, protocol, seed).
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, NamedTuple, Optional, Sequence

from . import __version__
from .model import ConfigError, NetworkConfig, RadioEnergyParams, deploy_network
from .protocols import (
    DEFAULT_SIM_OPTIONS,
    ChargeLog,
    RoundOutcome,
    SimOptions,
    make_engine,
)

__all__ = [
    "TimeSeries",
    "MetricValue",
    "SeedMetrics",
    "ProtocolSummary",
    "ComparisonReport",
    "run_simulation",
    "stability_period",
    "network_lifetime",
    "compare_protocols",
    "write_timeseries_csv",
    "write_comparison_csv",
    "format_comparison_text",
]

CSV_HEADER = "round,alive,dead,ch_count,pkts_to_ch,pkts_to_bs,pkts_dropped,energy_spent_j"


@dataclass
class TimeSeries:
    """One full run: protocol, seed, and the per-round outcome sequence."""

    protocol: str
    seed: int
    config: NetworkConfig
    rounds: list[RoundOutcome] = field(default_factory=list)

    @property
    def total_energy_spent(self) -> float:
        return math.fsum(o.energy_spent for o in self.rounds)

    @property
    def packets_to_bs(self) -> int:
        return sum(o.packets_to_bs for o in self.rounds)

    @property
    def packets_to_ch(self) -> int:
        return sum(o.packets_to_ch for o in self.rounds)

    @property
    def packets_dropped(self) -> int:
        return sum(o.packets_dropped for o in self.rounds)


class MetricValue(NamedTuple):
    """A round index plus whether the defining event actually occurred."""

    round: int
    reached: bool


def run_simulation(config: NetworkConfig, protocol: str,
                   radio: Optional[RadioEnergyParams] = None,
                   options: Optional[SimOptions] = None,
                   charge_log: Optional[ChargeLog] = None) -> TimeSeries:
    """Deploy and step `protocol` until network death or config.max_rounds.

    Deterministic: the series is a pure function of (config, protocol,
    radio, options). max_rounds = 0 yields an empty series.
    """
    radio = radio or RadioEnergyParams()
    options = options or DEFAULT_SIM_OPTIONS
    engine = make_engine(protocol, radio, options, charge_log)
    state = deploy_network(config, sensing_range=options.sensing_range)
    series = TimeSeries(protocol=protocol, seed=config.seed, config=config)
    for _ in range(config.max_rounds):
        outcome = engine.step(state)
        series.rounds.append(outcome)
        if outcome.alive_count == 0:
            break
    return series


def stability_period(series: TimeSeries) -> MetricValue:
    """Round of the first death; (rounds-run, False) when nobody died."""
    for outcome in series.rounds:
        if outcome.dead_count >= 1:
            return MetricValue(outcome.round, True)
    return MetricValue(len(series.rounds), False)


def network_lifetime(series: TimeSeries) -> MetricValue:
    """Round the last node died; (rounds-run, False) when someone survived."""
    for outcome in series.rounds:
        if outcome.alive_count == 0:
            return MetricValue(outcome.round, True)
    return MetricValue(len(series.rounds), False)


@dataclass(frozen=True)
class SeedMetrics:
    """Per-(protocol, seed) summary of one run."""

    protocol: str
    seed: int
    stability: int
    stability_reached: bool
    lifetime: int
    lifetime_reached: bool
    packets_to_ch: int
    packets_to_bs: int
    packets_dropped: int
    drop_rate: float
    ch_count_mean: float
    energy_spent: float
    rounds_run: int


@dataclass(frozen=True)
class ProtocolSummary:
    """Per-protocol aggregates over every seed."""

    protocol: str
    stability_median: float
    lifetime_median: float
    packets_to_bs_total: int
    drop_rate: float
    ch_count_mean: float


@dataclass
class ComparisonReport:
    """Cross-protocol comparison; medians are recomputable from per_seed."""

    protocols: list[str]
    seeds: list[int]
    per_seed: list[SeedMetrics]
    summaries: dict[str, ProtocolSummary]
    ratios: dict[str, dict[str, float]]
    baseline: str


def _summarize_run(series: TimeSeries) -> SeedMetrics:
    stab = stability_period(series)
    life = network_lifetime(series)
    to_ch = series.packets_to_ch
    to_bs = series.packets_to_bs
    lost = series.packets_dropped
    total_packets = to_ch + to_bs + lost
    rounds_run = len(series.rounds)
    ch_mean = (sum(o.ch_count for o in series.rounds) / rounds_run
               if rounds_run else 0.0)
    return SeedMetrics(
        protocol=series.protocol,
        seed=series.seed,
        stability=stab.round,
        stability_reached=stab.reached,
        lifetime=life.round,
        lifetime_reached=life.reached,
        packets_to_ch=to_ch,
        packets_to_bs=to_bs,
        packets_dropped=lost,
        drop_rate=lost / total_packets if total_packets else 0.0,
        ch_count_mean=ch_mean,
        energy_spent=series.total_energy_spent,
        rounds_run=rounds_run,
    )


def compare_protocols(config: NetworkConfig, protocols: Sequence[str],
                      seeds: Sequence[int],
                      radio: Optional[RadioEnergyParams] = None,
                      options: Optional[SimOptions] = None,
                      keep_series: bool = False,
                      ) -> tuple[ComparisonReport, list[TimeSeries]]:
    """Run every (protocol, seed) pair and aggregate.

    The same seed reproduces the same deployment for every protocol. Returns
    the report plus the run series (empty list unless keep_series).
    """
    if not protocols:
        raise ConfigError("protocols: need at least one protocol")
    if not seeds:
        raise ConfigError("seeds: need at least one seed")
    per_seed: list[SeedMetrics] = []
    kept: list[TimeSeries] = []
    for protocol in protocols:
        for seed in seeds:
            series = run_simulation(replace(config, seed=seed), protocol,
                                    radio, options)
            per_seed.append(_summarize_run(series))
            if keep_series:
                kept.append(series)

    summaries: dict[str, ProtocolSummary] = {}
    for protocol in protocols:
        rows = [m for m in per_seed if m.protocol == protocol]
        to_bs = sum(m.packets_to_bs for m in rows)
        to_ch = sum(m.packets_to_ch for m in rows)
        lost = sum(m.packets_dropped for m in rows)
        total_packets = to_ch + to_bs + lost
        total_rounds = sum(m.rounds_run for m in rows)
        ch_mean = (sum(m.ch_count_mean * m.rounds_run for m in rows) / total_rounds
                   if total_rounds else 0.0)
        summaries[protocol] = ProtocolSummary(
            protocol=protocol,
            stability_median=float(statistics.median(m.stability for m in rows)),
            lifetime_median=float(statistics.median(m.lifetime for m in rows)),
            packets_to_bs_total=to_bs,
            drop_rate=lost / total_packets if total_packets else 0.0,
            ch_count_mean=ch_mean,
        )

    baseline = "leach" if "leach" in protocols else protocols[0]
    base = summaries[baseline]
    ratios: dict[str, dict[str, float]] = {}
    for protocol in protocols:
        if protocol == baseline:
            continue
        s = summaries[protocol]
        ratios[f"{protocol}/{baseline}"] = {
            "stability": (s.stability_median / base.stability_median
                          if base.stability_median else math.inf),
            "lifetime": (s.lifetime_median / base.lifetime_median
                         if base.lifetime_median else math.inf),
        }

    report = ComparisonReport(
        protocols=list(protocols),
        seeds=list(seeds),
        per_seed=per_seed,
        summaries=summaries,
        ratios=ratios,
        baseline=baseline,
    )
    return report, kept


# --- file output ---------------------------------------------------------------

def _provenance_lines(extra: Optional[Mapping[str, object]] = None) -> list[str]:
    lines = [f"# wsncluster {__version__}"]
    if extra:
        lines.extend(f"# {key} = {value}" for key, value in extra.items())
    return lines


def _config_provenance(config: NetworkConfig) -> dict[str, object]:
    return {
        "field_width": config.field_width,
        "field_height": config.field_height,
        "node_count": config.node_count,
        "bs_x": config.bs_position[0],
        "bs_y": config.bs_position[1],
        "initial_energy": config.initial_energy,
        "packet_bits": config.packet_bits,
        "p_opt": config.p_opt,
        "max_rounds": config.max_rounds,
    }


def write_timeseries_csv(series: TimeSeries, path: str | Path,
                         provenance: Optional[Mapping[str, object]] = None) -> None:
    """One CSV per run: provenance comments, fixed header, one row per round."""
    meta: dict[str, object] = {"protocol": series.protocol, "seed": series.seed}
    meta.update(provenance if provenance is not None
                else _config_provenance(series.config))
    lines = _provenance_lines(meta)
    lines.append(CSV_HEADER)
    for o in series.rounds:
        lines.append(
            f"{o.round},{o.alive_count},{o.dead_count},{o.ch_count},"
            f"{o.packets_to_ch},{o.packets_to_bs},{o.packets_dropped},"
            f"{o.energy_spent:.10e}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_comparison_csv(report: ComparisonReport, path: str | Path,
                         provenance: Optional[Mapping[str, object]] = None) -> None:
    """Per-seed raw metrics as CSV; the medians derive from these rows."""
    lines = _provenance_lines(provenance)
    lines.append("protocol,seed,stability,stability_reached,lifetime,"
                 "lifetime_reached,pkts_to_ch,pkts_to_bs,pkts_dropped,"
                 "drop_rate,ch_count_mean,energy_spent_j,rounds_run")
    for m in report.per_seed:
        lines.append(
            f"{m.protocol},{m.seed},{m.stability},{int(m.stability_reached)},"
            f"{m.lifetime},{int(m.lifetime_reached)},{m.packets_to_ch},"
            f"{m.packets_to_bs},{m.packets_dropped},{m.drop_rate:.6f},"
            f"{m.ch_count_mean:.4f},{m.energy_spent:.10e},{m.rounds_run}")
    Path(path).write_text("\n".join(lines) + "\n")


def format_comparison_text(report: ComparisonReport) -> str:
    """Human-readable comparison summary."""
    lines = [f"protocol comparison over seeds {report.seeds[0]}..{report.seeds[-1]}"
             if len(report.seeds) > 1 else
             f"protocol comparison for seed {report.seeds[0]}"]
    lines.append("")
    header = (f"{'protocol':<12} {'stability':>10} {'lifetime':>10} "
              f"{'pkts_to_bs':>11} {'drop_rate':>10} {'ch_mean':>8}")
    lines.append(header)
    lines.append("-" * len(header))
    for protocol in report.protocols:
        s = report.summaries[protocol]
        lines.append(
            f"{protocol:<12} {s.stability_median:>10.1f} {s.lifetime_median:>10.1f} "
            f"{s.packets_to_bs_total:>11} {s.drop_rate:>10.4f} {s.ch_count_mean:>8.2f}")
    if report.ratios:
        lines.append("")
        lines.append(f"medians relative to {report.baseline}:")
        for pair, vals in report.ratios.items():
            lines.append(f"  {pair}: stability x{vals['stability']:.3f}, "
                         f"lifetime x{vals['lifetime']:.3f}")
    return "\n".join(lines) + "\n"
