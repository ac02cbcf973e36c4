"""Command-line front end: simulate, compare, and analyze subcommands.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
Every emitted file starts with provenance comments (resolved settings, seed,
package version), and identical invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .analytics import (
    KoptInputs,
    ch_count_pmf,
    ch_stats,
    expected_dist_to_ch,
    expected_members,
    k_opt,
)
from .config import ResolvedSettings, parse_config_file, parse_overrides, resolve_settings
from .harness import (
    compare_protocols,
    format_comparison_text,
    network_lifetime,
    run_simulation,
    stability_period,
    write_comparison_csv,
    write_timeseries_csv,
)
from .model import ConfigError
from .protocols import PROTOCOLS

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; this contract wants 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise SystemExit(self._usage_exit(message))

    def _usage_exit(self, message: str) -> int:
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return 1


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="PATH",
                     help="settings file of key = value lines")
    sub.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                     dest="overrides", help="override one setting (repeatable)")
    sub.add_argument("--bs", metavar="X,Y", help="base-station position")
    sub.add_argument("--out", metavar="DIR", help="directory for output files")


def _parse_bs(text: str) -> tuple[str, str]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"--bs: expected X,Y, got {text!r}")
    return parts[0].strip(), parts[1].strip()


def _parse_seed_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ConfigError(f"--seeds: expected A..B, got {text!r}")
    try:
        first, last = int(lo), int(hi)
    except ValueError:
        raise ConfigError(f"--seeds: expected integers, got {text!r}") from None
    if last < first:
        raise ConfigError(f"--seeds: range {text!r} is empty")
    return list(range(first, last + 1))


def _settings_from_args(args: argparse.Namespace,
                        allow_degenerate_p: bool = False) -> ResolvedSettings:
    entries = parse_config_file(args.config) if args.config else {}
    overrides = parse_overrides(args.overrides)
    if args.bs is not None:
        overrides["bs_x"], overrides["bs_y"] = _parse_bs(args.bs)
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = str(args.seed)
    if getattr(args, "rounds", None) is not None:
        overrides["max_rounds"] = str(args.rounds)
    return resolve_settings(entries, overrides,
                            allow_degenerate_p=allow_degenerate_p)


def _echo_settings(settings: ResolvedSettings) -> None:
    for key, value in settings.provenance().items():
        print(f"# {key} = {value}")


def _ensure_out_dir(path_text: str) -> Path:
    out = Path(path_text)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_simulate(args: argparse.Namespace) -> int:
    settings = _settings_from_args(args)
    config = settings.require_config()
    _echo_settings(settings)
    series = run_simulation(config, args.protocol, settings.radio,
                            settings.options)
    stab = stability_period(series)
    life = network_lifetime(series)
    print(f"protocol = {series.protocol}")
    print(f"seed = {series.seed}")
    print(f"rounds_run = {len(series.rounds)}")
    print(f"stability_round = {stab.round}"
          + ("" if stab.reached else " (no node died)"))
    print(f"lifetime_round = {life.round}"
          + ("" if life.reached else " (nodes still alive)"))
    print(f"packets_to_ch = {series.packets_to_ch}")
    print(f"packets_to_bs = {series.packets_to_bs}")
    print(f"packets_dropped = {series.packets_dropped}")
    print(f"energy_spent_j = {series.total_energy_spent:.10e}")
    if args.out:
        out = _ensure_out_dir(args.out)
        target = out / f"{series.protocol}_seed{series.seed}.csv"
        write_timeseries_csv(series, target, provenance=settings.provenance())
        print(f"wrote {target}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    settings = _settings_from_args(args)
    config = settings.require_config()
    protocols = [p.strip() for p in args.protocol.split(",") if p.strip()]
    if args.seeds is not None:
        seeds = _parse_seed_range(args.seeds)
    else:
        seeds = [config.seed]
    _echo_settings(settings)
    report, _ = compare_protocols(config, protocols, seeds,
                                  settings.radio, settings.options)
    text = format_comparison_text(report)
    print(text, end="")
    if args.out:
        out = _ensure_out_dir(args.out)
        csv_path = out / "comparison.csv"
        write_comparison_csv(report, csv_path, provenance=settings.provenance())
        txt_path = out / "comparison.txt"
        header = "\n".join(f"# {k} = {v}"
                           for k, v in settings.provenance().items())
        txt_path.write_text(header + "\n" + text)
        print(f"wrote {csv_path}")
        print(f"wrote {txt_path}")
    return 0


def _analysis_lines(settings: ResolvedSettings) -> list[str]:
    n = settings.node_count
    p = settings.p_opt
    stats = ch_stats(ch_count_pmf(n, p))
    lines = [
        f"node_count = {n}",
        f"p_opt = {p}",
        f"half_side = {settings.half_side}",
        f"d_to_bs = {settings.d_to_bs}",
        f"ch_ave = {stats.ave}",
        f"ch_dev = {stats.dev}",
        f"ch_cov = {'undefined' if stats.cov is None else stats.cov}",
    ]
    inputs = KoptInputs(node_count=n, half_side=settings.half_side,
                        e_fs=settings.radio.e_fs, e_mp=settings.radio.e_mp,
                        e_elec=settings.radio.e_elec, d_to_bs=settings.d_to_bs)
    result = k_opt(inputs)
    lines.append(f"k_opt = {result.value!r}")
    lines.append(f"k_opt_nearest = {result.nearest}")
    lines.append(f"expected_members_at_k_opt = "
                 f"{expected_members(n, result.nearest)}")
    lines.append(f"expected_dist_to_ch_at_k_opt = "
                 f"{expected_dist_to_ch(settings.half_side, result.nearest)!r}")
    k_from_p = n * p
    if k_from_p >= 1.0:
        lines.append(f"expected_members_at_p = {expected_members(n, k_from_p)}")
        lines.append(f"expected_dist_to_ch_at_p = "
                     f"{expected_dist_to_ch(settings.half_side, k_from_p)!r}")
    else:
        lines.append("expected_members_at_p = undefined")
        lines.append("expected_dist_to_ch_at_p = undefined")
    return lines


def _cmd_analyze(args: argparse.Namespace) -> int:
    settings = _settings_from_args(args, allow_degenerate_p=True)
    _echo_settings(settings)
    lines = _analysis_lines(settings)
    print("\n".join(lines))
    if args.out:
        out = _ensure_out_dir(args.out)
        target = out / "analysis.txt"
        header = [f"# wsncluster {__version__}"]
        header.extend(f"# {k} = {v}" for k, v in settings.provenance().items())
        target.write_text("\n".join(header + lines) + "\n")
        print(f"wrote {target}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="wsncluster",
                     description="clustered sensor-network routing simulator")
    parser.add_argument("--version", action="version",
                        version=f"wsncluster {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")

    sim = commands.add_parser("simulate", help="run one protocol once",
                              description="Run a single seeded simulation.")
    _add_common_flags(sim)
    sim.add_argument("--protocol", default="leach", choices=sorted(PROTOCOLS),
                     help="protocol to run (default: leach)")
    sim.add_argument("--seed", type=int, help="deployment/election seed")
    sim.add_argument("--rounds", type=int, help="round budget")
    sim.set_defaults(handler=_cmd_simulate)

    cmp_ = commands.add_parser(
        "compare", help="run several protocols over a seed range",
        description="Compare protocols over a common seed list.")
    _add_common_flags(cmp_)
    cmp_.add_argument("--protocol", default="leach,multihop,multilevel,cidrsn",
                      help="comma-separated protocol list")
    cmp_.add_argument("--seed", type=int, help="single seed")
    cmp_.add_argument("--seeds", metavar="A..B",
                      help="inclusive seed range, e.g. 0..29")
    cmp_.add_argument("--rounds", type=int, help="round budget")
    cmp_.set_defaults(handler=_cmd_compare)

    ana = commands.add_parser(
        "analyze", help="closed-form cluster statistics",
        description="Print head-count statistics, optimal cluster count, "
                    "and expected distances for the resolved settings.")
    _add_common_flags(ana)
    ana.set_defaults(handler=_cmd_analyze)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "handler", None) is None:
        parser.print_help()
        return 1
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"wsncluster: config error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"wsncluster: config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"wsncluster: i/o error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - last-resort diagnostics
        print(f"wsncluster: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
