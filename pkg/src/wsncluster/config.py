"""Flat `key = value` settings files and command-line overrides.

A settings file is plain text: one `key = value` per line, `#` comments,
blank lines ignored. Every key has a built-in default, so an empty file (or
no file at all) is valid. Unknown and duplicate keys are rejected by name
rather than silently ignored — a typo in an experiment config should fail
loudly, not quietly run the defaults.

`e_amp` is accepted as an alias for `e_fs` (the free-space amplifier
coefficient); some older configs use that name for the same constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional

from .model import (
    ConfigError,
    NetworkConfig,
    PerBitLinkParams,
    RadioEnergyParams,
)
from .protocols import SimOptions

__all__ = [
    "ResolvedSettings",
    "parse_config_file",
    "parse_overrides",
    "resolve_settings",
    "KNOWN_KEYS",
]

_AUTO = {"auto", "none", ""}


def _as_int(key: str, text: str) -> int:
    try:
        return int(text, base=10)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _as_float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if math.isnan(value):
        raise ConfigError(f"{key}: nan is not a valid setting")
    return value


def _as_optional_float(key: str, text: str) -> Optional[float]:
    if text.lower() in _AUTO:
        return None
    return _as_float(key, text)


# key -> (group, converter). Group decides which settings object receives it.
_Converter = Callable[[str, str], object]
_KEY_TABLE: dict[str, tuple[str, _Converter]] = {
    # network / experiment
    "field_width": ("network", _as_float),
    "field_height": ("network", _as_float),
    "node_count": ("network", _as_int),
    "bs_x": ("network", _as_float),
    "bs_y": ("network", _as_float),
    "initial_energy": ("network", _as_float),
    "packet_bits": ("network", _as_int),
    "p_opt": ("network", _as_float),
    "max_rounds": ("network", _as_int),
    "seed": ("network", _as_int),
    # first-order radio
    "e_elec": ("radio", _as_float),
    "e_fs": ("radio", _as_float),
    "e_mp": ("radio", _as_float),
    "e_da": ("radio", _as_float),
    # per-bit link budget
    "e_b": ("link", _as_float),
    "r_b": ("link", _as_float),
    "g_t": ("link", _as_float),
    "g_r": ("link", _as_float),
    "wavelength": ("link", _as_float),
    "m_l": ("link", _as_float),
    "m_f": ("link", _as_float),
    "alpha_drain": ("link", _as_float),
    "p_tx_elec": ("link", _as_float),
    "p_rx_elec": ("link", _as_float),
    # simulation options
    "control_bits": ("options", _as_int),
    "drop_p_max": ("options", _as_float),
    "drop_d_ref": ("options", _as_optional_float),
    "p2": ("options", _as_optional_float),
    "sensing_range": ("options", _as_float),
    "comm_range": ("options", _as_float),
    "tau1": ("options", _as_float),
    "tau2": ("options", _as_float),
    "poi_factor": ("options", _as_int),
    # analysis-only
    "d_to_bs": ("analysis", _as_optional_float),
}

KNOWN_KEYS = frozenset(_KEY_TABLE) | {"e_amp"}


@dataclass(frozen=True)
class ResolvedSettings:
    """Everything a run or an analysis needs, in one resolved bundle.

    `config` is None only in degenerate-analysis mode with p_opt = 0, where a
    network cannot rotate heads but the closed-form statistics still apply.
    `raw` preserves the user-supplied key/value text for provenance echoes.
    """

    config: Optional[NetworkConfig]
    radio: RadioEnergyParams
    link: PerBitLinkParams
    options: SimOptions
    p_opt: float
    node_count: int
    field_width: float
    field_height: float
    bs_position: tuple[float, float]
    d_to_bs: float
    raw: dict[str, str]

    @property
    def half_side(self) -> float:
        return self.field_width / 2.0

    def require_config(self) -> NetworkConfig:
        if self.config is None:
            raise ConfigError("p_opt: must be > 0 to run a simulation")
        return self.config

    def provenance(self) -> dict[str, object]:
        """Resolved settings as an ordered mapping for CSV headers."""
        out: dict[str, object] = {
            "field_width": self.field_width,
            "field_height": self.field_height,
            "node_count": self.node_count,
            "bs_x": self.bs_position[0],
            "bs_y": self.bs_position[1],
            "p_opt": self.p_opt,
        }
        if self.config is not None:
            out["initial_energy"] = self.config.initial_energy
            out["packet_bits"] = self.config.packet_bits
            out["max_rounds"] = self.config.max_rounds
        out["drop_p_max"] = self.options.drop_p_max
        out["drop_d_ref"] = ("auto" if self.options.drop_d_ref is None
                             else self.options.drop_d_ref)
        out["p2"] = "auto" if self.options.p2 is None else self.options.p2
        for key in sorted(self.raw):
            out.setdefault(f"set:{key}", self.raw[key])
        return out


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a `key = value` file into an ordered string mapping."""
    entries: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(
                f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key in entries:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def parse_overrides(pairs: Iterable[str]) -> dict[str, str]:
    """Parse repeated `--set key=value` arguments; later values win."""
    entries: dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set: expected key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        entries[key.strip()] = value.strip()
    return entries


def resolve_settings(entries: Optional[Mapping[str, str]] = None,
                     overrides: Optional[Mapping[str, str]] = None,
                     allow_degenerate_p: bool = False) -> ResolvedSettings:
    """Merge file entries and overrides over the defaults and build settings.

    Overrides win over file entries. With allow_degenerate_p (analysis mode),
    p_opt = 0 is accepted and yields settings without a runnable config.
    """
    merged: dict[str, str] = {}
    merged.update(entries or {})
    merged.update(overrides or {})

    unknown = sorted(set(merged) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown setting {unknown[0]!r}"
                          + (f" (and {len(unknown) - 1} more)"
                             if len(unknown) > 1 else ""))
    if "e_amp" in merged:
        if "e_fs" in merged:
            raise ConfigError("e_amp is an alias of e_fs; set only one")
        merged["e_fs"] = merged.pop("e_amp")

    raw = dict(merged)
    groups: dict[str, dict[str, object]] = {
        "network": {}, "radio": {}, "link": {}, "options": {}, "analysis": {},
    }
    for key, text in merged.items():
        group, convert = _KEY_TABLE[key]
        groups[group][key] = convert(key, text)

    net = groups["network"]
    bs_x = float(net.pop("bs_x", 50.0))
    bs_y = float(net.pop("bs_y", 150.0))
    net["bs_position"] = (bs_x, bs_y)

    p_opt = float(net.get("p_opt", 0.1))
    if allow_degenerate_p and p_opt == 0.0:
        probe = dict(net)
        probe["p_opt"] = 0.1
        reference = NetworkConfig(**probe)
        config = None
        node_count = reference.node_count
        field_width = reference.field_width
        field_height = reference.field_height
    else:
        config = NetworkConfig(**net)
        node_count = config.node_count
        field_width = config.field_width
        field_height = config.field_height

    radio = RadioEnergyParams(**groups["radio"])
    link = PerBitLinkParams(**groups["link"])
    options = SimOptions(**groups["options"])

    d_to_bs = groups["analysis"].get("d_to_bs")
    if d_to_bs is None:
        d_to_bs = math.hypot(bs_x - field_width / 2.0,
                             bs_y - field_height / 2.0)
    else:
        d_to_bs = float(d_to_bs)
        if d_to_bs <= 0.0:
            raise ConfigError(f"d_to_bs: must be positive, got {d_to_bs}")

    return ResolvedSettings(
        config=config,
        radio=radio,
        link=link,
        options=options,
        p_opt=p_opt,
        node_count=node_count,
        field_width=field_width,
        field_height=field_height,
        bs_position=(bs_x, bs_y),
        d_to_bs=d_to_bs,
        raw=raw,
    )
