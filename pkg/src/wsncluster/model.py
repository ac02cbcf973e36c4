"""Core network model: configuration, node/field state, and radio energy costs.

Energy model is the usual first-order radio: electronics cost per bit plus an
amplifier term that switches from free-space (d^2) to multi-path (d^4) at the
crossover distance sqrt(e_fs / e_mp). A second, per-bit link budget
(amp_power / per_hop_energy) expresses the same physics in terms of transmit
power for a target energy-per-bit at a given hop distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator, Optional, Sequence

import numpy as np

__all__ = [
    "ConfigError",
    "NetworkDead",
    "Role",
    "RadioEnergyParams",
    "PerBitLinkParams",
    "NetworkConfig",
    "NodeState",
    "NetworkState",
    "deploy_network",
    "tx_energy",
    "rx_energy",
    "aggregation_energy",
    "amp_power",
    "per_hop_energy",
    "stream_rng",
    "STREAM_DEPLOY",
    "STREAM_ELECTION",
    "STREAM_TIER2",
    "STREAM_DROP",
    "STREAM_POI",
]


class ConfigError(ValueError):
    """Invalid configuration value; the message names the offending field."""


class NetworkDead(RuntimeError):
    """Raised by operations that need at least one alive node."""


# Deterministic RNG substreams. Every random decision draws from a generator
# keyed by (seed, stream, round), so independent concerns (deployment,
# election, second-tier election, packet drops, POI scatter) never perturb
# each other's draw sequences. That keeps protocols comparable under a shared
# seed and makes replay order-independent.
STREAM_DEPLOY = 0
STREAM_ELECTION = 1
STREAM_TIER2 = 2
STREAM_DROP = 3
STREAM_POI = 4


def stream_rng(seed: int, stream: int, round_index: int = 0) -> np.random.Generator:
    """Generator for one (seed, stream, round) cell of the substream lattice."""
    return np.random.default_rng(np.random.SeedSequence((seed, stream, round_index)))


class Role(IntEnum):
    MEMBER = 0
    CLUSTER_HEAD = 1
    SUPER_HEAD = 2
    ROOT = 3


def _require(cond: bool, name: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"{name}: {msg}")


@dataclass(frozen=True)
class RadioEnergyParams:
    """First-order radio constants (joules per bit, per bit·m^2, per bit·m^4).

    d_crossover is derived as sqrt(e_fs / e_mp) when not given; supplying an
    inconsistent value is rejected.
    """

    e_elec: float = 50e-9
    e_fs: float = 10e-12
    e_mp: float = 0.0013e-12
    e_da: float = 5e-9
    d_crossover: float = field(default=0.0)

    def __post_init__(self) -> None:
        for name in ("e_elec", "e_fs", "e_mp", "e_da"):
            _require(getattr(self, name) > 0.0, name, "must be positive")
        derived = math.sqrt(self.e_fs / self.e_mp)
        if self.d_crossover == 0.0:
            object.__setattr__(self, "d_crossover", derived)
        else:
            _require(
                abs(self.d_crossover - derived) <= 1e-12 * derived,
                "d_crossover",
                f"inconsistent with sqrt(e_fs/e_mp) = {derived!r}",
            )


@dataclass(frozen=True)
class PerBitLinkParams:
    """Per-bit link budget: antenna gains, wavelength, losses, drain overhead.

    e_b is the target energy per bit at the receiver, r_b the bit rate,
    alpha_drain the amplifier drain-efficiency overhead, and p_tx_elec /
    p_rx_elec the electronics power of the two radios.
    """

    e_b: float = 1e-10
    r_b: float = 1e6
    g_t: float = 1.0
    g_r: float = 1.0
    wavelength: float = 0.125
    m_l: float = 1.0
    m_f: float = 1.0
    alpha_drain: float = 0.4706
    p_tx_elec: float = 0.01
    p_rx_elec: float = 0.01

    def __post_init__(self) -> None:
        for name in ("e_b", "r_b", "g_t", "g_r", "wavelength", "m_l", "m_f"):
            _require(getattr(self, name) > 0.0, name, "must be positive")
        _require(self.alpha_drain >= 0.0, "alpha_drain", "must be non-negative")
        _require(self.p_tx_elec >= 0.0, "p_tx_elec", "must be non-negative")
        _require(self.p_rx_elec >= 0.0, "p_rx_elec", "must be non-negative")


@dataclass(frozen=True)
class NetworkConfig:
    """Field geometry, population, energy budget, and run limits."""

    field_width: float = 100.0
    field_height: float = 100.0
    node_count: int = 100
    bs_position: tuple[float, float] = (50.0, 150.0)
    initial_energy: float = 0.5
    packet_bits: int = 4000
    p_opt: float = 0.1
    max_rounds: int = 5000
    seed: int = 1

    def __post_init__(self) -> None:
        _require(self.field_width > 0.0, "field_width", "must be positive")
        _require(self.field_height > 0.0, "field_height", "must be positive")
        _require(self.node_count >= 1, "node_count", "must be >= 1")
        _require(
            isinstance(self.bs_position, tuple) and len(self.bs_position) == 2,
            "bs_position",
            "must be an (x, y) pair",
        )
        _require(
            all(math.isfinite(c) for c in self.bs_position),
            "bs_position",
            "coordinates must be finite",
        )
        _require(self.initial_energy > 0.0, "initial_energy", "must be positive")
        _require(self.packet_bits >= 1, "packet_bits", "must be >= 1")
        _require(0.0 < self.p_opt <= 1.0, "p_opt", "must satisfy 0 < p_opt <= 1")
        _require(self.max_rounds >= 0, "max_rounds", "must be >= 0")
        _require(0 <= self.seed < 2**63, "seed", "must be a non-negative 63-bit integer")

    @property
    def epoch_length(self) -> int:
        """Rounds per rotation epoch: ceil(1 / p_opt)."""
        return math.ceil(1.0 / self.p_opt)


@dataclass(frozen=True)
class NodeState:
    """Read-only snapshot of a single node (see NetworkState.node)."""

    node_id: int
    position: tuple[float, float]
    residual_energy: float
    alive: bool
    role: Role
    cluster_id: Optional[int]
    level: Optional[int]
    sensing_range: float
    rounds_since_ch: int


DEFAULT_SENSING_RANGE = 15.0

# Sentinel for "never served as cluster head".
_NEVER = -1


class NetworkState:
    """Mutable simulation state, stored as per-field arrays.

    Nodes have dense ids 0..n-1. The per-node view API (``node``, ``nodes``)
    materializes NodeState snapshots; the engines work on the arrays directly.
    rng draws are derived from (seed, stream, round), so (seed, round) is the
    complete generator state.
    """

    def __init__(self, config: NetworkConfig, positions: np.ndarray,
                 sensing_range: float = DEFAULT_SENSING_RANGE) -> None:
        n = config.node_count
        if positions.shape != (n, 2):
            raise ConfigError(f"positions: expected shape ({n}, 2), got {positions.shape}")
        self.config = config
        self.seed = config.seed
        self.round = 0
        self.positions = positions.astype(np.float64)
        self.energy = np.full(n, config.initial_energy, dtype=np.float64)
        self.alive = np.ones(n, dtype=np.bool_)
        self.role = np.full(n, int(Role.MEMBER), dtype=np.int8)
        self.cluster = np.full(n, -1, dtype=np.int64)
        self.level = np.full(n, -1, dtype=np.int64)
        self.sensing = np.full(n, float(sensing_range), dtype=np.float64)
        self.last_ch_round = np.full(n, _NEVER, dtype=np.int64)

    @property
    def node_count(self) -> int:
        return self.config.node_count

    @property
    def alive_count(self) -> int:
        return int(self.alive.sum())

    @property
    def total_energy(self) -> float:
        return float(self.energy.sum())

    @property
    def rng_state(self) -> tuple[int, int]:
        return (self.seed, self.round)

    def node(self, node_id: int) -> NodeState:
        i = int(node_id)
        cluster = int(self.cluster[i])
        level = int(self.level[i])
        last = int(self.last_ch_round[i])
        return NodeState(
            node_id=i,
            position=(float(self.positions[i, 0]), float(self.positions[i, 1])),
            residual_energy=float(self.energy[i]),
            alive=bool(self.alive[i]),
            role=Role(int(self.role[i])),
            cluster_id=None if cluster < 0 else cluster,
            level=None if level < 0 else level,
            sensing_range=float(self.sensing[i]),
            rounds_since_ch=self.round - last,
        )

    @property
    def nodes(self) -> tuple[NodeState, ...]:
        return tuple(self.node(i) for i in range(self.node_count))

    def __iter__(self) -> Iterator[NodeState]:
        return iter(self.nodes)

    def bs_distances(self) -> np.ndarray:
        """Euclidean distance of every node to the base station."""
        bx, by = self.config.bs_position
        dx = self.positions[:, 0] - bx
        dy = self.positions[:, 1] - by
        return np.sqrt(dx * dx + dy * dy)


def deploy_network(config: NetworkConfig,
                   sensing_range: float = DEFAULT_SENSING_RANGE) -> NetworkState:
    """Scatter node_count nodes i.i.d. uniformly over the field and fuel them.

    Bit-identical for identical configs: positions come from the dedicated
    deployment substream of the config seed.
    """
    rng = stream_rng(config.seed, STREAM_DEPLOY)
    scale = np.array([config.field_width, config.field_height])
    positions = rng.random((config.node_count, 2)) * scale
    return NetworkState(config, positions, sensing_range=sensing_range)


def scatter_pois(config: NetworkConfig, factor: int = 4) -> np.ndarray:
    """Seeded uniform scatter of factor * node_count points of interest."""
    if factor < 0:
        raise ValueError(f"factor must be non-negative, got {factor}")
    rng = stream_rng(config.seed, STREAM_POI)
    scale = np.array([config.field_width, config.field_height])
    return rng.random((factor * config.node_count, 2)) * scale


# --- first-order radio charges -------------------------------------------------

def tx_energy(params: RadioEnergyParams, bits: int, distance: float) -> float:
    """Energy to transmit `bits` over `distance` metres.

    Free-space amplifier below the crossover distance, multi-path at or above;
    the two branches agree at the crossover, so the cost is continuous and
    strictly increasing in distance for bits > 0.
    """
    if bits < 0:
        raise ValueError(f"bits must be non-negative, got {bits}")
    if distance < 0.0:
        raise ValueError(f"distance must be non-negative, got {distance}")
    d2 = distance * distance
    if distance < params.d_crossover:
        return params.e_elec * bits + params.e_fs * bits * d2
    return params.e_elec * bits + params.e_mp * bits * (d2 * d2)


def rx_energy(params: RadioEnergyParams, bits: int) -> float:
    """Electronics-only cost of receiving `bits`."""
    if bits < 0:
        raise ValueError(f"bits must be non-negative, got {bits}")
    return params.e_elec * bits


def aggregation_energy(params: RadioEnergyParams, bits: int, signals: int) -> float:
    """Cost of fusing `signals` readings of `bits` each: e_da * bits * signals."""
    if bits < 0:
        raise ValueError(f"bits must be non-negative, got {bits}")
    if signals < 0:
        raise ValueError(f"signals must be non-negative, got {signals}")
    return params.e_da * bits * signals


# --- per-bit link budget -------------------------------------------------------

def amp_power(link: PerBitLinkParams, distance: float) -> float:
    """Amplifier drain power for one hop of `distance` metres.

    Output power follows the free-space link budget
    P_out = e_b * r_b * (4*pi*d)^2 * m_l * m_f / (g_t * g_r * wavelength^2);
    the drain adds the (1 + alpha_drain) overhead.
    """
    if distance <= 0.0:
        raise ValueError(f"distance must be positive, got {distance}")
    spread = 4.0 * math.pi * distance
    p_out = (link.e_b * link.r_b * spread * spread * link.m_l * link.m_f
             / (link.g_t * link.g_r * link.wavelength * link.wavelength))
    return (1.0 + link.alpha_drain) * p_out


def per_hop_energy(link: PerBitLinkParams, distance: float) -> float:
    """Energy per bit for one hop: amplifier share plus both radios' electronics.

    Equals amp_power(link, d) / r_b + (p_tx_elec + p_rx_elec) / r_b up to
    floating-point rounding.
    """
    if distance <= 0.0:
        raise ValueError(f"distance must be positive, got {distance}")
    spread = 4.0 * math.pi * distance
    amp_per_bit = ((1.0 + link.alpha_drain) * link.e_b * spread * spread
                   * link.m_l * link.m_f
                   / (link.g_t * link.g_r * link.wavelength * link.wavelength))
    return amp_per_bit + link.p_tx_elec / link.r_b + link.p_rx_elec / link.r_b
