"""Shared protocol machinery: election, clustering, charges, packet drops.

Round structure common to the whole LEACH family:

1. control (setup) phase: head advertisements, member join requests;
2. data phase: members transmit one reading to their head, heads fuse the
   received signals plus their own;
3. delivery phase: protocol-specific (direct to sink, head-to-head relay,
   or a second cluster tier).

All charges are clamped to the node's remaining energy; a node that bottoms
out still finishes its scheduled actions for the round and is marked dead at
the end of it. Receive electronics are paid for dropped packets too (the
radio listens either way); fusion is charged over actually received signals.
Every alive node emits exactly one data packet per round, so per round
packets_to_ch + packets_to_bs + packets_dropped equals the alive count at the
start of the round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .. import kernels
from ..model import (
    STREAM_DROP,
    STREAM_ELECTION,
    ConfigError,
    NetworkConfig,
    NetworkState,
    RadioEnergyParams,
    Role,
    rx_energy,
    stream_rng,
)

__all__ = [
    "BS_SINK",
    "SimOptions",
    "RoundOutcome",
    "ClusterAssignment",
    "ChargeLog",
    "elect_cluster_heads",
    "form_clusters",
    "default_drop_d_ref",
]

# Sentinel for "next hop is the base station" in routing maps.
BS_SINK = -1

_CONTROL_KINDS = frozenset({"tx_control", "rx_control"})


def _check(cond: bool, name: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"{name}: {msg}")


@dataclass(frozen=True)
class SimOptions:
    """Protocol knobs that are not part of the core network config.

    drop_d_ref and p2 default to None, meaning "derive": field diagonal plus
    base-station clearance for the drop reference distance, and the network's
    p_opt for the second-tier election probability.
    """

    control_bits: int = 200
    drop_p_max: float = 0.3
    drop_d_ref: Optional[float] = None
    p2: Optional[float] = None
    sensing_range: float = 15.0
    comm_range: float = 25.0
    tau1: float = 1.0
    tau2: float = 1.0
    poi_factor: int = 4

    def __post_init__(self) -> None:
        _check(self.control_bits >= 0, "control_bits", "must be non-negative")
        _check(0.0 <= self.drop_p_max <= 1.0, "drop_p_max", "must be in [0, 1]")
        if self.drop_d_ref is not None:
            _check(self.drop_d_ref > 0.0, "drop_d_ref", "must be positive")
        if self.p2 is not None:
            _check(0.0 < self.p2 <= 1.0, "p2", "must satisfy 0 < p2 <= 1")
        _check(self.sensing_range > 0.0, "sensing_range", "must be positive")
        _check(self.comm_range > 0.0, "comm_range", "must be positive")
        _check(self.tau1 >= 0.0, "tau1", "must be non-negative")
        _check(self.tau2 >= 0.0, "tau2", "must be non-negative")
        _check(self.poi_factor >= 0, "poi_factor", "must be non-negative")


DEFAULT_SIM_OPTIONS = SimOptions()


@dataclass
class RoundOutcome:
    """Per-round counters. energy_spent is the sum of every charge applied
    this round (clamped at death), control_energy the control-message share."""

    round: int
    ch_count: int
    packets_to_ch: int
    packets_to_bs: int
    packets_dropped: int
    alive_count: int
    dead_count: int
    energy_spent: float
    control_energy: float = 0.0
    terminal: bool = False


@dataclass(frozen=True)
class ClusterAssignment:
    """One round's cluster structure.

    membership maps member id -> head id. next_hop (multi-hop routing) maps
    head id -> head id or BS_SINK. super_heads is the second tier, when any.
    """

    heads: frozenset[int]
    membership: dict[int, int]
    next_hop: Optional[dict[int, int]] = None
    super_heads: Optional[frozenset[int]] = None


class ChargeLog:
    """Optional itemized record of every charge: (round, kind, node, joules)."""

    KINDS = ("tx_control", "rx_control", "tx_data", "rx_data", "aggregation")

    def __init__(self) -> None:
        self.entries: list[tuple[int, str, int, float]] = []

    def record(self, round_index: int, kind: str, ids: np.ndarray,
               amounts: np.ndarray) -> None:
        self.entries.extend(
            (round_index, kind, int(i), float(a)) for i, a in zip(ids, amounts)
        )

    def total(self, kind: Optional[str] = None, min_round: int = 0) -> float:
        return math.fsum(
            a for (r, k, _i, a) in self.entries
            if r >= min_round and (kind is None or k == kind)
        )

    def control_total(self, min_round: int = 0) -> float:
        return math.fsum(
            a for (r, k, _i, a) in self.entries
            if r >= min_round and k in _CONTROL_KINDS
        )


class _Debit:
    """Applies clamped charges to the live energy array and keeps totals.

    Round totals are exact (math.fsum over the individual charge amounts),
    so they do not depend on whether a protocol issues one vectorized charge
    or the same amounts one packet at a time.
    """

    __slots__ = ("energy", "round_index", "log", "_amounts", "_control_amounts")

    def __init__(self, energy: np.ndarray, round_index: int,
                 log: Optional[ChargeLog]) -> None:
        self.energy = energy
        self.round_index = round_index
        self.log = log
        self._amounts: list[float] = []
        self._control_amounts: list[float] = []

    def charge(self, kind: str, ids: np.ndarray, amounts) -> None:
        if len(ids) == 0:
            return
        amounts = np.broadcast_to(np.asarray(amounts, dtype=np.float64), (len(ids),))
        current = self.energy[ids]
        applied = np.minimum(amounts, current)
        self.energy[ids] = current - applied
        self._amounts.extend(applied.tolist())
        if kind in _CONTROL_KINDS:
            self._control_amounts.extend(applied.tolist())
        if self.log is not None:
            self.log.record(self.round_index, kind, ids, applied)

    @property
    def spent(self) -> float:
        return math.fsum(self._amounts)

    @property
    def control(self) -> float:
        return math.fsum(self._control_amounts)


# --- election and clustering -------------------------------------------------

def elect_cluster_heads(state: NetworkState, p: float) -> set[int]:
    """Threshold-rotation self-election for the current round.

    Each alive node that has not served as head in the current epoch of
    ceil(1/p) rounds independently draws a uniform variate and becomes a head
    when it falls below p / (1 - p * (round mod epoch)). Does not mutate the
    state; engines apply the result. A dead network yields the empty set.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must satisfy 0 < p <= 1, got {p}")
    r = state.round
    epoch = math.ceil(1.0 / p)
    epoch_start = r - (r % epoch)
    eligible = state.alive & (state.last_ch_round < epoch_start)
    threshold = p / (1.0 - p * (r % epoch))
    u = stream_rng(state.seed, STREAM_ELECTION, r).random(state.node_count)
    winners = eligible & (u < threshold)
    return {int(i) for i in np.flatnonzero(winners)}


def _assign_arrays(state: NetworkState, head_ids: np.ndarray,
                   xs: np.ndarray, ys: np.ndarray):
    """(member_ids, choice, dist): nearest-head assignment over alive non-heads."""
    member_mask = state.alive.copy()
    member_mask[head_ids] = False
    member_ids = np.flatnonzero(member_mask).astype(np.int64)
    if member_ids.size == 0:
        return member_ids, np.empty(0, dtype=np.int64), np.empty(0)
    choice, dist = kernels.assign_nearest(xs, ys, member_ids, head_ids)
    return member_ids, choice, dist


def form_clusters(state: NetworkState, heads: Iterable[int]) -> ClusterAssignment:
    """Attach every alive non-head to its nearest head (ties to the lower id).

    An empty head set yields an empty assignment (the round then falls back
    to direct-to-sink transmission).
    """
    head_ids = np.array(sorted({int(h) for h in heads}), dtype=np.int64)
    if head_ids.size == 0:
        return ClusterAssignment(frozenset(), {})
    if not state.alive[head_ids].all():
        raise ValueError("cluster heads must be alive")
    xs = np.ascontiguousarray(state.positions[:, 0])
    ys = np.ascontiguousarray(state.positions[:, 1])
    member_ids, choice, _dist = _assign_arrays(state, head_ids, xs, ys)
    membership = {int(m): int(head_ids[c]) for m, c in zip(member_ids, choice)}
    return ClusterAssignment(frozenset(int(h) for h in head_ids), membership)


# --- packet drops --------------------------------------------------------------

def default_drop_d_ref(config: NetworkConfig) -> float:
    """Drop reference distance: field diagonal plus base-station clearance."""
    bx, by = config.bs_position
    dx = max(0.0, -bx, bx - config.field_width)
    dy = max(0.0, -by, by - config.field_height)
    return math.hypot(config.field_width, config.field_height) + math.hypot(dx, dy)


def _drop_mask(rng: np.random.Generator, dists: np.ndarray, p_max: float,
               d_ref: float) -> np.ndarray:
    """Bernoulli loss per packet: p_max * min(1, (d/d_ref)^2)."""
    u = rng.random(len(dists))
    p = p_max * np.minimum(1.0, (dists * dists) / (d_ref * d_ref))
    return u < p


# --- shared round phases --------------------------------------------------------

def _advertise(debit: _Debit, radio: RadioEnergyParams, xs, ys, bits: int,
               src_ids: np.ndarray, audience_ids: np.ndarray,
               rx_ids: np.ndarray) -> None:
    """Broadcast announcements: each source pays transmit cost to its farthest
    listener; every receiver pays electronics once per announcement actually
    sent. Sources with no audience send nothing."""
    if src_ids.size == 0 or bits == 0:
        return
    far = kernels.farthest_audience(xs, ys, src_ids, audience_ids)
    has_audience = far >= 0.0
    senders = src_ids[has_audience]
    if senders.size:
        amounts = kernels.tx_energy_vec(
            float(bits), far[has_audience],
            radio.e_elec, radio.e_fs, radio.e_mp, radio.d_crossover)
        debit.charge("tx_control", senders, amounts)
    n_sent = int(has_audience.sum())
    if n_sent and rx_ids.size:
        debit.charge("rx_control", rx_ids, n_sent * rx_energy(radio, bits))


def _join(debit: _Debit, radio: RadioEnergyParams, bits: int,
          member_ids: np.ndarray, dist: np.ndarray, head_ids: np.ndarray,
          member_counts: np.ndarray) -> None:
    """Join requests: members unicast to their head; heads pay rx per join."""
    if member_ids.size == 0 or bits == 0:
        return
    amounts = kernels.tx_energy_vec(
        float(bits), dist, radio.e_elec, radio.e_fs, radio.e_mp, radio.d_crossover)
    debit.charge("tx_control", member_ids, amounts)
    busy = member_counts > 0
    debit.charge("rx_control", head_ids[busy],
                 member_counts[busy] * rx_energy(radio, bits))


def _member_data(debit: _Debit, radio: RadioEnergyParams, bits: int,
                 member_ids: np.ndarray, choice: np.ndarray, dist: np.ndarray,
                 head_ids: np.ndarray, rng_drop: np.random.Generator,
                 p_max: float, d_ref: float):
    """Member uplink plus head-side fusion.

    Returns (received_per_head, delivered, dropped). Heads pay rx for every
    incoming packet; fusion covers received signals plus the head's own.
    """
    k = len(head_ids)
    if member_ids.size:
        amounts = kernels.tx_energy_vec(
            float(bits), dist, radio.e_elec, radio.e_fs, radio.e_mp, radio.d_crossover)
        debit.charge("tx_data", member_ids, amounts)
        counts = np.bincount(choice, minlength=k)
        busy = counts > 0
        debit.charge("rx_data", head_ids[busy], counts[busy] * rx_energy(radio, bits))
        dropped = _drop_mask(rng_drop, dist, p_max, d_ref)
        received = np.bincount(choice[~dropped], minlength=k)
        n_dropped = int(dropped.sum())
    else:
        received = np.zeros(k, dtype=np.int64)
        n_dropped = 0
    debit.charge("aggregation", head_ids, radio.e_da * float(bits) * (received + 1))
    return received, int(member_ids.size) - n_dropped, n_dropped


def _send_to_bs(debit: _Debit, radio: RadioEnergyParams, state: NetworkState,
                bits: int, src_ids: np.ndarray, rng_drop: np.random.Generator,
                p_max: float, d_ref: float) -> tuple[int, int]:
    """Unicast one packet per source straight to the base station.

    Returns (delivered, dropped)."""
    if src_ids.size == 0:
        return 0, 0
    bx, by = state.config.bs_position
    dx = state.positions[src_ids, 0] - bx
    dy = state.positions[src_ids, 1] - by
    d = np.sqrt(dx * dx + dy * dy)
    amounts = kernels.tx_energy_vec(
        float(bits), d, radio.e_elec, radio.e_fs, radio.e_mp, radio.d_crossover)
    debit.charge("tx_data", src_ids, amounts)
    dropped = _drop_mask(rng_drop, d, p_max, d_ref)
    n_dropped = int(dropped.sum())
    return int(src_ids.size) - n_dropped, n_dropped


def _finish_round(state: NetworkState, alive0: np.ndarray, debit: _Debit,
                  round_index: int, ch_count: int, to_ch: int, to_bs: int,
                  dropped: int) -> RoundOutcome:
    """Apply deaths, advance the round counter, and build the outcome."""
    newly_dead = alive0 & (state.energy <= 0.0)
    state.alive[newly_dead] = False
    alive_count = int(state.alive.sum())
    state.round = round_index + 1
    return RoundOutcome(
        round=round_index,
        ch_count=ch_count,
        packets_to_ch=to_ch,
        packets_to_bs=to_bs,
        packets_dropped=dropped,
        alive_count=alive_count,
        dead_count=state.node_count - alive_count,
        energy_spent=debit.spent,
        control_energy=debit.control,
    )


def _set_structure(state: NetworkState, head_ids: np.ndarray,
                   member_ids: np.ndarray, member_heads: np.ndarray,
                   super_ids: Optional[np.ndarray] = None) -> None:
    """Refresh role / cluster arrays to this round's topology."""
    state.role[:] = int(Role.MEMBER)
    state.cluster[:] = -1
    if member_ids.size:
        state.cluster[member_ids] = member_heads
    if head_ids.size:
        state.role[head_ids] = int(Role.CLUSTER_HEAD)
        state.cluster[head_ids] = head_ids
    if super_ids is not None and super_ids.size:
        state.role[super_ids] = int(Role.SUPER_HEAD)


def _dead_round_outcome(state: NetworkState, round_index: int) -> RoundOutcome:
    state.round = round_index + 1
    return RoundOutcome(
        round=round_index, ch_count=0, packets_to_ch=0, packets_to_bs=0,
        packets_dropped=0, alive_count=0, dead_count=state.node_count,
        energy_spent=0.0, control_energy=0.0, terminal=True,
    )


def _round_context(state: NetworkState, options: SimOptions):
    """Common per-round prep: contiguous coordinates, drop generator, d_ref."""
    xs = np.ascontiguousarray(state.positions[:, 0])
    ys = np.ascontiguousarray(state.positions[:, 1])
    rng_drop = stream_rng(state.seed, STREAM_DROP, state.round)
    d_ref = options.drop_d_ref if options.drop_d_ref is not None \
        else default_drop_d_ref(state.config)
    return xs, ys, rng_drop, d_ref
