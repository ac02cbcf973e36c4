"""Cluster-ID routing: clusters formed once, head role rotated by token.

Clusters are built a single time at round 0 (threshold election, re-rolled
until at least one head exists, nearest-head membership) and keep fixed
cluster ids — the founder's node id — for the life of the network. Formation
control traffic is charged only in round 0; afterwards the head token simply
passes, free of charge, to the alive cluster member with the most residual
energy (founder holds it in round 0; ties go to the lower id). Each round the
holder collects the members' readings, fuses them, and sends one packet to
the sink. The cluster array on the state carries the fixed cluster id, not
the current holder. Clusters whose members are all dead fall silent.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..model import (
    STREAM_ELECTION,
    NetworkState,
    Role,
    RadioEnergyParams,
    stream_rng,
)
from .common import (
    DEFAULT_SIM_OPTIONS,
    ChargeLog,
    RoundOutcome,
    SimOptions,
    _advertise,
    _Debit,
    _dead_round_outcome,
    _finish_round,
    _join,
    _member_data,
    _round_context,
    _send_to_bs,
    elect_cluster_heads,
)
from .. import kernels

__all__ = ["cidrsn_init", "cidrsn_round", "CidrsnEngine"]


def cidrsn_init(state: NetworkState) -> dict[int, np.ndarray]:
    """Build the one-time cluster-id table at round 0.

    Returns {founder id: sorted array of member ids, founder included}.
    The election is re-rolled until at least one head exists, so the table is
    never empty. Pure: charges for the formation round are applied by
    cidrsn_round when it runs round 0.
    """
    if state.round != 0:
        raise ValueError(f"cluster table must be built at round 0, got {state.round}")
    if not state.alive.any():
        return {}
    p = state.config.p_opt
    rng = stream_rng(state.seed, STREAM_ELECTION, 0)
    n = state.node_count
    while True:
        winners = state.alive & (rng.random(n) < p)
        if winners.any():
            break
    founder_ids = np.flatnonzero(winners).astype(np.int64)
    xs = np.ascontiguousarray(state.positions[:, 0])
    ys = np.ascontiguousarray(state.positions[:, 1])
    member_mask = state.alive.copy()
    member_mask[founder_ids] = False
    member_ids = np.flatnonzero(member_mask).astype(np.int64)
    rosters: dict[int, list[int]] = {int(f): [int(f)] for f in founder_ids}
    if member_ids.size:
        choice, _dist = kernels.assign_nearest(xs, ys, member_ids, founder_ids)
        for m, c in zip(member_ids, choice):
            rosters[int(founder_ids[c])].append(int(m))
    return {f: np.array(sorted(ids), dtype=np.int64) for f, ids in rosters.items()}


def cidrsn_round(state: NetworkState, table: dict[int, np.ndarray],
                 radio: RadioEnergyParams,
                 options: Optional[SimOptions] = None,
                 charge_log: Optional[ChargeLog] = None) -> RoundOutcome:
    """One cluster-ID round: token handoff, uplink, fusion, one packet per cluster."""
    options = options or DEFAULT_SIM_OPTIONS
    cfg = state.config
    r = state.round
    alive0 = state.alive.copy()
    if not alive0.any():
        return _dead_round_outcome(state, r)

    debit = _Debit(state.energy, r, charge_log)
    xs, ys, rng_drop, d_ref = _round_context(state, options)
    bits = cfg.packet_bits
    p_max = options.drop_p_max

    holders: list[int] = []
    cluster_members: list[np.ndarray] = []
    for founder in sorted(table):
        ids = table[founder]
        alive_ids = ids[alive0[ids]]
        if alive_ids.size == 0:
            continue
        if r == 0:
            holder = founder
        else:
            holder = int(alive_ids[np.argmax(state.energy[alive_ids])])
        holders.append(holder)
        cluster_members.append(alive_ids[alive_ids != holder])

    holder_ids = np.array(holders, dtype=np.int64)
    if holder_ids.size == 0:
        return _dead_round_outcome(state, r)

    if cluster_members and any(m.size for m in cluster_members):
        member_ids = np.concatenate([m for m in cluster_members])
        choice = np.concatenate([
            np.full(m.size, i, dtype=np.int64)
            for i, m in enumerate(cluster_members)
        ])
        dx = xs[member_ids] - xs[holder_ids[choice]]
        dy = ys[member_ids] - ys[holder_ids[choice]]
        dist = np.sqrt(dx * dx + dy * dy)
    else:
        member_ids = np.empty(0, dtype=np.int64)
        choice = np.empty(0, dtype=np.int64)
        dist = np.empty(0)

    if r == 0:
        # the only control traffic this protocol ever pays
        audience = np.flatnonzero(alive0).astype(np.int64)
        _advertise(debit, radio, xs, ys, options.control_bits, holder_ids,
                   audience, member_ids)
        counts = np.bincount(choice, minlength=len(holder_ids)) if member_ids.size \
            else np.zeros(len(holder_ids), dtype=np.int64)
        _join(debit, radio, options.control_bits, member_ids, dist,
              holder_ids, counts)

    _received, got, lost = _member_data(debit, radio, bits, member_ids, choice,
                                        dist, holder_ids, rng_drop, p_max, d_ref)
    to_ch = got
    dropped = lost
    to_bs, lost = _send_to_bs(debit, radio, state, bits, holder_ids,
                              rng_drop, p_max, d_ref)
    dropped += lost

    # fixed cluster ids; the holder wears the head role this round
    state.role[:] = int(Role.MEMBER)
    state.cluster[:] = -1
    for founder in sorted(table):
        ids = table[founder]
        state.cluster[ids[alive0[ids]]] = founder
    state.role[holder_ids] = int(Role.CLUSTER_HEAD)

    return _finish_round(state, alive0, debit, r, len(holder_ids), to_ch, to_bs,
                         dropped)


class CidrsnEngine:
    """Driver that builds the cluster-id table once and reuses it every round."""

    protocol = "cidrsn"

    def __init__(self, radio: RadioEnergyParams,
                 options: Optional[SimOptions] = None,
                 charge_log: Optional[ChargeLog] = None) -> None:
        self.radio = radio
        self.options = options or DEFAULT_SIM_OPTIONS
        self.charge_log = charge_log
        self.table: Optional[dict[int, np.ndarray]] = None

    def step(self, state: NetworkState) -> RoundOutcome:
        if self.table is None:
            self.table = cidrsn_init(state)
        return cidrsn_round(state, self.table, self.radio, self.options,
                            self.charge_log)
