"""Multi-hop LEACH: head-to-head relaying toward the sink.

Heads form a relay chain: each forwards its fused packet to the nearest head
that is strictly closer to the sink, provided that hop is shorter than its
own direct path; otherwise it transmits to the sink directly. Strictly
decreasing sink distance makes the relation acyclic. Relays pay receive and
transmit electronics per forwarded packet but do not fuse again.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Optional

import numpy as np

from .. import kernels
from ..model import NetworkState, RadioEnergyParams, tx_energy, rx_energy
from .common import (
    BS_SINK,
    DEFAULT_SIM_OPTIONS,
    ChargeLog,
    RoundOutcome,
    SimOptions,
    _advertise,
    _assign_arrays,
    _Debit,
    _dead_round_outcome,
    _finish_round,
    _join,
    _member_data,
    _round_context,
    _send_to_bs,
    _set_structure,
    elect_cluster_heads,
)

__all__ = ["multihop_route", "run_multihop_round", "MultihopEngine"]


def multihop_route(heads: Iterable[int], bs_position: tuple[float, float],
                   positions: np.ndarray) -> dict[int, int]:
    """Next-hop map for head-to-head relaying.

    Each head forwards to its nearest head with strictly smaller distance to
    the sink (ties to the lower id), unless the sink itself is at least as
    near as that head, in which case it maps to BS_SINK. positions is the
    full (n, 2) coordinate array indexed by id.
    """
    head_ids = np.array(sorted({int(h) for h in heads}), dtype=np.int64)
    if head_ids.size == 0:
        return {}
    hx = np.ascontiguousarray(positions[head_ids, 0])
    hy = np.ascontiguousarray(positions[head_ids, 1])
    bx, by = bs_position
    dxb = hx - bx
    dyb = hy - by
    d2_bs = dxb * dxb + dyb * dyb
    nxt = kernels.route_next_hop(hx, hy, d2_bs)
    return {
        int(h): (BS_SINK if j < 0 else int(head_ids[j]))
        for h, j in zip(head_ids, nxt)
    }


def _relay_packets(debit: _Debit, radio: RadioEnergyParams, state: NetworkState,
                   bits: int, head_ids: np.ndarray, next_hop: Mapping[int, int],
                   rng_drop: np.random.Generator, p_max: float,
                   d_ref: float) -> tuple[int, int]:
    """Walk each head's packet along the relay chain. Returns (delivered, dropped).

    Per hop: transmit at the relaying node, receive at the next (charged even
    when the hop drops the packet; a dropped packet stops travelling).
    """
    bx, by = state.config.bs_position
    xs = state.positions[:, 0]
    ys = state.positions[:, 1]
    rx_cost = rx_energy(radio, bits)
    d_ref2 = d_ref * d_ref
    delivered = 0
    dropped = 0
    one = np.empty(1, dtype=np.int64)
    for origin in head_ids:
        cur = int(origin)
        while True:
            nh = next_hop[cur]
            if nh == BS_SINK:
                d = math.hypot(xs[cur] - bx, ys[cur] - by)
            else:
                d = math.hypot(xs[cur] - xs[nh], ys[cur] - ys[nh])
            one[0] = cur
            debit.charge("tx_data", one, tx_energy(radio, bits, d))
            if nh != BS_SINK:
                one[0] = nh
                debit.charge("rx_data", one, rx_cost)
            p_drop = p_max * min(1.0, (d * d) / d_ref2)
            if rng_drop.random() < p_drop:
                dropped += 1
                break
            if nh == BS_SINK:
                delivered += 1
                break
            cur = nh
    return delivered, dropped


def run_multihop_round(state: NetworkState, radio: RadioEnergyParams,
                       options: Optional[SimOptions] = None,
                       charge_log: Optional[ChargeLog] = None) -> RoundOutcome:
    """One round of multi-hop LEACH: LEACH setup and uplink, relayed delivery."""
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

    heads = elect_cluster_heads(state, cfg.p_opt)
    head_ids = np.array(sorted(heads), dtype=np.int64)
    to_ch = to_bs = dropped = 0

    if head_ids.size == 0:
        alive_ids = np.flatnonzero(alive0).astype(np.int64)
        to_bs, dropped = _send_to_bs(debit, radio, state, bits, alive_ids,
                                     rng_drop, p_max, d_ref)
        _set_structure(state, head_ids, np.empty(0, np.int64), np.empty(0, np.int64))
        return _finish_round(state, alive0, debit, r, 0, to_ch, to_bs, dropped)

    member_ids, choice, dist = _assign_arrays(state, head_ids, xs, ys)
    member_heads = head_ids[choice] if member_ids.size else np.empty(0, np.int64)

    audience = np.flatnonzero(alive0).astype(np.int64)
    _advertise(debit, radio, xs, ys, options.control_bits, head_ids,
               audience, member_ids)
    counts = np.bincount(choice, minlength=len(head_ids)) if member_ids.size \
        else np.zeros(len(head_ids), dtype=np.int64)
    _join(debit, radio, options.control_bits, member_ids, dist, head_ids, counts)

    _received, got, lost = _member_data(debit, radio, bits, member_ids, choice,
                                        dist, head_ids, rng_drop, p_max, d_ref)
    to_ch += got
    dropped += lost

    next_hop = multihop_route(head_ids, cfg.bs_position, state.positions)
    delivered, lost = _relay_packets(debit, radio, state, bits, head_ids,
                                     next_hop, rng_drop, p_max, d_ref)
    to_bs += delivered
    dropped += lost

    state.last_ch_round[head_ids] = r
    _set_structure(state, head_ids, member_ids, member_heads)
    return _finish_round(state, alive0, debit, r, len(head_ids), to_ch, to_bs, dropped)


class MultihopEngine:
    """Stateless per-round driver for multi-hop LEACH."""

    protocol = "multihop"

    def __init__(self, radio: RadioEnergyParams,
                 options: Optional[SimOptions] = None,
                 charge_log: Optional[ChargeLog] = None) -> None:
        self.radio = radio
        self.options = options or DEFAULT_SIM_OPTIONS
        self.charge_log = charge_log

    def step(self, state: NetworkState) -> RoundOutcome:
        return run_multihop_round(state, self.radio, self.options, self.charge_log)
