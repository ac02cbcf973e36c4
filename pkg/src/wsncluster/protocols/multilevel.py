"""Multi-level (two-tier) LEACH: super-heads above the cluster heads.

Tier 1 is plain LEACH. Among the elected heads a second Bernoulli election
(probability p2, re-rolled until non-empty) picks super-heads; the remaining
heads deliver their fused packet to the nearest super-head, which fuses the
received head packets once more and sends a single packet to the sink.

With p2 = 1 every head is its own super-head: the second tier has no
audience, no joins, no uplink, and no extra fusion, so the round's charges
are exactly those of plain LEACH under the same seed.
"""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from .. import kernels
from ..model import (
    STREAM_TIER2,
    NetworkState,
    RadioEnergyParams,
    rx_energy,
    stream_rng,
)
from .common import (
    DEFAULT_SIM_OPTIONS,
    ChargeLog,
    RoundOutcome,
    SimOptions,
    _advertise,
    _assign_arrays,
    _Debit,
    _dead_round_outcome,
    _drop_mask,
    _finish_round,
    _join,
    _member_data,
    _round_context,
    _send_to_bs,
    _set_structure,
    elect_cluster_heads,
)

__all__ = ["elect_super_heads", "run_multilevel_round", "MultilevelEngine"]


def elect_super_heads(state: NetworkState, heads: Iterable[int], p2: float) -> set[int]:
    """Bernoulli(p2) election among the given heads, re-rolled until non-empty.

    Draws come from the dedicated second-tier substream, so they do not
    disturb the tier-1 election or the packet-drop sequence. Empty input
    yields the empty set.
    """
    if not 0.0 < p2 <= 1.0:
        raise ValueError(f"p2 must satisfy 0 < p2 <= 1, got {p2}")
    head_ids = np.array(sorted({int(h) for h in heads}), dtype=np.int64)
    if head_ids.size == 0:
        return set()
    rng = stream_rng(state.seed, STREAM_TIER2, state.round)
    while True:
        winners = rng.random(head_ids.size) < p2
        if winners.any():
            return {int(h) for h in head_ids[winners]}


def run_multilevel_round(state: NetworkState, radio: RadioEnergyParams,
                         options: Optional[SimOptions] = None,
                         charge_log: Optional[ChargeLog] = None) -> RoundOutcome:
    """One two-tier round: LEACH tier plus super-head fusion and delivery."""
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
    p2 = options.p2 if options.p2 is not None else cfg.p_opt

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

    # tier-1 setup
    audience = np.flatnonzero(alive0).astype(np.int64)
    _advertise(debit, radio, xs, ys, options.control_bits, head_ids,
               audience, member_ids)
    counts = np.bincount(choice, minlength=len(head_ids)) if member_ids.size \
        else np.zeros(len(head_ids), dtype=np.int64)
    _join(debit, radio, options.control_bits, member_ids, dist, head_ids, counts)

    # tier-2 setup
    supers = elect_super_heads(state, head_ids, p2)
    super_ids = np.array(sorted(supers), dtype=np.int64)
    super_mask = np.isin(head_ids, super_ids)
    relay_ids = head_ids[~super_mask]
    if relay_ids.size:
        choice2, dist2 = kernels.assign_nearest(xs, ys, relay_ids, super_ids)
        counts2 = np.bincount(choice2, minlength=len(super_ids))
    else:
        choice2 = np.empty(0, dtype=np.int64)
        dist2 = np.empty(0)
        counts2 = np.zeros(len(super_ids), dtype=np.int64)
    _advertise(debit, radio, xs, ys, options.control_bits, super_ids,
               relay_ids, relay_ids)
    _join(debit, radio, options.control_bits, relay_ids, dist2, super_ids, counts2)

    # tier-1 uplink and fusion
    _received, got, lost = _member_data(debit, radio, bits, member_ids, choice,
                                        dist, head_ids, rng_drop, p_max, d_ref)
    to_ch += got
    dropped += lost

    # tier-2 uplink: heads deliver their fused packet to their super-head
    if relay_ids.size:
        amounts = kernels.tx_energy_vec(
            float(bits), dist2, radio.e_elec, radio.e_fs, radio.e_mp,
            radio.d_crossover)
        debit.charge("tx_data", relay_ids, amounts)
        busy = counts2 > 0
        debit.charge("rx_data", super_ids[busy], counts2[busy] * rx_energy(radio, bits))
        dropped2 = _drop_mask(rng_drop, dist2, p_max, d_ref)
        received2 = np.bincount(choice2[~dropped2], minlength=len(super_ids))
        to_ch += int(relay_ids.size) - int(dropped2.sum())
        dropped += int(dropped2.sum())
    else:
        received2 = np.zeros(len(super_ids), dtype=np.int64)
    # second fusion covers only packets actually received from other heads
    fed = received2 > 0
    if fed.any():
        debit.charge("aggregation", super_ids[fed],
                     radio.e_da * float(bits) * received2[fed])

    delivered, lost = _send_to_bs(debit, radio, state, bits, super_ids,
                                  rng_drop, p_max, d_ref)
    to_bs += delivered
    dropped += lost

    state.last_ch_round[head_ids] = r
    _set_structure(state, head_ids, member_ids, member_heads, super_ids)
    return _finish_round(state, alive0, debit, r, len(head_ids), to_ch, to_bs, dropped)


class MultilevelEngine:
    """Stateless per-round driver for two-tier LEACH."""

    protocol = "multilevel"

    def __init__(self, radio: RadioEnergyParams,
                 options: Optional[SimOptions] = None,
                 charge_log: Optional[ChargeLog] = None) -> None:
        self.radio = radio
        self.options = options or DEFAULT_SIM_OPTIONS
        self.charge_log = charge_log

    def step(self, state: NetworkState) -> RoundOutcome:
        return run_multilevel_round(state, self.radio, self.options, self.charge_log)
