"""Single-hop LEACH: rotating cluster heads, one hop from head to sink."""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..model import NetworkState, RadioEnergyParams
from .common import (
    DEFAULT_SIM_OPTIONS,
    ChargeLog,
    RoundOutcome,
    SimOptions,
    _assign_arrays,
    _advertise,
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

__all__ = ["run_leach_round", "LeachEngine"]


def run_leach_round(state: NetworkState, radio: RadioEnergyParams,
                    options: Optional[SimOptions] = None,
                    charge_log: Optional[ChargeLog] = None) -> RoundOutcome:
    """Advance the network by one LEACH round.

    Setup: threshold election, head advertisements, nearest-head joins.
    Steady state: members send one reading to their head, the head fuses and
    forwards a single compressed packet to the sink. A round that elects no
    head degenerates to every alive node transmitting straight to the sink
    (no control traffic in that case).
    """
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

    # setup phase
    audience = np.flatnonzero(alive0).astype(np.int64)
    _advertise(debit, radio, xs, ys, options.control_bits, head_ids,
               audience, member_ids)
    counts = np.bincount(choice, minlength=len(head_ids)) if member_ids.size \
        else np.zeros(len(head_ids), dtype=np.int64)
    _join(debit, radio, options.control_bits, member_ids, dist, head_ids, counts)

    # steady state
    _received, got, lost = _member_data(debit, radio, bits, member_ids, choice,
                                        dist, head_ids, rng_drop, p_max, d_ref)
    to_ch += got
    dropped += lost
    delivered, lost = _send_to_bs(debit, radio, state, bits, head_ids,
                                  rng_drop, p_max, d_ref)
    to_bs += delivered
    dropped += lost

    state.last_ch_round[head_ids] = r
    _set_structure(state, head_ids, member_ids, member_heads)
    return _finish_round(state, alive0, debit, r, len(head_ids), to_ch, to_bs, dropped)


class LeachEngine:
    """Stateless per-round driver for plain LEACH."""

    protocol = "leach"

    def __init__(self, radio: RadioEnergyParams,
                 options: Optional[SimOptions] = None,
                 charge_log: Optional[ChargeLog] = None) -> None:
        self.radio = radio
        self.options = options or DEFAULT_SIM_OPTIONS
        self.charge_log = charge_log

    def step(self, state: NetworkState) -> RoundOutcome:
        return run_leach_round(state, self.radio, self.options, self.charge_log)
