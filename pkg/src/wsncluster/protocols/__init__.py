"""Protocol engines and their shared machinery."""

from __future__ import annotations

from typing import Optional

from ..model import ConfigError, RadioEnergyParams
from .cidrsn import CidrsnEngine, cidrsn_init, cidrsn_round
from .common import (
    BS_SINK,
    DEFAULT_SIM_OPTIONS,
    ChargeLog,
    ClusterAssignment,
    RoundOutcome,
    SimOptions,
    default_drop_d_ref,
    elect_cluster_heads,
    form_clusters,
)
from .echr import (
    CoverageAdjustment,
    EchrWeightInputs,
    coverage_redundancy,
    echr_assign_levels,
    echr_select_root,
    echr_weight,
)
from .leach import LeachEngine, run_leach_round
from .multihop import MultihopEngine, multihop_route, run_multihop_round
from .multilevel import MultilevelEngine, elect_super_heads, run_multilevel_round

PROTOCOLS = {
    LeachEngine.protocol: LeachEngine,
    MultihopEngine.protocol: MultihopEngine,
    MultilevelEngine.protocol: MultilevelEngine,
    CidrsnEngine.protocol: CidrsnEngine,
}


def make_engine(protocol: str, radio: RadioEnergyParams,
                options: Optional[SimOptions] = None,
                charge_log: Optional[ChargeLog] = None):
    """Instantiate a protocol engine by name; unknown names are config errors."""
    try:
        cls = PROTOCOLS[protocol]
    except KeyError:
        known = ", ".join(sorted(PROTOCOLS))
        raise ConfigError(f"protocol: unknown protocol {protocol!r} (known: {known})")
    return cls(radio, options, charge_log)


__all__ = [
    "BS_SINK",
    "DEFAULT_SIM_OPTIONS",
    "PROTOCOLS",
    "ChargeLog",
    "ClusterAssignment",
    "CoverageAdjustment",
    "EchrWeightInputs",
    "RoundOutcome",
    "SimOptions",
    "CidrsnEngine",
    "LeachEngine",
    "MultihopEngine",
    "MultilevelEngine",
    "cidrsn_init",
    "cidrsn_round",
    "coverage_redundancy",
    "default_drop_d_ref",
    "echr_assign_levels",
    "echr_select_root",
    "echr_weight",
    "elect_cluster_heads",
    "elect_super_heads",
    "form_clusters",
    "make_engine",
    "multihop_route",
    "run_leach_round",
    "run_multihop_round",
    "run_multilevel_round",
]
