"""Deterministic, seedable simulator and analytics for clustered WSN routing.

Protocol engines (LEACH, multi-hop LEACH, multi-level LEACH, CIDRSN), ECHR root
selection helpers, cluster-head statistics, and an experiment harness with a
command-line front end.
"""

__version__ = "0.1.0"

from .model import (
    ConfigError,
    NetworkConfig,
    NetworkState,
    NodeState,
    PerBitLinkParams,
    RadioEnergyParams,
    Role,
    aggregation_energy,
    amp_power,
    deploy_network,
    per_hop_energy,
    rx_energy,
    tx_energy,
)
from .analytics import (
    ChCountDistribution,
    ChStats,
    KoptInputs,
    KoptResult,
    ch_count_pmf,
    ch_stats,
    expected_dist_to_ch,
    expected_members,
    k_opt,
)
from .harness import (
    ComparisonReport,
    TimeSeries,
    compare_protocols,
    network_lifetime,
    run_simulation,
    stability_period,
)

__all__ = [
    "ConfigError",
    "NetworkConfig",
    "NetworkState",
    "NodeState",
    "PerBitLinkParams",
    "RadioEnergyParams",
    "Role",
    "aggregation_energy",
    "amp_power",
    "deploy_network",
    "per_hop_energy",
    "rx_energy",
    "tx_energy",
    "ChCountDistribution",
    "ChStats",
    "KoptInputs",
    "KoptResult",
    "ch_count_pmf",
    "ch_stats",
    "expected_dist_to_ch",
    "expected_members",
    "k_opt",
    "ComparisonReport",
    "TimeSeries",
    "compare_protocols",
    "network_lifetime",
    "run_simulation",
    "stability_period",
]
