"""Energy- and coverage-aware root selection and level assignment.

A root candidate is scored by three factors: residual-energy ratio raised to
tau1, the fraction of its covered points of interest that nobody else covers
raised to tau2, and the reciprocal of its distance to the base station. The
highest-scoring alive node becomes the hierarchy root; hop levels then grow
outward from it, one communication radius per level. A separate helper
shrinks a head's transmission range when a node sits in the overlap of two
equal-radius heads (down to its farthest own member, so nobody is orphaned).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .. import kernels
from ..model import NetworkDead, NetworkState

__all__ = [
    "EchrWeightInputs",
    "echr_weight",
    "echr_select_root",
    "echr_assign_levels",
    "CoverageAdjustment",
    "coverage_redundancy",
]


@dataclass(frozen=True)
class EchrWeightInputs:
    """Scoring inputs for one root candidate.

    residual_ratio is residual / initial energy in [0, 1]; exclusive_coverage
    counts the covered points no other alive node covers; dist_to_bs is the
    candidate's distance to the base station (positive).
    """

    residual_ratio: float
    tau1: float
    exclusive_coverage: int
    total_coverage: int
    tau2: float
    dist_to_bs: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.residual_ratio <= 1.0:
            raise ValueError(f"residual_ratio must be in [0, 1], got {self.residual_ratio}")
        if self.tau1 < 0.0 or self.tau2 < 0.0:
            raise ValueError("tau1 and tau2 must be non-negative")
        if self.exclusive_coverage < 0 or self.total_coverage < 0:
            raise ValueError("coverage counts must be non-negative")
        if self.exclusive_coverage > self.total_coverage:
            raise ValueError("exclusive coverage cannot exceed total coverage")
        if self.dist_to_bs <= 0.0:
            raise ValueError(f"dist_to_bs must be positive, got {self.dist_to_bs}")

    @property
    def degenerate(self) -> bool:
        """True when the candidate covers no point of interest at all."""
        return self.total_coverage == 0


def echr_weight(inputs: EchrWeightInputs) -> float:
    """Root-candidate score; 0.0 for degenerate (zero-coverage) candidates."""
    if inputs.degenerate:
        return 0.0
    return (inputs.residual_ratio ** inputs.tau1
            * (inputs.exclusive_coverage / inputs.total_coverage) ** inputs.tau2
            / inputs.dist_to_bs)


def echr_select_root(state: NetworkState, pois: np.ndarray,
                     tau1: float = 1.0, tau2: float = 1.0) -> int:
    """Pick the alive node with the highest root score (ties to the lower id).

    Coverage counts are computed against each node's sensing range; the
    residual ratio uses the configured initial energy.
    """
    if not state.alive.any():
        raise NetworkDead("no alive nodes to choose a root from")
    xs = np.ascontiguousarray(state.positions[:, 0])
    ys = np.ascontiguousarray(state.positions[:, 1])
    px = np.ascontiguousarray(np.asarray(pois, dtype=np.float64)[:, 0])
    py = np.ascontiguousarray(np.asarray(pois, dtype=np.float64)[:, 1])
    total, exclusive = kernels.poi_coverage(xs, ys, state.alive, state.sensing,
                                            px, py)
    d_bs = state.bs_distances()
    q = state.energy / state.config.initial_energy
    weights = np.zeros(state.node_count)
    covered = (total > 0) & state.alive
    idx = np.flatnonzero(covered)
    if idx.size:
        weights[idx] = (q[idx] ** tau1
                        * (exclusive[idx] / total[idx]) ** tau2
                        / d_bs[idx])
    weights[~state.alive] = -1.0
    return int(np.argmax(weights))


def echr_assign_levels(state: NetworkState, root: int,
                       comm_range: float) -> dict[int, Optional[int]]:
    """Hop levels outward from the root: the root is level 0, every alive node
    within comm_range of a level-L node gets level L+1. Alive nodes the growth
    never reaches map to None (disconnected). Does not mutate the state."""
    if comm_range <= 0.0:
        raise ValueError(f"comm_range must be positive, got {comm_range}")
    if not state.alive[root]:
        raise ValueError(f"root {root} is not alive")
    xs = np.ascontiguousarray(state.positions[:, 0])
    ys = np.ascontiguousarray(state.positions[:, 1])
    levels = kernels.bfs_levels(xs, ys, state.alive, root, comm_range)
    return {
        int(i): (int(levels[i]) if levels[i] >= 0 else None)
        for i in np.flatnonzero(state.alive)
    }


class CoverageAdjustment(NamedTuple):
    redundant: bool
    adjusted_range: float


def coverage_redundancy(node_position: tuple[float, float],
                        head1_position: tuple[float, float],
                        head1_range: float,
                        head2_position: tuple[float, float],
                        head2_range: float,
                        head1_member_positions: np.ndarray) -> CoverageAdjustment:
    """Detect double coverage of a node by two equal-radius heads.

    When the node lies strictly inside both radii and the radii are equal,
    head1's range is cut to the distance of its farthest own member (zero if
    it has none) so no member is orphaned; otherwise the range is unchanged.
    Returns (redundant, adjusted range for head1).
    """
    if head1_range <= 0.0 or head2_range <= 0.0:
        raise ValueError("head ranges must be positive")
    d1 = math.dist(node_position, head1_position)
    d2 = math.dist(node_position, head2_position)
    if not (d1 < head1_range and d2 < head2_range and head1_range == head2_range):
        return CoverageAdjustment(False, head1_range)
    members = np.asarray(head1_member_positions, dtype=np.float64)
    if members.size == 0:
        return CoverageAdjustment(True, 0.0)
    dx = members[:, 0] - head1_position[0]
    dy = members[:, 1] - head1_position[1]
    return CoverageAdjustment(True, float(np.sqrt(dx * dx + dy * dy).max()))
