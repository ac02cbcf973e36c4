"""Closed-form analytics: head-count statistics, cluster geometry, optimal k.

The per-round head count under independent self-election is Binomial(n, p);
its pmf is computed in log space so large populations (n up to 10^4 and
beyond) stay finite. Cluster geometry assumes k equal square cells over a
2a x 2a field with the head at the cell center. The optimal cluster count
balances the free-space intra-cluster amplifier cost against the multi-path
head-to-sink cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import dblquad
from scipy.special import gammaln

__all__ = [
    "ChCountDistribution",
    "ChStats",
    "ch_count_pmf",
    "ch_stats",
    "expected_members",
    "expected_dist_to_ch",
    "KoptInputs",
    "KoptResult",
    "k_opt",
]

# Coefficient of the closed-form optimum cluster count (square-field,
# free-space-inside / multi-path-to-sink energy balance).
_KOPT_COEFF = 0.5855


@dataclass(frozen=True)
class ChCountDistribution:
    """Distribution of the number of heads elected in one fresh-epoch round."""

    node_count: int
    p: float
    pmf: np.ndarray  # pmf[k] = P(exactly k heads), k = 0..node_count

    def __post_init__(self) -> None:
        if len(self.pmf) != self.node_count + 1:
            raise ValueError("pmf must have node_count + 1 entries")


def ch_count_pmf(node_count: int, p: float) -> ChCountDistribution:
    """Binomial(n, p) head-count pmf, evaluated stably in log space."""
    if node_count < 1:
        raise ValueError(f"node_count must be >= 1, got {node_count}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    n = node_count
    k = np.arange(n + 1)
    if p == 0.0:
        pmf = np.zeros(n + 1)
        pmf[0] = 1.0
    elif p == 1.0:
        pmf = np.zeros(n + 1)
        pmf[n] = 1.0
    else:
        log_pmf = (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
                   + k * math.log(p) + (n - k) * math.log1p(-p))
        pmf = np.exp(log_pmf)
    return ChCountDistribution(node_count=n, p=p, pmf=pmf)


class ChStats(NamedTuple):
    """Moments of a head-count distribution; cov is None when the mean is 0."""

    ave: float
    dev: float
    cov: Optional[float]


def ch_stats(dist: ChCountDistribution) -> ChStats:
    """Mean, standard deviation, and coefficient of variation (dev / ave)."""
    k = np.arange(dist.node_count + 1, dtype=np.float64)
    ave = float(np.sum(k * dist.pmf))
    var = float(np.sum(k * k * dist.pmf)) - ave * ave
    dev = math.sqrt(max(var, 0.0))
    cov = dev / ave if ave > 0.0 else None
    return ChStats(ave=ave, dev=dev, cov=cov)


def expected_members(node_count: int, k: float) -> float:
    """Expected members per cluster when k heads serve node_count nodes: n/k - 1."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if node_count < k:
        raise ValueError(f"node_count must be >= k, got {node_count} < {k}")
    return node_count / k - 1.0


@lru_cache(maxsize=1)
def _unit_cell_mean_distance() -> float:
    """Mean distance from the center of a unit square to a uniform point,
    by adaptive 2-D quadrature over one symmetric quarter."""
    quarter, _err = dblquad(lambda y, x: math.hypot(x, y),
                            0.0, 0.5, 0.0, 0.5,
                            epsabs=1e-12, epsrel=1e-10)
    return 4.0 * quarter


def expected_dist_to_ch(half_side: float, k: float) -> float:
    """Expected member-to-head distance for k square cells over a 2a x 2a field.

    Each cell has side 2a/sqrt(k) with the head at its center; the mean
    distance scales linearly with the side, so the unit-square constant
    (~0.38260) is computed once by quadrature and scaled.
    """
    if half_side <= 0.0:
        raise ValueError(f"half_side must be positive, got {half_side}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    side = 2.0 * half_side / math.sqrt(k)
    return side * _unit_cell_mean_distance()


@dataclass(frozen=True)
class KoptInputs:
    """Inputs of the optimal-cluster-count formula."""

    node_count: int
    half_side: float
    e_fs: float
    e_mp: float
    e_elec: float
    d_to_bs: float

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise ValueError(f"node_count must be >= 1, got {self.node_count}")
        for name in ("half_side", "e_fs", "e_mp", "e_elec", "d_to_bs"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


class KoptResult(NamedTuple):
    value: float
    nearest: int


def k_opt(inputs: KoptInputs) -> KoptResult:
    """Optimal cluster count and its nearest positive integer.

    k = sqrt(coeff * n * e_fs * a^2 / (e_mp * d^4 - e_elec)); valid only when
    the sink is far enough that e_mp * d^4 exceeds e_elec.
    """
    d4 = inputs.d_to_bs ** 4
    denom = inputs.e_mp * d4 - inputs.e_elec
    if denom <= 0.0:
        raise ValueError(
            "d_to_bs too small: requires e_mp * d_to_bs^4 > e_elec "
            f"(got {inputs.e_mp * d4!r} <= {inputs.e_elec!r})")
    value = math.sqrt(
        _KOPT_COEFF * inputs.node_count * inputs.e_fs
        * inputs.half_side * inputs.half_side / denom)
    return KoptResult(value=value, nearest=max(1, round(value)))
