"""Root-selection weight, level assignment, and coverage redundancy tests."""

import math

import numpy as np
import pytest

from wsncluster.model import (
    NetworkConfig,
    NetworkDead,
    deploy_network,
    scatter_pois,
)
from wsncluster.protocols import (
    CoverageAdjustment,
    EchrWeightInputs,
    coverage_redundancy,
    echr_assign_levels,
    echr_select_root,
    echr_weight,
)


def _inputs(**kw):
    base = dict(residual_ratio=1.0, tau1=1.0, exclusive_coverage=1,
                total_coverage=1, tau2=1.0, dist_to_bs=1.0)
    base.update(kw)
    return EchrWeightInputs(**base)


class TestWeight:
    def test_identity_case(self):
        assert echr_weight(_inputs()) == 1.0

    def test_zero_residual(self):
        assert echr_weight(_inputs(residual_ratio=0.0, tau1=2.0)) == 0.0

    def test_pinned_hand_value(self):
        inputs = _inputs(residual_ratio=0.5, tau1=2.0, exclusive_coverage=3,
                         total_coverage=4, tau2=1.0, dist_to_bs=50.0)
        assert echr_weight(inputs) == pytest.approx(0.00375, rel=1e-12)

    def test_degenerate_coverage_scores_zero(self):
        inputs = _inputs(exclusive_coverage=0, total_coverage=0)
        assert inputs.degenerate
        assert echr_weight(inputs) == 0.0
        assert not _inputs().degenerate

    def test_input_validation(self):
        with pytest.raises(ValueError):
            _inputs(exclusive_coverage=5, total_coverage=4)
        with pytest.raises(ValueError):
            _inputs(dist_to_bs=0.0)
        with pytest.raises(ValueError):
            _inputs(residual_ratio=1.5)
        with pytest.raises(ValueError):
            _inputs(tau1=-1.0)


def _coverage_sets(state, pois):
    """Brute-force total/exclusive coverage counts per alive node."""
    n = state.node_count
    total = np.zeros(n, dtype=int)
    exclusive = np.zeros(n, dtype=int)
    covered_by = []
    for q in range(len(pois)):
        owners = [i for i in range(n) if state.alive[i]
                  and math.dist(state.positions[i], pois[q]) <= state.sensing[i]]
        covered_by.append(owners)
    for q, owners in enumerate(covered_by):
        for i in owners:
            total[i] += 1
            if len(owners) == 1:
                exclusive[i] += 1
    return total, exclusive


class TestSelectRoot:
    def test_single_alive_node_is_root(self):
        state = deploy_network(NetworkConfig(node_count=5, seed=61))
        state.alive[:] = False
        state.alive[3] = True
        pois = scatter_pois(state.config)
        assert echr_select_root(state, pois) == 3

    def test_dead_network_signals(self):
        state = deploy_network(NetworkConfig(node_count=5, seed=61))
        state.alive[:] = False
        with pytest.raises(NetworkDead):
            echr_select_root(state, scatter_pois(state.config))

    def test_matches_bruteforce(self):
        for seed in range(10):
            cfg = NetworkConfig(node_count=20, seed=70 + seed)
            state = deploy_network(cfg)
            state.energy[:] = np.random.default_rng(seed).uniform(0.05, 0.5, 20)
            rng = np.random.default_rng(1000 + seed)
            pois = rng.uniform(0.0, 100.0, size=(30, 2))
            total, exclusive = _coverage_sets(state, pois)
            bx, by = cfg.bs_position
            best_w, best_i = -1.0, -1
            for i in range(20):
                if total[i] == 0:
                    w = 0.0
                else:
                    q = state.energy[i] / cfg.initial_energy
                    d = math.hypot(state.positions[i, 0] - bx,
                                   state.positions[i, 1] - by)
                    w = q * (exclusive[i] / total[i]) / d
                if w > best_w:
                    best_w, best_i = w, i
            assert echr_select_root(state, pois) == best_i

    def test_energy_scaling_invariance(self):
        cfg = NetworkConfig(node_count=25, seed=83)
        state = deploy_network(cfg)
        state.energy[:] = np.random.default_rng(5).uniform(0.1, 0.5, 25)
        pois = scatter_pois(cfg)
        root = echr_select_root(state, pois)
        state.energy[:] *= 0.25
        assert echr_select_root(state, pois) == root

    def test_tie_breaks_to_lower_id(self):
        cfg = NetworkConfig(node_count=4, seed=89)
        state = deploy_network(cfg)
        state.positions[:] = [[10.0, 10.0], [10.0, 10.0], [90.0, 90.0], [90.0, 90.0]]
        state.energy[:] = 0.5
        pois = np.array([[10.0, 5.0]])  # covered by 0 and 1 jointly, never solo
        # all weights equal zero (no exclusive coverage) -> lowest id wins
        assert echr_select_root(state, pois) == 0


class TestAssignLevels:
    def test_all_within_range(self):
        cfg = NetworkConfig(node_count=6, seed=91)
        state = deploy_network(cfg)
        state.positions[:] = [[50, 50], [52, 50], [48, 52], [50, 47], [53, 53], [46, 50]]
        levels = echr_assign_levels(state, 0, comm_range=25.0)
        assert levels[0] == 0
        assert all(levels[i] == 1 for i in range(1, 6))

    def test_chain_levels(self):
        cfg = NetworkConfig(node_count=5, seed=93)
        state = deploy_network(cfg)
        state.positions[:] = [[0.0, 0.0], [24.0, 0.0], [48.0, 0.0],
                              [72.0, 0.0], [96.0, 0.0]]
        levels = echr_assign_levels(state, 0, comm_range=25.0)
        assert levels == {0: 0, 1: 1, 2: 2, 3: 3, 4: 4}

    def test_disconnected_flagged(self):
        cfg = NetworkConfig(node_count=3, seed=95)
        state = deploy_network(cfg)
        state.positions[:] = [[0.0, 0.0], [10.0, 0.0], [99.0, 99.0]]
        levels = echr_assign_levels(state, 0, comm_range=15.0)
        assert levels[2] is None

    def test_dead_nodes_excluded(self):
        cfg = NetworkConfig(node_count=4, seed=97)
        state = deploy_network(cfg)
        state.positions[:] = [[0.0, 0.0], [10.0, 0.0], [20.0, 0.0], [30.0, 0.0]]
        state.alive[1] = False
        levels = echr_assign_levels(state, 0, comm_range=12.0)
        assert 1 not in levels
        assert levels[2] is None  # the relay made node 2 reachable; it is dead

    def test_matches_bruteforce_bfs(self):
        for seed in range(10):
            cfg = NetworkConfig(node_count=30, seed=120 + seed)
            state = deploy_network(cfg)
            state.alive[:] = np.random.default_rng(seed).random(30) > 0.15
            root = int(np.flatnonzero(state.alive)[0])
            got = echr_assign_levels(state, root, comm_range=25.0)
            # independent BFS
            level = {root: 0}
            frontier = [root]
            while frontier:
                nxt = []
                for u in frontier:
                    for v in np.flatnonzero(state.alive):
                        v = int(v)
                        if v in level:
                            continue
                        if math.dist(state.positions[u], state.positions[v]) <= 25.0:
                            level[v] = level[u] + 1
                            nxt.append(v)
                frontier = nxt
            expected = {int(i): level.get(int(i))
                        for i in np.flatnonzero(state.alive)}
            assert got == expected

    def test_validation(self):
        state = deploy_network(NetworkConfig(node_count=3, seed=99))
        with pytest.raises(ValueError):
            echr_assign_levels(state, 0, comm_range=0.0)
        state.alive[0] = False
        with pytest.raises(ValueError):
            echr_assign_levels(state, 0, comm_range=10.0)


class TestCoverageRedundancy:
    MEMBERS = np.array([[5.0, 0.0], [0.0, 20.0], [-12.0, 0.0]])

    def test_node_outside_second_range_unchanged(self):
        got = coverage_redundancy((0.0, 30.0), (0.0, 0.0), 40.0,
                                  (200.0, 0.0), 40.0, self.MEMBERS)
        assert got == CoverageAdjustment(False, 40.0)

    def test_unequal_ranges_unchanged(self):
        got = coverage_redundancy((5.0, 5.0), (0.0, 0.0), 40.0,
                                  (10.0, 0.0), 39.0, self.MEMBERS)
        assert got == CoverageAdjustment(False, 40.0)

    def test_redundant_shrinks_to_farthest_member(self):
        got = coverage_redundancy((5.0, 5.0), (0.0, 0.0), 40.0,
                                  (10.0, 0.0), 40.0, self.MEMBERS)
        assert got.redundant
        assert got.adjusted_range == pytest.approx(20.0, rel=1e-12)

    def test_never_below_farthest_member(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            members = rng.uniform(-30.0, 30.0, size=(int(rng.integers(1, 8)), 2))
            got = coverage_redundancy((1.0, 1.0), (0.0, 0.0), 50.0,
                                      (3.0, 0.0), 50.0, members)
            farthest = float(np.hypot(members[:, 0], members[:, 1]).max())
            assert got.redundant
            assert got.adjusted_range >= farthest * (1.0 - 1e-12)

    def test_memberless_head_shrinks_to_zero(self):
        got = coverage_redundancy((1.0, 1.0), (0.0, 0.0), 30.0,
                                  (2.0, 0.0), 30.0, np.empty((0, 2)))
        assert got == CoverageAdjustment(True, 0.0)

    def test_boundary_is_not_inside(self):
        # strictly-inside rule: a node exactly on a radius is not redundant
        got = coverage_redundancy((40.0, 0.0), (0.0, 0.0), 40.0,
                                  (80.0, 0.0), 40.0, self.MEMBERS)
        assert not got.redundant
