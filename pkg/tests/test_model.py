"""Energy model, configuration, and deployment tests."""

import math

import numpy as np
import pytest

from wsncluster.model import (
    ConfigError,
    NetworkConfig,
    PerBitLinkParams,
    RadioEnergyParams,
    aggregation_energy,
    amp_power,
    deploy_network,
    per_hop_energy,
    rx_energy,
    scatter_pois,
    stream_rng,
    tx_energy,
)

RADIO = RadioEnergyParams()


class TestNetworkConfig:
    def test_defaults(self):
        cfg = NetworkConfig()
        assert cfg.field_width == 100.0
        assert cfg.field_height == 100.0
        assert cfg.node_count == 100
        assert cfg.bs_position == (50.0, 150.0)
        assert cfg.initial_energy == 0.5
        assert cfg.packet_bits == 4000
        assert cfg.p_opt == 0.1
        assert cfg.max_rounds == 5000

    @pytest.mark.parametrize("kwargs,name", [
        (dict(node_count=0), "node_count"),
        (dict(initial_energy=-1.0), "initial_energy"),
        (dict(p_opt=0.0), "p_opt"),
        (dict(p_opt=1.5), "p_opt"),
        (dict(field_width=0.0), "field_width"),
        (dict(packet_bits=0), "packet_bits"),
        (dict(max_rounds=-1), "max_rounds"),
    ])
    def test_validation_names_field(self, kwargs, name):
        with pytest.raises(ConfigError, match=name):
            NetworkConfig(**kwargs)

    def test_epoch_length(self):
        assert NetworkConfig(p_opt=0.1).epoch_length == 10
        assert NetworkConfig(p_opt=0.3).epoch_length == 4
        assert NetworkConfig(p_opt=1.0).epoch_length == 1


class TestDeploy:
    def test_default_deployment(self):
        state = deploy_network(NetworkConfig(seed=1))
        assert state.alive_count == 100
        assert state.positions.shape == (100, 2)
        assert np.all(state.positions >= 0.0)
        assert np.all(state.positions[:, 0] <= 100.0)
        assert np.all(state.positions[:, 1] <= 100.0)
        assert state.total_energy == pytest.approx(50.0, abs=0)

    def test_single_node(self):
        state = deploy_network(NetworkConfig(node_count=1))
        assert state.alive_count == 1
        assert state.energy[0] == 0.5

    def test_deterministic(self):
        a = deploy_network(NetworkConfig(seed=9))
        b = deploy_network(NetworkConfig(seed=9))
        assert np.array_equal(a.positions, b.positions)

    def test_seed_changes_layout(self):
        a = deploy_network(NetworkConfig(seed=1))
        b = deploy_network(NetworkConfig(seed=2))
        assert not np.array_equal(a.positions, b.positions)

    def test_node_view(self):
        state = deploy_network(NetworkConfig(seed=4))
        view = state.node(7)
        assert view.position == tuple(state.positions[7])
        assert view.residual_energy == state.energy[7]
        assert view.alive

    def test_scatter_pois(self):
        cfg = NetworkConfig(seed=5)
        pois = scatter_pois(cfg, factor=4)
        assert pois.shape == (400, 2)
        assert np.array_equal(pois, scatter_pois(cfg, factor=4))


class TestStreamRng:
    def test_repeatable(self):
        assert stream_rng(1, 2, 3).random() == stream_rng(1, 2, 3).random()

    def test_streams_differ(self):
        draws = {stream_rng(1, s, 0).random() for s in range(5)}
        assert len(draws) == 5

    def test_rounds_differ(self):
        draws = {stream_rng(1, 1, r).random() for r in range(50)}
        assert len(draws) == 50


class TestTxEnergy:
    def test_zero_bits(self):
        assert tx_energy(RADIO, 0, 123.0) == 0.0

    def test_electronics_only_at_zero_distance(self):
        assert tx_energy(RADIO, 4000, 0.0) == 4000 * 50e-9

    def test_continuity_at_crossover(self):
        d = RADIO.d_crossover
        b = 4000
        fs = RADIO.e_elec * b + RADIO.e_fs * b * d * d
        mp = RADIO.e_elec * b + RADIO.e_mp * b * d ** 4
        assert fs == pytest.approx(mp, rel=1e-12)
        assert tx_energy(RADIO, b, d) == pytest.approx(fs, rel=1e-12)

    def test_strictly_increasing(self):
        ds = np.linspace(0.0, 200.0, 400)
        vals = [tx_energy(RADIO, 4000, d) for d in ds]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_negative_inputs_rejected(self):
        with pytest.raises(ValueError):
            tx_energy(RADIO, -1, 10.0)
        with pytest.raises(ValueError):
            tx_energy(RADIO, 10, -1.0)


class TestRxEnergy:
    def test_values(self):
        assert rx_energy(RADIO, 0) == 0.0
        assert rx_energy(RADIO, 4000) == 4000 * 50e-9
        assert rx_energy(RADIO, 1) == 5.0e-8

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            rx_energy(RADIO, -1)


class TestAggregationEnergy:
    def test_values(self):
        assert aggregation_energy(RADIO, 4000, 0) == 0.0
        assert aggregation_energy(RADIO, 4000, 10) == pytest.approx(2.0e-4, rel=1e-12)
        assert aggregation_energy(RADIO, 1, 1) == 5e-9

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            aggregation_energy(RADIO, -1, 1)
        with pytest.raises(ValueError):
            aggregation_energy(RADIO, 1, -1)


# Reference link-budget set: value computed on an independent calculator
# before the implementation existed and pinned here.
REFERENCE_LINK = PerBitLinkParams(e_b=1e-10, r_b=1e6, g_t=1.0, g_r=1.0,
                                  wavelength=0.125, m_l=1.0, m_f=1.0,
                                  alpha_drain=0.0, p_tx_elec=0.01,
                                  p_rx_elec=0.01)


class TestAmpPower:
    def test_pinned_reference_value(self):
        assert amp_power(REFERENCE_LINK, 50.0) == pytest.approx(
            2526.618726678876, rel=1e-12)

    def test_quadratic_in_distance(self):
        link = PerBitLinkParams()
        assert amp_power(link, 100.0) == pytest.approx(
            4.0 * amp_power(link, 50.0), rel=1e-12)

    def test_alpha_zero_is_raw_output_power(self):
        d = 37.0
        raw = (REFERENCE_LINK.e_b * REFERENCE_LINK.r_b
               * (4.0 * math.pi * d) ** 2 / REFERENCE_LINK.wavelength ** 2)
        assert amp_power(REFERENCE_LINK, d) == pytest.approx(raw, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            amp_power(REFERENCE_LINK, 0.0)
        with pytest.raises(ValueError):
            amp_power(REFERENCE_LINK, -5.0)


class TestPerHopEnergy:
    def test_pinned_reference_value(self):
        assert per_hop_energy(REFERENCE_LINK, 50.0) == pytest.approx(
            0.002526638726678876, rel=1e-12)

    def test_small_distance_limit(self):
        floor = (REFERENCE_LINK.p_tx_elec + REFERENCE_LINK.p_rx_elec) / REFERENCE_LINK.r_b
        assert per_hop_energy(REFERENCE_LINK, 1e-9) == pytest.approx(floor, rel=1e-9)
        assert per_hop_energy(REFERENCE_LINK, 200.0) >= floor

    def test_amplifier_term_quadruples(self):
        link = PerBitLinkParams()
        circuit = (link.p_tx_elec + link.p_rx_elec) / link.r_b
        amp_d = per_hop_energy(link, 80.0) - circuit
        amp_half = per_hop_energy(link, 40.0) - circuit
        assert amp_d == pytest.approx(4.0 * amp_half, rel=1e-12)

    def test_decomposition_identity(self):
        for link in (PerBitLinkParams(), REFERENCE_LINK,
                     PerBitLinkParams(alpha_drain=0.9, p_tx_elec=0.02)):
            for d in (1.0, 12.5, 50.0, 87.7, 160.0):
                expected = (amp_power(link, d) / link.r_b
                            + (link.p_tx_elec + link.p_rx_elec) / link.r_b)
                assert per_hop_energy(link, d) == pytest.approx(expected, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            per_hop_energy(REFERENCE_LINK, 0.0)


class TestRadioParams:
    def test_default_crossover(self):
        assert RADIO.d_crossover == pytest.approx(
            math.sqrt(10e-12 / 0.0013e-12), rel=1e-12)

    def test_inconsistent_crossover_rejected(self):
        with pytest.raises(ConfigError):
            RadioEnergyParams(d_crossover=50.0)

    def test_negative_coefficient_rejected(self):
        with pytest.raises(ConfigError):
            RadioEnergyParams(e_elec=-1e-9)
