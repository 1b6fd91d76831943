# -*- coding: utf-8 -*-

from fractions import Fraction

import numpy as np
import numpy.testing as nptest
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gbe60.bitframe import F1_HZ, F2_HZ, LAYOUT_64
from gbe60.exceptions import ConfigurationError, FifoOverflowError
from gbe60.flowctl import (FifoConfig, EthernetIngress, FifoTrace,
                           FifoSimulator, simulate, receive_side_config,
                           receive_side_ingress, GMII_CLOCK_HZ)


def _conserved(stats):
    return stats.bytes_in == stats.bytes_out + stats.final_occupancy


def test_clock_plan():
    config = FifoConfig()
    assert config.clock_periods == (239, 296)
    assert config.read_clock_hz == F2_HZ * Fraction(478, 518)
    assert config.read_clock_hz / F2_HZ == LAYOUT_64.efficiency
    assert config.write_clock_hz == GMII_CLOCK_HZ
    assert FifoConfig(read_clock_hz=100.929e6).read_clock_hz == 100929000


@pytest.mark.parametrize("kwargs", [
    {'lower_threshold': 0},
    {'upper_threshold': 8192},
    {'upper_threshold': 40000},
    {'read_clock_hz': 125e6},
    {'read_clock_hz': 0},
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigurationError):
        FifoConfig(**kwargs)


def test_ingress_patterns():
    sat = EthernetIngress.saturating()
    nptest.assert_allclose(sat.offered_load, 1518 / 1538)
    assert EthernetIngress.sub_rate(0.5).offered_load == 0.5
    mixed = EthernetIngress((100, 200), (10,))
    nptest.assert_allclose(mixed.offered_load, 300 / 320)
    frames = mixed.frames()
    assert [next(frames) for _ in range(3)] == [(100, 10), (200, 10),
                                                (100, 10)]
    rnd = EthernetIngress.random(50, rng_seed=4)
    assert rnd == EthernetIngress.random(50, rng_seed=4)
    assert 64 <= min(rnd.frame_bytes) and rnd.max_frame_bytes <= 1518
    with pytest.raises(ConfigurationError):
        EthernetIngress.sub_rate(0)
    with pytest.raises(ConfigurationError):
        EthernetIngress((0,), (20,))


def test_sub_rate_never_stops():
    trace, stats = simulate(ingress=EthernetIngress.sub_rate(0.5),
                            duration_ticks=500000)
    assert stats.stops == 0
    assert trace.count('stop_asserted') == 0
    assert stats.max_occupancy < 1518
    assert _conserved(stats)
    nptest.assert_allclose(stats.egress_rate_bps, stats.ingress_rate_bps,
                           rtol=1e-2)


def test_saturating_egress_at_source_clock():
    trace, stats = simulate(duration_ticks=10 ** 6)
    assert stats.stops >= 1
    assert stats.starts >= stats.stops - 1
    assert stats.max_occupancy <= FifoConfig().capacity_bytes
    assert _conserved(stats)
    nptest.assert_allclose(stats.egress_rate_bps, 8 * float(F1_HZ), rtol=1e-3)
    assert round(stats.egress_rate_bps / 1e6, 1) == 807.4
    nptest.assert_allclose(stats.duration_s, 8e-3)


@pytest.mark.slow
def test_saturating_long_run():
    _, stats = simulate(duration_ticks=10 ** 8)
    assert _conserved(stats)
    assert round(stats.egress_rate_bps / 1e6, 2) == 807.43


def test_flow_control_events():
    config = FifoConfig(capacity_bytes=6000, upper_threshold=4000,
                        lower_threshold=1000)
    trace, stats = simulate(config, duration_ticks=100000, trace_bytes=True)
    table = trace.to_frame()
    assert list(table.columns) == ['tick', 'event', 'occupancy']
    assert np.all(np.diff(table['tick'].values) >= 0)
    assert table['occupancy'].between(0, config.capacity_bytes).all()
    assert trace.count('write') == stats.bytes_in
    assert trace.count('read') == stats.bytes_out
    assert stats.stops >= 2

    stops = table[table['event'] == 'stop_asserted']
    starts = table[table['event'] == 'start_asserted']
    assert (stops['occupancy'] == config.upper_threshold).all()
    assert (starts['occupancy'] == config.lower_threshold).all()
    # only the frame in flight is completed after a stop
    t_stop, t_start = stops['tick'].iloc[0], starts['tick'].iloc[0]
    assert t_stop < t_start
    writes = table[(table['event'] == 'write') & (table['tick'] > t_stop)
                   & (table['tick'] <= t_start)]
    assert len(writes) < 1518


def test_overflow_raises():
    config = FifoConfig(capacity_bytes=1050, upper_threshold=1000,
                        lower_threshold=500)
    with pytest.raises(FifoOverflowError) as e:
        simulate(config, duration_ticks=100000)
    assert e.value.event['event'] == 'write'
    assert e.value.event['occupancy'] == 1051


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(20, 400))
def test_random_ingress_no_loss(seed, max_gap):
    ingress = EthernetIngress.random(300, rng_seed=seed, max_gap=max_gap)
    config = FifoConfig()
    _, stats = simulate(config, ingress, duration_ticks=300000)
    assert _conserved(stats)
    assert stats.max_occupancy <= config.upper_threshold + 1518
    assert stats.starts <= stats.stops


def test_receive_side():
    config = receive_side_config()
    assert config.write_clock_hz == F2_HZ
    assert config.clock_periods == (239, 259)
    ingress = receive_side_ingress()
    nptest.assert_allclose(ingress.offered_load, 478 / 518)
    _, stats = simulate(config, ingress, duration_ticks=500000)
    assert stats.stops == 0
    assert _conserved(stats)
    nptest.assert_allclose(stats.egress_rate_bps, 8 * float(F1_HZ), rtol=1e-3)


def test_sampling_and_metadata():
    sim = FifoSimulator(ingress=EthernetIngress.sub_rate(0.8), sample_every=5)
    trace, stats = sim.run(100000)
    assert trace.count('sample') == stats.frames_in // 5
    assert stats.to_dict()['frames_in'] == stats.frames_in
    assert FifoConfig().metadata()['capacity_bytes'] == 32768
    with pytest.raises(ConfigurationError):
        simulate(duration_ticks=0)


def test_empty_trace():
    table = FifoTrace(239).to_frame()
    assert len(table) == 0
    assert list(table.columns) == ['tick', 'event', 'occupancy']
