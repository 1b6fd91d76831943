# -*- coding: utf-8 -*-

import random

import numpy as np
import numpy.testing as nptest
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gbe60.exceptions import ConfigurationError, LinkDomainError
from gbe60.linkbudget import (LinkParams, BlockageEvent, blockage_loss_db,
                              noise_level_dbm, fspl_db, received_power_dbm,
                              sensitivity_dbm, snr_db, max_range_m,
                              distance_to_ebn0, ebn0_for_ber, range_for_ebn0,
                              demod_input_ok, blockage_timeline,
                              check_demod_input, rx_chain_gain_db,
                              LNA_GAIN_DB, AGC_GAIN_RANGE_DB)
from gbe60.modem import theoretical_ber

HORNS = LinkParams(impl_loss_db=0.0)


def test_noise_level():
    nptest.assert_allclose(noise_level_dbm(9, 2e9), -71.99, atol=0.02)
    assert noise_level_dbm(0, 1) == -174.0
    nptest.assert_allclose(noise_level_dbm(9, 4e9) - noise_level_dbm(9, 2e9),
                           10 * np.log10(2))
    with pytest.raises(LinkDomainError):
        noise_level_dbm(9, 0)


def test_fspl():
    nptest.assert_allclose(fspl_db(1.0), 68.0, atol=0.05)
    nptest.assert_allclose(fspl_db(10.0), 88.0, atol=0.05)
    d = np.array([1.0, 2.0, 4.0, 8.0])
    nptest.assert_allclose(np.diff(fspl_db(d)), 20 * np.log10(2))
    for bad in (0.0, -1.0, [1.0, 0.0]):
        with pytest.raises(LinkDomainError):
            fspl_db(bad)


def test_received_power_examples():
    nptest.assert_allclose(received_power_dbm(HORNS, 5.0), -37.2, atol=0.05)
    nptest.assert_allclose(
        received_power_dbm(HORNS, 5.0, [BlockageEvent('human')]), -57.2,
        atol=0.05)
    patches = LinkParams.from_antennas('patch', 'patch', impl_loss_db=0.0)
    nptest.assert_allclose(received_power_dbm(HORNS, 5.0)
                           - received_power_dbm(patches, 5.0), 28.8)


def test_received_power_decreasing():
    d = np.linspace(1, 200, 400)
    assert np.all(np.diff(received_power_dbm(HORNS, d)) < 0)


@settings(max_examples=30)
@given(st.lists(st.sampled_from(['human', 'closed_door']), max_size=5),
       st.integers(0, 1000))
def test_blockage_order_independent(kinds, seed):
    events = [BlockageEvent(k) for k in kinds]
    shuffled = list(events)
    random.Random(seed).shuffle(shuffled)
    nptest.assert_allclose(received_power_dbm(HORNS, 7.0, events),
                           received_power_dbm(HORNS, 7.0, shuffled),
                           rtol=0, atol=1e-9)


def test_sensitivity():
    s = sensitivity_dbm(noise_level_dbm(9, 2e9))
    nptest.assert_allclose(s, -61.5, atol=0.02)
    assert sensitivity_dbm(-71.99, 0.0) == -71.99
    nptest.assert_allclose(sensitivity_dbm(-71.99, 11.5)
                           - sensitivity_dbm(-71.99, 10.5), 1.0)


def test_max_range():
    d = max_range_m(HORNS, -61.5)
    assert 80.0 < d < 84.0
    nptest.assert_allclose(received_power_dbm(HORNS, d), -61.5, atol=1e-9)
    blocked = max_range_m(HORNS, -61.5, [BlockageEvent('human')])
    nptest.assert_allclose(blocked, d / 10)
    # default implementation loss brings the range to ~35 m
    assert 33.0 < max_range_m(LinkParams(), -61.5) < 36.0
    assert max_range_m(LinkParams(impl_loss_db=np.inf), -61.5) is None
    assert max_range_m(HORNS, 50.0) is None


@settings(max_examples=50)
@given(st.floats(1.5, 5000.0))
def test_max_range_roundtrip(distance):
    power = received_power_dbm(HORNS, distance)
    nptest.assert_allclose(max_range_m(HORNS, power), distance,
                           rtol=0, atol=1e-6)


def test_link_params_validation():
    with pytest.raises(ConfigurationError):
        LinkParams(impl_loss_db=-1.0)
    with pytest.raises(ConfigurationError):
        LinkParams(impl_loss_db=np.nan)
    with pytest.raises(ConfigurationError):
        LinkParams(bandwidth_hz=0)
    with pytest.raises(ConfigurationError):
        LinkParams.from_antennas('dish', 'horn')
    assert LinkParams(tx_power_dbm=3.0).eirp_dbm == pytest.approx(25.4)


def test_blockage_events():
    assert BlockageEvent('human').attenuation_db == 20.0
    assert BlockageEvent('closed_door').attenuation_db == 15.0
    assert BlockageEvent('wall', 30.0).attenuation_db == 30.0
    with pytest.raises(ConfigurationError):
        BlockageEvent('wall')
    with pytest.raises(ConfigurationError):
        BlockageEvent('human', start_s=2.0, stop_s=1.0)
    walk = BlockageEvent('human', start_s=1.0, stop_s=2.0)
    assert not walk.active(0.5)
    assert walk.active(1.0)
    assert not walk.active(2.0)
    assert walk.active()
    assert blockage_loss_db([walk, BlockageEvent('closed_door')], 0.0) == 15.0


def test_blockage_timeline():
    walk = BlockageEvent('human', start_s=1.0, stop_s=2.0)
    times = np.arange(0, 3, 0.5)
    d = 20.0
    power, outage = blockage_timeline(LinkParams(), d, [walk], times)
    clear = received_power_dbm(LinkParams(), d)
    nptest.assert_allclose(power, [clear, clear, clear - 20, clear - 20,
                                   clear, clear])
    nptest.assert_array_equal(outage, [False, False, True, True, False,
                                       False])


def test_ebn0_composition():
    d = np.array([2.0, 5.0, 10.0, 30.0])
    ebn0 = distance_to_ebn0(HORNS, d)
    assert np.all(np.diff(ebn0) < 0)
    assert np.all(np.diff(theoretical_ber(ebn0)) > 0)
    nptest.assert_allclose(snr_db(HORNS, d) - ebn0, 10 * np.log10(875 / 2000))
    with pytest.raises(LinkDomainError):
        distance_to_ebn0(HORNS, 5.0, bitrate=0)


def test_ber_at_ten_db_distance():
    d = range_for_ebn0(LinkParams(), 10.0)
    nptest.assert_allclose(distance_to_ebn0(LinkParams(), d), 10.0)
    nptest.assert_allclose(theoretical_ber(distance_to_ebn0(LinkParams(), d)),
                           2.27e-5, rtol=2e-3)


@pytest.mark.parametrize("params", [LinkParams(), HORNS,
                                    LinkParams.from_antennas('patch', 'horn')])
def test_coded_range_exceeds_uncoded(params):
    uncoded = range_for_ebn0(params, ebn0_for_ber(1e-6))
    coded = range_for_ebn0(params, ebn0_for_ber(1e-6, coded=True))
    assert coded > uncoded


def test_ebn0_for_ber():
    nptest.assert_allclose(theoretical_ber(ebn0_for_ber(1e-6)), 1e-6)
    assert ebn0_for_ber(1e-6, coded=True) < ebn0_for_ber(1e-6)
    with pytest.raises(ConfigurationError):
        ebn0_for_ber(0.7)


def test_demod_input():
    params = LinkParams(rx_chain_gain_db=rx_chain_gain_db())
    assert demod_input_ok(params, 5.0)
    assert not demod_input_ok(params, 1000.0)
    with pytest.raises(ConfigurationError):
        demod_input_ok(LinkParams(), 5.0)
    assert check_demod_input(LinkParams(), [5.0]) is None
    with pytest.warns(UserWarning):
        ok = check_demod_input(params, [5.0, 1000.0])
    nptest.assert_array_equal(ok, [True, False])


def test_rx_chain_gain():
    assert rx_chain_gain_db() == LNA_GAIN_DB + AGC_GAIN_RANGE_DB[1]
    assert rx_chain_gain_db(AGC_GAIN_RANGE_DB[0]) == 48.0
    for agc in (AGC_GAIN_RANGE_DB[0] - 1, AGC_GAIN_RANGE_DB[1] + 1):
        with pytest.raises(ConfigurationError):
            rx_chain_gain_db(agc)
