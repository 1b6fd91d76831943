# -*- coding: utf-8 -*-

import numpy as np
import numpy.testing as nptest
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gbe60.bitframe import LAYOUT_64, PREAMBLE_64, bytes_to_bits
from gbe60.exceptions import ConfigurationError
from gbe60.fec_rs import rs_encode
from gbe60.linecode import (lfsr_sequence, lfsr_period, is_maximal_length,
                            ScramblerSequence, DEFAULT_SCRAMBLER,
                            ZERO_SCRAMBLER, scramble, descramble, diff_encode,
                            diff_decode, preamble_scores, max_window_score)

bit_lists = st.lists(st.integers(0, 1), min_size=1, max_size=300)


@pytest.mark.parametrize("taps,ones", [((5, 3), 16), ((6, 5), 32),
                                       ((7, 6), 64)])
def test_msequence_balance(taps, ones):
    degree = max(taps)
    period = (1 << degree) - 1
    seq = lfsr_sequence(taps, (1 << degree) - 1, 2 * period)
    assert int(seq[:period].sum()) == ones
    nptest.assert_array_equal(seq[:period], seq[period:])
    assert is_maximal_length(taps)


def test_non_maximal_taps():
    # x^6 + x^3 + 1 is irreducible with period 9
    assert lfsr_period((6, 3), 1) == 9
    assert not is_maximal_length((6, 3))


def test_lfsr_zero_seed():
    with pytest.raises(ConfigurationError):
        lfsr_sequence((6, 5), 0, 10)
    with pytest.raises(ConfigurationError):
        lfsr_period((6, 5), 0)


def test_scrambler_mask_validation():
    with pytest.raises(ConfigurationError):
        ScramblerSequence(bytes(7))
    with pytest.raises(ConfigurationError):
        ScramblerSequence.from_hex("zz" * 8)
    assert DEFAULT_SCRAMBLER.hex() == "50ae662f76f50ee0"


@pytest.mark.parametrize("payload_seed", [None, 0, 1, 2, 3, 4])
def test_default_scrambler_no_false_preamble(payload_seed):
    if payload_seed is None:
        payload = bytes(LAYOUT_64.payload_bytes)
    else:
        payload = np.random.default_rng(payload_seed).bytes(
            LAYOUT_64.payload_bytes)
    step = LAYOUT_64.payload_bytes_per_word
    coded = b''.join(rs_encode(payload[i * step:(i + 1) * step])
                     for i in range(LAYOUT_64.data_words))
    assert len(coded) == 510
    bits = bytes_to_bits(scramble(coded, DEFAULT_SCRAMBLER))
    best, _ = max_window_score(bits, PREAMBLE_64.as_array())
    assert best < 59


def test_scramble_periodic_mask():
    out = scramble(bytes(20))
    mask = DEFAULT_SCRAMBLER.mask
    assert out == mask + mask + mask[:4]
    assert scramble(b'\x01\x02', ZERO_SCRAMBLER) == b'\x01\x02'


@settings(max_examples=50)
@given(st.binary(max_size=600), st.binary(min_size=8, max_size=8))
def test_scramble_involution(data, mask):
    seq = ScramblerSequence(mask)
    assert descramble(scramble(data, seq), seq) == data


def test_diff_encode_example():
    nptest.assert_array_equal(diff_encode([1, 0, 1, 1], d0=0), [1, 1, 0, 1])
    nptest.assert_array_equal(diff_encode([1, 0, 1, 1], d0=1), [0, 0, 1, 0])
    assert diff_encode([]).size == 0


@settings(max_examples=50)
@given(bit_lists, st.integers(0, 1))
def test_diff_roundtrip(bits, d0):
    d = diff_encode(bits, d0)
    nptest.assert_array_equal(diff_decode(d, d0), bits)


@settings(max_examples=50)
@given(bit_lists)
def test_diff_decode_inversion_invariant(bits):
    d = diff_encode(bits, 0)
    plain = diff_decode(d)
    assert plain.size == len(bits) - 1
    nptest.assert_array_equal(plain, bits[1:])
    nptest.assert_array_equal(diff_decode(1 - d), plain)


def test_preamble_scores_embedded(rng):
    pattern = rng.integers(0, 2, 64)
    bits = rng.integers(0, 2, 300)
    bits[100:164] = pattern
    scores = preamble_scores(bits, pattern)
    assert scores.size == 300 - 64 + 1
    assert scores[100] == 64
    bits[100:105] ^= 1
    assert preamble_scores(bits, pattern)[100] == 59


def test_preamble_scores_short_input():
    assert preamble_scores([0, 1], [0, 1, 1]).size == 0


def test_max_window_score_exclude():
    pattern = np.array([1, 0, 1, 1])
    bits = np.array([0, 0, 1, 0, 1, 1, 0, 0])
    assert max_window_score(bits, pattern) == (4, 1)
    best, count = max_window_score(bits, pattern, exclude=[2])
    assert best < 4
    assert count >= 1
    assert max_window_score([0], pattern) == (0, 0)
