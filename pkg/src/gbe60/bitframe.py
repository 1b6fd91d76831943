# -*- coding: utf-8 -*-
"""
Frame format of the baseband transmitter.

A frame is a preamble followed by the coded region. The preamble bypasses the
RS encoder and the scrambler; the coded region holds RS(255, 239) codewords,
scrambled with the 8-byte mask starting at the first coded byte. Two layouts
exist: the 64-bit preamble format (8 + 2 x 255 = 518 bytes) and the legacy
32-bit format (4 + 255 + 1 dummy byte = 260 bytes).

Bits are serialized least significant bit first within every byte.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Tuple

import numpy as np

from gbe60.exceptions import ConfigurationError, FrameSizeError, DecodeFailure
from gbe60.fec_rs import rs_encode, rs_decode, K as RS_K, N as RS_N
from gbe60.linecode import (lfsr_sequence, is_maximal_length, scramble,
                            descramble, ScramblerSequence, DEFAULT_SCRAMBLER)


@dataclass(frozen=True)
class LfsrSpec:
    """
    Generator of a preamble: one period of a maximal-length LFSR sequence
    completed with one appended bit to fill whole bytes.
    """
    taps: Tuple[int, ...]
    seed: int
    appended_bit: int = 0

    @property
    def degree(self):
        return max(self.taps)

    @property
    def period(self):
        return (1 << self.degree) - 1


# x^6 + x^5 + 1, register all ones, 64th bit = 0
PREAMBLE_64_SPEC = LfsrSpec(taps=(6, 5), seed=0b111111, appended_bit=0)
# x^5 + x^3 + 1, register all ones, 32nd bit = 0
PREAMBLE_32_SPEC = LfsrSpec(taps=(5, 3), seed=0b11111, appended_bit=0)

# maximal-length taps of the bench PN patterns
PRBS_TAPS = {7: (7, 6), 15: (15, 14), 23: (23, 18)}


@dataclass(frozen=True)
class PreamblePattern:
    bits: Tuple[int, ...]
    generator_spec: LfsrSpec

    @property
    def n_bits(self):
        return len(self.bits)

    def as_array(self):
        return np.array(self.bits, dtype=np.uint8)

    def to_bytes(self):
        return bits_to_bytes(self.as_array())


def generate_preamble(spec=PREAMBLE_64_SPEC):
    """
    Build a preamble from its generator parameters.

    Parameters
    ----------
    spec : LfsrSpec, optional (default: PREAMBLE_64_SPEC)
        Primitive polynomial taps, non-zero seed and appended bit.

    Returns
    -------
    pattern : PreamblePattern
        period + 1 bits, 64 for the default spec.

    Raises
    ------
    ConfigurationError
        For an all-zero seed or a polynomial that is not primitive.
    """
    if (spec.seed & spec.period) == 0:
        raise ConfigurationError("Preamble LFSR seed must be non-zero")
    if not is_maximal_length(spec.taps, spec.seed):
        raise ConfigurationError(
            f"LFSR taps {spec.taps} do not give a maximal-length sequence")

    seq = lfsr_sequence(spec.taps, spec.seed, spec.period)
    bits = tuple(int(b) for b in seq) + (spec.appended_bit & 1,)
    return PreamblePattern(bits=bits, generator_spec=spec)


PREAMBLE_64 = generate_preamble(PREAMBLE_64_SPEC)
PREAMBLE_32 = generate_preamble(PREAMBLE_32_SPEC)


def prbs_pattern(degree=7, seed=None):
    """
    One period of a PN test sequence, e.g. the 127-bit pattern of a BER test
    set for degree 7.
    """
    if degree not in PRBS_TAPS:
        raise ConfigurationError(
            f"No PRBS taps for degree {degree}, use one of {sorted(PRBS_TAPS)}")
    if seed is None:
        seed = (1 << degree) - 1
    return lfsr_sequence(PRBS_TAPS[degree], seed, (1 << degree) - 1)


@dataclass(frozen=True)
class FrameLayout:
    """Sizes of one frame, in bytes unless stated otherwise."""
    name: str
    preamble: PreamblePattern
    data_words: int
    payload_bytes_per_word: int = RS_K
    coded_bytes_per_word: int = RS_N
    dummy_bytes: int = 0

    @property
    def preamble_bytes(self):
        return self.preamble.n_bits // 8

    @property
    def preamble_bits(self):
        return self.preamble.n_bits

    @property
    def payload_bytes(self):
        return self.data_words * self.payload_bytes_per_word

    @property
    def coded_region_bytes(self):
        return self.data_words * self.coded_bytes_per_word + self.dummy_bytes

    @property
    def total_frame_bytes(self):
        return self.preamble_bytes + self.coded_region_bytes

    @property
    def frame_bits(self):
        return 8 * self.total_frame_bytes

    @property
    def efficiency(self):
        """Payload share of the frame, 478/518 for the 64-bit layout."""
        return Fraction(self.payload_bytes, self.total_frame_bytes)


LAYOUT_64 = FrameLayout(name='64bit', preamble=PREAMBLE_64, data_words=2)
LAYOUT_32 = FrameLayout(name='32bit', preamble=PREAMBLE_32, data_words=1,
                        dummy_bytes=1)


# Clock plan: the line byte clock f2 carries whole frames, the source byte
# clock f1 only the payload share of them.
F2_HZ = Fraction(109375000)


def f1_hz(layout=LAYOUT_64, f2=F2_HZ):
    """Source byte clock, f2 x payload / frame bytes (100.929 MHz)."""
    return Fraction(f2) * layout.efficiency


F1_HZ = f1_hz(LAYOUT_64)


def layout_for(preamble_bits):
    if preamble_bits == 64:
        return LAYOUT_64
    if preamble_bits == 32:
        return LAYOUT_32
    raise ConfigurationError(
        f"Unsupported preamble length {preamble_bits}, use 32 or 64")


@dataclass(frozen=True)
class FrameCodec:
    """
    Encode/decode pipeline of the coded region.

    With ``rs_enabled=False`` the frame format is unchanged but the receiver
    takes the systematic bytes without correction (uncoded measurements).
    """
    scrambler: ScramblerSequence = DEFAULT_SCRAMBLER
    rs_enabled: bool = True


@dataclass(frozen=True)
class Frame:
    preamble: bytes
    coded_payload: bytes = field(repr=False)

    def __len__(self):
        return len(self.preamble) + len(self.coded_payload)

    def to_bytes(self):
        return self.preamble + self.coded_payload

    def hexdump(self):
        return self.to_bytes().hex()

    @classmethod
    def from_bytes(cls, data, layout=LAYOUT_64):
        data = bytes(data)
        if len(data) != layout.total_frame_bytes:
            raise FrameSizeError(
                f"{layout.name} frame has {layout.total_frame_bytes} bytes, "
                f"got {len(data)}")
        return cls(preamble=data[:layout.preamble_bytes],
                   coded_payload=data[layout.preamble_bytes:])


def build_frame(payload, codec=FrameCodec(), layout=LAYOUT_64):
    """
    Assemble one frame from its payload.

    Parameters
    ----------
    payload : bytes
        data_words x 239 bytes (478 for the 64-bit layout).
    codec : FrameCodec, optional
        Scrambler mask of the coded region.
    layout : FrameLayout, optional (default: LAYOUT_64)

    Returns
    -------
    frame : Frame
        preamble || scramble(rs_encode(word_1) || ... || dummy bytes)
    """
    payload = bytes(payload)
    if len(payload) != layout.payload_bytes:
        raise FrameSizeError(
            f"{layout.name} frame carries {layout.payload_bytes} payload "
            f"bytes, got {len(payload)}")

    step = layout.payload_bytes_per_word
    words = [rs_encode(payload[i * step:(i + 1) * step])
             for i in range(layout.data_words)]
    coded = b''.join(words) + bytes(layout.dummy_bytes)

    return Frame(preamble=layout.preamble.to_bytes(),
                 coded_payload=scramble(coded, codec.scrambler))


def parse_frame(frame, codec=FrameCodec(), layout=LAYOUT_64):
    """
    Descramble and decode one frame.

    Returns
    -------
    payload : bytes
        data_words x 239 bytes.
    corrections : tuple of int
        Corrected bytes per codeword.

    Raises
    ------
    FrameSizeError
        If the frame length does not match the layout.
    DecodeFailure
        If a codeword holds more than 8 byte errors; ``word_index`` names it.
    """
    if len(frame) != layout.total_frame_bytes:
        raise FrameSizeError(
            f"{layout.name} frame has {layout.total_frame_bytes} bytes, "
            f"got {len(frame)}")

    coded = descramble(frame.coded_payload, codec.scrambler)
    step = layout.coded_bytes_per_word
    payload, corrections = [], []
    for i in range(layout.data_words):
        word = coded[i * step:(i + 1) * step]
        if not codec.rs_enabled:
            payload.append(word[:layout.payload_bytes_per_word])
            corrections.append(0)
            continue
        try:
            data, n_corr = rs_decode(word)
        except DecodeFailure as e:
            raise DecodeFailure(str(e), word_index=i) from e
        payload.append(data)
        corrections.append(n_corr)

    return b''.join(payload), tuple(corrections)


def bytes_to_bits(data):
    """LSB-first bit array of a byte string."""
    return np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8),
                         bitorder='little')


def bits_to_bytes(bits):
    """Inverse of :func:`bytes_to_bits`, the bit count must be a multiple of 8."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % 8:
        raise FrameSizeError(f"{bits.size} bits do not fill whole bytes")
    return np.packbits(bits, bitorder='little').tobytes()


def stream_frames(frames, layout=LAYOUT_64):
    """
    Concatenate frames into a continuous transmit stream closed by the
    preamble of the next frame, so the last frame has both correlator
    windows available at the receiver.
    """
    return b''.join(f.to_bytes() for f in frames) + layout.preamble.to_bytes()


def write_hexdump(frames, path):
    """One frame per line, lowercase hex, no separators."""
    with open(path, 'w') as f:
        for frame in frames:
            f.write(frame.hexdump() + '\n')


def read_hexdump(path, layout=LAYOUT_64):
    with open(path, 'r') as f:
        return [Frame.from_bytes(bytes.fromhex(line.strip()), layout)
                for line in f if line.strip()]
