# -*- coding: utf-8 -*-
"""
Rate adaptation between the Gigabit Ethernet interface and the baseband
transmitter.

Ethernet frames arrive one byte per 125 MHz write clock cycle. The
transmitter consumes source bytes at f1 = 100.929 MHz. The FIFO in between
has two thresholds: when its occupancy reaches the upper one a stop signal
goes to the source, which completes the frame in flight and sends no new
frame until the occupancy has fallen to the lower threshold (start signal).

Both clocks are placed on one integer time grid from their exact ratio, so
long runs accumulate no clock drift.
"""

import logging
from dataclasses import dataclass, asdict
from fractions import Fraction
from itertools import cycle
from typing import Tuple

import numpy as np
import pandas as pd

from gbe60.bitframe import F1_HZ, F2_HZ, LAYOUT_64
from gbe60.exceptions import ConfigurationError, FifoOverflowError

logger = logging.getLogger(__name__)

GMII_CLOCK_HZ = Fraction(125000000)
MAX_ETHERNET_FRAME_BYTES = 1518
MIN_ETHERNET_FRAME_BYTES = 64
# preamble + SFD + minimum inter-packet gap, in byte times
MIN_GAP_TICKS = 20

EVENTS = ('write', 'read', 'stop_asserted', 'start_asserted', 'sample')


def _as_hz(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # decimal value as written, e.g. 100.929e6
        return Fraction(repr(value))
    return Fraction(value)


def _ceil_div(a, b):
    return -(-a // b)


@dataclass(frozen=True)
class FifoConfig:
    """
    Parameters
    ----------
    capacity_bytes : int, optional (default: 32768)
    upper_threshold : int, optional (default: 24576)
        Occupancy at which stop is asserted.
    lower_threshold : int, optional (default: 8192)
        Occupancy at which start is asserted again.
    write_clock_hz : Fraction, optional (default: 125 MHz)
    read_clock_hz : Fraction, optional (default: f1 = 100.929 MHz)
        Must be slower than the write clock.
    """
    capacity_bytes: int = 32768
    upper_threshold: int = 24576
    lower_threshold: int = 8192
    write_clock_hz: Fraction = GMII_CLOCK_HZ
    read_clock_hz: Fraction = F1_HZ

    def __post_init__(self):
        object.__setattr__(self, 'write_clock_hz', _as_hz(self.write_clock_hz))
        object.__setattr__(self, 'read_clock_hz', _as_hz(self.read_clock_hz))
        if not (0 < self.lower_threshold < self.upper_threshold
                < self.capacity_bytes):
            raise ConfigurationError(
                f"Thresholds must satisfy 0 < lower < upper < capacity, got "
                f"{self.lower_threshold}, {self.upper_threshold}, "
                f"{self.capacity_bytes}")
        if not 0 < self.read_clock_hz < self.write_clock_hz:
            raise ConfigurationError(
                "The read clock must be positive and slower than the write "
                "clock")

    @property
    def clock_periods(self):
        """
        Write and read clock periods on the common integer grid,
        (239, 296) for the default clocks.
        """
        ratio = self.read_clock_hz / self.write_clock_hz
        return ratio.numerator, ratio.denominator

    def metadata(self):
        return {'capacity_bytes': self.capacity_bytes,
                'upper_threshold': self.upper_threshold,
                'lower_threshold': self.lower_threshold,
                'write_clock_hz': float(self.write_clock_hz),
                'read_clock_hz': float(self.read_clock_hz)}


@dataclass(frozen=True)
class EthernetIngress:
    """
    Burst pattern at the write side: frames of ``frame_bytes`` separated by
    ``gap_ticks`` idle write cycles. Sequences are used cyclically.
    """
    frame_bytes: Tuple[int, ...] = (MAX_ETHERNET_FRAME_BYTES,)
    gap_ticks: Tuple[int, ...] = (MIN_GAP_TICKS,)

    def __post_init__(self):
        sizes = tuple(np.atleast_1d(self.frame_bytes).tolist())
        gaps = tuple(np.atleast_1d(self.gap_ticks).tolist())
        if not sizes or min(sizes) < 1 or not gaps or min(gaps) < 0:
            raise ConfigurationError(
                "Ingress needs frame sizes >= 1 and gaps >= 0")
        object.__setattr__(self, 'frame_bytes', sizes)
        object.__setattr__(self, 'gap_ticks', gaps)

    @classmethod
    def saturating(cls, frame_bytes=MAX_ETHERNET_FRAME_BYTES):
        """Back-to-back frames with the minimum gap."""
        return cls((frame_bytes,), (MIN_GAP_TICKS,))

    @classmethod
    def sub_rate(cls, load, frame_bytes=MAX_ETHERNET_FRAME_BYTES):
        """Frames spaced to use ``load`` (0..1] of the write clock."""
        if not 0 < load <= 1:
            raise ConfigurationError(f"load must be in (0, 1], got {load}")
        gap = int(round(frame_bytes * (1 / load - 1)))
        return cls((frame_bytes,), (gap,))

    @classmethod
    def random(cls, n_frames=1000, rng_seed=None, max_gap=2 * MIN_GAP_TICKS):
        """Random frame sizes between 64 and 1518 bytes and random gaps."""
        rng = np.random.default_rng(rng_seed)
        sizes = rng.integers(MIN_ETHERNET_FRAME_BYTES,
                             MAX_ETHERNET_FRAME_BYTES + 1, n_frames)
        gaps = rng.integers(MIN_GAP_TICKS, max_gap + 1, n_frames)
        return cls(tuple(sizes.tolist()), tuple(gaps.tolist()))

    @property
    def max_frame_bytes(self):
        return max(self.frame_bytes)

    @property
    def offered_load(self):
        """Share of write cycles carrying a byte."""
        n = np.lcm(len(self.frame_bytes), len(self.gap_ticks))
        sizes = np.resize(self.frame_bytes, n)
        gaps = np.resize(self.gap_ticks, n)
        return float(sizes.sum() / (sizes.sum() + gaps.sum()))

    def frames(self):
        return zip(cycle(self.frame_bytes), cycle(self.gap_ticks))


def receive_side_config(capacity_bytes=32768, upper_threshold=24576,
                        lower_threshold=8192):
    """
    FIFO of the receiver: written at the line byte clock f2 while payload
    bytes come out of the decoder, read at f1.
    """
    return FifoConfig(capacity_bytes, upper_threshold, lower_threshold,
                      write_clock_hz=F2_HZ, read_clock_hz=F1_HZ)


def receive_side_ingress(layout=LAYOUT_64):
    """Payload bytes of each frame, then the preamble and parity byte times."""
    return EthernetIngress((layout.payload_bytes,),
                           (layout.total_frame_bytes - layout.payload_bytes,))


class FifoTrace(object):
    """
    Time-ordered FIFO events. Times are kept on the integer clock grid and
    exported in write clock cycles.
    """

    def __init__(self, write_period):
        self.write_period = write_period
        self._times = []
        self._codes = []
        self._occupancy = []

    def append(self, times, event, occupancy):
        times = np.atleast_1d(np.asarray(times, dtype=np.int64))
        codes = np.broadcast_to(np.atleast_1d(np.asarray(
            EVENTS.index(event) if isinstance(event, str) else event,
            dtype=np.int8)), times.shape)
        occ = np.broadcast_to(np.atleast_1d(np.asarray(occupancy,
                                                       dtype=np.int64)),
                              times.shape)
        self._times.append(times)
        self._codes.append(np.array(codes))
        self._occupancy.append(np.array(occ))

    def __len__(self):
        return int(sum(t.size for t in self._times))

    def count(self, event):
        code = EVENTS.index(event)
        return int(sum(np.count_nonzero(c == code) for c in self._codes))

    def to_frame(self):
        """
        Returns
        -------
        trace : pd.DataFrame
            Columns tick (write clock cycles), event, occupancy.
        """
        if not self._times:
            return pd.DataFrame({'tick': pd.Series(dtype=float),
                                 'event': pd.Series(dtype=str),
                                 'occupancy': pd.Series(dtype=np.int64)})
        times = np.concatenate(self._times)
        codes = np.concatenate(self._codes)
        occ = np.concatenate(self._occupancy)
        order = np.argsort(times, kind='stable')
        return pd.DataFrame({'tick': times[order] / self.write_period,
                             'event': np.array(EVENTS)[codes[order]],
                             'occupancy': occ[order]})


@dataclass(frozen=True)
class FifoStats:
    duration_ticks: int
    duration_s: float
    bytes_in: int
    bytes_out: int
    final_occupancy: int
    max_occupancy: int
    frames_in: int
    stops: int
    starts: int
    idle_reads: int
    ingress_rate_bps: float
    egress_rate_bps: float

    def to_dict(self):
        return asdict(self)


class FifoSimulator(object):
    """
    Event simulation of one FIFO run.

    Parameters
    ----------
    config : FifoConfig
    ingress : EthernetIngress
    trace_bytes : bool, optional (default: False)
        Record every write and read. Otherwise the trace holds the flow
        control events and one occupancy sample per frame.
    sample_every : int, optional (default: 1)
        Frames between occupancy samples.
    """

    def __init__(self, config=FifoConfig(), ingress=EthernetIngress(),
                 trace_bytes=False, sample_every=1):
        self.config = config
        self.ingress = ingress
        self.trace_bytes = trace_bytes
        self.sample_every = max(int(sample_every), 1)
        self.tw, self.tr = config.clock_periods
        self.trace = FifoTrace(self.tw)

        self.t = 0
        self.occ = 0
        self.max_occ = 0
        self.bytes_in = 0
        self.bytes_out = 0
        self.idle_reads = 0
        self.frames_in = 0
        self.stops = 0
        self.starts = 0
        self.stop_asserted = False

    def _overflow(self, time, occupancy):
        event = {'tick': time / self.tw, 'event': 'write',
                 'occupancy': int(occupancy)}
        raise FifoOverflowError(
            f"FIFO overflow at tick {event['tick']:.1f}: occupancy "
            f"{occupancy} > capacity {self.config.capacity_bytes}", event)

    def _frame(self, n_bytes, t_end):
        """Write one frame while the reader drains, [t, t + n x Tw)."""
        j0 = self.t // self.tw
        j1 = min(j0 + n_bytes, t_end // self.tw)
        if j1 <= j0:
            return
        t1 = j1 * self.tw

        w_times = np.arange(j0, j1, dtype=np.int64) * self.tw
        r_times = np.arange(_ceil_div(self.t, self.tr), _ceil_div(t1, self.tr),
                            dtype=np.int64) * self.tr
        times = np.concatenate((w_times, r_times))
        is_read = np.concatenate((np.zeros(w_times.size, dtype=np.int64),
                                  np.ones(r_times.size, dtype=np.int64)))
        # a write and a read at the same instant: the write goes first
        order = np.argsort(2 * times + is_read, kind='stable')
        times, is_read = times[order], is_read[order]

        x = self.occ + np.cumsum(1 - 2 * is_read)
        floor = np.minimum(np.minimum.accumulate(x), 0)
        q = x - floor
        idle = int(-floor[-1])

        over = np.flatnonzero(q > self.config.capacity_bytes)
        if over.size:
            self._overflow(times[over[0]], q[over[0]])

        if not self.stop_asserted:
            hit = np.flatnonzero(q >= self.config.upper_threshold)
            if hit.size:
                self.stop_asserted = True
                self.stops += 1
                self.trace.append(times[hit[0]], 'stop_asserted', q[hit[0]])

        if self.trace_bytes:
            served = np.diff(floor, prepend=0) == 0
            writes = is_read == 0
            self.trace.append(times[writes], 'write', q[writes])
            reads = (is_read == 1) & served
            self.trace.append(times[reads], 'read', q[reads])

        self.bytes_in += int(j1 - j0)
        self.bytes_out += int(r_times.size) - idle
        self.idle_reads += idle
        self.max_occ = max(self.max_occ, int(q.max()))
        self.occ = int(q[-1])
        self.t = t1
        self.frames_in += 1

        if self.frames_in % self.sample_every == 0:
            self.trace.append(t1, 'sample', self.occ)

    def _drain(self, t_end):
        """Reads only, over [t, t_end)."""
        if t_end <= self.t:
            return
        i0 = _ceil_div(self.t, self.tr)
        n = _ceil_div(t_end, self.tr) - i0
        lower = self.config.lower_threshold

        if self.stop_asserted and self.occ - n <= lower:
            k = self.occ - lower
            t_start = (i0 + k - 1) * self.tr if k > 0 else self.t
            self._assert_start(t_start)

        served = min(n, self.occ)
        if self.trace_bytes and served:
            self.trace.append(np.arange(i0, i0 + served) * self.tr, 'read',
                              self.occ - 1 - np.arange(served))
        self.bytes_out += served
        self.idle_reads += n - served
        self.occ -= served
        self.t = t_end

    def _assert_start(self, time):
        self.stop_asserted = False
        self.starts += 1
        self.trace.append(time, 'start_asserted',
                          min(self.occ, self.config.lower_threshold))

    def _wait_for_start(self, t_end):
        """Stopped source: drain to the lower threshold, resume at the next
        write cycle after the start signal."""
        k = self.occ - self.config.lower_threshold
        if k <= 0:
            self._assert_start(self.t)
            return
        t_start = (_ceil_div(self.t, self.tr) + k - 1) * self.tr
        if t_start >= t_end:
            self._drain(t_end)
            return
        self._drain(t_start + 1)
        resume = (t_start // self.tw + 1) * self.tw
        self._drain(min(resume, t_end))

    def run(self, duration_ticks):
        """
        Parameters
        ----------
        duration_ticks : int
            Simulated time in write clock cycles.

        Returns
        -------
        trace : FifoTrace
        stats : FifoStats

        Raises
        ------
        FifoOverflowError
            If a write finds the FIFO full; ``event`` holds tick and occupancy.
        """
        t_end = int(duration_ticks) * self.tw
        frames = self.ingress.frames()
        while self.t < t_end:
            n_bytes, gap = next(frames)
            self._frame(n_bytes, t_end)
            self._drain(min(self.t + gap * self.tw, t_end))
            if self.stop_asserted and self.t < t_end:
                self._wait_for_start(t_end)

        duration_s = float(Fraction(int(duration_ticks))
                           / self.config.write_clock_hz)
        stats = FifoStats(
            duration_ticks=int(duration_ticks), duration_s=duration_s,
            bytes_in=self.bytes_in, bytes_out=self.bytes_out,
            final_occupancy=self.occ, max_occupancy=self.max_occ,
            frames_in=self.frames_in, stops=self.stops, starts=self.starts,
            idle_reads=self.idle_reads,
            ingress_rate_bps=8 * self.bytes_in / duration_s,
            egress_rate_bps=8 * self.bytes_out / duration_s)

        logger.info(f"FIFO run over {duration_ticks} ticks: "
                    f"{stats.bytes_in} bytes in, {stats.bytes_out} out, "
                    f"{stats.stops} stops, egress "
                    f"{stats.egress_rate_bps / 1e6:.2f} Mbps")
        return self.trace, stats


def simulate(config=FifoConfig(), ingress=EthernetIngress(),
             duration_ticks=10 ** 6, trace_bytes=False, sample_every=1):
    """
    Run the FIFO with stop/start flow control.

    Parameters
    ----------
    config : FifoConfig, optional
    ingress : EthernetIngress, optional (default: saturating 1518-byte frames)
    duration_ticks : int, optional (default: 1e6)
        Write clock cycles to simulate.
    trace_bytes : bool, optional (default: False)
        Keep every byte transfer in the trace (short runs only).
    sample_every : int, optional (default: 1)

    Returns
    -------
    trace : FifoTrace
    stats : FifoStats
    """
    if duration_ticks < 1:
        raise ConfigurationError("duration_ticks must be >= 1")
    sim = FifoSimulator(config, ingress, trace_bytes, sample_every)
    return sim.run(duration_ticks)
