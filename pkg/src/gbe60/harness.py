# -*- coding: utf-8 -*-
"""
Experiments over the baseband chain: Monte Carlo BER runs, synchronization
curves, the link budget model, the FIFO simulation, the scrambler mask
search and a single frame round trip.

Every experiment is configured by a :class:`Scenario`. Results carry the
scenario fingerprint, so a row can be traced back to the inputs and seed
that produced it.
"""

import hashlib
import json
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, asdict, replace
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy.stats import beta

from gbe60.bitframe import (build_frame, parse_frame, stream_frames, Frame,
                            FrameCodec, layout_for, bytes_to_bits,
                            bits_to_bytes)
from gbe60.exceptions import ConfigurationError, DecodeFailure
from gbe60.fec_rs import rs_encode, rs_decoded_ber
from gbe60.flowctl import (FifoConfig, EthernetIngress, simulate,
                           receive_side_config, receive_side_ingress)
from gbe60.framesync import (SyncParams, correlate_banks, detect,
                             sweep_curves, simulate_chain_sync)
from gbe60.linecode import (ScramblerSequence, DEFAULT_SCRAMBLER,
                            ZERO_SCRAMBLER, scramble, max_window_score)
from gbe60.linkbudget import (LinkParams, BlockageEvent, received_power_dbm,
                              snr_db, distance_to_ebn0, ebn0_for_ber,
                              range_for_ebn0, max_range_m, sensitivity_dbm,
                              noise_level_dbm, check_demod_input,
                              rx_chain_gain_db)
from gbe60.modem import (NoiseSpec, BANDWIDTH_HZ, modulate_differential,
                         add_awgn, demod_differential, theoretical_ber)

logger = logging.getLogger(__name__)

FINGERPRINT_EXCLUDE = ('out_dir', 'workers')


def _tuple(value, cast=None):
    if value is None:
        return None
    values = np.atleast_1d(value).tolist()
    return tuple(cast(v) for v in values) if cast else tuple(values)


def _from_dict(cls, values, where):
    """Dataclass from a mapping, unknown keys are a configuration error."""
    if isinstance(values, cls):
        return values
    if not isinstance(values, dict):
        raise ConfigurationError(f"'{where}' must be an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigurationError(f"Unknown key(s) in '{where}': {unknown}")
    return cls(**values)


@dataclass(frozen=True)
class SyncSettings:
    ns: Tuple[int, ...] = (32, 64)
    banks: Tuple[int, ...] = (1, 2)
    gammas: Optional[Tuple[int, ...]] = None
    ps: Tuple[float, ...] = (1e-3, 1e-2, 2e-2)
    mc_trials: int = 100000
    chain_trials: int = 100000

    def __post_init__(self):
        for name in ('ns', 'banks', 'gammas'):
            object.__setattr__(self, name, _tuple(getattr(self, name), int))
        object.__setattr__(self, 'ps', _tuple(self.ps, float))


@dataclass(frozen=True)
class LinkSettings:
    tx_antenna: str = 'horn'
    rx_antenna: str = 'horn'
    tx_power_dbm: float = 0.0
    carrier_hz: float = 60e9
    noise_figure_db: float = 9.0
    bandwidth_hz: float = 2e9
    impl_loss_db: float = 7.5
    rx_chain_gain_db: Optional[float] = None
    agc_gain_db: Optional[float] = None
    distances_m: Tuple[float, ...] = (1.0, 2.0, 5.0, 10.0, 20.0, 27.0, 35.0,
                                      50.0, 82.0)
    ber_target: float = 1e-6
    blockage: Tuple[str, ...] = ('human', 'closed_door')

    def __post_init__(self):
        object.__setattr__(self, 'distances_m',
                           _tuple(self.distances_m, float))
        object.__setattr__(self, 'blockage', _tuple(self.blockage))
        self.params()

    def params(self):
        """
        LinkParams of the settings. ``agc_gain_db`` sets the receive chain
        gain as LNA plus AGC; ``rx_chain_gain_db`` gives it directly.
        """
        chain_gain = self.rx_chain_gain_db
        if self.agc_gain_db is not None:
            if chain_gain is not None:
                raise ConfigurationError(
                    "Set either link.rx_chain_gain_db or link.agc_gain_db")
            chain_gain = rx_chain_gain_db(self.agc_gain_db)
        return LinkParams.from_antennas(
            self.tx_antenna, self.rx_antenna,
            tx_power_dbm=self.tx_power_dbm, carrier_hz=self.carrier_hz,
            noise_figure_db=self.noise_figure_db,
            bandwidth_hz=self.bandwidth_hz, impl_loss_db=self.impl_loss_db,
            rx_chain_gain_db=chain_gain)


@dataclass(frozen=True)
class FlowSettings:
    side: str = 'transmit'
    capacity_bytes: int = 32768
    upper_threshold: int = 24576
    lower_threshold: int = 8192
    ingress: str = 'saturating'
    load: float = 0.5
    duration_ticks: int = 10 ** 6
    trace: bool = False

    def config(self):
        if self.side == 'transmit':
            return FifoConfig(self.capacity_bytes, self.upper_threshold,
                              self.lower_threshold)
        if self.side == 'receive':
            return receive_side_config(self.capacity_bytes,
                                       self.upper_threshold,
                                       self.lower_threshold)
        raise ConfigurationError(
            f"flow side must be 'transmit' or 'receive', got {self.side}")

    def ingress_pattern(self, seed=None):
        if self.side == 'receive':
            return receive_side_ingress()
        if self.ingress == 'saturating':
            return EthernetIngress.saturating()
        if self.ingress == 'sub_rate':
            return EthernetIngress.sub_rate(self.load)
        if self.ingress == 'random':
            return EthernetIngress.random(rng_seed=seed)
        raise ConfigurationError(
            f"Unknown ingress '{self.ingress}', use saturating, sub_rate "
            f"or random")


@dataclass(frozen=True)
class MaskSearchSettings:
    candidates: int = 64
    corpus_frames: int = 8


@dataclass(frozen=True)
class Scenario:
    """
    Inputs of all experiments.

    Parameters
    ----------
    name : str, optional (default: 'default')
    rs_enabled : bool, optional (default: True)
        Decode with RS(255, 239); otherwise take the systematic bytes.
    preamble_bits : int, optional (default: 64)
    banks : int, optional (default: 2)
    gamma : int, optional (default: 59)
    scrambler : str, optional
        8-byte scrambler mask as hex.
    ebn0_db : tuple of float, optional
        Eb/N0 grid of BER runs.
    impl_degradation_db : float, optional (default: 0)
        SNR penalty of every BER point, see modem.measured_degradation_db.
    noise_bandwidth_hz : float, optional (default: 2e9)
        Bandwidth of the SNR axis. modem.ROLLOFF_BANDWIDTH_HZ gives the
        roll-off 0.25 receive filter instead of the full channel.
    target_errors : int, optional (default: 100)
        A BER point stops after this many payload bit errors ...
    max_bits : int, optional (default: 1e7)
        ... or this many payload bits, whichever comes first.
    frames_per_batch : int, optional (default: 8)
    seed : int, optional (default: 0)
        Grid point i uses seed ^ i.
    workers : int, optional (default: 1)
        Processes for BER grid points. Results do not depend on it.
    out_dir : str, optional (default: '.')
    sync, link, flow, mask_search : settings of the other experiments
    """
    name: str = 'default'
    rs_enabled: bool = True
    preamble_bits: int = 64
    banks: int = 2
    gamma: int = 59
    scrambler: str = DEFAULT_SCRAMBLER.hex()
    ebn0_db: Tuple[float, ...] = (4.0, 6.0, 8.0, 10.0)
    impl_degradation_db: float = 0.0
    noise_bandwidth_hz: float = BANDWIDTH_HZ
    target_errors: int = 100
    max_bits: int = 10 ** 7
    frames_per_batch: int = 8
    seed: int = 0
    workers: int = 1
    out_dir: str = '.'
    sync: SyncSettings = field(default_factory=SyncSettings)
    link: LinkSettings = field(default_factory=LinkSettings)
    flow: FlowSettings = field(default_factory=FlowSettings)
    mask_search: MaskSearchSettings = field(
        default_factory=MaskSearchSettings)

    def __post_init__(self):
        object.__setattr__(self, 'ebn0_db', _tuple(self.ebn0_db, float))
        object.__setattr__(self, 'sync',
                           _from_dict(SyncSettings, self.sync, 'sync'))
        object.__setattr__(self, 'link',
                           _from_dict(LinkSettings, self.link, 'link'))
        object.__setattr__(self, 'flow',
                           _from_dict(FlowSettings, self.flow, 'flow'))
        object.__setattr__(self, 'mask_search',
                           _from_dict(MaskSearchSettings, self.mask_search,
                                      'mask_search'))
        if self.target_errors < 1 or self.max_bits < 1:
            raise ConfigurationError("target_errors and max_bits must be >= 1")
        self.noise(0.0)
        # validates gamma, banks and preamble length
        self.sync_params()
        self.codec()

    @classmethod
    def from_dict(cls, values):
        return _from_dict(cls, values, 'scenario')

    def override(self, **values):
        """Copy with the non-None values replaced."""
        values = {k: v for k, v in values.items() if v is not None}
        return _from_dict(Scenario, {**self.to_dict(), **values}, 'scenario')

    def to_dict(self):
        return asdict(self)

    def layout(self):
        return layout_for(self.preamble_bits)

    def codec(self):
        return FrameCodec(ScramblerSequence.from_hex(self.scrambler),
                          self.rs_enabled)

    def sync_params(self):
        return SyncParams(self.gamma, self.preamble_bits, self.banks)

    def noise(self, ebn0_db):
        """NoiseSpec of one Eb/N0 grid point."""
        return NoiseSpec(ebn0_db, bandwidth_hz=self.noise_bandwidth_hz,
                         impl_degradation_db=self.impl_degradation_db)


def fingerprint(scenario):
    """
    First 16 hex digits of the SHA-256 of the canonical scenario JSON.
    Output location and worker count are left out.
    """
    d = scenario.to_dict()
    for key in FINGERPRINT_EXCLUDE:
        d.pop(key, None)
    canonical = json.dumps(d, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]


def clopper_pearson(errors, trials, alpha=0.05):
    """Exact binomial confidence interval of errors / trials."""
    if trials == 0:
        return 0.0, 1.0
    lo = 0.0 if errors == 0 else beta.ppf(alpha / 2, errors,
                                          trials - errors + 1)
    hi = 1.0 if errors == trials else beta.ppf(1 - alpha / 2, errors + 1,
                                               trials - errors)
    return float(lo), float(hi)


@dataclass(frozen=True)
class BerRecord:
    ebn0_db: float
    snr_db: float
    bits_simulated: int
    bit_errors: int
    ber: float
    ci_low: float
    ci_high: float
    raw_bits: int
    raw_errors: int
    raw_ber: float
    frames_sent: int
    frames_lost_to_sync: int
    frames_failed_decode: int
    corrected_bytes: int
    complete: bool
    fingerprint: str


def _bit_errors(a, b):
    x = np.bitwise_xor(np.frombuffer(a, dtype=np.uint8),
                       np.frombuffer(b, dtype=np.uint8))
    return int(np.unpackbits(x).sum())


def _ber_point(scenario, index, ebn0_db):
    """One Eb/N0 point of :func:`run_ber`, seeded with seed ^ index."""
    rng = np.random.default_rng(scenario.seed ^ index)
    layout = scenario.layout()
    codec = scenario.codec()
    uncoded = replace(codec, rs_enabled=False)
    params = scenario.sync_params()
    pattern = layout.preamble
    noise = scenario.noise(ebn0_db)
    window = layout.frame_bits + pattern.n_bits + 7

    bits = errors = raw_bits = raw_errors = 0
    sent = lost = failed = corrected = 0
    while errors < scenario.target_errors and bits < scenario.max_bits:
        payloads = [rng.bytes(layout.payload_bytes)
                    for _ in range(scenario.frames_per_batch)]
        frames = [build_frame(p, codec, layout) for p in payloads]
        slip = int(rng.integers(0, 8))
        tx = np.concatenate((
            rng.integers(0, 2, slip, dtype=np.uint8),
            bytes_to_bits(stream_frames(frames, layout)),
            rng.integers(0, 2, 7, dtype=np.uint8)))

        rx_symbols = add_awgn(modulate_differential(tx), noise, rng)
        rx = demod_differential(rx_symbols)
        raw_bits += tx.size
        raw_errors += int(np.count_nonzero(rx != tx))

        for i, payload in enumerate(payloads):
            sent += 1
            w = i * layout.frame_bits
            s1, s2 = correlate_banks(rx[w:w + window], pattern,
                                     layout.total_frame_bytes)
            decision = detect(s1, s2, params, window_start_bit=w)
            if not decision.detected or decision.offset_k != slip + 1:
                lost += 1
                continue

            start = decision.frame_start_bit
            frame = Frame.from_bytes(
                bits_to_bytes(rx[start:start + layout.frame_bits]), layout)
            try:
                decoded, n_corr = parse_frame(frame, codec, layout)
                corrected += sum(n_corr)
            except DecodeFailure:
                decoded, _ = parse_frame(frame, uncoded, layout)
                failed += 1

            bits += 8 * layout.payload_bytes
            errors += _bit_errors(decoded, payload)

        logger.debug(f"Eb/N0 {ebn0_db} dB: {errors} errors in {bits} bits")

    complete = errors >= scenario.target_errors
    if not complete:
        warnings.warn(f"Eb/N0 {ebn0_db} dB: only {errors} of "
                      f"{scenario.target_errors} target errors within "
                      f"{scenario.max_bits} bits, record is incomplete")

    ci = clopper_pearson(errors, bits)
    return BerRecord(
        ebn0_db=float(ebn0_db), snr_db=noise.snr_db, bits_simulated=bits,
        bit_errors=errors, ber=errors / bits if bits else float('nan'),
        ci_low=ci[0], ci_high=ci[1], raw_bits=raw_bits,
        raw_errors=raw_errors, raw_ber=raw_errors / raw_bits,
        frames_sent=sent, frames_lost_to_sync=lost,
        frames_failed_decode=failed, corrected_bytes=corrected,
        complete=complete, fingerprint=fingerprint(scenario))


def run_ber(scenario):
    """
    Monte Carlo BER over the Eb/N0 grid of the scenario.

    Each frame goes through the full chain: payload, frame assembly, bit
    slip, differential DBPSK, AWGN, demodulation, two-bank synchronization,
    descrambling and RS decoding. Frames whose preamble is missed or found
    at the wrong bit offset are counted as lost to sync, codewords that do
    not decode fall back to their systematic bytes and are counted.

    Returns
    -------
    records : list of BerRecord
        In grid order, independent of ``scenario.workers``.
    """
    points = list(enumerate(scenario.ebn0_db))
    if scenario.workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=scenario.workers) as executor:
            futures = [executor.submit(_ber_point, scenario, i, e)
                       for i, e in points]
            records = [f.result() for f in futures]
    else:
        records = [_ber_point(scenario, i, e) for i, e in points]

    for r in records:
        logger.info(f"Eb/N0 {r.ebn0_db} dB: BER {r.ber:.3e} "
                    f"(raw {r.raw_ber:.3e}), {r.frames_lost_to_sync} of "
                    f"{r.frames_sent} frames lost to sync")
    return records


def records_to_frame(records, scenario=None):
    """
    BER records as a table. With ``scenario`` the Eb/N0 to SNR conversion
    of its noise model is kept in ``table.attrs``.
    """
    table = pd.DataFrame([asdict(r) for r in records],
                         columns=[f.name for f in fields(BerRecord)])
    if scenario is not None:
        noise = scenario.noise(0.0).metadata()
        table.attrs.update({k: noise[k] for k in
                            ('bandwidth_hz', 'bitrate', 'snr_minus_ebn0_db',
                             'impl_degradation_db')})
    return table


def run_sync_experiment(scenario):
    """
    Analytic miss and false alarm curves with bit-level and chain-level
    Monte Carlo columns. Monte Carlo values are only given where at least
    100 events are expected.
    """
    s = scenario.sync
    table = sweep_curves(ns=s.ns, banks=s.banks, gammas=s.gammas, ps=s.ps,
                         mc_trials=s.mc_trials, seed=scenario.seed)

    chain_miss, chain_fa = [], []
    for i, row in enumerate(table.itertuples(index=False)):
        params = SyncParams(int(row.gamma), int(row.n), int(row.banks))
        seed = scenario.seed ^ (len(table) + i)
        miss = np.nan
        if s.chain_trials and row.p_miss_analytic * s.chain_trials >= 100:
            events, trials = simulate_chain_sync(params, row.p,
                                                 s.chain_trials, seed)
            miss = events / trials
        fa = np.nan
        if s.chain_trials and 8 * row.p_fa_per_pair * s.chain_trials >= 100:
            events, trials = simulate_chain_sync(params, 0.0, s.chain_trials,
                                                 seed, with_preamble=False)
            fa = events / trials
        chain_miss.append(miss)
        chain_fa.append(fa)

    table['p_miss_chain'] = chain_miss
    table['p_fa_chain_window'] = chain_fa
    table['fingerprint'] = fingerprint(scenario)
    return table


def run_link_model(scenario):
    """
    Received power, SNR, Eb/N0 and model BER with and without RS coding
    over the distance grid, plus one what-if column set per blockage kind.
    Ranges at the BER target and at the sensitivity are kept in
    ``table.attrs``.
    """
    ls = scenario.link
    params = ls.params()
    d = np.asarray(ls.distances_m, dtype=float)

    ebn0 = distance_to_ebn0(params, d)
    raw = theoretical_ber(ebn0)
    table = pd.DataFrame({
        'distance_m': d,
        'received_power_dbm': received_power_dbm(params, d),
        'snr_db': snr_db(params, d),
        'ebn0_db': ebn0,
        'ber_uncoded': raw,
        'ber_coded': rs_decoded_ber(raw)})

    for kind in ls.blockage:
        events = (BlockageEvent(kind),)
        ebn0_b = distance_to_ebn0(params, d, events=events)
        table[f'received_power_dbm_{kind}'] = received_power_dbm(
            params, d, events)
        table[f'ber_uncoded_{kind}'] = theoretical_ber(ebn0_b)
        table[f'ber_coded_{kind}'] = rs_decoded_ber(theoretical_ber(ebn0_b))

    ok = check_demod_input(params, d)
    if ok is not None:
        table['demod_input_ok'] = ok

    table['fingerprint'] = fingerprint(scenario)

    sens = sensitivity_dbm(noise_level_dbm(params.noise_figure_db,
                                           params.bandwidth_hz))
    table.attrs.update({
        'sensitivity_dbm': float(sens),
        'range_at_sensitivity_m': max_range_m(params, sens),
        'ber_target': ls.ber_target,
        'range_uncoded_m': range_for_ebn0(
            params, ebn0_for_ber(ls.ber_target, coded=False)),
        'range_coded_m': range_for_ebn0(
            params, ebn0_for_ber(ls.ber_target, coded=True))})
    logger.info(f"Link model: range at BER {ls.ber_target} "
                f"{table.attrs['range_uncoded_m']} m uncoded, "
                f"{table.attrs['range_coded_m']} m coded")
    return table


def run_flow_sim(scenario):
    """
    Returns
    -------
    stats : pd.DataFrame
        One row of FIFO statistics.
    trace : pd.DataFrame or None
        The event trace if ``flow.trace`` is set.
    """
    fs = scenario.flow
    trace, stats = simulate(fs.config(), fs.ingress_pattern(scenario.seed),
                            fs.duration_ticks)
    row = stats.to_dict()
    row['conserved'] = stats.bytes_in == stats.bytes_out \
        + stats.final_occupancy
    row['fingerprint'] = fingerprint(scenario)
    table = pd.DataFrame([row])
    return table, (trace.to_frame() if fs.trace else None)


def search_scrambler_mask(pattern, trials=64, rng_seed=0, corpus_frames=8,
                          layout=None):
    """
    Pick the 8-byte scrambler mask with the lowest false preamble matches.

    Candidates are the all-zero mask and ``trials`` random masks. Each one
    scrambles a corpus of one all-zero payload frame and ``corpus_frames``
    random payload frames; every bit window of the resulting stream except
    the true preamble positions is scored against the preamble. The best
    candidate has the lowest maximum score, then the fewest windows reaching
    it, then the lowest index.

    Returns
    -------
    mask : ScramblerSequence
    report : pd.DataFrame
        One row per candidate (candidate, mask, max_score, count, selected).
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    layout = layout or layout_for(pattern.n_bits)
    rng = np.random.default_rng(rng_seed)

    payloads = [bytes(layout.payload_bytes)] + \
        [rng.bytes(layout.payload_bytes) for _ in range(corpus_frames)]
    step = layout.payload_bytes_per_word
    coded = [b''.join(rs_encode(p[i * step:(i + 1) * step])
                      for i in range(layout.data_words))
             + bytes(layout.dummy_bytes) for p in payloads]
    preamble = pattern.to_bytes()
    exclude = [i * layout.frame_bits for i in range(len(payloads) + 1)]

    candidates = [ZERO_SCRAMBLER] + [ScramblerSequence(rng.bytes(8))
                                     for _ in range(trials)]
    rows = []
    for i, seq in enumerate(candidates):
        stream = b''.join(preamble + scramble(c, seq) for c in coded) \
            + preamble
        best, count = max_window_score(bytes_to_bits(stream),
                                       pattern.as_array(), exclude)
        rows.append((i, seq.hex(), best, count))

    report = pd.DataFrame(rows, columns=['candidate', 'mask', 'max_score',
                                         'count'])
    winner = int(report.sort_values(['max_score', 'count', 'candidate'])
                 ['candidate'].iloc[0])
    report['selected'] = report['candidate'] == winner
    report.attrs.update({'mask': candidates[winner].hex(),
                         'max_score': int(report['max_score'].iloc[winner]),
                         'zero_mask_max_score': int(report['max_score'].iloc[0]),
                         'corpus_frames': corpus_frames + 1})
    logger.info(f"Scrambler search: mask {candidates[winner].hex()} reaches "
                f"{report.attrs['max_score']} of {pattern.n_bits} bits")
    return candidates[winner], report


def run_mask_search(scenario):
    ms = scenario.mask_search
    seq, report = search_scrambler_mask(scenario.layout().preamble,
                                        ms.candidates, scenario.seed,
                                        ms.corpus_frames, scenario.layout())
    report['fingerprint'] = fingerprint(scenario)
    return seq, report


def run_frame_roundtrip(scenario):
    """One random frame through build and parse, with its hex dump."""
    rng = np.random.default_rng(scenario.seed)
    layout = scenario.layout()
    payload = rng.bytes(layout.payload_bytes)
    frame = build_frame(payload, scenario.codec(), layout)
    decoded, corrections = parse_frame(frame, scenario.codec(), layout)
    return {'layout': layout.name,
            'frame_bytes': len(frame),
            'preamble': frame.preamble.hex(),
            'scrambler': scenario.scrambler,
            'payload': payload.hex(),
            'frame': frame.hexdump(),
            'roundtrip_ok': decoded == payload,
            'corrections': list(corrections),
            'fingerprint': fingerprint(scenario)}
