# -*- coding: utf-8 -*-
"""
Byte and frame synchronization with two banks of eight correlators.

Each bank compares the preamble with 8 windows shifted by one bit (71 bits
for a 64-bit preamble). The second bank looks at the next preamble one frame
period later. The preamble is declared present when the same correlator C_k
reaches the threshold gamma in both banks.

The module also holds the analytic miss and false alarm probabilities of the
detector, computed with exact rational arithmetic since the interesting
values reach 1e-24, and Monte Carlo estimators to cross-check them.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional

import numpy as np
import pandas as pd
from more_itertools import chunked

from gbe60.bitframe import layout_for, PREAMBLE_64
from gbe60.exceptions import ConfigurationError, FrameSizeError
from gbe60.linecode import preamble_scores

logger = logging.getLogger(__name__)

N_CORRELATORS = 8
SPAN_BITS = N_CORRELATORS - 1

CSV_COLUMNS = ['n', 'banks', 'gamma', 'p', 'p_miss_analytic', 'p_miss_mc',
               'p_fa_per_pair', 'p_fa_frame_union']


@dataclass(frozen=True)
class SyncParams:
    """
    Parameters
    ----------
    gamma : int, optional (default: 59)
        Minimum number of agreeing bits; a score equal to gamma detects.
    preamble_bits : int, optional (default: 64)
        64 or 32.
    banks : int, optional (default: 2)
        1 or 2 correlator banks.
    bank_separation_bytes : int, optional
        Distance between the starts of P1 and P2, one frame period
        (518 bytes for the 64-bit layout, 260 for the 32-bit one).
    """
    gamma: int = 59
    preamble_bits: int = 64
    banks: int = 2
    bank_separation_bytes: Optional[int] = None

    def __post_init__(self):
        layout = layout_for(self.preamble_bits)
        if not 0 <= self.gamma <= self.preamble_bits:
            raise ConfigurationError(
                f"gamma must be in 0..{self.preamble_bits}, got {self.gamma}")
        if self.banks not in (1, 2):
            raise ConfigurationError(f"banks must be 1 or 2, got {self.banks}")
        if self.bank_separation_bytes is None:
            object.__setattr__(self, 'bank_separation_bytes',
                               layout.total_frame_bytes)

    @property
    def layout(self):
        return layout_for(self.preamble_bits)

    @property
    def decision_window_bytes(self):
        """P1 + D1 + P2, 526 bytes for the 64-bit two-bank configuration."""
        if self.banks == 1:
            return self.layout.preamble_bytes
        return self.bank_separation_bytes + self.layout.preamble_bytes

    @property
    def window_bits(self):
        """Decision window plus the 7-bit margin of the shifted correlators."""
        return 8 * self.decision_window_bytes + SPAN_BITS


@dataclass(frozen=True, eq=False)
class CorrelatorBankScores:
    """Agreement counts of the correlators C_1 .. C_8 (index k - 1)."""
    scores: np.ndarray

    def __getitem__(self, k):
        return int(self.scores[k - 1])

    @property
    def best_k(self):
        return int(np.argmax(self.scores)) + 1


@dataclass(frozen=True)
class SyncDecision:
    detected: bool
    offset_k: Optional[int]
    frame_start_bit: Optional[int]
    bank1_score: int
    bank2_score: int


def correlate_bank(bits, pattern=PREAMBLE_64, start=0):
    """Scores of one bank over bits[start : start + n + 7]."""
    p = pattern.as_array()
    span = p.size + SPAN_BITS
    seg = np.asarray(bits, dtype=np.uint8)[start:start + span]
    if seg.size < span:
        raise FrameSizeError(
            f"correlator bank needs {span} bits from bit {start}, "
            f"got {seg.size}")
    return CorrelatorBankScores(preamble_scores(seg, p))


def correlate_banks(window, pattern=PREAMBLE_64, bank_separation_bytes=None):
    """
    Scores of both correlator banks over one decision window.

    Parameters
    ----------
    window : array_like
        Received bits starting at the receiver's byte boundary before P1.
        Needs 8 x (separation + preamble bytes) + 7 bits, 4215 bits for the
        64-bit layout.
    pattern : PreamblePattern, optional (default: PREAMBLE_64)
    bank_separation_bytes : int, optional
        P1 start to P2 start, defaults to the frame length of the layout
        matching the pattern.

    Returns
    -------
    scores1, scores2 : CorrelatorBankScores
    """
    if bank_separation_bytes is None:
        bank_separation_bytes = layout_for(pattern.n_bits).total_frame_bytes
    window = np.asarray(window, dtype=np.uint8)
    needed = 8 * bank_separation_bytes + pattern.n_bits + SPAN_BITS
    if window.size < needed:
        raise FrameSizeError(
            f"decision window needs {needed} bits, got {window.size}")
    return (correlate_bank(window, pattern, 0),
            correlate_bank(window, pattern, 8 * bank_separation_bytes))


def detect(scores1, scores2, params=SyncParams(), window_start_bit=0):
    """
    Threshold decision over the bank scores.

    Detected iff some k has scores1[k] >= gamma and scores2[k] >= gamma
    (scores1 only with one bank). Among qualifying k the one with the
    largest min(scores1[k], scores2[k]) wins, ties go to the lowest k.
    """
    s1 = np.asarray(getattr(scores1, 'scores', scores1))
    if params.banks == 2:
        s2 = np.asarray(getattr(scores2, 'scores', scores2))
        metric = np.minimum(s1, s2)
    else:
        s2 = (np.asarray(getattr(scores2, 'scores', scores2))
              if scores2 is not None else np.zeros_like(s1))
        metric = s1

    qualify = metric >= params.gamma
    if not qualify.any():
        return SyncDecision(False, None, None, int(s1.max()), int(s2.max()))

    k = int(np.argmax(np.where(qualify, metric, -1)))
    return SyncDecision(detected=True, offset_k=k + 1,
                        frame_start_bit=window_start_bit + k,
                        bank1_score=int(s1[k]), bank2_score=int(s2[k]))


def acquire(bits, params=SyncParams(), search_bytes=None):
    """
    Initial acquisition: evaluate the detector at every byte position of one
    frame period and keep the strongest qualifying candidate (largest
    min-score, then earliest bit).

    Returns
    -------
    decision : SyncDecision
        ``frame_start_bit`` is absolute within ``bits``.
    """
    pattern = params.layout.preamble.as_array()
    sep_bits = 8 * params.bank_separation_bytes
    if search_bytes is None:
        search_bytes = params.bank_separation_bytes
    n_pos = 8 * search_bytes

    scores = preamble_scores(bits, pattern)
    reach = n_pos + (sep_bits if params.banks == 2 else 0)
    if scores.size < reach:
        raise FrameSizeError(
            f"acquisition over {search_bytes} bytes needs "
            f"{reach + pattern.size - 1} bits, got {len(bits)}")

    s1 = scores[:n_pos]
    s2 = scores[sep_bits:sep_bits + n_pos] if params.banks == 2 else s1
    metric = np.minimum(s1, s2)
    qualify = metric >= params.gamma
    if not qualify.any():
        return SyncDecision(False, None, None, int(s1.max()), int(s2.max()))

    i = int(np.argmax(np.where(qualify, metric, -1)))
    return SyncDecision(True, i % 8 + 1, i, int(s1[i]), int(s2[i]))


def _as_fraction(p):
    if isinstance(p, Fraction):
        return p
    if isinstance(p, (int, np.integer)):
        return Fraction(int(p))
    if isinstance(p, str):
        return Fraction(p)
    return Fraction(float(p))


def _check_gamma(gamma, n):
    if not 0 <= gamma <= n:
        raise ConfigurationError(f"gamma must be in 0..{n}, got {gamma}")


def p_miss(gamma, p, n=64, banks=2, exact=False):
    """
    Probability that the preamble is not detected.

    One bank misses when fewer than gamma of the n bits arrive correctly,
    P(Binomial(n, 1 - p) < gamma). Two banks miss when either bank misses,
    1 - (1 - P_m1)^2.

    Parameters
    ----------
    gamma : int
    p : float, str or Fraction
        Channel bit error probability. Floats are taken at their exact binary
        value, strings such as '1e-3' at their exact decimal value.
    n : int, optional (default: 64)
    banks : int, optional (default: 2)
    exact : bool, optional (default: False)
        Return the Fraction instead of the nearest float.
    """
    _check_gamma(gamma, n)
    p = _as_fraction(p)
    if not 0 <= p <= 1:
        raise ConfigurationError(f"p must be in [0, 1], got {p}")

    q = 1 - p
    pm1 = sum((comb(n, e) * p ** e * q ** (n - e)
               for e in range(n - gamma + 1, n + 1)), Fraction(0))
    pm = pm1 if banks == 1 else 1 - (1 - pm1) ** banks
    return pm if exact else float(pm)


def p_false_alarm(gamma, n=64, banks=2, positions=1, exact=False):
    """
    Probability that random equiprobable data passes the detector.

    A single correlation fires with q = sum_{j >= gamma} C(n, j) / 2^n; two
    banks at the same k with q^2. ``positions`` > 1 aggregates over candidate
    positions with the union bound, capped at 1.
    """
    _check_gamma(gamma, n)
    q = Fraction(sum(comb(n, j) for j in range(gamma, n + 1)), 2 ** n)
    pf = q ** banks
    pf = min(Fraction(1), positions * pf)
    return pf if exact else float(pf)


def frame_positions(n):
    """Candidate positions of one frame's coded region (bytes x 8 offsets)."""
    return 8 * layout_for(n).coded_region_bytes


def gamma_for_false_alarm(n, banks, target, positions=1):
    """Smallest gamma with p_false_alarm <= target, None if unreachable."""
    target = _as_fraction(target)
    for gamma in range(n + 1):
        if p_false_alarm(gamma, n, banks, positions, exact=True) <= target:
            return gamma
    return None


def _trial_chunks(trials, chunk):
    for c in chunked(range(trials), chunk):
        yield len(c)


def simulate_miss(gamma, p, n=64, banks=2, trials=100000, rng_seed=None,
                  chunk=20000):
    """
    Monte Carlo miss count on the preamble bits alone: each bank sees n
    bits through a binary symmetric channel.

    Returns
    -------
    misses : int
    trials : int
    """
    rng = np.random.default_rng(rng_seed)
    misses = 0
    for size in _trial_chunks(trials, chunk):
        errors = (rng.random((size, banks, n)) < p)
        agree = n - errors.sum(axis=2)
        misses += int(np.count_nonzero((agree < gamma).any(axis=1)))
    return misses, trials


def _bank_regions(rng, size, pattern, slips, p):
    """
    71-bit correlator spans with the preamble at bit ``slip`` and random
    data around it, through a binary symmetric channel.
    """
    n = pattern.size
    region = rng.integers(0, 2, (size, n + SPAN_BITS), dtype=np.uint8)
    if slips is not None:
        for s in range(N_CORRELATORS):
            rows = slips == s
            region[rows, s:s + n] = pattern
    if p > 0:
        region ^= (rng.random(region.shape) < p) \
            .astype(np.uint8)
    return region


def _bank_scores(region, pattern):
    n = pattern.size
    return np.stack([(region[:, k:k + n] == pattern).sum(axis=1)
                     for k in range(N_CORRELATORS)], axis=1)


def _vector_detect(s1, s2, gamma, banks):
    metric = np.minimum(s1, s2) if banks == 2 else s1
    metric = np.where(metric >= gamma, metric, -1)
    return metric.max(axis=1) >= 0, np.argmax(metric, axis=1)


def simulate_chain_sync(params, p, trials=100000, rng_seed=None,
                        chunk=20000, with_preamble=True):
    """
    Monte Carlo of the detector on correlator spans that include the
    neighbouring data bits and an unknown bit slip.

    With ``with_preamble`` the spans hold the preamble at a random slip and
    an event is a miss (no detection or wrong k). Without, the spans hold
    random data only and an event is any detection (false alarm).

    Returns
    -------
    events : int
    trials : int
    """
    rng = np.random.default_rng(rng_seed)
    pattern = params.layout.preamble.as_array()
    events = 0
    for size in _trial_chunks(trials, chunk):
        slips = (rng.integers(0, N_CORRELATORS, size)
                 if with_preamble else None)
        s1 = _bank_scores(_bank_regions(rng, size, pattern, slips, p),
                          pattern)
        s2 = (_bank_scores(_bank_regions(rng, size, pattern, slips, p),
                           pattern) if params.banks == 2 else s1)
        detected, k = _vector_detect(s1, s2, params.gamma, params.banks)
        if with_preamble:
            events += int(np.count_nonzero(~detected | (k != slips)))
        else:
            events += int(np.count_nonzero(detected))
    return events, trials


def sweep_curves(ns=(32, 64), banks=(1, 2), gammas=None, ps=(1e-3,),
                 mc_trials=0, seed=0, min_mc_probability=1e-7):
    """
    Analytic miss and false alarm curves over a grid, with Monte Carlo
    confirmation where it is feasible.

    Parameters
    ----------
    ns : iterable of int, optional (default: (32, 64))
        Preamble lengths.
    banks : iterable of int, optional (default: (1, 2))
    gammas : dict or iterable of int, optional
        Thresholds, per n if a dict. Values above n are skipped. Default: the
        last 15 (n=64) or 11 (n=32) thresholds up to n.
    ps : iterable of float, optional (default: (1e-3,))
        Channel bit error probabilities.
    mc_trials : int, optional (default: 0)
        Trials per grid point; the Monte Carlo column is filled where the
        analytic miss probability is >= min_mc_probability and at least
        100 misses are expected.
    seed : int, optional (default: 0)
        Grid point i uses seed ^ i.

    Returns
    -------
    table : pd.DataFrame
        Columns n, banks, gamma, p, p_miss_analytic, p_miss_mc,
        p_fa_per_pair, p_fa_frame_union.
    """
    rows = []
    index = 0
    for n in ns:
        if gammas is None:
            g_list = range(n - 14, n + 1) if n == 64 else range(n - 10, n + 1)
        elif isinstance(gammas, dict):
            g_list = gammas[n]
        else:
            g_list = gammas
        positions = frame_positions(n)
        for b in banks:
            for gamma in g_list:
                if gamma > n:
                    continue
                pf_pair = p_false_alarm(gamma, n, b)
                pf_frame = p_false_alarm(gamma, n, b, positions=positions)
                for p in ps:
                    pm = p_miss(gamma, p, n, b)
                    pm_mc = np.nan
                    if (mc_trials and pm >= min_mc_probability
                            and pm * mc_trials >= 100):
                        misses, trials = simulate_miss(
                            gamma, p, n, b, mc_trials, rng_seed=seed ^ index)
                        pm_mc = misses / trials
                    rows.append([n, b, gamma, p, pm, pm_mc, pf_pair, pf_frame])
                    index += 1

    logger.info(f"Sync sweep: {len(rows)} grid points")
    return pd.DataFrame(rows, columns=CSV_COLUMNS)
