# -*- coding: utf-8 -*-
"""
Reed-Solomon (255, 239) code over GF(2^8).

The code is systematic: the 239 data bytes are transmitted unchanged, followed
by 16 parity bytes. Byte 0 of a codeword is the coefficient of x^254. The
field polynomial is x^8+x^4+x^3+x^2+1 and the generator polynomial has the
roots alpha^0 .. alpha^15, the convention used by most broadcast standards.
"""

import logging

import numpy as np
from scipy.stats import binom

from gbe60.exceptions import ConfigurationError, DecodeFailure, FrameSizeError

logger = logging.getLogger(__name__)

FIELD_POLY = 0x11D
N = 255
K = 239
NPARITY = N - K
T = NPARITY // 2
FCR = 0


class GaloisField256(object):
    """
    Log/antilog tables of GF(2^8). Tables are read-only after construction.
    """

    def __init__(self, poly=FIELD_POLY):
        """
        Parameters
        ----------
        poly : int, optional (default: 0x11D)
            Field polynomial with bit i as coefficient of x^i. Must be
            primitive so that alpha = 2 generates the multiplicative group.
        """
        self.poly = poly

        exp = np.zeros(512, dtype=np.int64)
        log = np.zeros(256, dtype=np.int64)
        x = 1
        for i in range(255):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & 0x100:
                x ^= poly

        if len(set(exp[:255].tolist())) != 255:
            raise ConfigurationError(
                f"Field polynomial {poly:#x} is not primitive, alpha has "
                f"order < 255")

        exp[255:510] = exp[:255]
        exp[510:] = exp[:2]
        exp.setflags(write=False)
        log.setflags(write=False)

        self.exp = exp
        self.log = log
        # python lists for scalar arithmetic in the decoder loops
        self._exp = exp.tolist()
        self._log = log.tolist()

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(2^8)")
        if a == 0:
            return 0
        return self._exp[(self._log[a] - self._log[b]) % 255]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^8)")
        return self._exp[255 - self._log[a]]

    def alpha_pow(self, i):
        return self._exp[i % 255]

    def mul_arrays(self, a, b):
        """Element-wise product of two broadcastable integer arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        prod = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, prod)

    def poly_mul(self, p, q):
        """Product of two polynomials, coefficients highest degree first."""
        out = [0] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            for j, b in enumerate(q):
                out[i + j] ^= self.mul(a, b)
        return out

    def poly_eval(self, p, x):
        """Horner evaluation, coefficients highest degree first."""
        y = 0
        for c in p:
            y = self.mul(y, x) ^ c
        return y


GF = GaloisField256()


class ReedSolomon255(object):
    """
    RS(255, 239) encoder and bounded-distance decoder.

    The decoder corrects up to 8 byte errors per codeword with syndromes,
    Berlekamp-Massey, Chien search and Forney's formula. Erasures are not
    supported.
    """

    def __init__(self, field=GF):
        self.gf = field

        g = [1]
        for i in range(NPARITY):
            g = self.gf.poly_mul(g, [1, self.gf.alpha_pow(FCR + i)])
        self.generator = tuple(g)

        # x^(254 - i) mod g(x) for every data position i, the encoder is
        # linear so parity = XOR_i d_i * rows[i]
        rows = np.zeros((K, NPARITY), dtype=np.int64)
        rem = [0] * (NPARITY - 1) + [1]  # x^0
        for _ in range(NPARITY):
            rem = self._times_x_mod_g(rem)
        for power in range(NPARITY, N):
            rows[N - 1 - power] = rem
            rem = self._times_x_mod_g(rem)
        rows.setflags(write=False)
        self._parity_rows = rows

        pos = np.arange(N)
        j = np.arange(NPARITY)[:, None]
        self._synd_pow = (j + FCR) * (N - 1 - pos)[None, :] % 255
        l = np.arange(NPARITY + 1)[:, None]
        self._chien_pow = (-(N - 1 - pos)[None, :] * l) % 255

    def _times_x_mod_g(self, rem):
        """Multiply a 16-coefficient remainder by x and reduce mod g."""
        carry = rem[0]
        shifted = list(rem[1:]) + [0]
        if carry:
            for i in range(NPARITY):
                shifted[i] ^= self.gf.mul(carry, self.generator[i + 1])
        return shifted

    def encode(self, data):
        """
        Parameters
        ----------
        data : bytes
            Exactly 239 data bytes.

        Returns
        -------
        codeword : bytes
            255 bytes, data followed by 16 parity bytes.
        """
        d = np.frombuffer(bytes(data), dtype=np.uint8).astype(np.int64)
        if d.size != K:
            raise FrameSizeError(f"RS encoder needs {K} bytes, got {d.size}")

        terms = self.gf.mul_arrays(d[:, None], self._parity_rows)
        parity = np.bitwise_xor.reduce(terms, axis=0)
        return bytes(data) + parity.astype(np.uint8).tobytes()

    def syndromes(self, received):
        r = np.frombuffer(bytes(received), dtype=np.uint8).astype(np.int64)
        if r.size != N:
            raise FrameSizeError(f"RS decoder needs {N} bytes, got {r.size}")
        terms = np.where(r[None, :] == 0, 0,
                         self.gf.exp[self.gf.log[r][None, :] + self._synd_pow])
        return np.bitwise_xor.reduce(terms, axis=1)

    def _berlekamp_massey(self, synd):
        gf = self.gf
        size = NPARITY + 1
        c = [1] + [0] * (size - 1)
        b_poly = [1] + [0] * (size - 1)
        L, m, b = 0, 1, 1

        for n in range(NPARITY):
            d = synd[n]
            for i in range(1, L + 1):
                d ^= gf.mul(c[i], synd[n - i])
            if d == 0:
                m += 1
                continue
            coef = gf.div(d, b)
            prev = list(c)
            for i in range(size - m):
                if b_poly[i]:
                    c[i + m] ^= gf.mul(coef, b_poly[i])
            if 2 * L <= n:
                L = n + 1 - L
                b_poly = prev
                b = d
                m = 1
            else:
                m += 1

        return c[:L + 1], L

    def _chien(self, locator):
        lam = np.asarray(locator, dtype=np.int64)[:, None]
        terms = np.where(lam == 0, 0,
                         self.gf.exp[self.gf.log[lam] +
                                     self._chien_pow[:lam.shape[0]]])
        values = np.bitwise_xor.reduce(terms, axis=0)
        return np.flatnonzero(values == 0)

    def decode(self, received):
        """
        Parameters
        ----------
        received : bytes
            Exactly 255 received bytes.

        Returns
        -------
        data : bytes
            The 239 corrected data bytes.
        corrections : int
            Number of corrected bytes.

        Raises
        ------
        DecodeFailure
            If more than 8 byte errors were detected.
        """
        gf = self.gf
        synd = self.syndromes(received)
        if not synd.any():
            return bytes(received)[:K], 0

        synd = synd.tolist()
        locator, n_err = self._berlekamp_massey(synd)
        if n_err > T:
            raise DecodeFailure(f"error locator of degree {n_err} exceeds "
                                f"{T} correctable errors")

        positions = self._chien(locator)
        if positions.size != n_err:
            raise DecodeFailure(f"locator of degree {n_err} has "
                                f"{positions.size} roots in the code")

        # error evaluator omega = S(x) * lambda(x) mod x^16, lowest first
        omega = [0] * NPARITY
        for i, s in enumerate(synd):
            if s == 0:
                continue
            for j, lam in enumerate(locator):
                if i + j < NPARITY:
                    omega[i + j] ^= gf.mul(s, lam)

        corrected = bytearray(received)
        for idx in positions.tolist():
            power = N - 1 - idx
            x_inv = gf.alpha_pow(-power)

            num = 0
            for c in reversed(omega):
                num = gf.mul(num, x_inv) ^ c
            den = 0
            for l in range(1, len(locator), 2):
                den ^= gf.mul(locator[l], gf.alpha_pow(-power * (l - 1)))
            if den == 0:
                raise DecodeFailure("vanishing locator derivative")

            magnitude = gf.mul(gf.alpha_pow(power * (1 - FCR)),
                               gf.div(num, den))
            corrected[idx] ^= magnitude

        if self.syndromes(corrected).any():
            raise DecodeFailure("non-zero syndromes after correction")

        corrections = sum(1 for a, b in zip(corrected, received) if a != b)
        return bytes(corrected[:K]), corrections


CODE = ReedSolomon255()


def rs_encode(data):
    """Systematic RS(255, 239) encoding of 239 bytes."""
    return CODE.encode(data)


def rs_decode(received):
    """
    Decode a 255-byte codeword.

    Returns the 239 data bytes and the number of corrected bytes, raises
    DecodeFailure when more than 8 byte errors are detected. Heavier error
    patterns can also land on another codeword; that miscorrection is not
    detectable by any bounded-distance decoder.
    """
    return CODE.decode(received)


def rs_syndromes(received):
    """The 16 syndromes r(alpha^j), j = 0 .. 15; all zero for codewords."""
    return CODE.syndromes(received)


def rs_decoded_ber(channel_ber):
    """
    Analytic bit error rate after the t=8 decoder for independent channel bit
    errors.

    The decoded byte error rate is the usual bounded-distance estimate
    1/n * sum_{j>t} j * P(j byte errors); an erroneous byte keeps on average
    p / p_byte of its bits wrong.

    Parameters
    ----------
    channel_ber : float or array_like
        Bit error probability before decoding.

    Returns
    -------
    ber : float or np.ndarray
    """
    p = np.asarray(channel_ber, dtype=float)
    out = np.zeros_like(p)
    j = np.arange(T + 1, N + 1)
    for idx, pb in np.ndenumerate(p):
        if pb <= 0:
            continue
        p_byte = -np.expm1(8 * np.log1p(-min(pb, 1.0))) if pb < 1 else 1.0
        p_sym = np.sum(j * binom.pmf(j, N, p_byte)) / N
        out[idx] = p_sym * pb / p_byte
    if out.ndim == 0:
        return float(out)
    return out
