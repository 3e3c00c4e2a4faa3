"""Piecewise sums of complex exponentials on the frequency axis.

A function is stored as a list of pieces ``(lo, hi, coefs, rates)`` and
evaluates to ``sum_j coefs[..., j] * exp(1j * rates[j] * f)`` for
``lo <= f <= hi``. ``lo``, ``hi`` and ``coefs`` broadcast over a batch of
query points, which is what makes ambiguity functions and their lattice
sums cheap to evaluate in closed form.
"""

import numpy as np


class PiecewiseExp:
    __slots__ = ("pieces",)

    def __init__(self, pieces):
        self.pieces = list(pieces)

    def shift(self, s):
        """Return ``f -> self(f + s)``; ``s`` may be an array."""
        s = np.asarray(s, dtype=float)
        out = []
        for lo, hi, coefs, rates in self.pieces:
            phase = np.exp(1j * rates * s[..., None])
            out.append((lo - s, hi - s, coefs * phase, rates))
        return PiecewiseExp(out)

    def __mul__(self, other):
        out = []
        for lo_p, hi_p, c_p, r_p in self.pieces:
            for lo_q, hi_q, c_q, r_q in other.pieces:
                lo = np.maximum(lo_p, lo_q)
                hi = np.minimum(hi_p, hi_q)
                if np.all(hi <= lo):
                    continue
                coefs = (c_p[..., :, None] * c_q[..., None, :])
                coefs = coefs.reshape(coefs.shape[:-2] + (-1,))
                rates = (r_p[:, None] + r_q[None, :]).ravel()
                out.append((lo, hi, coefs, rates))
        return PiecewiseExp(out)

    def integrate(self, extra_rate=0.0):
        """Integral of ``self(f) * exp(1j * extra_rate * f)`` over the real line."""
        extra_rate = np.asarray(extra_rate, dtype=float)
        total = 0.0
        for lo, hi, coefs, rates in self.pieces:
            half = np.clip(0.5 * (hi - lo), 0.0, None)[..., None]
            mid = (0.5 * (hi + lo))[..., None]
            k = rates + extra_rate[..., None]
            # exp(1j k mid) * (hi - lo) * sin(k half) / (k half), stable at k = 0
            terms = coefs * np.exp(1j * k * mid) * (2.0 * half) * np.sinc(k * half / np.pi)
            total = total + terms.sum(axis=-1)
        return total

    def __call__(self, f):
        f = np.asarray(f, dtype=float)
        val = np.zeros(f.shape, dtype=complex)
        done = np.zeros(f.shape, dtype=bool)
        for lo, hi, coefs, rates in self.pieces:
            take = (f >= lo) & (f <= hi) & ~done
            terms = (coefs * np.exp(1j * rates * f[..., None])).sum(axis=-1)
            val = np.where(take, terms, val)
            done |= take
        return val


def constant_piece(lo, hi, value):
    return (np.asarray(lo, float), np.asarray(hi, float),
            np.array([complex(value)]), np.array([0.0]))


def cosine_piece(lo, hi, amplitude, rate, phase):
    """``amplitude * cos(rate * f + phase)`` on ``[lo, hi]``."""
    c = 0.5 * amplitude
    return (np.asarray(lo, float), np.asarray(hi, float),
            np.array([c * np.exp(1j * phase), c * np.exp(-1j * phase)]),
            np.array([rate, -rate], dtype=float))
