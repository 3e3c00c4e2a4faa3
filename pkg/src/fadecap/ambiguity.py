"""Ambiguity function of the prototype pulse and its lattice sums.

The ambiguity function is ``A(tau, nu) = int g(t) g*(t - tau) exp(-j 2 pi nu t) dt``.
For a real spectrum this equals ``int G(f + nu) G(f) exp(j 2 pi f tau) df``,
a finite integral of piecewise exponentials that is evaluated in closed form.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .pulse import require_orthonormal, spectrum


@dataclass(frozen=True)
class AdaptivePolicy:
    """How to evaluate lattice sums of ``|A|**2``.

    ``method="poisson"`` sums the lattice in closed form through the Poisson
    summation formula (exact up to rounding). ``method="rings"`` expands
    square rings ``max(|k|, |n|) = r`` until one contributes less than
    ``tol``, failing after ``max_ring`` rings.
    """

    method: str = "poisson"
    tol: float = 1e-12
    max_ring: int = 1000

    def __post_init__(self):
        if self.method not in ("poisson", "rings"):
            raise ValueError(f"unknown lattice-sum method {self.method!r}")
        if not self.tol > 0 or self.max_ring < 1:
            raise ValueError("tol must be positive and max_ring at least 1")


DEFAULT_POLICY = AdaptivePolicy()


def ambiguity(pulse, tau, nu):
    """``A_g(tau, nu)`` for broadcastable arrays ``tau`` and ``nu``."""
    tau, nu = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(nu, dtype=float))
    spec = spectrum(pulse)
    prod = spec.shift(nu) * spec
    return prod.integrate(2.0 * np.pi * tau)


def _doppler_offsets(pulse, grid, nu):
    # lattice indices n with |nu - n F| < band width, the only nonzero columns
    width = 2.0 * pulse.band_edge
    lo = int(math.floor((np.min(nu) - width) / grid.F))
    hi = int(math.ceil((np.max(nu) + width) / grid.F))
    return range(lo, hi + 1)


def lattice_sum(pulse, grid, tau, nu):
    """``sum_{k,n} |A(tau - kT, nu - nF)|**2`` over the full lattice, in closed form.

    For each Doppler row ``n`` the delay sum is periodized through Poisson
    summation, which leaves finitely many autocorrelation samples of
    ``H(f) = G(f + nu - nF) G(f)`` because ``G`` has compact support.
    """
    tau, nu = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(nu, dtype=float))
    spec = spectrum(pulse)
    width = 2.0 * pulse.band_edge
    d_max = int(math.ceil(width * grid.T)) + 1
    total = np.zeros(tau.shape, dtype=complex)
    for n in _doppler_offsets(pulse, grid, nu):
        h = spec.shift(nu - n * grid.F) * spec
        if not h.pieces:
            continue
        for d in range(-d_max, d_max + 1):
            lag = d / grid.T
            if abs(lag) >= width:
                continue
            r = (h.shift(lag) * h).integrate()
            total = total + np.exp(2j * np.pi * d * tau / grid.T) * r
    return total.real / grid.T


def _lattice_tail_rings(pulse, grid, tau, nu, policy):
    total = np.zeros(tau.shape)
    rows = list(_doppler_offsets(pulse, grid, nu))
    for r in range(1, policy.max_ring + 1):
        inc = np.zeros(tau.shape)
        for n in rows:
            if abs(n) > r:
                continue
            ks = (-r, r) if abs(n) < r else range(-r, r + 1)
            for k in ks:
                inc += np.abs(ambiguity(pulse, tau - k * grid.T, nu - n * grid.F)) ** 2
        total += inc
        if r >= 2 and np.max(inc) < policy.tol:
            return total
    raise ConvergenceError(
        f"lattice ring expansion did not reach increment {policy.tol} within {policy.max_ring} rings")


def ambiguity_lattice_tail(pulse, grid, tau, nu, policy=DEFAULT_POLICY):
    """``S_g(tau, nu) = sum_{(k,n) != (0,0)} |A(tau - kT, nu - nF)|**2``.

    By Bessel's inequality this never exceeds one on an orthonormal grid.
    """
    require_orthonormal(pulse, grid)
    tau, nu = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(nu, dtype=float))
    if policy.method == "rings":
        return _lattice_tail_rings(pulse, grid, tau, nu, policy)
    full = lattice_sum(pulse, grid, tau, nu)
    return np.clip(full - np.abs(ambiguity(pulse, tau, nu)) ** 2, 0.0, None)
