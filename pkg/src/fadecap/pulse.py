"""Root-raised-cosine prototype pulses and their Weyl-Heisenberg lattices.

All quantities are in normalized units: the undilated pulse with grid
product ``TF`` has support ``|f| <= sqrt(TF)/2`` and is orthonormal on the
square lattice ``T = F = sqrt(TF)``. A ``dilation`` ``d`` maps ``g(t)`` to
``sqrt(d) g(d t)``; its matched lattice is ``(sqrt(TF)/d, d sqrt(TF))``.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np

from ._piecewise import PiecewiseExp, constant_piece, cosine_piece
from ._quadrature import adaptive_gauss_legendre, gauss_nodes
from .errors import ConvergenceError, PreconditionError

SINGULAR_WINDOW = 1e-6
GUARD_CAP = 10**9


@dataclass(frozen=True)
class PulseSpec:
    """Root-raised-cosine pulse with ``1 < tf_product < 2``.

    ``tf_product == 1`` is accepted as the sinc limit (zero roll-off), which
    is orthonormal but decays only like ``1/t``.
    """

    tf_product: float
    dilation: float = 1.0

    def __post_init__(self):
        tf = float(self.tf_product)
        if not (1.0 < tf < 2.0 or tf == 1.0):
            raise ValueError(f"tf_product must lie in (1, 2) or equal 1, got {tf}")
        if not self.dilation > 0:
            raise ValueError("dilation must be positive")
        object.__setattr__(self, "tf_product", tf)
        object.__setattr__(self, "dilation", float(self.dilation))

    @property
    def support_len(self):
        return math.sqrt(self.tf_product)

    @property
    def rolloff(self):
        return self.tf_product - 1.0

    @property
    def is_sinc(self):
        return self.tf_product == 1.0

    @property
    def flat_edge(self):
        """Edge of the flat part of the spectrum (dilated units)."""
        return self.dilation * (1.0 - self.rolloff) / (2.0 * self.support_len)

    @property
    def band_edge(self):
        """Spectrum vanishes for ``|f| > band_edge`` (dilated units)."""
        return self.dilation * self.support_len / 2.0

    def dilated(self, beta):
        return PulseSpec(self.tf_product, self.dilation * beta)


@dataclass(frozen=True)
class WHGrid:
    T: float
    F: float

    def __post_init__(self):
        if not (self.T > 0 and self.F > 0):
            raise ValueError("lattice parameters must be positive")
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "F", float(self.F))

    @property
    def product(self):
        return self.T * self.F


@dataclass(frozen=True)
class GuardConfig:
    eta: float
    c_decay: float
    t0: float
    guard_slots: int
    bound: float


def matched_grid(pulse):
    c = pulse.support_len
    return WHGrid(c / pulse.dilation, c * pulse.dilation)


def pulse_for_grid(tf_product, grid, rtol=1e-9):
    """The dilated pulse whose matched lattice is ``grid``."""
    if not math.isclose(grid.product, tf_product, rel_tol=rtol):
        raise PreconditionError(f"grid product {grid.product} differs from tf_product {tf_product}")
    return PulseSpec(tf_product, math.sqrt(tf_product) / grid.T)


def is_orthonormal(pulse, grid, rtol=1e-9):
    ref = matched_grid(pulse)
    return math.isclose(grid.T, ref.T, rel_tol=rtol) and math.isclose(grid.F, ref.F, rel_tol=rtol)


def require_orthonormal(pulse, grid):
    if not is_orthonormal(pulse, grid):
        ref = matched_grid(pulse)
        raise PreconditionError(
            f"grid (T={grid.T}, F={grid.F}) is not the orthonormal lattice "
            f"(T={ref.T}, F={ref.F}) of this pulse")


@functools.lru_cache(maxsize=256)
def spectrum(pulse):
    """The spectrum ``G`` as a :class:`PiecewiseExp` (exact representation)."""
    d = pulse.dilation
    c = pulse.support_len
    amp = math.sqrt(c / d)
    f1, f2 = pulse.flat_edge, pulse.band_edge
    pieces = [constant_piece(-f1, f1, amp)]
    if not pulse.is_sinc:
        rate = math.pi * c / (2.0 * pulse.rolloff * d)
        pieces.append(cosine_piece(f1, f2, amp, rate, -rate * f1))
        pieces.append(cosine_piece(-f2, -f1, amp, rate, rate * f1))
    return PiecewiseExp(pieces)


def spectrum_breakpoints(pulse):
    f1, f2 = pulse.flat_edge, pulse.band_edge
    if pulse.is_sinc:
        return np.array([-f2, f2])
    return np.array([-f2, -f1, f1, f2])


def eval_freq(pulse, f):
    """Spectrum ``G(f)``: flat, square-root raised-cosine roll-off, then zero."""
    f = np.asarray(f, dtype=float)
    d = pulse.dilation
    c = pulse.support_len
    beta = pulse.rolloff
    u = np.abs(f) / d
    f1 = (1.0 - beta) / (2.0 * c)
    f2 = (1.0 + beta) / (2.0 * c)
    out = np.where(u <= f1, math.sqrt(c), 0.0)
    if beta > 0:
        arg = np.cos(math.pi * c / beta * (u - f1))
        roll = np.sqrt(np.clip(0.5 * c * (1.0 + arg), 0.0, None))
        out = np.where((u > f1) & (u <= f2), roll, out)
    return out / math.sqrt(d)


def _eval_freq_derivative(pulse, f):
    # dG/df; zero on the flat part and outside the band
    f = np.asarray(f, dtype=float)
    if pulse.is_sinc:
        return np.zeros_like(f)
    d = pulse.dilation
    c = pulse.support_len
    rate = math.pi * c / (2.0 * pulse.rolloff * d)
    f1, f2 = pulse.flat_edge, pulse.band_edge
    u = np.abs(f)
    amp = math.sqrt(c / d)
    val = -amp * rate * np.sin(rate * (u - f1)) * np.sign(f)
    return np.where((u > f1) & (u < f2), val, 0.0)


def _time_derivatives(pulse0, t0, order=2, nodes=64):
    # g^(k)(t0) = Re int (j 2 pi f)^k G(f) exp(j 2 pi f t0) df, k = 0..order
    brk = spectrum_breakpoints(pulse0)
    out = np.zeros(order + 1)
    for a, b in zip(brk[:-1], brk[1:]):
        x, w = gauss_nodes(a, b, nodes)
        base = eval_freq(pulse0, x) * np.exp(2j * np.pi * x * t0)
        for k in range(order + 1):
            out[k] += np.real(np.sum(w * (2j * np.pi * x) ** k * base))
    return out


def _rrc_closed_form(pulse0, t):
    c = pulse0.support_len
    beta = pulse0.rolloff
    x = t / c
    num = np.sin(np.pi * x * (1.0 - beta)) + 4.0 * beta * x * np.cos(np.pi * x * (1.0 + beta))
    den = math.sqrt(c) * np.pi * x * (1.0 - (4.0 * beta * x) ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / den


def eval_time(pulse, t):
    """Impulse response ``g(t)`` (real, even, unit energy).

    Uses the closed-form root-raised-cosine expression; within
    ``SINGULAR_WINDOW`` of its removable singularities a second-order
    Taylor series is used, with derivatives from the spectrum.
    """
    t = np.asarray(t, dtype=float)
    d = pulse.dilation
    p0 = PulseSpec(pulse.tf_product)
    c = p0.support_len
    s = d * t
    g = _rrc_closed_form(p0, s)
    singular = [0.0]
    if p0.rolloff > 0:
        singular += [c / (4.0 * p0.rolloff), -c / (4.0 * p0.rolloff)]
    for ts in singular:
        near = np.abs(s - ts) < SINGULAR_WINDOW * c
        if np.any(near):
            d0, d1, d2 = _time_derivatives(p0, ts)
            h = s[near] - ts
            g = np.array(g, dtype=float, copy=True)
            g[near] = d0 + d1 * h + 0.5 * d2 * h * h
    return math.sqrt(d) * g


def tight_frame_residual(pulse, k, f):
    """``sum_n G(f - n/T) G(f - n/T - k F) - T delta[k]`` on the matched lattice.

    For the undilated pulse ``T = F = sqrt(TF)``, which is the tight-frame
    identity of the dual lattice ``(1/T, 1/F)``.
    """
    grid = matched_grid(pulse)
    f = np.asarray(f, dtype=float)
    edge = pulse.band_edge
    n_lo = int(math.floor((np.min(f) - edge) * grid.T)) - 1
    n_hi = int(math.ceil((np.max(f) + edge) * grid.T)) + 1
    total = np.zeros_like(f)
    for n in range(n_lo, n_hi + 1):
        shifted = f - n / grid.T
        total = total + eval_freq(pulse, shifted) * eval_freq(pulse, shifted - k * grid.F)
    return total - (grid.T if k == 0 else 0.0)


def _decay_envelope(pulse0, t):
    # analytic bound on t^2 |g(t)| valid for 4*beta*t/c > 1, decreasing in t
    c = pulse0.support_len
    beta = pulse0.rolloff
    y = 4.0 * beta * t / c
    return c ** 1.5 / (4.0 * math.pi * beta) * y / (y - 1.0)


@functools.lru_cache(maxsize=64)
def decay_constants(pulse, samples_per_period=200):
    """Constants ``(c_decay, t0)`` with ``|g(t)| <= c_decay / t**2`` for ``t >= t0``.

    ``t0`` is one symbol period. On ``[t0, t_env]`` the bound is the sampled
    supremum of ``t**2 |g(t)|`` plus a Lipschitz margin for the sampling gap;
    beyond ``t_env = max(c / rolloff, 2 c)`` the closed-form envelope of the
    root-raised-cosine tail, which is decreasing there, takes over.
    """
    if pulse.is_sinc:
        raise PreconditionError("the sinc pulse decays like 1/t; no 1/t^2 constant exists")
    p0 = PulseSpec(pulse.tf_product)
    c = p0.support_len
    t0 = c
    t_env = max(c / p0.rolloff, 2.0 * c)
    h = c / samples_per_period
    t = np.arange(t0, t_env + h, h)
    w = t * t * np.abs(eval_time(p0, t))
    lipschitz = 1.5 * np.max(np.abs(np.diff(w))) / h
    sampled = np.max(w) + 0.5 * lipschitz * h
    c0 = max(sampled, _decay_envelope(p0, t_env))
    d = pulse.dilation
    return c0 / d ** 1.5, t0 / d


def spillover_bound(pulse, grid, guard, n_subcarriers):
    """Right-hand side of the guard-interval spill-over inequality for ``guard`` slots."""
    c_decay, _ = decay_constants(pulse)
    n_odd = 2 * ((n_subcarriers - 1) // 2) + 1
    c_series = math.pi ** 2 / (6.0 * grid.T ** 2)
    tail = 1.0 / ((guard + 0.5) * grid.T)
    return 2.0 * n_odd * c_decay ** 2 * c_series * tail


def guard_slots(pulse, grid, eta, n_subcarriers, cap=GUARD_CAP):
    """Smallest guard length ``K_g`` keeping the spill-over bound below ``eta``.

    ``K_g * T`` must also exceed the decay onset ``t0``.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    if n_subcarriers < 1:
        raise ValueError("need at least one subcarrier")
    require_orthonormal(pulse, grid)
    c_decay, t0 = decay_constants(pulse)
    scale = spillover_bound(pulse, grid, 0, n_subcarriers) * 0.5 * grid.T
    k = max(0, math.ceil(scale / (eta * grid.T) - 0.5))
    while k > 0 and spillover_bound(pulse, grid, k - 1, n_subcarriers) <= eta:
        k -= 1
    while spillover_bound(pulse, grid, k, n_subcarriers) > eta:
        k += 1
    k = max(k, math.floor(t0 / grid.T) + 1)
    if k > cap:
        raise ConvergenceError(f"guard length {k} exceeds cap {cap} for eta={eta}")
    return GuardConfig(eta=eta, c_decay=c_decay, t0=t0, guard_slots=int(k),
                       bound=spillover_bound(pulse, grid, k, n_subcarriers))


def unit_norm_error(pulse, tol=1e-12):
    brk = spectrum_breakpoints(pulse)
    total = 0.0
    for a, b in zip(brk[:-1], brk[1:]):
        val, _ = adaptive_gauss_legendre(lambda x: eval_freq(pulse, x) ** 2, a, b, tol=tol)
        total += val
    return total - 1.0


@functools.lru_cache(maxsize=64)
def moments(pulse, tol=1e-12):
    """Second moments ``(d_t2, d_f2)`` of ``|g(t)|**2`` and ``|G(f)|**2``.

    ``d_t2`` uses ``int t^2 |g|^2 dt = int |G'(f)|^2 df / (4 pi^2)``, which
    is exact and avoids the slowly decaying ``t^2 |g(t)|^2`` tail.
    """
    brk = spectrum_breakpoints(pulse)
    d_f2 = 0.0
    grad2 = 0.0
    for a, b in zip(brk[:-1], brk[1:]):
        v, err = adaptive_gauss_legendre(lambda x: x * x * eval_freq(pulse, x) ** 2, a, b, tol=tol)
        d_f2 += v
        v, err2 = adaptive_gauss_legendre(lambda x: _eval_freq_derivative(pulse, x) ** 2, a, b, tol=tol)
        grad2 += v
        if max(err, err2) > 1e3 * tol:
            raise ConvergenceError("moment quadrature did not converge")
    if pulse.is_sinc:
        return math.inf, d_f2
    return grad2 / (4.0 * math.pi ** 2), d_f2
