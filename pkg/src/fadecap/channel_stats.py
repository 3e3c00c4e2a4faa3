"""Statistics of the discretized channel seen through a Weyl-Heisenberg set.

The diagonal channel coefficients ``h[k, n]`` form a stationary 2-D process
with correlation ``R_h``; their power is ``sigma_g2`` and the total power of
the self-interference coefficients is ``sigma_I2``. For the worst case over
a support rectangle the relevant quantities are ``m_g`` (smallest
``|A|**2``) and ``M_g`` (largest lattice tail ``S_g``).
"""

import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import optimize

from ._quadrature import adaptive_gauss_legendre, composite_nodes
from .ambiguity import DEFAULT_POLICY, ambiguity, ambiguity_lattice_tail
from .errors import ConvergenceError, PreconditionError
from .pulse import eval_freq, moments, require_orthonormal, spectrum_breakpoints, _eval_freq_derivative

DEFAULT_ORDER = 16


@dataclass(frozen=True)
class ChannelStats:
    sigma_g2: float
    sigma_I2: float
    m_g: float
    M_g: float
    corr_truncation: tuple = (None, None)
    tolerances: dict = field(default_factory=dict, hash=False, compare=False)


class SIRExtrema(NamedTuple):
    m_g: float
    M_g: float
    argmin: tuple
    argmax: tuple
    evaluations: int


@functools.lru_cache(maxsize=4096)
def corr(pulse, grid, model, dk, dn, order=DEFAULT_ORDER):
    """``R_h[dk, dn] = int int C_H |A|**2 exp(j 2 pi (dk T nu - dn F tau))``."""
    require_orthonormal(pulse, grid)
    tau, nu, w = model.nodes(order)
    a2 = np.abs(ambiguity(pulse, tau, nu)) ** 2
    phase = np.exp(2j * np.pi * (dk * grid.T * nu - dn * grid.F * tau))
    return complex(np.sum(w * a2 * phase))


def sigma_g2(pulse, grid, model, order=DEFAULT_ORDER):
    return corr(pulse, grid, model, 0, 0, order).real


@functools.lru_cache(maxsize=512)
def sigma_I2(pulse, grid, model, policy=DEFAULT_POLICY, order=DEFAULT_ORDER):
    """Scattering-weighted lattice tail ``int int C_H S_g``."""
    tau, nu, w = model.nodes(order)
    return float(np.sum(w * ambiguity_lattice_tail(pulse, grid, tau, nu, policy)))


def scalar_psd(pulse, grid, model, theta, phi):
    """2-D spectrum ``c_H(theta, phi)`` of the diagonal coefficients, ``|theta|, |phi| <= 1/2``."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    if np.any(np.abs(theta) > 0.5) or np.any(np.abs(phi) > 0.5):
        raise ValueError("theta and phi must lie in [-1/2, 1/2]")
    t_lo, t_hi, v_lo, v_hi = model.box()
    out = np.zeros(theta.shape)
    for n in range(math.floor(t_lo * grid.F - 0.5), math.ceil(t_hi * grid.F + 0.5) + 1):
        tau = (phi - n) / grid.F
        for k in range(math.floor(v_lo * grid.T - 0.5), math.ceil(v_hi * grid.T + 0.5) + 1):
            nu = (theta - k) / grid.T
            dens = model.density(tau, nu)
            if np.any(dens > 0):
                out = out + dens * np.abs(ambiguity(pulse, tau, nu)) ** 2
    return out / grid.product


def _cell_breaks(values, scale):
    # images of model breakpoints in the unit cell [-1/2, 1/2]
    pts = np.mod(np.asarray(values) * scale + 0.5, 1.0) - 0.5
    return np.unique(np.concatenate([[-0.5, 0.5], pts]))


def _endpoint_clustered(breaks, order):
    # x = a + (b - a)(1 - cos(pi s)) / 2 removes inverse square-root singularities at panel ends
    s, w = composite_nodes(np.array([0.0, 0.5, 1.0]), order)
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        xs.append(a + 0.5 * (b - a) * (1.0 - np.cos(np.pi * s)))
        ws.append(w * 0.5 * np.pi * (b - a) * np.sin(np.pi * s))
    return np.concatenate(xs), np.concatenate(ws)


def scalar_psd_volume(pulse, grid, model, order=24):
    """``int int c_H(theta, phi)``, integrated panel-wise between the images of the support edges."""
    tb, vb = model.breakpoints()
    tx, tw = _endpoint_clustered(_cell_breaks(vb, grid.T), order)
    px, pw = _endpoint_clustered(_cell_breaks(tb, grid.F), order)
    th, ph = np.meshgrid(tx, px, indexing="ij")
    return float(np.sum(np.outer(tw, pw) * scalar_psd(pulse, grid, model, th, ph)))


def _delay_slice(model, nu, order):
    # nodes/weights for tau -> C_H(tau, nu) at fixed nu
    if hasattr(model, "delay_nodes"):
        x, w = model.delay_nodes(order)
        return x, w * model.doppler_profile(nu)
    tb, _ = model.breakpoints()
    x, w = composite_nodes(tb, order)
    return x, w * model.density(x, nu)


def matrix_psd(pulse, grid, model, theta, n_sub, k_corr=None, order=DEFAULT_ORDER):
    """``N x N`` matrix spectrum ``Theta(theta)`` of the coefficients along one symbol.

    Without ``k_corr`` the correlation series over ``dk`` is summed in closed
    form: ``Theta_m(theta) = (1/T) sum_k int C_H(tau, nu_k) |A(tau, nu_k)|**2
    exp(-j 2 pi m F tau) dtau`` with ``nu_k = (theta - k) / T``. With
    ``k_corr`` the truncated series ``sum_{|dk| <= k_corr} R[dk] exp(-j 2 pi dk theta)``
    is used instead.
    """
    if abs(theta) > 0.5:
        raise ValueError("theta must lie in [-1/2, 1/2]")
    if n_sub < 1:
        raise ValueError("need at least one subcarrier")
    require_orthonormal(pulse, grid)
    m = np.arange(n_sub)
    if k_corr is not None:
        if k_corr < 1:
            raise ValueError("k_corr must be at least 1")
        col = np.zeros(n_sub, dtype=complex)
        for dk in range(-k_corr, k_corr + 1):
            r = np.array([corr(pulse, grid, model, dk, int(dn), order) for dn in m])
            col += r * np.exp(-2j * np.pi * dk * theta)
    else:
        _, _, v_lo, v_hi = model.box()
        col = np.zeros(n_sub, dtype=complex)
        for k in range(math.floor(theta - v_hi * grid.T), math.ceil(theta - v_lo * grid.T) + 1):
            nu = (theta - k) / grid.T
            if not v_lo <= nu <= v_hi:
                continue
            tau, w = _delay_slice(model, nu, order)
            if not np.any(w):
                continue
            a2 = np.abs(ambiguity(pulse, tau, nu)) ** 2
            col += (w * a2) @ np.exp(-2j * np.pi * grid.F * np.outer(tau, m))
        col /= grid.T
    # Toeplitz in frequency: [Theta]_{n, n'} = Theta_{n - n'}
    idx = m[:, None] - m[None, :]
    mat = np.where(idx >= 0, col[np.abs(idx)], np.conj(col[np.abs(idx)]))
    return mat


def default_k_corr(pulse, grid, model, rel_tol=1e-9, cap=4096, order=DEFAULT_ORDER, n_sub=1):
    """Smallest ``K`` with ``max_n |R_h[K, n]| < rel_tol * sigma_g2``."""
    s = sigma_g2(pulse, grid, model, order)
    for k in range(1, cap + 1):
        peak = max(abs(corr(pulse, grid, model, k, dn, order)) for dn in range(n_sub))
        if peak < rel_tol * s:
            return k
    raise ConvergenceError(f"|R_h[K, n]| stays above {rel_tol} sigma_g2 up to K={cap}")


def theta_breakpoints(model, grid):
    """Points in ``[-1/2, 1/2]`` where ``Theta(theta)`` may be non-smooth."""
    _, vb = model.breakpoints()
    return _cell_breaks(vb, grid.T)


def _from_unit(u, v, scale):
    return np.clip(u, -1.0, 1.0) * scale[0], np.clip(v, -1.0, 1.0) * scale[1]


@functools.lru_cache(maxsize=256)
def extremal_sir(pulse, grid, tau0, nu0, seeds=64, policy=DEFAULT_POLICY):
    """Worst-case ``m_g = min_D |A|**2`` and ``M_g = max_D S_g`` over ``D = [-tau0, tau0] x [-nu0, nu0]``.

    A ``seeds x seeds`` grid over ``D`` (edges included) is refined by
    Nelder-Mead from the best seed. The search runs in coordinates
    normalized to the unit square.
    """
    require_orthonormal(pulse, grid)
    if tau0 < 0 or nu0 < 0:
        raise ValueError("tau0 and nu0 must be non-negative")
    if tau0 == 0 and nu0 == 0:
        s0 = float(ambiguity_lattice_tail(pulse, grid, 0.0, 0.0, policy))
        return SIRExtrema(float(np.abs(ambiguity(pulse, 0.0, 0.0)) ** 2), s0, (0.0, 0.0), (0.0, 0.0), 2)
    scale = np.array([tau0, nu0])

    def amb2(u, v):
        tau, nu = _from_unit(u, v, scale)
        return np.abs(ambiguity(pulse, tau, nu)) ** 2

    def tail(u, v):
        tau, nu = _from_unit(u, v, scale)
        return ambiguity_lattice_tail(pulse, grid, tau, nu, policy)

    grid1 = np.linspace(-1.0, 1.0, seeds)
    u, v = np.meshgrid(grid1, grid1, indexing="ij")
    count = 2 * u.size
    results = []
    for func, sign in ((amb2, 1.0), (tail, -1.0)):
        vals = sign * func(u, v)
        i = np.unravel_index(np.argmin(vals), vals.shape)
        best_x = np.array([u[i], v[i]])
        best = vals[i]
        res = optimize.minimize(lambda x: sign * float(func(x[0], x[1])), best_x,
                                method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-18, "maxiter": 2000})
        count += res.nfev
        if res.fun < best:
            best_x, best = np.clip(res.x, -1.0, 1.0), res.fun
        results.append((sign * best, (float(best_x[0] * tau0), float(best_x[1] * nu0))))
    (m_g, arg_m), (big_m, arg_big) = results
    return SIRExtrema(float(m_g), float(big_m), arg_m, arg_big, count)


def _poisson_energy(phi, breaks, period):
    """``sum_k |phi_hat(k period)|**2`` for ``phi`` smooth between ``breaks``.

    Poisson summation turns the sum into ``(1/period) sum_d R(d / period)``
    with ``R`` the autocorrelation of ``phi``, finitely many terms.
    """
    lo, hi = breaks[0], breaks[-1]
    width = hi - lo
    total = 0.0
    d_max = int(math.ceil(width * period))
    for d in range(-d_max, d_max + 1):
        lag = d / period
        a, b = max(lo, lo - lag), min(hi, hi - lag)
        if b <= a:
            continue
        brk = np.unique(np.clip(np.concatenate([breaks, breaks - lag]), a, b))
        for p, q in zip(brk[:-1], brk[1:]):
            if q > p:
                val, _ = adaptive_gauss_legendre(lambda f: phi(f + lag) * phi(f), p, q, tol=1e-14)
                total += val
    return total / period


def lattice_gradients(pulse, grid, k, order=20):
    """Partial derivatives ``(D_nu, D_tau)`` of ``A`` at the lattice point ``(-kT, 0)``.

    In frequency form ``D_nu = int G'(f) G(f) exp(-j 2 pi f k T) df`` and
    ``D_tau = 2 pi int f G(f)**2 exp(-j 2 pi f k T) df`` up to unimodular
    factors. Off the ``n = 0`` row both vanish on the square grid because
    the shifted spectra do not overlap. Panels are refined with ``|k|`` so
    the oscillating factor stays resolved.
    """
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    brk = spectrum_breakpoints(pulse)
    d_nu = np.empty(ks.shape, dtype=complex)
    d_tau = np.empty(ks.shape, dtype=complex)
    for i, kk in enumerate(ks):
        sub = 2 + int(math.ceil(abs(kk) * grid.T * (brk[-1] - brk[0])))
        fine = np.concatenate([np.linspace(a, b, sub + 1) for a, b in zip(brk[:-1], brk[1:])])
        x, w = composite_nodes(fine, order)
        phase = np.exp(-2j * np.pi * kk * grid.T * x)
        g = eval_freq(pulse, x)
        d_nu[i] = np.sum(w * phase * _eval_freq_derivative(pulse, x) * g)
        d_tau[i] = np.sum(w * phase * 2.0 * np.pi * x * g * g)
    if np.ndim(k) == 0:
        return d_nu[0], d_tau[0]
    return d_nu, d_tau


def taylor_constants(pulse, grid):
    """Small-spread slopes ``(c_m, c_M)`` with ``m_g ~ 1 - c_m Delta_H`` and ``M_g ~ c_M Delta_H``.

    ``c_m = pi**2 (d_t2 + d_f2)``. ``c_M`` sums the squared first partial
    derivatives of ``A`` at the nonzero lattice points; on the square grid
    only the row ``n = 0`` is nonzero, and the row sums are evaluated in
    closed form by Poisson summation.
    """
    require_orthonormal(pulse, grid)
    if not math.isclose(grid.T, grid.F, rel_tol=1e-12) or pulse.dilation != 1.0:
        raise PreconditionError("Taylor constants are defined on the square grid")
    d_t2, d_f2 = moments(pulse)
    c_m = math.pi ** 2 * (d_t2 + d_f2)
    brk = spectrum_breakpoints(pulse)

    def phi_nu(f):
        return _eval_freq_derivative(pulse, f) * eval_freq(pulse, f)

    def phi_tau(f):
        return 2.0 * np.pi * f * eval_freq(pulse, f) ** 2

    period = grid.T
    total = 0.0
    for phi in (phi_nu, phi_tau):
        x, w = composite_nodes(brk, 40)
        at_zero = np.sum(w * phi(x))
        total += _poisson_energy(phi, brk, period) - at_zero ** 2
    return c_m, total / 4.0


def channel_stats(pulse, grid, model, tau0, nu0, policy=DEFAULT_POLICY, order=DEFAULT_ORDER):
    ext = extremal_sir(pulse, grid, tau0, nu0, policy=policy)
    return ChannelStats(
        sigma_g2=sigma_g2(pulse, grid, model, order),
        sigma_I2=sigma_I2(pulse, grid, model, policy, order),
        m_g=ext.m_g,
        M_g=ext.M_g,
        tolerances={"lattice": policy.method, "quadrature_order": order},
    )
