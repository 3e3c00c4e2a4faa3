"""Capacity bounds for Rayleigh-fading underspread channels.

All lower bounds are returned per unit bandwidth in nat/s/Hz. ``rho`` is the
linear SNR ``P / B``.
"""

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from ._quadrature import gauss_nodes
from .ambiguity import DEFAULT_POLICY
from .channel_stats import extremal_sir, matrix_psd, sigma_g2, sigma_I2, theta_breakpoints
from .errors import ConvergenceError, PreconditionError
from .pulse import require_orthonormal

GAMMA_LO = 1e-6
GAMMA_HI = 1.0 - 1e-6
GAMMA_SEEDS = 50
PSD_FLOOR = -1e-8


@dataclass(frozen=True)
class BoundResult:
    """A lower bound and its decomposition, all in nat/s/Hz.

    ``value = coherent_term - logdet_penalty - interference_penalty``.
    """

    value: float
    coherent_term: float
    logdet_penalty: float
    interference_penalty: float
    gamma_opt: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def clamped_value(self):
        return max(self.value, 0.0)

    @property
    def terms(self):
        return (self.coherent_term, self.logdet_penalty, self.interference_penalty)


def awgn_upper(bandwidth, power, nu0, eta=0.0, eps=0.0):
    """Upper bound in nat/s: AWGN capacity over the Doppler-widened band plus a linear term."""
    if min(bandwidth, power, nu0, eta, eps) < 0 or eta >= 1 or eps >= 1:
        raise ValueError("need non-negative parameters with eta, eps < 1")
    width = bandwidth + 2.0 * nu0
    if width == 0:
        return (eta + eps - eta * eps) * power
    return (width * math.log1p((1.0 - eta) * (1.0 - eps) * power / width)
            + (eta + eps - eta * eps) * power)


def awgn_upper_approx(bandwidth, rho, eps=0.0):
    """``B [log(1 + (1 - eps) rho) + eps rho]``, valid for ``B >> nu0`` and small spill-over."""
    rho = np.asarray(rho, dtype=float)
    return bandwidth * (np.log1p((1.0 - eps) * rho) + eps * rho)


def _exp_e1_cf(x, terms=80):
    # e^x E1(x) by its continued fraction (modified Lentz), accurate for x >= 4
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, terms):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        h = h * c * d
    return h


def expected_log(a):
    """``E[log(1 + a |h|^2)]`` for ``h ~ CN(0, 1)``, i.e. ``exp(1/a) E1(1/a)``.

    Uses scipy's ``exp1`` for ``1/a < 4`` and a continued fraction above,
    which avoids overflow of ``exp(1/a)`` at small ``a``.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("a must be non-negative")
    out = np.zeros(a.shape)
    pos = a > 0
    x = 1.0 / a[pos]
    small = x < 4.0
    val = np.empty(x.shape)
    val[small] = np.exp(x[small]) * special.exp1(x[small])
    val[~small] = _exp_e1_cf(x[~small])
    out[pos] = val
    return out if out.ndim else float(out)


def _gamma_seeds():
    z = np.linspace(special.logit(GAMMA_LO), special.logit(GAMMA_HI), GAMMA_SEEDS)
    return special.expit(z)


def minimize_gamma(objective):
    """Infimum over ``gamma`` in ``(0, 1)`` of a scalar objective.

    A 50-point logit-spaced scan brackets the minimum, then golden-section
    search refines it. Returns ``(gamma, value)`` never worse than the scan.
    """
    seeds = _gamma_seeds()
    vals = np.array([objective(g) for g in seeds])
    i = int(np.argmin(vals))
    best_g, best_v = float(seeds[i]), float(vals[i])
    if 0 < i < len(seeds) - 1:
        res = optimize.minimize_scalar(objective, bracket=(seeds[i - 1], seeds[i], seeds[i + 1]),
                                       method="golden", options={"xtol": 1e-10})
        if res.fun < best_v and GAMMA_LO <= res.x <= GAMMA_HI:
            best_g, best_v = float(res.x), float(res.fun)
    return best_g, best_v


def delta_tilde(nu0, grid):
    return 2.0 * nu0 * grid.T


def lower_bound_cor2(pulse, grid, rho, tau0, nu0, eps, stats=None):
    """Lower bound that depends on the channel only through ``(tau0, nu0, eps)``.

    ``stats`` may supply ``(m_g, M_g)``; otherwise they are computed over
    ``[-tau0, tau0] x [-nu0, nu0]``.
    """
    require_orthonormal(pulse, grid)
    if rho < 0:
        raise ValueError("rho must be non-negative")
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    dt = delta_tilde(nu0, grid)
    if not dt < 1.0:
        raise PreconditionError(f"2 nu0 T = {dt} must be below 1")
    if stats is None:
        stats = extremal_sir(pulse, grid, tau0, nu0)
    m_g, big_m = stats[0], stats[1]
    tf = grid.product
    r = tf * rho
    coherent = expected_log(r * (1.0 - eps) * m_g / (1.0 + r * (big_m + eps)))

    def diag_pen(g):
        out = dt * math.log1p(r / (g * dt))
        if dt < 1.0:
            out += (1.0 - dt) * math.log1p(r * eps / (g * (1.0 - dt)))
        return out

    def inter_pen(g):
        return math.log1p(r * (big_m + eps) / (1.0 - g))

    if rho == 0:
        g_opt = 0.5
    else:
        g_opt, _ = minimize_gamma(lambda g: diag_pen(g) + inter_pen(g))
    return BoundResult(
        value=(coherent - diag_pen(g_opt) - inter_pen(g_opt)) / tf,
        coherent_term=coherent / tf,
        logdet_penalty=diag_pen(g_opt) / tf,
        interference_penalty=inter_pen(g_opt) / tf,
        gamma_opt=g_opt,
        diagnostics={"m_g": m_g, "M_g": big_m, "delta_tilde": dt},
    )


@functools.lru_cache(maxsize=64)
def _theta_spectrum(pulse, grid, model, n_sub, tol, order=12, k_corr=None, max_depth=30):
    """Quadrature nodes on ``[-1/2, 1/2]`` and the eigenvalues of ``Theta`` there.

    Panels between the non-smooth points of ``Theta`` are bisected until the
    ``order`` and ``2 order`` rules agree to ``tol`` (relative once the value
    exceeds one) for ``log det(I + s Theta)`` at a spread of test scales ``s``.
    """
    scales = np.logspace(-4, 8, 13)

    def eig(theta):
        lam = np.array([np.linalg.eigvalsh(matrix_psd(pulse, grid, model, t, n_sub, k_corr)) for t in theta])
        if lam.min() < PSD_FLOOR:
            raise ConvergenceError(f"matrix spectrum has eigenvalue {lam.min():.3e} below {PSD_FLOOR}")
        return np.clip(lam, 0.0, None)

    def probe(lam, w):
        return np.array([np.sum(w[:, None] * np.log1p(s * lam)) for s in scales])

    weights, lams = [], []
    err_total = 0.0
    breaks = theta_breakpoints(model, grid)
    stack = [(a, b, 0) for a, b in zip(breaks[:-1], breaks[1:])]
    while stack:
        a, b, depth = stack.pop()
        x1, w1 = gauss_nodes(a, b, order)
        x2, w2 = gauss_nodes(a, b, 2 * order)
        l1, l2 = eig(x1), eig(x2)
        p1, p2 = probe(l1, w1), probe(l2, w2)
        err = np.max(np.abs(p2 - p1) / np.maximum(1.0, np.abs(p2)))
        if err <= tol or depth >= max_depth:
            weights.append(w2)
            lams.append(l2)
            err_total += err
            continue
        mid = 0.5 * (a + b)
        stack.extend([(mid, b, depth + 1), (a, mid, depth + 1)])
    return np.concatenate(weights), np.concatenate(lams), err_total


def lower_bound_thm1(pulse, grid, model, rho, n_sub, policy=DEFAULT_POLICY, k_corr=None, theta_tol=1e-9):
    """Lower bound from the full channel statistics with ``n_sub`` subcarriers."""
    require_orthonormal(pulse, grid)
    if rho < 0:
        raise ValueError("rho must be non-negative")
    if n_sub < 1:
        raise ValueError("need at least one subcarrier")
    tf = grid.product
    r = tf * rho
    s_g = sigma_g2(pulse, grid, model)
    s_i = sigma_I2(pulse, grid, model, policy)
    coherent = expected_log(s_g * r / (1.0 + r * s_i))
    if rho == 0:
        return BoundResult(0.0, 0.0, 0.0, 0.0, 0.5, {"sigma_g2": s_g, "sigma_I2": s_i})
    w, lam, theta_err = _theta_spectrum(pulse, grid, model, n_sub, theta_tol, k_corr=k_corr)

    def logdet_pen(g):
        return float(np.sum(w[:, None] * np.log1p((r / g) * lam))) / n_sub

    def inter_pen(g):
        return math.log1p(r * s_i / (1.0 - g))

    g_opt, _ = minimize_gamma(lambda g: logdet_pen(g) + inter_pen(g))
    return BoundResult(
        value=(coherent - logdet_pen(g_opt) - inter_pen(g_opt)) / tf,
        coherent_term=coherent / tf,
        logdet_penalty=logdet_pen(g_opt) / tf,
        interference_penalty=inter_pen(g_opt) / tf,
        gamma_opt=g_opt,
        diagnostics={"sigma_g2": s_g, "sigma_I2": s_i, "theta_nodes": int(w.size),
                     "theta_error": theta_err, "n_sub": n_sub},
    )


def approx_lb(rho, spread, bandwidth=1.0):
    """Two-term small-spread approximation of the square-support lower bound."""
    rho = np.asarray(rho, dtype=float)
    root = math.sqrt(spread)
    pen = root * np.log1p(rho / root) if root > 0 else np.zeros_like(rho)
    return bandwidth * (expected_log(rho) - pen)


def rule_of_thumb(spread, eps):
    """Nominal SNR interval ``(sqrt(Delta_H), 1 / (Delta_H + eps))`` where fading costs little."""
    if spread < 0 or eps < 0 or spread + eps == 0:
        raise ValueError("need non-negative spread and eps, not both zero")
    return math.sqrt(spread), 1.0 / (spread + eps)
