"""Scattering functions, underspread parameters and grid matching.

Every model integrates to one. Besides pointwise evaluation each model
exposes a 2-D quadrature rule ``nodes(order)`` with
``sum(w * f(tau, nu)) ~= int int C_H(tau, nu) f(tau, nu) dtau dnu`` for
smooth ``f``; channel statistics are built on these rules.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np

from ._quadrature import composite_nodes, gauss_nodes
from .errors import PreconditionError
from .pulse import WHGrid


@dataclass(frozen=True)
class UnderspreadParams:
    tau0: float
    nu0: float
    leakage: float = 0.0

    def __post_init__(self):
        if self.tau0 < 0 or self.nu0 < 0:
            raise ValueError("support half-widths must be non-negative")
        if not 0.0 <= self.leakage <= 1.0:
            raise ValueError("leakage must lie in [0, 1]")

    @classmethod
    def square(cls, spread, leakage=0.0):
        half = math.sqrt(spread) / 2.0
        return cls(half, half, leakage)

    @property
    def spread(self):
        return 4.0 * self.tau0 * self.nu0

    def is_underspread(self, max_spread=1e-2, max_leakage=1e-2):
        return self.spread <= max_spread and self.leakage <= max_leakage


def _tensor_rule(tau_breaks, nu_breaks, order, density):
    tx, tw = composite_nodes(tau_breaks, order)
    vx, vw = composite_nodes(nu_breaks, order)
    tau, nu = np.meshgrid(tx, vx, indexing="ij")
    w = np.outer(tw, vw) * density(tau, nu)
    keep = w != 0
    return tau[keep], nu[keep], w[keep]


class ScatteringModel:
    """Common interface; subclasses are frozen dataclasses."""

    def density(self, tau, nu):
        raise NotImplementedError

    def box(self):
        """``(tau_min, tau_max, nu_min, nu_max)`` enclosing the support."""
        raise NotImplementedError

    def breakpoints(self):
        """Delay and Doppler coordinates where the density is not smooth."""
        raise NotImplementedError

    def mass_in_box(self, tau0, nu0):
        raise NotImplementedError

    def dilate(self, beta):
        """Model for ``C_H(beta tau, nu / beta)``: delays shrink by ``beta``, Doppler grows."""
        raise NotImplementedError

    def nodes(self, order=16):
        return _cached_nodes(self, order)

    def _nodes(self, order):
        raise NotImplementedError

    def volume(self, order=16):
        return float(np.sum(self.nodes(order)[2]))

    def leakage(self, tau0, nu0):
        return leakage(self, tau0, nu0)


@functools.lru_cache(maxsize=128)
def _cached_nodes(model, order):
    tau, nu, w = model._nodes(order)
    for a in (tau, nu, w):
        a.setflags(write=False)
    return tau, nu, w


def _overlap(a_lo, a_hi, b_lo, b_hi):
    return max(0.0, min(a_hi, b_hi) - max(a_lo, b_lo))


@dataclass(frozen=True)
class BrickRect(ScatteringModel):
    """Uniform scattering over ``[-tau0, tau0] x [-nu0, nu0]``."""

    tau0: float
    nu0: float

    def __post_init__(self):
        if not (self.tau0 > 0 and self.nu0 > 0):
            raise ValueError("brick half-widths must be positive")

    def density(self, tau, nu):
        tau, nu = np.asarray(tau, dtype=float), np.asarray(nu, dtype=float)
        inside = (np.abs(tau) <= self.tau0) & (np.abs(nu) <= self.nu0)
        return np.where(inside, 1.0 / (4.0 * self.tau0 * self.nu0), 0.0)

    def box(self):
        return (-self.tau0, self.tau0, -self.nu0, self.nu0)

    def breakpoints(self):
        return np.array([-self.tau0, self.tau0]), np.array([-self.nu0, self.nu0])

    def mass_in_box(self, tau0, nu0):
        return (_overlap(-tau0, tau0, -self.tau0, self.tau0)
                * _overlap(-nu0, nu0, -self.nu0, self.nu0)) / (4.0 * self.tau0 * self.nu0)

    def dilate(self, beta):
        return BrickRect(self.tau0 / beta, self.nu0 * beta)

    def _nodes(self, order):
        tb, vb = self.breakpoints()
        return _tensor_rule(tb, vb, order, self.density)


@dataclass(frozen=True)
class TwoLevelBrick(ScatteringModel):
    """Inner box with mass ``1 - eps`` inside an outer box carrying ``eps``."""

    tau0: float
    nu0: float
    eps: float
    tau_out: float
    nu_out: float

    def __post_init__(self):
        if not (self.tau0 > 0 and self.nu0 > 0):
            raise ValueError("inner half-widths must be positive")
        if not (self.tau_out > self.tau0 and self.nu_out > self.nu0):
            raise ValueError("outer box must strictly contain the inner box")
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError("eps must lie in [0, 1]")

    @property
    def inner_level(self):
        return (1.0 - self.eps) / (4.0 * self.tau0 * self.nu0)

    @property
    def outer_level(self):
        ring = 4.0 * (self.tau_out * self.nu_out - self.tau0 * self.nu0)
        return self.eps / ring

    def density(self, tau, nu):
        tau, nu = np.asarray(tau, dtype=float), np.asarray(nu, dtype=float)
        inner = (np.abs(tau) <= self.tau0) & (np.abs(nu) <= self.nu0)
        outer = (np.abs(tau) <= self.tau_out) & (np.abs(nu) <= self.nu_out)
        return np.where(inner, self.inner_level, np.where(outer, self.outer_level, 0.0))

    def box(self):
        return (-self.tau_out, self.tau_out, -self.nu_out, self.nu_out)

    def breakpoints(self):
        return (np.array([-self.tau_out, -self.tau0, self.tau0, self.tau_out]),
                np.array([-self.nu_out, -self.nu0, self.nu0, self.nu_out]))

    def mass_in_box(self, tau0, nu0):
        inner = _overlap(-tau0, tau0, -self.tau0, self.tau0) * _overlap(-nu0, nu0, -self.nu0, self.nu0)
        outer = (_overlap(-tau0, tau0, -self.tau_out, self.tau_out)
                 * _overlap(-nu0, nu0, -self.nu_out, self.nu_out))
        return inner * self.inner_level + (outer - inner) * self.outer_level

    def dilate(self, beta):
        return TwoLevelBrick(self.tau0 / beta, self.nu0 * beta, self.eps,
                             self.tau_out / beta, self.nu_out * beta)

    def _nodes(self, order):
        # evaluate the density at cell centres so nodes on shared edges get the right level
        tb, vb = self.breakpoints()
        tau_parts, nu_parts, w_parts = [], [], []
        for a, b in zip(tb[:-1], tb[1:]):
            tx, tw = gauss_nodes(a, b, order)
            for c, d in zip(vb[:-1], vb[1:]):
                vx, vw = gauss_nodes(c, d, order)
                level = float(self.density(0.5 * (a + b), 0.5 * (c + d)))
                tau, nu = np.meshgrid(tx, vx, indexing="ij")
                tau_parts.append(tau.ravel())
                nu_parts.append(nu.ravel())
                w_parts.append((np.outer(tw, vw) * level).ravel())
        return np.concatenate(tau_parts), np.concatenate(nu_parts), np.concatenate(w_parts)


@dataclass(frozen=True)
class SeparableJakesExp(ScatteringModel):
    """Jakes Doppler spectrum times a truncated one-sided exponential delay profile."""

    nu_d: float
    tau_rms: float
    tau_cut: float

    def __post_init__(self):
        if not (self.nu_d > 0 and self.tau_rms > 0 and self.tau_cut > 0):
            raise ValueError("Jakes/exponential parameters must be positive")
        if not math.isfinite(self.tau_cut):
            raise ValueError("tau_cut must be finite")

    @property
    def _delay_norm(self):
        return self.tau_rms * -math.expm1(-self.tau_cut / self.tau_rms)

    def delay_profile(self, tau):
        tau = np.asarray(tau, dtype=float)
        inside = (tau >= 0) & (tau <= self.tau_cut)
        return np.where(inside, np.exp(-np.clip(tau, 0, None) / self.tau_rms) / self._delay_norm, 0.0)

    def doppler_profile(self, nu):
        nu = np.asarray(nu, dtype=float)
        inside = np.abs(nu) < self.nu_d
        with np.errstate(invalid="ignore", divide="ignore"):
            val = 1.0 / (np.pi * np.sqrt(self.nu_d ** 2 - nu ** 2))
        return np.where(inside, val, 0.0)

    def density(self, tau, nu):
        return self.delay_profile(tau) * self.doppler_profile(nu)

    def box(self):
        return (0.0, self.tau_cut, -self.nu_d, self.nu_d)

    def breakpoints(self):
        return np.array([0.0, self.tau_cut]), np.array([-self.nu_d, self.nu_d])

    def delay_mass(self, lo, hi):
        lo, hi = max(lo, 0.0), min(hi, self.tau_cut)
        if hi <= lo:
            return 0.0
        r = self.tau_rms
        return r * (math.exp(-lo / r) - math.exp(-hi / r)) / self._delay_norm

    def doppler_mass(self, lo, hi):
        lo, hi = max(lo, -self.nu_d), min(hi, self.nu_d)
        if hi <= lo:
            return 0.0
        return (math.asin(hi / self.nu_d) - math.asin(lo / self.nu_d)) / math.pi

    def mass_in_box(self, tau0, nu0):
        return self.delay_mass(-tau0, tau0) * self.doppler_mass(-nu0, nu0)

    def dilate(self, beta):
        return SeparableJakesExp(self.nu_d * beta, self.tau_rms / beta, self.tau_cut / beta)

    def delay_nodes(self, order):
        # panels one rms delay wide resolve the exponential
        panels = max(1, min(64, math.ceil(self.tau_cut / self.tau_rms)))
        x, w = composite_nodes(np.linspace(0.0, self.tau_cut, panels + 1), order)
        return x, w * self.delay_profile(x)

    def doppler_nodes(self, order):
        # nu = nu_d sin(x) removes the inverse square-root edge singularity
        x, w = composite_nodes(np.linspace(-0.5 * np.pi, 0.5 * np.pi, 5), order)
        return self.nu_d * np.sin(x), w / np.pi

    def _nodes(self, order):
        tx, tw = self.delay_nodes(order)
        vx, vw = self.doppler_nodes(order)
        tau, nu = np.meshgrid(tx, vx, indexing="ij")
        return tau.ravel(), nu.ravel(), np.outer(tw, vw).ravel()


def leakage(model, tau0, nu0):
    """Fraction of the scattering volume outside ``[-tau0, tau0] x [-nu0, nu0]``."""
    if tau0 < 0 or nu0 < 0:
        raise ValueError("box half-widths must be non-negative")
    return float(np.clip(1.0 - model.mass_in_box(tau0, nu0), 0.0, 1.0))


def grid_match(tau0, nu0, tf_product):
    """Lattice with ``nu0 T = tau0 F`` and ``T F = tf_product``."""
    if not (tau0 > 0 and nu0 > 0):
        raise ValueError("tau0 and nu0 must be positive")
    if not 1.0 <= tf_product < 2.0:
        raise ValueError("tf_product must lie in [1, 2)")
    return WHGrid(math.sqrt(tf_product * tau0 / nu0), math.sqrt(tf_product * nu0 / tau0))


def canonical_square(model, grid, tau0, nu0, rtol=1e-9):
    """Dilate a grid-matched problem so that the support becomes a square.

    Returns ``(model', grid', half_side)`` with ``grid' = (sqrt(TF), sqrt(TF))``
    and ``half_side = sqrt(Delta_H) / 2``.
    """
    if not math.isclose(nu0 * grid.T, tau0 * grid.F, rel_tol=rtol):
        raise PreconditionError("grid does not satisfy the matching rule nu0 T = tau0 F")
    beta = math.sqrt(grid.T / grid.F)
    side = math.sqrt(grid.product)
    half = math.sqrt(tau0 * nu0)
    new_model = model if beta == 1.0 else model.dilate(beta)
    return new_model, WHGrid(side, side), half
