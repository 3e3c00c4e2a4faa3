"""Finite-SNR studies on the square-support lower bound.

The ratio of the square-support lower bound to the AWGN upper bound is
swept over SNR, grid product and channel parameters; SNR intervals where
the ratio stays above a threshold are located by scan and bisection.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .bounds import awgn_upper_approx, lower_bound_cor2
from .channel_stats import extremal_sir
from .pulse import PulseSpec, matched_grid

RATIO_COLUMNS = ("tf", "delta_h", "epsilon", "snr_db", "lb_nat", "ub_nat", "ratio", "gamma_opt")
SIR_COLUMNS = ("tf", "delta_h", "m_g", "M_g", "sir")
RANGE_COLUMNS = ("delta_h", "epsilon", "snr_min_db", "snr_max_db")


def _strictly_increasing(values):
    arr = np.asarray(values, dtype=float)
    return arr.size > 0 and bool(np.all(np.diff(arr) > 0))


@dataclass(frozen=True)
class SweepSpec:
    snr_db: tuple
    tf: tuple = (1.02,)
    spreads: tuple = (1e-4,)
    eps: tuple = (1e-6,)
    threshold: float = 0.75

    def __post_init__(self):
        for name in ("snr_db", "tf", "spreads", "eps"):
            values = tuple(float(v) for v in getattr(self, name))
            if not _strictly_increasing(values):
                raise ValueError(f"{name} must be a non-empty, strictly increasing grid")
            object.__setattr__(self, name, values)
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must lie in (0, 1]")


class SNRRange(NamedTuple):
    lo_db: float
    hi_db: float
    crossings: tuple


def worker_count(default=None):
    """Thread cap from ``FADECAP_THREADS`` (at least one)."""
    env = os.environ.get("FADECAP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return default or min(8, os.cpu_count() or 1)


def _ordered_map(func, items, workers=None):
    items = list(items)
    workers = worker_count(workers)
    if workers == 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def square_setup(spread, tf):
    """Pulse, matched square grid and support half-side for a square support of area ``spread``."""
    pulse = PulseSpec(tf)
    return pulse, matched_grid(pulse), math.sqrt(spread) / 2.0


def ratio_function(spread, eps, tf):
    """``rho_db -> (lower bound, upper bound, gamma_opt)`` with the worst-case statistics cached."""
    pulse, grid, half = square_setup(spread, tf)
    stats = extremal_sir(pulse, grid, half, half)

    def evaluate(snr_db):
        rho = 10.0 ** (snr_db / 10.0)
        lb = lower_bound_cor2(pulse, grid, rho, half, half, eps, stats)
        ub = float(awgn_upper_approx(1.0, rho, eps))
        return lb.value, ub, lb.gamma_opt

    return evaluate


def snr_range(spread, eps, tf=1.02, threshold=0.75, lo_db=-40.0, hi_db=80.0, step_db=0.25, tol_db=0.01):
    """Outermost SNR interval (dB) where the bound ratio reaches ``threshold``, or ``None``.

    The ratio is scanned at ``step_db`` and every crossing of the threshold
    is bisected to ``tol_db``. All crossings are reported.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must lie in (0, 1]")
    evaluate = ratio_function(spread, eps, tf)

    def excess(snr_db):
        lb, ub, _ = evaluate(snr_db)
        return lb / ub - threshold

    dbs = np.arange(0, int(round((hi_db - lo_db) / step_db)) + 1) * step_db + lo_db
    vals = np.array([excess(d) for d in dbs])
    above = vals >= 0
    if not np.any(above):
        return None
    crossings = []
    for i in np.nonzero(above[1:] != above[:-1])[0]:
        root = optimize.bisect(excess, dbs[i], dbs[i + 1], xtol=tol_db)
        crossings.append(float(root))
    first, last = np.nonzero(above)[0][[0, -1]]
    lo = lo_db if first == 0 else crossings[0]
    hi = hi_db if last == len(dbs) - 1 else crossings[-1]
    return SNRRange(float(lo), float(hi), tuple(crossings))


def sweep_ratio(spec, workers=None):
    """Rows ``(tf, delta_h, epsilon, snr_db, lb_nat, ub_nat, ratio, gamma_opt)`` in grid order.

    Points that fail produce a row with NaN values and an ``error`` entry.
    """
    cases = [(tf, dh, e) for tf in spec.tf for dh in spec.spreads for e in spec.eps]

    def run(case):
        tf, dh, e = case
        rows = []
        try:
            evaluate = ratio_function(dh, e, tf)
        except Exception as exc:  # recorded per row, the sweep continues
            return [dict(zip(RATIO_COLUMNS, (tf, dh, e, s) + (math.nan,) * 4), error=str(exc))
                    for s in spec.snr_db]
        for s in spec.snr_db:
            try:
                lb, ub, g = evaluate(s)
                rows.append(dict(zip(RATIO_COLUMNS, (tf, dh, e, s, lb, ub, lb / ub, g)), error=""))
            except Exception as exc:
                rows.append(dict(zip(RATIO_COLUMNS, (tf, dh, e, s) + (math.nan,) * 4), error=str(exc)))
        return rows

    return [row for block in _ordered_map(run, cases, workers) for row in block]


def sir_tradeoff(tf_list, spread, workers=None):
    """Rows ``(tf, delta_h, m_g, M_g, sir)`` for the square support of area ``spread``."""

    def run(tf):
        pulse, grid, half = square_setup(spread, tf)
        ext = extremal_sir(pulse, grid, half, half)
        return dict(zip(SIR_COLUMNS, (tf, spread, ext.m_g, ext.M_g, ext.m_g / ext.M_g)), error="")

    return _ordered_map(run, [float(t) for t in tf_list], workers)


def range_map(spreads, eps_list, tf=1.02, threshold=0.75, workers=None):
    """Rows ``(delta_h, epsilon, snr_min_db, snr_max_db)``; NaN where the threshold is never met."""
    cases = [(dh, e) for dh in spreads for e in eps_list]

    def run(case):
        dh, e = case
        rng = snr_range(dh, e, tf, threshold)
        lo, hi = (math.nan, math.nan) if rng is None else (rng.lo_db, rng.hi_db)
        return dict(zip(RANGE_COLUMNS, (dh, e, lo, hi)), error="")

    return _ordered_map(run, cases, workers)


DEFAULT_SPREADS = tuple(np.logspace(-7, -3, 7))
DEFAULT_EPS = tuple(np.logspace(-8, -2, 7))

FIGURES = {
    "2a": {"kind": "ratio", "tf": (1.0, 1.02, 1.2, 1.5), "spreads": (1e-4,), "eps": (1e-6,),
           "snr_db": tuple(np.arange(-20.0, 60.0 + 1e-9, 2.5))},
    "2b": {"kind": "ratio", "tf": (1.0, 1.02, 1.2, 1.5), "spreads": (1e-6,), "eps": (1e-6,),
           "snr_db": tuple(np.arange(-20.0, 60.0 + 1e-9, 2.5))},
    "3": {"kind": "sir", "tf": (1.0, 1.005, 1.01, 1.02, 1.05, 1.1, 1.2, 1.3, 1.4, 1.5),
          "spreads": (1e-6, 1e-4)},
    "4": {"kind": "range", "tf": (1.02,), "spreads": DEFAULT_SPREADS, "eps": DEFAULT_EPS},
    "5": {"kind": "range", "tf": (1.02,), "spreads": DEFAULT_SPREADS, "eps": DEFAULT_EPS},
}
