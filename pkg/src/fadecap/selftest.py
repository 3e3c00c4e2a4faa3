"""Fast invariant checks behind ``fadecap selftest``."""

import numpy as np
from scipy.special import roots_laguerre

from .ambiguity import ambiguity, ambiguity_lattice_tail
from .bounds import expected_log, lower_bound_cor2
from .channel_stats import sigma_g2, sigma_I2
from .pulse import PulseSpec, matched_grid, pulse_for_grid, tight_frame_residual
from .scattering import BrickRect, canonical_square, grid_match


def _check(name, func):
    try:
        ok, detail = func()
    except Exception as exc:  # a crashing check is a failing check
        return name, False, f"{type(exc).__name__}: {exc}"
    return name, bool(ok), detail


def run_checks(force_failure=False, seed=0):
    rng = np.random.default_rng(seed)
    pulse = PulseSpec(1.02)
    grid = matched_grid(pulse)

    def amb_bound():
        tau = rng.uniform(-3, 3, 2000)
        nu = rng.uniform(-1.2, 1.2, 2000)
        peak = float(np.max(np.abs(ambiguity(pulse, tau, nu))))
        return peak <= 1 + 1e-12, f"max |A| = {peak:.12f}"

    def lattice_zeros():
        k, n = np.meshgrid(np.arange(-5, 6), np.arange(-5, 6), indexing="ij")
        mask = (k != 0) | (n != 0)
        worst = float(np.max(np.abs(ambiguity(pulse, k[mask] * grid.T, n[mask] * grid.F))))
        return worst < 1e-8, f"max |A(kT, nF)| = {worst:.2e}"

    def dilation():
        beta = 2.0
        tau, nu = rng.uniform(-1, 1, 100), rng.uniform(-0.5, 0.5, 100)
        err = float(np.max(np.abs(ambiguity(pulse.dilated(beta), tau, nu) - ambiguity(pulse, beta * tau, nu / beta))))
        return err < 1e-9, f"max deviation {err:.2e}"

    def tight_frame():
        worst = 0.0
        for tf in (1.02, 1.5):
            f = np.linspace(-1, 1, 1000)
            worst = max(worst, float(np.max(np.abs(tight_frame_residual(PulseSpec(tf), 0, f)))))
        return worst < 1e-9, f"max residual {worst:.2e}"

    def bessel():
        model = BrickRect(5e-3, 5e-3)
        total = sigma_g2(pulse, grid, model) + sigma_I2(pulse, grid, model)
        tail = float(np.max(ambiguity_lattice_tail(pulse, grid, rng.uniform(-0.5, 0.5, 200),
                                                   rng.uniform(-0.5, 0.5, 200))))
        return total <= 1 + 1e-8 and tail <= 1 + 1e-8, f"sigma_g2 + sigma_I2 = {total:.12f}, max S_g = {tail:.6f}"

    def grid_matching():
        tau0, nu0, eps, rho = 5e-4, 5e-2, 1e-6, 10.0
        g = grid_match(tau0, nu0, 1.02)
        general = lower_bound_cor2(pulse_for_grid(1.02, g), g, rho, tau0, nu0, eps).value
        _, sq, half = canonical_square(BrickRect(tau0, nu0), g, tau0, nu0)
        square = lower_bound_cor2(PulseSpec(1.02), sq, rho, half, half, eps).value
        rel = abs(general - square) / abs(square)
        return rel < 1e-9, f"relative deviation {rel:.2e}"

    def elog():
        x, w = roots_laguerre(200)
        worst = 0.0
        for a in (1e-2, 0.1, 1.0, 10.0):
            ref = float(np.sum(w * np.log1p(a * x)))
            worst = max(worst, abs(expected_log(a) - ref) / ref)
        return worst < 1e-8, f"max relative deviation {worst:.2e}"

    checks = [("ambiguity bounded by one", amb_bound), ("lattice zeros", lattice_zeros),
              ("dilation identity", dilation), ("tight frame", tight_frame),
              ("Bessel bound", bessel), ("grid-matching invariance", grid_matching),
              ("expected log vs Gauss-Laguerre", elog)]
    results = [_check(name, func) for name, func in checks]
    if force_failure:
        results.append(("forced failure", False, "requested by caller"))
    return results
