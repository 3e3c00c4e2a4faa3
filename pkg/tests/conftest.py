import numpy as np
import pytest
from scipy import integrate

from fadecap.pulse import PulseSpec, eval_freq, matched_grid


@pytest.fixture(scope="session")
def pulse():
    return PulseSpec(1.02)


@pytest.fixture(scope="session")
def grid(pulse):
    return matched_grid(pulse)


def quad_ambiguity(p, tau, nu):
    """Reference ambiguity value by adaptive scipy quadrature of the frequency integral."""
    edge = p.band_edge
    brk = [-p.flat_edge, p.flat_edge, -p.flat_edge - nu, p.flat_edge - nu]
    brk = sorted(b for b in brk if -edge < b < edge)

    def part(trig):
        f = lambda x: eval_freq(p, x + nu) * eval_freq(p, x) * trig(2 * np.pi * x * tau)
        return integrate.quad(f, -edge, edge, points=brk, limit=400, epsabs=1e-14, epsrel=1e-13)[0]

    return part(np.cos) + 1j * part(np.sin)


def brute_lattice_tail(amb, p, g, tau, nu, k_max, n_max):
    """Direct sum of |A(tau - kT, nu - nF)|**2 over |k| <= k_max, |n| <= n_max, origin excluded."""
    ks = np.arange(-k_max, k_max + 1)
    total = 0.0
    for n in range(-n_max, n_max + 1):
        vals = np.abs(amb(p, tau - ks * g.T, nu - n * g.F)) ** 2
        if n == 0:
            vals[k_max] = 0.0
        total += np.sum(vals)
    return total


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
