import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fadecap.bounds import (GAMMA_HI, GAMMA_LO, _gamma_seeds, approx_lb, awgn_upper, awgn_upper_approx,
                            expected_log, lower_bound_cor2, lower_bound_thm1, minimize_gamma, rule_of_thumb)
from fadecap.errors import PreconditionError
from fadecap.pulse import PulseSpec, WHGrid, matched_grid
from fadecap.scattering import BrickRect, TwoLevelBrick

HALF4 = 5e-3  # half side of the square support with Delta_H = 1e-4


def mp_expected_log(a):
    x = mpmath.mpf(1) / mpmath.mpf(a)
    with mpmath.workdps(40):
        return float(mpmath.exp(x) * mpmath.e1(x))


def test_awgn_zero_power():
    assert awgn_upper(1.0, 0.0, 1e-3) == 0.0


def test_awgn_shannon_limit():
    assert awgn_upper(2.0, 6.0, 0.0) == pytest.approx(2.0 * math.log(4.0), rel=1e-15)


@pytest.mark.parametrize("rho", [0.1, 1.0, 10.0, 1e3])
def test_awgn_approximation_for_small_doppler(rho):
    exact = awgn_upper(1.0, rho, 1e-5, 0.0, 1e-6)
    assert float(awgn_upper_approx(1.0, rho, 1e-6)) == pytest.approx(exact, rel=1e-3)


def test_awgn_rejects_bad_inputs():
    with pytest.raises(ValueError):
        awgn_upper(1.0, -1.0, 0.0)
    with pytest.raises(ValueError):
        awgn_upper(1.0, 1.0, 0.0, eta=1.0)


def test_expected_log_at_one():
    assert expected_log(1.0) == pytest.approx(0.596347362323194, rel=1e-14)


def test_expected_log_zero():
    assert expected_log(0.0) == 0.0
    with pytest.raises(ValueError):
        expected_log(-1.0)


@pytest.mark.parametrize("a", np.logspace(-6, 6, 25))
def test_expected_log_matches_high_precision(a):
    assert expected_log(a) == pytest.approx(mp_expected_log(a), rel=1e-13)


@settings(max_examples=100, deadline=None)
@given(a=st.floats(1e-8, 1e8))
def test_expected_log_below_jensen(a):
    assert expected_log(a) <= math.log1p(a) * (1 + 1e-14)


def test_expected_log_monotone():
    vals = expected_log(np.logspace(-8, 8, 400))
    assert np.all(np.diff(vals) > 0)


def test_expected_log_vectorized_shape():
    out = expected_log(np.array([[0.0, 1.0], [10.0, 1e-3]]))
    assert out.shape == (2, 2)


def test_gamma_search_beats_scan():
    objective = lambda g: (g - 0.3137) ** 2 + 0.01 / g
    g_opt, v_opt = minimize_gamma(objective)
    assert GAMMA_LO <= g_opt <= GAMMA_HI
    assert v_opt <= min(objective(g) for g in _gamma_seeds()) + 1e-15


@settings(max_examples=30, deadline=None)
@given(a=st.floats(1e-3, 1e3), b=st.floats(1e-3, 1e3))
def test_gamma_search_convex_two_term(a, b):
    objective = lambda g: math.log1p(a / g) + math.log1p(b / (1 - g))
    _, v_opt = minimize_gamma(objective)
    fine = np.linspace(1e-4, 1 - 1e-4, 2001)
    assert v_opt <= min(objective(g) for g in fine) + 1e-9


def test_cor2_zero_snr(pulse, grid):
    res = lower_bound_cor2(pulse, grid, 0.0, HALF4, HALF4, 1e-6)
    assert res.value == 0.0
    assert res.terms == (0.0, 0.0, 0.0)


def test_cor2_decomposition(pulse, grid):
    res = lower_bound_cor2(pulse, grid, 10.0, HALF4, HALF4, 1e-6)
    assert res.value == pytest.approx(res.coherent_term - res.logdet_penalty - res.interference_penalty,
                                      abs=1e-15)
    assert res.clamped_value == res.value > 0


def test_cor2_plateau_ratio(pulse, grid):
    res = lower_bound_cor2(pulse, grid, 10.0, HALF4, HALF4, 1e-6)
    assert res.value / float(awgn_upper_approx(1.0, 10.0, 1e-6)) >= 0.75


@pytest.mark.parametrize("beta", [10.0, 1e3, 1e-2])
def test_cor2_invariant_under_dilation(beta):
    base = PulseSpec(1.02)
    ref = lower_bound_cor2(base, matched_grid(base), 10.0, HALF4, HALF4, 1e-6).value
    p = base.dilated(beta)
    val = lower_bound_cor2(p, matched_grid(p), 10.0, HALF4 / beta, HALF4 * beta, 1e-6).value
    assert val == pytest.approx(ref, rel=1e-9)


def test_cor2_non_increasing_in_eps(pulse, grid):
    vals = [lower_bound_cor2(pulse, grid, 100.0, HALF4, HALF4, e).value for e in (0.0, 1e-8, 1e-6, 1e-4, 1e-2)]
    assert np.all(np.diff(vals) <= 1e-15)


def test_cor2_requires_orthonormal_grid(pulse):
    with pytest.raises(PreconditionError):
        lower_bound_cor2(pulse, WHGrid(1.0, 1.0), 10.0, HALF4, HALF4, 1e-6)


def test_cor2_requires_small_doppler(pulse, grid):
    with pytest.raises(PreconditionError):
        lower_bound_cor2(pulse, grid, 10.0, 1e-3, 0.6, 1e-6)


def test_cor2_rejects_bad_eps(pulse, grid):
    with pytest.raises(ValueError):
        lower_bound_cor2(pulse, grid, 10.0, HALF4, HALF4, 1.0)


def _thm1_cases():
    models = [BrickRect(HALF4, HALF4), BrickRect(5e-4, 5e-4),
              TwoLevelBrick(HALF4, HALF4, 1e-3, 2 * HALF4, 2 * HALF4)]
    return [(m, n, snr) for m in models for n in (4, 8, 16) for snr in (-10.0, 10.0, 30.0)]


@pytest.mark.slow
@pytest.mark.parametrize("model,n_sub,snr_db", _thm1_cases())
def test_bound_ordering(pulse, grid, model, n_sub, snr_db):
    rho = 10 ** (snr_db / 10)
    tau0, nu0 = model.tau0, model.nu0
    eps = model.leakage(tau0, nu0)
    cor2 = lower_bound_cor2(pulse, grid, rho, tau0, nu0, eps).value
    thm1 = lower_bound_thm1(pulse, grid, model, rho, n_sub).value
    upper = awgn_upper(1.0, rho, nu0, 0.0, eps)
    assert cor2 <= thm1 + 1e-9
    assert thm1 <= upper + 1e-9


def test_thm1_grows_with_subcarriers(pulse, grid):
    model = BrickRect(HALF4, HALF4)
    vals = [lower_bound_thm1(pulse, grid, model, 10.0, n).value for n in (4, 8, 16)]
    assert vals[0] < vals[1] < vals[2]
    # frozen values: the penalty decays slowly in the block length
    assert vals[0] == pytest.approx(1.96344, abs=2e-5)
    assert vals[2] == pytest.approx(1.97864, abs=2e-5)


def test_thm1_zero_snr(pulse, grid):
    assert lower_bound_thm1(pulse, grid, BrickRect(HALF4, HALF4), 0.0, 4).value == 0.0


def test_thm1_rejects_bad_block(pulse, grid):
    with pytest.raises(ValueError):
        lower_bound_thm1(pulse, grid, BrickRect(HALF4, HALF4), 1.0, 0)


@pytest.mark.parametrize("snr_db", [-10.0, 0.0, 10.0, 20.0])
def test_approximation_tracks_cor2(pulse, grid, snr_db):
    # intended regime: rho * Delta_H << 1
    rho = 10 ** (snr_db / 10)
    exact = lower_bound_cor2(pulse, grid, rho, HALF4, HALF4, 0.0).value
    assert float(approx_lb(rho, 1e-4)) == pytest.approx(exact, rel=0.1)


def test_rule_of_thumb_examples():
    lo, hi = rule_of_thumb(1e-4, 1e-6)
    assert lo == pytest.approx(1e-2)
    assert hi == pytest.approx(1 / (1e-4 + 1e-6))
    with pytest.raises(ValueError):
        rule_of_thumb(0.0, 0.0)
