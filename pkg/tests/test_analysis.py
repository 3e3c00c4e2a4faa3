import math

import numpy as np
import pytest

from fadecap.analysis import (FIGURES, RATIO_COLUMNS, SweepSpec, range_map, sir_tradeoff, snr_range,
                              sweep_ratio, worker_count)
from fadecap.bounds import awgn_upper_approx, lower_bound_cor2
from fadecap.channel_stats import taylor_constants
from fadecap.pulse import PulseSpec, matched_grid


def test_range_example():
    rng = snr_range(1e-4, 1e-6)
    assert -25 <= rng.lo_db <= -7
    assert 30 <= rng.hi_db <= 68
    assert rng.crossings == (rng.lo_db, rng.hi_db)


def test_range_empty_at_full_threshold():
    assert snr_range(1e-4, 1e-6, threshold=1.0) is None


def test_range_rejects_bad_threshold():
    with pytest.raises(ValueError):
        snr_range(1e-4, 1e-6, threshold=0.0)


def test_range_upper_edge_shrinks_with_leakage():
    assert snr_range(1e-6, 1e-8).hi_db >= snr_range(1e-6, 1e-4).hi_db


def test_range_nested_in_threshold():
    loose = snr_range(1e-5, 1e-6, threshold=0.6)
    tight = snr_range(1e-5, 1e-6, threshold=0.8)
    assert loose.lo_db <= tight.lo_db
    assert loose.hi_db >= tight.hi_db


def test_range_resolution_invariant():
    coarse = snr_range(1e-4, 1e-6)
    fine = snr_range(1e-4, 1e-6, step_db=0.125)
    assert abs(coarse.lo_db - fine.lo_db) < 0.05
    assert abs(coarse.hi_db - fine.hi_db) < 0.05


def test_range_deterministic():
    assert snr_range(1e-5, 1e-7) == snr_range(1e-5, 1e-7)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(snr_db=(10.0, 0.0))
    with pytest.raises(ValueError):
        SweepSpec(snr_db=())
    with pytest.raises(ValueError):
        SweepSpec(snr_db=(0.0,), threshold=1.5)


def test_sweep_prefers_slightly_larger_tf():
    rows = sweep_ratio(SweepSpec(snr_db=(10.0,), tf=(1.0, 1.02), spreads=(1e-4,)))
    by_tf = {r["tf"]: r["ratio"] for r in rows}
    assert by_tf[1.02] > by_tf[1.0]


def test_sweep_row_order_and_columns():
    spec = SweepSpec(snr_db=(-10.0, 0.0, 10.0), tf=(1.02, 1.2), spreads=(1e-6, 1e-4), eps=(1e-6,))
    rows = sweep_ratio(spec)
    assert len(rows) == 12
    assert all(tuple(r)[:len(RATIO_COLUMNS)] == RATIO_COLUMNS for r in rows)
    keys = [(r["tf"], r["delta_h"], r["snr_db"]) for r in rows]
    assert keys == sorted(keys)


def test_sweep_spot_row_matches_bounds():
    row = sweep_ratio(SweepSpec(snr_db=(15.0,), tf=(1.2,), spreads=(1e-5,), eps=(1e-7,)))[0]
    p = PulseSpec(1.2)
    half = math.sqrt(1e-5) / 2
    rho = 10 ** 1.5
    lb = lower_bound_cor2(p, matched_grid(p), rho, half, half, 1e-7).value
    ub = float(awgn_upper_approx(1.0, rho, 1e-7))
    assert abs(row["ratio"] - lb / ub) < 1e-12


def test_sweep_low_snr_vanishes():
    row = sweep_ratio(SweepSpec(snr_db=(-40.0,)))[0]
    # the raw bound may dip slightly below zero; it stays bounded
    assert abs(row["lb_nat"]) < 1e-3
    assert abs(row["ratio"]) <= 1


def test_sweep_records_failures_as_rows():
    # 2 nu0 T >= 1 violates the precondition of the bound
    rows = sweep_ratio(SweepSpec(snr_db=(0.0, 10.0), spreads=(4.0,)))
    assert len(rows) == 2
    assert all(r["error"] and math.isnan(r["ratio"]) for r in rows)


def test_sweep_threads_do_not_change_rows(monkeypatch):
    spec = SweepSpec(snr_db=(0.0, 20.0), tf=(1.02, 1.5), spreads=(1e-5,))
    monkeypatch.setenv("FADECAP_THREADS", "1")
    serial = sweep_ratio(spec)
    monkeypatch.setenv("FADECAP_THREADS", "4")
    assert sweep_ratio(spec) == serial


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("FADECAP_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("FADECAP_THREADS", "0")
    assert worker_count() == 1


def test_sir_improves_above_unit_tf():
    rows = sir_tradeoff([1.005, 1.02], 1e-4)
    assert rows[1]["sir"] > rows[0]["sir"]


def test_sir_improves_with_smaller_spread():
    small = sir_tradeoff([1.02], 1e-6)[0]
    large = sir_tradeoff([1.02], 1e-4)[0]
    assert small["m_g"] > large["m_g"]
    assert small["M_g"] < large["M_g"]
    assert small["sir"] > large["sir"]


def test_sir_linearized_form_at_small_spread():
    p = PulseSpec(1.02)
    c_m, c_big = taylor_constants(p, matched_grid(p))
    row = sir_tradeoff([1.02], 1e-6)[0]
    assert row["sir"] == pytest.approx((1 - c_m * 1e-6) / (c_big * 1e-6), rel=0.05)


def test_range_map_shape_and_nan_policy():
    rows = range_map((1e-5, 1e-3), (1e-6,))
    assert [r["delta_h"] for r in rows] == [1e-5, 1e-3]
    assert all(math.isnan(r["snr_min_db"]) == math.isnan(r["snr_max_db"]) for r in rows)
    assert not math.isnan(rows[0]["snr_min_db"])


def test_figure_presets_are_valid():
    for fig, preset in FIGURES.items():
        assert preset["kind"] in {"ratio", "sir", "range"}
        assert np.all(np.diff(preset["spreads"]) > 0)
