"""z sweeps: specific heat signs, metastable intervals, monotonicity."""

import numpy as np
import pytest

from vortexeq.model import ModelParams
from vortexeq.sweep import (
    EmptySweepError,
    SWEEP_CSV_HEADER,
    detect_metastable,
    monotonicity_report,
    run_sweep,
)

UNIT = ModelParams()


@pytest.fixture(scope="module")
def sweep_075():
    return run_sweep(0.75, 0.5, 3.0, 26, UNIT)


@pytest.fixture(scope="module")
def sweep_025():
    return run_sweep(0.25, 0.5, 3.0, 26, UNIT)


def test_balance_family_has_zero_cv():
    table = run_sweep(0.5, 0.5, 3.0, 26, UNIT)
    interior = table.cv[1:-1]
    assert np.all(np.isfinite(interior))
    assert np.max(np.abs(interior)) <= 1e-6
    assert np.isnan(table.cv[0]) and np.isnan(table.cv[-1])


def test_mu0_constant_energy_zero_cv():
    table = run_sweep(0.0, 0.5, 2.5, 21, UNIT)
    assert np.max(np.abs(table.cv[1:-1])) <= 1e-6


def test_strong_rotation_all_negative(sweep_075):
    interior = sweep_075.cv[1:-1]
    assert np.all(np.isfinite(interior))
    assert np.all(interior < 0)
    (lo, hi), = sweep_075.metastable_intervals
    assert lo == pytest.approx(0.6)
    assert hi == pytest.approx(2.9)


def test_weak_rotation_all_positive(sweep_025):
    interior = sweep_025.cv[1:-1]
    assert np.all(interior > 0)
    assert sweep_025.metastable_intervals == []


def test_detect_metastable_runs(sweep_075):
    intervals = detect_metastable(sweep_075)
    assert len(intervals) == 1
    lo, hi = intervals[0]
    assert lo == pytest.approx(sweep_075.z_grid[1])
    assert hi == pytest.approx(sweep_075.z_grid[-2])


def test_monotonicity_strong_rotation(sweep_075):
    rep = monotonicity_report(sweep_075)
    assert rep.t_strictly_decreasing
    assert rep.e_strictly_increasing
    assert np.all(rep.dT_sign == -1)


def test_monotonicity_weak_rotation(sweep_025):
    rep = monotonicity_report(sweep_025)
    assert rep.t_strictly_decreasing
    assert not rep.e_strictly_increasing
    assert np.all(rep.dE_sign == -1)


def test_monotonicity_balance_family_rho0_flat():
    table = run_sweep(0.5, 0.5, 3.0, 16, UNIT)
    rep = monotonicity_report(table)
    assert np.all(rep.drho0_sign == 0)
    assert not rep.rho0_strictly_decreasing


def test_monotonicity_mu0():
    table = run_sweep(0.0, 0.5, 2.5, 16, UNIT)
    rep = monotonicity_report(table)
    assert rep.t_strictly_decreasing
    assert np.all(rep.dE_sign == 0)  # E constant on the mu=0 family
    assert rep.rho0_strictly_decreasing


def test_sign_consistency_cv(sweep_075, sweep_025):
    # c_v < 0 iff dE/dz and dT/dz have opposite signs
    for table in (sweep_075, sweep_025):
        rep = monotonicity_report(table)
        for cv, de, dt in zip(table.cv[1:-1], rep.dE_sign, rep.dT_sign):
            if np.isfinite(cv) and de != 0 and dt != 0:
                assert (cv < 0) == (de * dt < 0)


def test_grid_refinement_stability():
    coarse = run_sweep(0.75, 0.5, 3.0, 26, UNIT)
    fine = run_sweep(0.75, 0.5, 3.0, 51, UNIT)
    # every coarse node is a fine node; compare cv where both are defined
    for i in range(1, 25):
        j = 2 * i
        c, f = coarse.cv[i], fine.cv[j]
        assert np.isfinite(c) and np.isfinite(f)
        assert abs(c - f) <= 0.05 * abs(c)


def test_gaps_preserved_for_unreachable_nodes():
    # mu=0 cannot pass the barrier at 2*sqrt(2) ~ 2.8284
    table = run_sweep(0.0, 2.0, 3.2, 13, UNIT)
    assert any(s == "unreachable" for s in table.status)
    assert any(s == "ok" for s in table.status)
    for pt, status in zip(table.points, table.status):
        assert (pt is None) == (status != "ok")
    # cv undefined next to a gap
    first_gap = table.status.index("unreachable")
    assert np.isnan(table.cv[first_gap - 1])


def test_fully_empty_sweep_raises():
    with pytest.raises(EmptySweepError):
        run_sweep(0.0, 2.9, 3.2, 4, UNIT)


def test_parallel_matches_sequential():
    seq = run_sweep(0.6, 0.8, 2.0, 7, UNIT)
    par = run_sweep(0.6, 0.8, 2.0, 7, UNIT, workers=2)
    for a, b in zip(seq.points, par.points):
        assert a.energy == pytest.approx(b.energy, abs=1e-10)
        assert a.a == pytest.approx(b.a, abs=1e-10)


def test_sweep_csv(tmp_path):
    table = run_sweep(0.0, 2.0, 3.2, 7, UNIT)
    path = tmp_path / "sweep.csv"
    table.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "# vortexeq-csv v1 sweep"
    assert lines[1] == SWEEP_CSV_HEADER
    assert len(lines) == 2 + 7
    ok_row = lines[2].split(",")
    assert ok_row[-1] == "ok"
    gap_rows = [ln for ln in lines[2:] if ln.endswith("unreachable")]
    assert gap_rows and gap_rows[0].split(",")[2] == "nan"


def test_input_validation():
    with pytest.raises(ValueError):
        run_sweep(0.5, 2.0, 1.0, 5, UNIT)
    with pytest.raises(ValueError):
        run_sweep(0.5, 0.5, 3.0, 2, UNIT)
