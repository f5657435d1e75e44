"""Radial ODE integrator against its closed-form members.

a = 0 has the exact solution v1 = 2*log(1 - r1^2/8) (checked by substitution:
v1'' + v1'/r1 = -1/(1 - r1^2/8)^2 = -exp(-v1)), diverging at r1 = 2*sqrt(2);
a = -1/4 has v1 = -r1^2/4 exactly.
"""

import math

import numpy as np
import pytest

from vortexeq.liouville import (
    BlowUpError,
    integrate_family,
    _quartic_coeff,
)

BARRIER = 2.0 * math.sqrt(2.0)


def exact_a0(r):
    r = np.asarray(r, dtype=float)
    return 2.0 * np.log(1.0 - r**2 / 8.0)


def exact_a0_deriv(r):
    r = np.asarray(r, dtype=float)
    return -0.5 * r / (1.0 - r**2 / 8.0)


def test_a0_oracle_value_and_slope_at_2():
    profile = integrate_family(0.0, 2.0, tol=1e-10)
    v, vp = profile.evaluate(2.0)
    assert v == pytest.approx(2.0 * math.log(0.5), abs=1e-8)
    assert vp == pytest.approx(-2.0, abs=1e-8)


def test_a0_oracle_dense():
    profile = integrate_family(0.0, 2.5, tol=1e-10)
    r = np.linspace(0.0, 2.5, 1000)
    v, _ = profile.evaluate(r)
    assert np.max(np.abs(v - exact_a0(r))) <= 1e-8


def test_exact_quarter_family_preserved():
    profile = integrate_family(-0.25, 4.0, tol=1e-10)
    r = np.linspace(0.0, 4.0, 1000)
    v, vp = profile.evaluate(r)
    assert np.max(np.abs(v + r**2 / 4.0)) <= 1e-8
    assert np.max(np.abs(vp + r / 2.0)) <= 1e-8


@pytest.mark.parametrize("a", [-5.0, -1.0, -0.25, 0.0])
def test_origin_curvature_limit(a):
    # the ODE forces v1''(0) = -1/2 for every a
    profile = integrate_family(a, 1.0, tol=1e-12)
    h = 1e-4
    _, vp = profile.evaluate(h)
    assert vp / h == pytest.approx(-0.5, abs=1e-4)


def test_blowup_at_a0_barrier():
    with pytest.raises(BlowUpError) as exc_info:
        integrate_family(0.0, 3.0, tol=1e-10)
    assert exc_info.value.r_reached < BARRIER
    assert exc_info.value.r_reached > 2.7  # the cap fires close to the barrier


def test_monotonicity_across_a():
    rng = np.random.default_rng(11)
    for a in rng.uniform(-5.0, 0.0, size=12):
        profile = integrate_family(float(a), 3.0 if a < -0.1 else 2.0, tol=1e-8)
        r = np.linspace(1e-6, profile.r_max, 400)
        v, vp = profile.evaluate(r)
        assert np.all(vp < 0)
        assert np.all(np.diff(v) < 0)


def test_ode_residual_at_dense_points():
    # finite-difference d(v1')/dr1 against the right-hand side
    tol = 1e-10
    for a in (-0.7, -0.25, 0.0):
        profile = integrate_family(a, 2.0, tol=tol)
        r = np.linspace(0.05, 1.95, 77)
        h = 1e-5
        _, vp_plus = profile.evaluate(r + h)
        _, vp_minus = profile.evaluate(r - h)
        v, vp = profile.evaluate(r)
        vpp_fd = (vp_plus - vp_minus) / (2 * h)
        rhs = -vp / r - np.exp(-v + a * r**2)
        scale = np.maximum(1.0, np.abs(rhs))
        assert np.max(np.abs(vpp_fd - rhs) / scale) <= 100 * tol + 1e-9


def test_convergence_order_against_oracle():
    # global error vs mean accepted step should scale near the nominal order
    tols = [1e-6, 1e-8, 1e-10]
    errs, steps = [], []
    r_probe = np.linspace(0.1, 2.4, 200)
    for tol in tols:
        profile = integrate_family(0.0, 2.4, tol=tol)
        v, _ = profile.evaluate(r_probe)
        errs.append(np.max(np.abs(v - exact_a0(r_probe))))
        steps.append(profile.r_max / (len(profile.r1) - 1))
    errs, steps = np.log(errs), np.log(steps)
    order = np.polyfit(steps, errs, 1)[0]
    assert np.all(np.diff(errs) < 0)  # tighter tol reduces error
    assert 3.5 <= order <= 6.5


def test_positive_a_accepted():
    profile = integrate_family(0.5, 1.0, tol=1e-10)
    v, vp = profile.evaluate(1.0)
    assert vp < 0 and v < 0


def test_profile_evaluate_bounds_and_origin():
    profile = integrate_family(-0.5, 2.0, tol=1e-10)
    v0, vp0 = profile.evaluate(0.0)
    assert v0 == 0.0 and vp0 == 0.0
    with pytest.raises(ValueError):
        profile.evaluate(2.5)
    with pytest.raises(ValueError):
        profile.evaluate(-0.1)


def test_series_dense_handoff_is_smooth():
    profile = integrate_family(-0.6, 1.0, tol=1e-10)
    r_cut = profile._r_series
    below, _ = profile.evaluate(r_cut * 0.999999)
    above, _ = profile.evaluate(min(r_cut * 1.000001, profile.r_max))
    assert below == pytest.approx(above, abs=1e-10)


def test_tolerance_validation():
    with pytest.raises(ValueError):
        integrate_family(0.0, 1.0, tol=1e-3)
    with pytest.raises(ValueError):
        integrate_family(0.0, 1.0, tol=1e-15)
    with pytest.raises(ValueError):
        integrate_family(0.0, -1.0)


def test_quartic_series_coefficient():
    # v1 = -r^2/4 - ((a + 1/4)/16) r^4 + O(r^6): at a = -1/4 the quartic dies
    assert _quartic_coeff(-0.25) == 0.0
    assert _quartic_coeff(0.0) == pytest.approx(-1.0 / 64.0)


def test_profile_csv(tmp_path):
    profile = integrate_family(-0.25, 1.0, tol=1e-10)
    path = tmp_path / "profile.csv"
    profile.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == "r1,v1,v1p"
    first = lines[2].split(",")
    assert [float(x) for x in first] == [0.0, 0.0, 0.0]
    r, v, vp = (float(x) for x in lines[-1].split(","))
    assert r == pytest.approx(1.0)
    assert v == pytest.approx(-0.25, abs=1e-9)
