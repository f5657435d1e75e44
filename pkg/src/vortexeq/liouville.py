"""Radial Liouville-type ODE family with a harmonic source modulation.

Integrates

    v1'' + v1'/r1 + exp(-v1 + a*r1**2) = 0,     v1(0) = v1'(0) = 0,

outward from the regular origin. The source parameter ``a`` couples the
family to the self-consistency condition resolved in
:mod:`vortexeq.selfconsistent`; here it is a free parameter.

Two members have closed forms used as oracles throughout the test suite:
a = 0 gives v1 = 2*log(1 - r1**2/8) (diverging at r1 = 2*sqrt(2)) and
a = -1/4 gives v1 = -r1**2/4 exactly.

The origin is a regular singular point (the 1/r1 term), handled by the
series v1 = -r1**2/4 - ((a + 1/4)/16) r1**4 + O(r1**6) up to a small start
radius, then an adaptive embedded Runge-Kutta 5(4) pair. Dense output uses
quintic Hermite interpolation between accepted nodes, with second and third
derivatives evaluated exactly from the right-hand side, so the dense
residual stays well below the integration tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

TOL_MIN = 1e-14
TOL_MAX = 1e-4
# declare blow-up once the source term reaches this value
SOURCE_CAP = 1e12
_LN_SOURCE_CAP = float(np.log(SOURCE_CAP))
# start radius for the series expansion is capped here
R_START_MAX = 1e-2
_EXP_GUARD = 700.0  # keep exp finite during trial steps past the blow-up event


class BlowUpError(RuntimeError):
    """The solution cannot be continued to the requested radius."""

    def __init__(self, r_reached: float, a: float):
        self.r_reached = float(r_reached)
        self.a = float(a)
        super().__init__(
            f"solution blows up near r1={r_reached:.6g} (a={a:.6g}), "
            "before the requested end radius"
        )


class ToleranceFailureError(RuntimeError):
    """Step-size control failed before reaching the end radius."""


def _quartic_coeff(a: float) -> float:
    return -(a + 0.25) / 16.0


def _series_eval(a: float, r1):
    """Origin series: value and derivative, valid for small r1."""
    c4 = _quartic_coeff(a)
    r1 = np.asarray(r1, dtype=float)
    v = -0.25 * r1**2 + c4 * r1**4
    vp = -0.5 * r1 + 4.0 * c4 * r1**3
    return v, vp


def _start_radius(a: float, tol: float) -> float:
    # start where the quartic series term is below tol (capped)
    c4 = abs(_quartic_coeff(a))
    if c4 == 0.0:
        return R_START_MAX
    return min(R_START_MAX, (tol / c4) ** 0.25)


# quintic Hermite basis on [0, 1] matching value and first two derivatives
# at both ends (derivatives pre-scaled by h and h**2)
def _hermite5(s, y0, d0, c0, y1, d1, c1, h):
    s2 = s * s
    s3 = s2 * s
    s4 = s3 * s
    s5 = s4 * s
    h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5
    h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5
    h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5
    k0 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5
    k1 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5
    k2 = 0.5 * s3 - s4 + 0.5 * s5
    return (
        y0 * h0 + h * d0 * h1 + h * h * c0 * h2
        + y1 * k0 + h * d1 * k1 + h * h * c1 * k2
    )


@dataclass
class ScaledProfile:
    """Numerical solution v1(r1), v1'(r1) of the scaled radial ODE at one ``a``.

    ``r1``, ``v1``, ``v1p`` are the accepted integration nodes (the first is
    the analytic origin, v1(0) = v1'(0) = 0); :meth:`evaluate` provides dense
    output anywhere in [0, r_max].
    """

    a: float
    r1: np.ndarray
    v1: np.ndarray
    v1p: np.ndarray
    r_max: float
    tol: float
    _r_series: float = field(repr=False, default=0.0)
    _v2: np.ndarray = field(repr=False, default=None)  # v1'' at nodes
    _v3: np.ndarray = field(repr=False, default=None)  # v1''' at nodes

    def evaluate(self, r1):
        """Return (v1, v1') at arbitrary radii in [0, r_max]."""
        r = np.asarray(r1, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r).astype(float)
        if np.any(r < 0) or np.any(r > self.r_max * (1 + 1e-12)):
            raise ValueError(f"radius outside [0, {self.r_max}]")
        v = np.empty_like(r)
        vp = np.empty_like(r)
        low = r <= self._r_series
        if np.any(low):
            v[low], vp[low] = _series_eval(self.a, r[low])
        hi_mask = ~low
        if np.any(hi_mask):
            v[hi_mask], vp[hi_mask] = self._dense(np.clip(r[hi_mask], None, self.r_max))
        if scalar:
            return float(v[0]), float(vp[0])
        return v, vp

    def _dense(self, r):
        # nodes[0] is the analytic origin; interpolation intervals start at
        # the series handoff node, index 1
        t = self.r1
        i = np.clip(np.searchsorted(t, r, side="right") - 1, 1, len(t) - 2)
        h = t[i + 1] - t[i]
        s = (r - t[i]) / h
        v = _hermite5(
            s, self.v1[i], self.v1p[i], self._v2[i],
            self.v1[i + 1], self.v1p[i + 1], self._v2[i + 1], h,
        )
        vp = _hermite5(
            s, self.v1p[i], self._v2[i], self._v3[i],
            self.v1p[i + 1], self._v2[i + 1], self._v3[i + 1], h,
        )
        return v, vp

    def to_csv(self, path) -> None:
        """Write the node table (r1, v1, v1p) for debugging."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("# vortexeq-csv v1 profile\n")
            fh.write("r1,v1,v1p\n")
            for r, v, vp in zip(self.r1, self.v1, self.v1p):
                fh.write(f"{float(r)!r},{float(v)!r},{float(vp)!r}\n")


def integrate_family(a: float, r1_end: float, tol: float = 1e-10) -> ScaledProfile:
    """Integrate the scaled ODE from the origin out to ``r1_end``.

    Parameters
    ----------
    a : source curvature parameter (any sign accepted; self-consistent
        states with mu >= 0 always produce a <= 0)
    r1_end : target radius, > 0
    tol : relative integration tolerance, within [1e-14, 1e-4]

    Raises
    ------
    BlowUpError
        when the source term exceeds SOURCE_CAP before r1_end (e.g. a = 0
        has a singular barrier at r1 = 2*sqrt(2)).
    ToleranceFailureError
        when the integrator's step control fails for another reason.
    """
    if not r1_end > 0:
        raise ValueError("r1_end must be positive")
    if not (TOL_MIN <= tol <= TOL_MAX):
        raise ValueError(f"tol must lie in [{TOL_MIN}, {TOL_MAX}]")

    r_start = min(_start_radius(a, tol), 0.5 * r1_end)
    v0, vp0 = _series_eval(a, r_start)

    def rhs(r, y):
        arg = -y[0] + a * r * r
        return (y[1], -y[1] / r - np.exp(min(arg, _EXP_GUARD)))

    def blow_event(r, y):
        return (-y[0] + a * r * r) - _LN_SOURCE_CAP

    blow_event.terminal = True
    blow_event.direction = 1

    sol = solve_ivp(
        rhs,
        (r_start, r1_end),
        (float(v0), float(vp0)),
        method="RK45",
        rtol=max(tol, 2.3e-14),
        atol=tol * 1e-2,
        events=blow_event,
    )
    if sol.status == 1:
        raise BlowUpError(sol.t_events[0][0], a)
    if sol.status != 0:
        # step underflow without the source cap firing: decide by the source size
        arg = -sol.y[0, -1] + a * sol.t[-1] ** 2
        if arg > 0.5 * _LN_SOURCE_CAP:
            raise BlowUpError(sol.t[-1], a)
        raise ToleranceFailureError(f"integration failed at r1={sol.t[-1]:.6g}: {sol.message}")

    r_nodes = np.concatenate(([0.0], sol.t))
    v_nodes = np.concatenate(([0.0], sol.y[0]))
    vp_nodes = np.concatenate(([0.0], sol.y[1]))
    if np.any(vp_nodes[1:] >= 0):
        raise ToleranceFailureError("monotonicity lost: v1' must stay negative for r1 > 0")

    # exact higher derivatives at the nodes, for the Hermite dense output
    rr = sol.t
    src = np.exp(np.minimum(-sol.y[0] + a * rr**2, _EXP_GUARD))
    v2 = -sol.y[1] / rr - src
    v3 = -v2 / rr + sol.y[1] / rr**2 - src * (-sol.y[1] + 2.0 * a * rr)
    zero = np.zeros(1)
    return ScaledProfile(
        a=float(a),
        r1=r_nodes,
        v1=v_nodes,
        v1p=vp_nodes,
        r_max=float(r1_end),
        tol=float(tol),
        _r_series=r_start,
        _v2=np.concatenate((zero, v2)),
        _v3=np.concatenate((zero, v3)),
    )
