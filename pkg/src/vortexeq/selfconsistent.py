"""Resolution of the self-referential boundary condition of the radial ODE.

The source parameter ``a`` of :mod:`vortexeq.liouville` is tied to the
solution itself through a = mu * v1'(z) / z, so a consistent state must
satisfy h(a) = a - mu * v1'(z; a) / z = 0. ``h`` is cheap (one outward
integration per evaluation), h(0) > 0 whenever a = 0 is integrable to z,
and h -> -inf as a -> -inf, so the root is found by a downward bracketing
scan followed by Brent refinement. Trial values of ``a`` at which the ODE
blows up before z are treated as h = +big (blow-ups occur on the weakly
suppressed side of the root), which shrinks the bracket from that side.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.optimize import brentq

from .liouville import BlowUpError, ScaledProfile, integrate_family

A_FLOOR = -64.0  # the bracket scan gives up below this
_H_BIG = 1e6
_MU0_BARRIER = 2.0 * math.sqrt(2.0)


class NoBracketError(RuntimeError):
    """No sign change of h(a) on [A_FLOOR, 0]."""


class UnreachableError(RuntimeError):
    """The ODE blows up before z for every trial a (z too large for this mu)."""

    def __init__(self, mu: float, z: float):
        self.mu = float(mu)
        self.z = float(z)
        msg = f"no profile reaches z={z:.6g} at mu={mu:.6g}"
        if mu == 0.0:
            msg += f" (the mu=0 solution diverges at the barrier r1=2*sqrt(2)={_MU0_BARRIER:.6g})"
        super().__init__(msg)


class MultipleRootsWarning(UserWarning):
    """Bracketing detected more than one sign change; the root closest to 0 is used."""


@dataclass
class ConsistentState:
    """A (mu, z) pair with the converged source parameter and attached profile.

    residual is |a*z - mu*v1'(z)|; beta = -epsilon*z*v1p_z/lambda_total > 0
    follows from v1p_z < 0.
    """

    mu: float
    z: float
    a: float
    v1_z: float
    v1p_z: float
    profile: ScaledProfile
    residual: float


def _ode_tol(tol: float) -> float:
    return min(max(tol * 1e-2, 1e-13), 1e-6)


def solve_state(
    mu: float,
    z: float,
    tol: float = 1e-10,
    warm_start: float | None = None,
) -> ConsistentState:
    """Find the self-consistent state at (mu, z).

    Parameters
    ----------
    mu : dimensionless confinement strength, >= 0
    z : scaled confinement radius, > 0 (for mu = 0 it must stay below
        2*sqrt(2))
    tol : consistency tolerance; the returned residual satisfies
        |a*z - mu*v1'(z)| <= tol * max(1, |a*z|)
    warm_start : previous grid point's ``a``, used to seed the bracket
        (affects iteration count only, not the converged value)

    Raises
    ------
    UnreachableError, NoBracketError
    """
    if not z > 0:
        raise ValueError("z must be positive")
    if mu < 0:
        raise ValueError("mu must be non-negative")
    ode_tol = _ode_tol(tol)

    if mu == 0.0:
        try:
            profile = integrate_family(0.0, z, ode_tol)
        except BlowUpError as exc:
            raise UnreachableError(mu, z) from exc
        v1_z, v1p_z = profile.evaluate(z)
        return ConsistentState(mu, z, 0.0, v1_z, v1p_z, profile, 0.0)

    cache: dict[float, ScaledProfile] = {}

    def h(a: float) -> float:
        try:
            profile = integrate_family(a, z, ode_tol)
        except BlowUpError:
            return _H_BIG * (1.0 + abs(a))
        cache[a] = profile
        _, v1p = profile.evaluate(z)
        return a - mu * v1p / z

    a_lo, a_hi = _bracket(h, warm_start, mu, z)
    a_root = brentq(h, a_lo, a_hi, xtol=1e-13, rtol=8.9e-16, maxiter=200)
    # where h is steep (large z), brentq's x-tolerance can leave a sizeable
    # h value; secant-polish down to the evaluation noise floor
    a_root = _polish(h, a_root, tol, z)

    profile = cache.get(a_root)
    if profile is None:
        profile = integrate_family(a_root, z, ode_tol)
    v1_z, v1p_z = profile.evaluate(z)
    residual = abs(a_root * z - mu * v1p_z)
    if residual > tol * max(1.0, abs(a_root * z)):
        raise NoBracketError(
            f"consistency residual {residual:.3g} exceeds tolerance at mu={mu}, z={z}"
        )
    return ConsistentState(mu, z, a_root, v1_z, v1p_z, profile, residual)


def _polish(h, a: float, tol: float, z: float) -> float:
    target = 0.25 * tol * max(1.0, abs(a * z)) / z
    a0, h0 = a, h(a)
    if abs(h0) <= target:
        return a0
    a1 = a + max(1e-11, 1e-7 * abs(a))
    h1 = h(a1)
    best_a, best_h = (a0, h0) if abs(h0) <= abs(h1) else (a1, h1)
    for _ in range(8):
        if h1 == h0 or abs(h0) >= _H_BIG or abs(h1) >= _H_BIG:
            break
        a2 = a1 - h1 * (a1 - a0) / (h1 - h0)
        h2 = h(a2)
        a0, h0, a1, h1 = a1, h1, a2, h2
        if abs(h2) < abs(best_h):
            best_a, best_h = a2, h2
        if abs(h2) <= target:
            break
    return best_a


def _bracket(h, warm_start: float | None, mu: float, z: float) -> tuple[float, float]:
    """Locate a sign change of h on [A_FLOOR, 0].

    Walks ``a`` geometrically downward from 0 (optionally seeded near
    warm_start), treating blow-ups as positive; counts sign changes among
    defined trials and warns on multiplicity, returning the change closest
    to zero.
    """
    if warm_start is not None and warm_start < 0:
        got = _bracket_near(h, warm_start)
        if got is not None:
            return got

    trials = [0.0]
    a = -1.0 / 64.0
    while a >= A_FLOOR:
        trials.append(a)
        a *= 2.0
    values = [h(a) for a in trials]

    changes = []
    for (a1, h1), (a2, h2) in zip(zip(trials, values), zip(trials[1:], values[1:])):
        if h1 > 0 >= h2:
            changes.append((a2, a1))
    n_defined_flips = sum(
        1
        for (a1, h1), (a2, h2) in zip(zip(trials, values), zip(trials[1:], values[1:]))
        if (h1 > 0) != (h2 > 0)
    )
    if n_defined_flips > 1:
        warnings.warn(
            "h(a) changes sign more than once during bracketing; "
            "using the root closest to 0",
            MultipleRootsWarning,
            stacklevel=3,
        )
    if changes:
        lo, hi = changes[0]
        if values[trials.index(hi)] >= _H_BIG:
            hi = _shrink_defined_top(h, lo, hi)
        return lo, hi
    if all(v >= _H_BIG for v in values):
        raise UnreachableError(mu, z)
    raise NoBracketError(f"no sign change of h(a) on [{A_FLOOR}, 0]")


def _bracket_near(h, a_seed: float) -> tuple[float, float] | None:
    """Try a small local bracket around a warm-start value; None on failure."""
    a_seed = max(a_seed, A_FLOOR / 2)
    h_seed = h(a_seed)
    if h_seed >= _H_BIG:
        return None
    if h_seed > 0:
        lo = a_seed * 2.0
        for _ in range(4):
            if lo < A_FLOOR:
                return None
            if h(lo) <= 0:
                return lo, a_seed
            lo *= 2.0
        return None
    hi = a_seed / 2.0
    for _ in range(4):
        if h(hi) > 0:
            return a_seed, hi
        hi /= 2.0
    if h(0.0) > 0:
        return a_seed, 0.0
    return None


def _shrink_defined_top(h, lo: float, hi: float) -> float:
    """Bisect toward a defined h>0 endpoint when ``hi`` sits in a blow-up zone."""
    d, u = lo, hi
    for _ in range(80):
        m = 0.5 * (d + u)
        hm = h(m)
        if hm >= _H_BIG:
            u = m
        elif hm > 0:
            return m
        else:
            d = m
        if abs(u - d) < 1e-15 * max(1.0, abs(u)):
            break
    raise NoBracketError("could not isolate a defined positive value of h(a)")
