"""Thermodynamic curves over z grids at fixed mu, with finite-difference
specific heat and detection of metastable (negative c_v) intervals."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .selfconsistent import NoBracketError, UnreachableError, solve_state
from .thermo import ThermoPoint, compute_point

SWEEP_CSV_HEADER = "mu,z,a,beta,T,E,rho0,p,S,cv,regime,status"

STATUS_OK = "ok"
STATUS_UNREACHABLE = "unreachable"

# below this |dT| (relative to the largest |T|) c_v is reported undefined
DT_DEFINED_RTOL = 1e-12
# finite-difference derivatives smaller than this count as sign 0
SIGN_ATOL = 1e-9


class EmptySweepError(RuntimeError):
    """Every grid point of a sweep failed to converge."""


@dataclass
class SweepTable:
    """One ThermoPoint per z node (None where unreachable), with c_v at
    interior nodes and the metastable intervals."""

    mu: float
    z_grid: np.ndarray
    points: list[ThermoPoint | None]
    status: list[str]
    cv: np.ndarray  # nan where undefined (boundaries, gaps, flat T)
    metastable_intervals: list[tuple[float, float]]

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("# vortexeq-csv v1 sweep\n")
            fh.write(SWEEP_CSV_HEADER + "\n")
            for z, pt, status, cv in zip(self.z_grid, self.points, self.status, self.cv):
                if pt is None:
                    fh.write(
                        f"{float(self.mu)!r},{float(z)!r},"
                        f"nan,nan,nan,nan,nan,nan,nan,nan,,{status}\n"
                    )
                else:
                    fh.write(
                        ",".join(
                            [
                                repr(float(pt.mu)),
                                repr(float(pt.z)),
                                repr(float(pt.a)),
                                repr(float(pt.beta)),
                                repr(float(pt.temperature)),
                                repr(float(pt.energy)),
                                repr(float(pt.rho0)),
                                repr(float(pt.pressure)),
                                repr(float(pt.entropy)),
                                repr(float(cv)),
                                pt.regime,
                                status,
                            ]
                        )
                        + "\n"
                    )


def _solve_node(args) -> tuple[ThermoPoint | None, str]:
    mu, z, tol, params = args
    try:
        state = solve_state(mu, z, tol)
    except (UnreachableError, NoBracketError):
        return None, STATUS_UNREACHABLE
    return compute_point(state, params), STATUS_OK


def run_sweep(
    mu: float,
    z_min: float,
    z_max: float,
    n_points: int,
    params: ModelParams,
    tol: float = 1e-10,
    workers: int = 1,
) -> SweepTable:
    """Solve every node of a z grid and attach c_v and metastable intervals.

    Sequential mode (workers=1, the default) warm-starts each node with the
    previous node's converged ``a``; parallel mode solves nodes
    independently. Converged values agree between the modes to within tol.
    Unreachable nodes are kept as gaps; a sweep with no converged node
    raises EmptySweepError.
    """
    if not (0 < z_min < z_max):
        raise ValueError("need 0 < z_min < z_max")
    if n_points < 3:
        raise ValueError("n_points must be at least 3")
    z_grid = np.linspace(z_min, z_max, n_points)

    points: list[ThermoPoint | None] = []
    status: list[str] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for pt, st in pool.map(_solve_node, [(mu, z, tol, params) for z in z_grid]):
                points.append(pt)
                status.append(st)
    else:
        a_prev: float | None = None
        for z in z_grid:
            try:
                state = solve_state(mu, float(z), tol, warm_start=a_prev)
            except (UnreachableError, NoBracketError):
                points.append(None)
                status.append(STATUS_UNREACHABLE)
                continue
            a_prev = state.a
            points.append(compute_point(state, params))
            status.append(STATUS_OK)

    if all(pt is None for pt in points):
        raise EmptySweepError(f"no node of the sweep at mu={mu} converged")

    cv = _specific_heat(z_grid, points)
    table = SweepTable(mu, z_grid, points, status, cv, [])
    table.metastable_intervals = detect_metastable(table)
    return table


def _specific_heat(z_grid: np.ndarray, points: list[ThermoPoint | None]) -> np.ndarray:
    """Central-difference c_v = dE/dT on the grid; nan where undefined."""
    n = len(z_grid)
    cv = np.full(n, np.nan)
    t_scale = max(
        (abs(pt.temperature) for pt in points if pt is not None), default=0.0
    )
    for i in range(1, n - 1):
        lo, hi = points[i - 1], points[i + 1]
        if lo is None or hi is None or points[i] is None:
            continue
        dt = hi.temperature - lo.temperature
        if abs(dt) < DT_DEFINED_RTOL * t_scale:
            continue
        cv[i] = (hi.energy - lo.energy) / dt
    return cv


def detect_metastable(table: SweepTable) -> list[tuple[float, float]]:
    """Maximal contiguous z intervals where c_v < 0."""
    intervals: list[tuple[float, float]] = []
    run_start: int | None = None
    for i, cv in enumerate(table.cv):
        if np.isfinite(cv) and cv < 0:
            if run_start is None:
                run_start = i
        else:
            if run_start is not None:
                intervals.append((float(table.z_grid[run_start]), float(table.z_grid[i - 1])))
                run_start = None
    if run_start is not None:
        intervals.append((float(table.z_grid[run_start]), float(table.z_grid[len(table.cv) - 1])))
    return intervals


@dataclass
class MonotonicityReport:
    """Per-interior-node finite-difference signs (+1/0/-1; 9 marks gaps)
    and strict-monotonicity summaries over the scanned range."""

    z: np.ndarray
    dT_sign: np.ndarray
    dE_sign: np.ndarray
    drho0_sign: np.ndarray
    t_strictly_decreasing: bool
    e_strictly_increasing: bool
    rho0_strictly_decreasing: bool


def monotonicity_report(table: SweepTable) -> MonotonicityReport:
    if len(table.z_grid) < 3:
        raise ValueError("need at least 3 nodes")
    z = table.z_grid
    n = len(z)

    def signs(getter) -> np.ndarray:
        out = np.full(n - 2, 9, dtype=int)
        for i in range(1, n - 1):
            lo, hi = table.points[i - 1], table.points[i + 1]
            if lo is None or hi is None:
                continue
            deriv = (getter(hi) - getter(lo)) / (z[i + 1] - z[i - 1])
            out[i - 1] = 0 if abs(deriv) < SIGN_ATOL else int(math.copysign(1, deriv))
        return out

    dt = signs(lambda p: p.temperature)
    de = signs(lambda p: p.energy)
    dr = signs(lambda p: p.rho0)
    defined = dt != 9
    return MonotonicityReport(
        z=z[1:-1],
        dT_sign=dt,
        dE_sign=de,
        drho0_sign=dr,
        t_strictly_decreasing=bool(defined.any() and np.all(dt[defined] == -1)),
        e_strictly_increasing=bool(defined.any() and np.all(de[defined] == 1)),
        rho0_strictly_decreasing=bool(defined.any() and np.all(dr[defined] == -1)),
    )
