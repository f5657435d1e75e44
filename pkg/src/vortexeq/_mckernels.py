"""Inner-loop kernels for the Metropolis sampler.

Compiled with numba when available (set NUMBA_DISABLE_JIT=1 to run the same
code as pure Python for debugging). All randomness is drawn outside and
passed in as arrays, in a fixed per-sweep order, so runs are bit-identical
for a given seed and the first k sweeps of a longer run match a k-sweep run.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn

# squared-distance floor below which a proposed move is rejected outright
COINCIDENCE_D2 = 1e-24


@njit(cache=True)
def accept_prob(delta_e: float, beta: float) -> float:
    """Metropolis acceptance probability min(1, exp(-beta*delta_e))."""
    if delta_e <= 0.0:
        return 1.0
    return np.exp(-beta * delta_e)


@njit(cache=True)
def run_sweep(pos, kin_coef, trap_coef, int_coef, beta, step_pt, step_tr,
              prop_pts, u_pts, prop_tr, u_tr, totals):
    """One sweep: a single-point displacement pass over every cross-section
    point, then a whole-filament translation pass.

    ``totals`` (kinetic, trap, interaction) is updated incrementally;
    interaction increments touch only the affected cross-section, O(N) per
    point move. Returns (accepted_points, accepted_translations).
    """
    N, M, _ = pos.shape
    acc_p = 0
    acc_t = 0
    for i in range(N):
        for k in range(M):
            km = k - 1 if k > 0 else M - 1
            kp = k + 1 if k < M - 1 else 0
            x0 = pos[i, k, 0]
            y0 = pos[i, k, 1]
            x1 = x0 + step_pt * (2.0 * prop_pts[i, k, 0] - 1.0)
            y1 = y0 + step_pt * (2.0 * prop_pts[i, k, 1] - 1.0)
            dk = 0.0
            xa = pos[i, km, 0]
            ya = pos[i, km, 1]
            dk += kin_coef * ((x1 - xa) ** 2 + (y1 - ya) ** 2
                              - (x0 - xa) ** 2 - (y0 - ya) ** 2)
            xa = pos[i, kp, 0]
            ya = pos[i, kp, 1]
            dk += kin_coef * ((x1 - xa) ** 2 + (y1 - ya) ** 2
                              - (x0 - xa) ** 2 - (y0 - ya) ** 2)
            da = trap_coef * (x1 * x1 + y1 * y1 - x0 * x0 - y0 * y0)
            log_ratio = 0.0
            ok = True
            for j in range(N):
                if j == i:
                    continue
                xb = pos[j, k, 0]
                yb = pos[j, k, 1]
                d2n = (x1 - xb) ** 2 + (y1 - yb) ** 2
                if d2n < COINCIDENCE_D2:
                    ok = False
                    break
                d2o = (x0 - xb) ** 2 + (y0 - yb) ** 2
                log_ratio += np.log(d2n / d2o)
            if not ok:
                continue
            du = -0.5 * int_coef * log_ratio
            de = dk + da + du
            if u_pts[i, k] < accept_prob(de, beta):
                pos[i, k, 0] = x1
                pos[i, k, 1] = y1
                totals[0] += dk
                totals[1] += da
                totals[2] += du
                acc_p += 1
    for i in range(N):
        sx = step_tr * (2.0 * prop_tr[i, 0] - 1.0)
        sy = step_tr * (2.0 * prop_tr[i, 1] - 1.0)
        da = 0.0
        log_ratio = 0.0
        ok = True
        for k in range(M):
            x0 = pos[i, k, 0]
            y0 = pos[i, k, 1]
            x1 = x0 + sx
            y1 = y0 + sy
            da += trap_coef * (x1 * x1 + y1 * y1 - x0 * x0 - y0 * y0)
            for j in range(N):
                if j == i:
                    continue
                xb = pos[j, k, 0]
                yb = pos[j, k, 1]
                d2n = (x1 - xb) ** 2 + (y1 - yb) ** 2
                if d2n < COINCIDENCE_D2:
                    ok = False
                    break
                d2o = (x0 - xb) ** 2 + (y0 - yb) ** 2
                log_ratio += np.log(d2n / d2o)
            if not ok:
                break
        if not ok:
            continue
        du = -0.5 * int_coef * log_ratio
        de = da + du
        if u_tr[i] < accept_prob(de, beta):
            for k in range(M):
                pos[i, k, 0] += sx
                pos[i, k, 1] += sy
            totals[1] += da
            totals[2] += du
            acc_t += 1
    return acc_p, acc_t
