"""Metropolis sampling of the discrete N-filament energy functional.

Each filament is a periodic chain of M planar points phi_{i,k} over an
axial period ell (dtau = ell/M). The total energy splits into

    kinetic     K = sum_i sum_k (alpha*Gamma/2) |phi_{i,k+1}-phi_{i,k}|^2 / dtau
    trap        A = (mu'*Gamma/2) sum_i sum_k dtau |phi_{i,k}|^2
    interaction U = -(Gamma^2/eps) sum_k dtau sum_{i<j} log|phi_{i,k}-phi_{j,k}|

and the sampler targets exp(-beta_s * (K+A+U)). beta_s plays the role of
the inverse temperature per filament circulation (beta/Gamma in mean-field
variables); with the default period ell = 1 the spatial statistics
correspond to the mean-field profile at beta = beta_s * Gamma.

Moves are single-point displacements and whole-filament translations,
alternated each sweep; step widths are tuned manually per configuration to
an acceptance rate in [0.2, 0.6] (no auto-tuning during measurement).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from . import _mckernels
from .model import ModelParams, mu_prime_from_mu, validate
from .selfconsistent import ConsistentState
from .thermo import beta_of, density_at

COINCIDENCE_DISTANCE = 1e-12
_MAPPING_RTOL = 1e-6


class CoincidentPointsError(RuntimeError):
    """Two filaments share a cross-section point (log divergence)."""


class MismatchedParametersError(RuntimeError):
    """The MC run's parameters do not map onto the mean-field state."""


class EnergyBreakdown(NamedTuple):
    kinetic: float
    trap: float
    interaction: float
    total: float


@dataclass
class FilamentEnsemble:
    """N filaments x M cross-section points with axial period ``period``.

    Periodic closure is implicit (point M-1 connects back to point 0).
    ``mu_prime`` is the trap strength; the remaining constants come from
    ``params``.
    """

    positions: np.ndarray  # (N, M, 2)
    period: float
    mu_prime: float
    params: ModelParams

    def __post_init__(self):
        self.positions = np.ascontiguousarray(self.positions, dtype=float)
        if self.positions.ndim != 3 or self.positions.shape[2] != 2:
            raise ValueError("positions must have shape (N, M, 2)")
        if self.n_points < 2:
            raise ValueError("need at least 2 points per filament")
        if self.period <= 0:
            raise ValueError("period must be positive")
        if self.mu_prime < 0:
            raise ValueError("mu_prime must be non-negative")
        validate(self.params)

    @property
    def n_filaments(self) -> int:
        return self.positions.shape[0]

    @property
    def n_points(self) -> int:
        return self.positions.shape[1]

    @property
    def dtau(self) -> float:
        return self.period / self.n_points


@dataclass(frozen=True)
class McConfig:
    """Sampler settings. sweeps counts total sweeps including burn_in."""

    beta_s: float
    sweeps: int
    burn_in: int
    step_point: float
    step_translate: float
    seed: int
    histogram_bins: int = 90
    histogram_rmax: float = 12.0

    def __post_init__(self):
        if self.beta_s <= 0:
            raise ValueError("beta_s must be positive")
        if not self.sweeps > self.burn_in >= 0:
            raise ValueError("need sweeps > burn_in >= 0")
        if self.step_point <= 0 or self.step_translate <= 0:
            raise ValueError("step widths must be positive")
        if self.histogram_bins < 1 or self.histogram_rmax <= 0:
            raise ValueError("histogram settings must be positive")


@dataclass
class McObservables:
    """Accumulated output of one chain.

    The energy trace covers every sweep (burn-in included); all averaged
    observables use only the retained (post burn-in) sweeps. Histogram mass
    including the overflow count equals N*M*retained_sweeps.
    """

    config: McConfig
    n_filaments: int
    n_points: int
    period: float
    mu_prime: float
    params: ModelParams
    acceptance_rate: float
    acceptance_points: float
    acceptance_translations: float
    energy_trace: np.ndarray  # (sweeps, 4): K, A, U, total
    msr_trace: np.ndarray  # per-sweep mean |phi|^2 over all points
    histogram_counts: np.ndarray
    histogram_edges: np.ndarray
    histogram_overflow: int
    retained_sweeps: int
    mean_square_radius: float
    mean_square_radius_se: float
    kinetic_per_filament: float
    kinetic_per_filament_se: float
    per_point_mean_square: np.ndarray = field(repr=False, default=None)

    def trace_digest(self) -> str:
        """sha256 of the raw energy trace; seeded reruns reproduce it exactly."""
        return hashlib.sha256(np.ascontiguousarray(self.energy_trace).tobytes()).hexdigest()

    def summary_dict(self) -> dict:
        return {
            "n_filaments": self.n_filaments,
            "n_points": self.n_points,
            "period": self.period,
            "mu_prime": self.mu_prime,
            "beta_s": self.config.beta_s,
            "sweeps": self.config.sweeps,
            "burn_in": self.config.burn_in,
            "seed": self.config.seed,
            "step_point": self.config.step_point,
            "step_translate": self.config.step_translate,
            "acceptance_rate": self.acceptance_rate,
            "acceptance_points": self.acceptance_points,
            "acceptance_translations": self.acceptance_translations,
            "retained_sweeps": self.retained_sweeps,
            "mean_square_radius": self.mean_square_radius,
            "mean_square_radius_se": self.mean_square_radius_se,
            "kinetic_per_filament": self.kinetic_per_filament,
            "kinetic_per_filament_se": self.kinetic_per_filament_se,
            "histogram_overflow": self.histogram_overflow,
            "trace_digest": self.trace_digest(),
            "params": {
                "lambda_total": self.params.lambda_total,
                "epsilon": self.params.epsilon,
                "gamma": self.params.gamma,
                "alpha": self.params.alpha,
                "radius": self.params.radius,
                "mu": self.params.mu,
            },
        }


def _coefficients(ens: FilamentEnsemble) -> tuple[float, float, float]:
    p = ens.params
    kin = p.alpha * p.gamma / (2.0 * ens.dtau)
    trap = 0.5 * ens.mu_prime * p.gamma * ens.dtau
    inter = p.gamma * p.gamma / p.epsilon * ens.dtau
    return kin, trap, inter


def discrete_energy(ens: FilamentEnsemble) -> EnergyBreakdown:
    """Exact (non-incremental) energy decomposition of an ensemble."""
    kin_c, trap_c, int_c = _coefficients(ens)
    pos = ens.positions
    seg = pos - np.roll(pos, -1, axis=1)
    kinetic = kin_c * float(np.sum(seg**2))
    trap = trap_c * float(np.sum(pos**2))
    interaction = 0.0
    n = ens.n_filaments
    if n > 1:
        iu, ju = np.triu_indices(n, 1)
        for k in range(ens.n_points):
            slice_k = pos[:, k, :]
            diff = slice_k[iu] - slice_k[ju]
            d2 = np.sum(diff**2, axis=1)
            if np.any(d2 < COINCIDENCE_DISTANCE**2):
                raise CoincidentPointsError(
                    f"coincident cross-section points at slice {k}"
                )
            interaction += -0.5 * int_c * float(np.sum(np.log(d2)))
    return EnergyBreakdown(kinetic, trap, interaction, kinetic + trap + interaction)


def hex_lattice(n: int) -> np.ndarray:
    """First n sites of a centered hexagonal lattice (unit spacing)."""
    pts = [(0.0, 0.0)]
    shell = 1
    while len(pts) < n:
        for q in range(-shell, shell + 1):
            for r in range(-shell, shell + 1):
                if max(abs(q), abs(r), abs(-q - r)) == shell:
                    pts.append((q + 0.5 * r, r * math.sqrt(3.0) / 2.0))
        shell += 1
    return np.array(pts[:n])


def make_lattice_ensemble(
    n_filaments: int,
    n_points: int,
    period: float,
    params: ModelParams,
    mu_prime: float,
    mean_square_radius: float,
) -> FilamentEnsemble:
    """Straight filaments on a centered hexagonal lattice, rescaled so the
    sample mean of |phi|^2 matches ``mean_square_radius`` (0 leaves a single
    filament at the origin)."""
    lat = hex_lattice(n_filaments)
    if n_filaments > 1 and mean_square_radius > 0:
        lat = lat * math.sqrt(mean_square_radius / float(np.mean(np.sum(lat**2, axis=1))))
    positions = np.repeat(lat[:, None, :], n_points, axis=1)
    return FilamentEnsemble(positions, period, mu_prime, params)


def batch_means(x: np.ndarray, n_batches: int = 50) -> tuple[float, float]:
    """Mean and batch-means standard error of a correlated trace."""
    x = np.asarray(x, dtype=float)
    if len(x) < 2 * n_batches:
        n_batches = max(2, len(x) // 2)
    per = len(x) // n_batches
    means = x[: per * n_batches].reshape(n_batches, per).mean(axis=1)
    return float(x.mean()), float(means.std(ddof=1) / math.sqrt(n_batches))


def metropolis_run(initial: FilamentEnsemble, config: McConfig) -> McObservables:
    """Run one Metropolis chain; deterministic for a given seed.

    The chain satisfies detailed balance with respect to
    exp(-beta_s * total); observables accumulate after burn_in only.
    """
    ens = FilamentEnsemble(
        initial.positions.copy(), initial.period, initial.mu_prime, initial.params
    )
    kin_c, trap_c, int_c = _coefficients(ens)
    pos = ens.positions
    n, m = ens.n_filaments, ens.n_points
    rng = np.random.default_rng(config.seed)

    k0, a0, u0, _ = discrete_energy(ens)
    totals = np.array([k0, a0, u0])
    trace = np.zeros((config.sweeps, 4))
    msr = np.zeros(config.sweeps)
    hist = np.zeros(config.histogram_bins)
    overflow = 0
    per_point_sq = np.zeros((n, m))
    acc_p = 0
    acc_t = 0

    for s in range(config.sweeps):
        prop_pts = rng.random((n, m, 2))
        u_pts = rng.random((n, m))
        prop_tr = rng.random((n, 2))
        u_tr = rng.random(n)
        ap, at = _mckernels.run_sweep(
            pos, kin_c, trap_c, int_c, config.beta_s,
            config.step_point, config.step_translate,
            prop_pts, u_pts, prop_tr, u_tr, totals,
        )
        acc_p += ap
        acc_t += at
        if s == config.burn_in:
            # reset incremental totals against an exact evaluation
            k0, a0, u0, _ = discrete_energy(ens)
            totals[:] = (k0, a0, u0)
        trace[s, :3] = totals
        trace[s, 3] = totals.sum()
        sq = np.sum(pos**2, axis=2)
        msr[s] = sq.mean()
        if s >= config.burn_in:
            per_point_sq += sq
            r = np.sqrt(sq).ravel()
            idx = (r / config.histogram_rmax * config.histogram_bins).astype(int)
            over = idx >= config.histogram_bins
            overflow += int(over.sum())
            np.add.at(hist, idx[~over], 1)

    retained = config.sweeps - config.burn_in
    msr_mean, msr_se = batch_means(msr[config.burn_in:])
    k_mean, k_se = batch_means(trace[config.burn_in:, 0])
    return McObservables(
        config=config,
        n_filaments=n,
        n_points=m,
        period=ens.period,
        mu_prime=ens.mu_prime,
        params=ens.params,
        acceptance_rate=(acc_p + acc_t) / (config.sweeps * (n * m + n)),
        acceptance_points=acc_p / (config.sweeps * n * m),
        acceptance_translations=acc_t / (config.sweeps * n),
        energy_trace=trace,
        msr_trace=msr,
        histogram_counts=hist,
        histogram_edges=np.linspace(0.0, config.histogram_rmax, config.histogram_bins + 1),
        histogram_overflow=overflow,
        retained_sweeps=retained,
        mean_square_radius=msr_mean,
        mean_square_radius_se=msr_se,
        kinetic_per_filament=k_mean / n,
        kinetic_per_filament_se=k_se / n,
        per_point_mean_square=per_point_sq / retained,
    )


@dataclass
class ComparisonResult:
    """Shape comparison between an MC radial histogram and a mean-field
    profile, both truncated to [0, R] and normalized to unit mass."""

    l1_distance: float
    second_moment_ratio: float
    fraction_beyond_radius: float
    bins_used: int


def compare_to_meanfield(
    obs: McObservables, state: ConsistentState, params: ModelParams
) -> ComparisonResult:
    """Compare the sampled cross-section density against the mean-field
    profile of ``state``.

    The MC run must map onto the state: beta_s = beta_mf/Gamma, mu_prime
    matching the state's mu, Lambda = N*Gamma, and unit period (the beta_s
    mapping normalizes energies per unit length). Otherwise
    MismatchedParametersError is raised.
    """
    beta_mf = beta_of(state, params)
    problems = []
    if not math.isclose(obs.config.beta_s, beta_mf / params.gamma, rel_tol=_MAPPING_RTOL):
        problems.append(
            f"beta_s={obs.config.beta_s!r} but beta_mf/gamma={beta_mf / params.gamma!r}"
        )
    mu_p_expected = mu_prime_from_mu(state.mu, params)
    if not math.isclose(obs.mu_prime, mu_p_expected, rel_tol=_MAPPING_RTOL, abs_tol=1e-12):
        problems.append(f"mu_prime={obs.mu_prime!r} but state requires {mu_p_expected!r}")
    if not math.isclose(params.lambda_total, obs.n_filaments * params.gamma, rel_tol=_MAPPING_RTOL):
        problems.append(
            f"lambda_total={params.lambda_total!r} but N*gamma={obs.n_filaments * params.gamma!r}"
        )
    if not math.isclose(obs.period, 1.0, rel_tol=_MAPPING_RTOL):
        problems.append(f"period={obs.period!r} but the beta_s mapping assumes period=1")
    if problems:
        raise MismatchedParametersError("; ".join(problems))

    edges = obs.histogram_edges
    radius = params.radius
    inside = edges[1:] <= radius * (1.0 + 1e-12)
    counts_in = obs.histogram_counts[inside]
    total = float(obs.histogram_counts.sum() + obs.histogram_overflow)
    if counts_in.sum() <= 0:
        raise MismatchedParametersError("no histogram mass inside the confinement radius")
    p = counts_in / counts_in.sum()

    lo = edges[:-1][inside]
    hi = edges[1:][inside]
    q = np.array([_mass(state, params, a, b) for a, b in zip(lo, hi)])
    q = q / q.sum()

    centers = 0.5 * (lo + hi)
    r2_mc = float(np.sum(p * centers**2))
    norm = quad(lambda r: float(density_at(state, params, r)) * r, 0.0, radius, limit=200)[0]
    r2_mf = quad(lambda r: float(density_at(state, params, r)) * r**3, 0.0, radius, limit=200)[0] / norm
    return ComparisonResult(
        l1_distance=float(np.abs(p - q).sum()),
        second_moment_ratio=r2_mc / r2_mf,
        fraction_beyond_radius=1.0 - counts_in.sum() / total,
        bins_used=int(inside.sum()),
    )


def _mass(state, params, r_lo: float, r_hi: float) -> float:
    # composite Simpson per bin; the integrand rho(r)*r is smooth
    r = np.linspace(r_lo, r_hi, 9)
    f = density_at(state, params, r) * r
    h = (r_hi - r_lo) / 8.0
    return float(h / 3.0 * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum() + 2.0 * f[2:-1:2].sum()))


def merge_chains(chains: list[McObservables]) -> dict:
    """Merge independent same-config chains (distinct seeds): weighted means
    with per-chain error bars combined in quadrature."""
    if not chains:
        raise ValueError("no chains to merge")
    w = np.array([c.retained_sweeps for c in chains], dtype=float)
    w = w / w.sum()

    def combine(vals, ses):
        mean = float(np.sum(w * vals))
        se = float(math.sqrt(np.sum((w * ses) ** 2)))
        return mean, se

    msr, msr_se = combine(
        np.array([c.mean_square_radius for c in chains]),
        np.array([c.mean_square_radius_se for c in chains]),
    )
    kin, kin_se = combine(
        np.array([c.kinetic_per_filament for c in chains]),
        np.array([c.kinetic_per_filament_se for c in chains]),
    )
    hist = np.sum([c.histogram_counts for c in chains], axis=0)
    return {
        "mean_square_radius": msr,
        "mean_square_radius_se": msr_se,
        "kinetic_per_filament": kin,
        "kinetic_per_filament_se": kin_se,
        "histogram_counts": hist,
        "histogram_overflow": int(sum(c.histogram_overflow for c in chains)),
        "seeds": [c.config.seed for c in chains],
    }
