"""Thermodynamic observables of a consistent state.

All observables are closed-form functions of z, v1(z), v1'(z) and the model
parameters; energies come out in units lambda_total**2/epsilon and
temperatures in lambda_total/epsilon.

Unit-convention note: the Poisson constant of the mean-field equations is
4*pi/epsilon while the 2D log kernel's Laplacian carries 2*pi, so the total
integrated circulation density equals lambda_total/2 (not lambda_total).
The formulas are implemented exactly as the model states them and
:func:`circulation_integral` is checked against lambda_total/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .model import ModelParams
from .selfconsistent import ConsistentState

REGIME_UNIFORM = "Uniform"
REGIME_EDGE = "EdgePeaked"
REGIME_CENTER = "CenterPeaked"

UNIFORM_RTOL = 1e-6  # max relative density variation still called Uniform

THERMO_CSV_HEADER = "mu,z,a,beta,T,E,rho0,p,S,regime,virial_residual"


class NonpositivePressureError(RuntimeError):
    """p <= 0 cannot occur for a valid state; signals upstream corruption."""


@dataclass
class ThermoPoint:
    """All observables at one (mu, z); serializes to one CSV row."""

    mu: float
    z: float
    a: float
    beta: float
    temperature: float
    energy: float
    rho0: float
    pressure: float
    entropy: float
    regime: str
    virial_residual: float

    def to_csv_row(self) -> str:
        return ",".join(
            [
                repr(float(self.mu)),
                repr(float(self.z)),
                repr(float(self.a)),
                repr(float(self.beta)),
                repr(float(self.temperature)),
                repr(float(self.energy)),
                repr(float(self.rho0)),
                repr(float(self.pressure)),
                repr(float(self.entropy)),
                self.regime,
                repr(float(self.virial_residual)),
            ]
        )

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "z": self.z,
            "a": self.a,
            "beta": self.beta,
            "T": self.temperature,
            "E": self.energy,
            "rho0": self.rho0,
            "p": self.pressure,
            "S": self.entropy,
            "regime": self.regime,
            "virial_residual": self.virial_residual,
        }


def beta_of(state: ConsistentState, params: ModelParams) -> float:
    """Inverse temperature beta = -epsilon * z * v1'(z) / lambda_total."""
    return -params.epsilon * state.z * state.v1p_z / params.lambda_total


def energy_of(state: ConsistentState, params: ModelParams) -> float:
    """Total energy per unit length from the virial route, closed form."""
    y = -state.z * state.v1p_z
    expo = -state.v1_z + state.mu * state.z * state.v1p_z
    return (params.lambda_total**2 / params.epsilon) * (
        state.z**2 * math.exp(expo) / (2.0 * y * y) - 1.0 / y
    )


def central_density(state: ConsistentState, params: ModelParams) -> float:
    """rho(0) = epsilon * z**2 / (4*pi*beta*R**2)."""
    beta = beta_of(state, params)
    return params.epsilon * state.z**2 / (4.0 * math.pi * beta * params.radius**2)


def density_at(state: ConsistentState, params: ModelParams, r) -> np.ndarray:
    """Circulation density rho(r) on [0, R].

    rho(r) = rho(0) * exp(-v1(r1) + mu * r**2 * z * v1'(z) / R**2) with
    r1 = z*r/R evaluated from the dense profile.
    """
    r = np.asarray(r, dtype=float)
    rho0 = central_density(state, params)
    r1 = state.z * r / params.radius
    v1, _ = state.profile.evaluate(r1)
    expo = -v1 + state.mu * (r / params.radius) ** 2 * state.z * state.v1p_z
    return rho0 * np.exp(expo)


def density_profile(state: ConsistentState, params: ModelParams, n_samples: int):
    """Sampled (r, rho(r)) on [0, R]; the first sample equals rho(0)."""
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    r = np.linspace(0.0, params.radius, n_samples)
    return r, density_at(state, params, r)


def pressure_of(state: ConsistentState, params: ModelParams) -> float:
    """Surface pressure p = 2*rho(R) / (3*beta)."""
    beta = beta_of(state, params)
    rho_edge = float(density_at(state, params, params.radius))
    return 2.0 * rho_edge / (3.0 * beta)


def virial_check(state: ConsistentState, params: ModelParams) -> float:
    """|E - (3*p*V - lambda_total/beta)| with V = pi*R**2, through the
    independent pressure/density code path."""
    beta = beta_of(state, params)
    p = pressure_of(state, params)
    volume = math.pi * params.radius**2
    return abs(energy_of(state, params) - (3.0 * p * volume - params.lambda_total / beta))


def entropy_of(state: ConsistentState, params: ModelParams) -> float:
    """Entropy of the most-probable macrostate (k_B = 1)."""
    beta = beta_of(state, params)
    p = pressure_of(state, params)
    if p <= 0:
        raise NonpositivePressureError(f"pressure {p} is not positive")
    lam, eps, gam = params.lambda_total, params.epsilon, params.gamma
    e = energy_of(state, params)
    return (
        beta * (e - (lam**2 / eps) * math.log(params.radius))
        - lam * math.log(p * beta**2)
        + lam * math.log(2.0 * math.pi * gam)
    ) / gam


def classify_regime(state: ConsistentState, params: ModelParams, n_samples: int = 257) -> str:
    """Uniform / EdgePeaked / CenterPeaked from the literal density comparison."""
    _, rho = density_profile(state, params, n_samples)
    variation = (rho.max() - rho.min()) / rho.max()
    if variation <= UNIFORM_RTOL:
        return REGIME_UNIFORM
    return REGIME_EDGE if rho[-1] > rho[0] else REGIME_CENTER


def circulation_integral(state: ConsistentState, params: ModelParams) -> float:
    """2*pi * integral of rho(r) r dr over [0, R] (equals lambda_total/2)."""
    val, _ = quad(
        lambda r: 2.0 * math.pi * float(density_at(state, params, r)) * r,
        0.0,
        params.radius,
        epsabs=1e-13,
        epsrel=1e-10,
        limit=200,
    )
    return val


def compute_point(state: ConsistentState, params: ModelParams) -> ThermoPoint:
    """Evaluate every observable of a state into a ThermoPoint."""
    beta = beta_of(state, params)
    return ThermoPoint(
        mu=state.mu,
        z=state.z,
        a=state.a,
        beta=beta,
        temperature=1.0 / beta,
        energy=energy_of(state, params),
        rho0=central_density(state, params),
        pressure=pressure_of(state, params),
        entropy=entropy_of(state, params),
        regime=classify_regime(state, params),
        virial_residual=virial_check(state, params),
    )
