"""Physical parameters and unit conventions shared by every module.

Natural units are used throughout: circulations in units of the total
circulation, lengths in units of the confinement radius, energies in
lambda_total**2 / epsilon and temperatures in lambda_total / epsilon, so the
default parameter set (all ones) produces dimensionless outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Mapping


class InvalidParametersError(ValueError):
    """Raised by :func:`validate`; ``errors`` lists every violated bound."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(errors))


@dataclass(frozen=True)
class ModelParams:
    """Model constants.

    lambda_total : total circulation of the ensemble (Lambda = Gamma * N)
    epsilon      : interaction coupling constant (1/epsilon multiplies the
                   pairwise log interaction), > 0
    gamma        : circulation carried by one filament
    alpha        : core elasticity constant, log(b/a) + 1, taken as input
    radius       : confinement radius R (where the mean-field density support ends)
    mu           : dimensionless confinement strength,
                   mu = epsilon * mu_prime * R**2 / (2 * lambda_total)
    """

    lambda_total: float = 1.0
    epsilon: float = 1.0
    gamma: float = 1.0
    alpha: float = 1.0
    radius: float = 1.0
    mu: float = 0.0


def validate(params: ModelParams) -> ModelParams:
    """Check all parameter invariants; report every violation at once."""
    errors = []
    if not params.lambda_total > 0:
        errors.append("lambda_total must be positive")
    if not params.epsilon > 0:
        errors.append("epsilon must be positive")
    if not params.gamma > 0:
        errors.append("gamma must be positive")
    if not params.alpha > 0:
        errors.append("alpha must be positive")
    if not params.radius > 0:
        errors.append("radius must be positive")
    if params.mu < 0:
        errors.append("mu must be non-negative")
    if params.gamma > params.lambda_total:
        errors.append("gamma exceeds total circulation")
    if errors:
        raise InvalidParametersError(errors)
    return params


def mu_from_mu_prime(mu_prime: float, params: ModelParams) -> float:
    """Dimensionless confinement strength from the trap frequency parameter.

    mu = epsilon * mu_prime * R**2 / (2 * lambda_total); linear and strictly
    increasing in mu_prime.
    """
    if mu_prime < 0:
        raise ValueError("mu_prime must be non-negative")
    return params.epsilon * mu_prime * params.radius**2 / (2.0 * params.lambda_total)


def mu_prime_from_mu(mu: float, params: ModelParams) -> float:
    """Inverse of :func:`mu_from_mu_prime`."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    return 2.0 * params.lambda_total * mu / (params.epsilon * params.radius**2)


def params_from_mapping(mapping: Mapping[str, str], base: ModelParams | None = None) -> ModelParams:
    """Build validated ModelParams from a key=value mapping (e.g. a config file).

    Unknown keys are ignored (the same file may carry sampler settings).
    """
    base = base if base is not None else ModelParams()
    known = {f.name for f in fields(ModelParams)}
    updates = {}
    for key, raw in mapping.items():
        if key in known:
            try:
                updates[key] = float(raw)
            except ValueError as exc:
                raise InvalidParametersError([f"{key}: not a number: {raw!r}"]) from exc
    return validate(replace(base, **updates))
