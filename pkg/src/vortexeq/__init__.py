"""Statistical equilibrium of confined quasi-2D vortex / plasma filament ensembles.

Mean-field side: a radial Liouville-type ODE with a harmonic source
modulation is integrated and closed self-consistently, yielding density
profiles and thermodynamic curves (energy, temperature, central density,
pressure, entropy, specific heat) over the confinement-strength /
scaled-radius plane, including detection of negative-specific-heat
(metastable) regimes.

Direct side: Metropolis sampling of the discrete N-filament energy
functional cross-validates the mean-field profiles and equipartition.
"""

from .model import ModelParams, InvalidParametersError, mu_from_mu_prime, mu_prime_from_mu, validate
from .liouville import ScaledProfile, BlowUpError, ToleranceFailureError, integrate_family
from .selfconsistent import ConsistentState, NoBracketError, UnreachableError, MultipleRootsWarning, solve_state
from .thermo import ThermoPoint, NonpositivePressureError, compute_point
from .sweep import SweepTable, EmptySweepError, run_sweep, detect_metastable, monotonicity_report
from .mc import (
    FilamentEnsemble,
    McConfig,
    McObservables,
    ComparisonResult,
    CoincidentPointsError,
    MismatchedParametersError,
    discrete_energy,
    make_lattice_ensemble,
    metropolis_run,
    compare_to_meanfield,
    merge_chains,
)

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "InvalidParametersError",
    "mu_from_mu_prime",
    "mu_prime_from_mu",
    "validate",
    "ScaledProfile",
    "BlowUpError",
    "ToleranceFailureError",
    "integrate_family",
    "ConsistentState",
    "NoBracketError",
    "UnreachableError",
    "MultipleRootsWarning",
    "solve_state",
    "ThermoPoint",
    "NonpositivePressureError",
    "compute_point",
    "SweepTable",
    "EmptySweepError",
    "run_sweep",
    "detect_metastable",
    "monotonicity_report",
    "FilamentEnsemble",
    "McConfig",
    "McObservables",
    "ComparisonResult",
    "CoincidentPointsError",
    "MismatchedParametersError",
    "discrete_energy",
    "make_lattice_ensemble",
    "metropolis_run",
    "compare_to_meanfield",
    "merge_chains",
    "__version__",
]
