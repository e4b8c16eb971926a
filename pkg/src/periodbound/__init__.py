"""Period lower bounds for semilinear evolution equations ``u' = -Au + f(u)``.

The package computes the constant ``K_alpha`` in ``T >= K_alpha * L**(-1/(1-alpha))``,
builds periodic orbits with known data in a diagonal spectral model, simulates
them, and audits each estimate used to derive the bound.
"""

from periodbound.errors import (
    AlignmentError,
    ConvergenceError,
    DegenerateOrbitError,
    DivergenceError,
    IllConditionedSectionError,
    InsufficientDataError,
    NotPeriodicError,
    ParameterError,
    PeriodBoundError,
    PreconditionError,
    ResolutionError,
    UndefinedOperatorError,
)
from periodbound.spectral import SpectralSplit, SpectrumModel, split_at
from periodbound.bounds import (
    BoundParams,
    BoundResult,
    bracket_family,
    busenberg_banach_bound,
    gamma_constant,
    k_alpha,
    m_alpha,
    optimize_bracket,
    wirtinger_check,
    yorke_bound,
)
from periodbound.evolution import (
    IntegratorConfig,
    SemilinearSystem,
    Trajectory,
    integrate,
    lipschitz_estimate,
    step,
)
from periodbound.orbits import (
    PeriodicOrbitCertificate,
    ProofChainReport,
    RotationOrbitSpec,
    detect_period,
    make_rotation_system,
    refine_orbit,
    verify_bound,
    verify_proof_chain,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "BoundParams",
    "BoundResult",
    "ConvergenceError",
    "DegenerateOrbitError",
    "DivergenceError",
    "IllConditionedSectionError",
    "InsufficientDataError",
    "IntegratorConfig",
    "NotPeriodicError",
    "ParameterError",
    "PeriodBoundError",
    "PeriodicOrbitCertificate",
    "PreconditionError",
    "ProofChainReport",
    "ResolutionError",
    "RotationOrbitSpec",
    "SemilinearSystem",
    "SpectralSplit",
    "SpectrumModel",
    "Trajectory",
    "UndefinedOperatorError",
    "bracket_family",
    "busenberg_banach_bound",
    "detect_period",
    "gamma_constant",
    "integrate",
    "k_alpha",
    "lipschitz_estimate",
    "m_alpha",
    "make_rotation_system",
    "optimize_bracket",
    "refine_orbit",
    "split_at",
    "step",
    "verify_bound",
    "verify_proof_chain",
    "wirtinger_check",
    "yorke_bound",
]
