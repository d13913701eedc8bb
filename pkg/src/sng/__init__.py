"""Self-gravitating Schrödinger solver: universal bound states by shooting,
physical-unit rescaling, an independent self-consistent-field cross-check,
and Crank–Nicolson time evolution with pluggable nonlinearities."""

from .errors import (
    ConvergenceError,
    InvalidArgumentError,
    InvalidBracketError,
    InvalidFieldError,
    SngError,
    StepRejectedError,
    WrongStateError,
)
from .evolution import (
    NonlinearityKind,
    ObservableSeries,
    RadialState,
    continuity_residual,
    evolve,
    gaussian_state,
    rms_width,
    scheme_energy,
    state_from_profile,
    state_norm,
    step,
)
from .grids import (
    RadialField,
    RadialGrid,
    integrate_radial,
    make_grid,
    radial_laplacian,
    solve_radial_poisson,
)
from .physical import (
    EnergyBreakdown,
    PhysicalParams,
    PhysicalProfile,
    energy_breakdown,
    gravitational_bohr_radius,
    half_max_radius,
    hamiltonian_functional,
    rescale_to_physical,
    rms_radius,
)
from .scf import ScfUniversal, SCFResult, scf_solve, universal_from_scf
from .shooting import (
    ShootOutcome,
    UniversalSolution,
    default_grid,
    find_bracket,
    integrate_universal,
    scan_brackets,
    shoot_gamma0,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "SngError",
    "InvalidArgumentError",
    "InvalidFieldError",
    "InvalidBracketError",
    "WrongStateError",
    "ConvergenceError",
    "StepRejectedError",
    # grids
    "RadialGrid",
    "RadialField",
    "make_grid",
    "integrate_radial",
    "solve_radial_poisson",
    "radial_laplacian",
    # shooting
    "ShootOutcome",
    "UniversalSolution",
    "default_grid",
    "integrate_universal",
    "scan_brackets",
    "find_bracket",
    "shoot_gamma0",
    # physical
    "PhysicalParams",
    "PhysicalProfile",
    "EnergyBreakdown",
    "gravitational_bohr_radius",
    "rescale_to_physical",
    "half_max_radius",
    "rms_radius",
    "energy_breakdown",
    "hamiltonian_functional",
    # scf
    "SCFResult",
    "ScfUniversal",
    "scf_solve",
    "universal_from_scf",
    # evolution
    "RadialState",
    "NonlinearityKind",
    "ObservableSeries",
    "state_from_profile",
    "gaussian_state",
    "state_norm",
    "rms_width",
    "scheme_energy",
    "step",
    "evolve",
    "continuity_residual",
]
