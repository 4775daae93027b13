"""Nonequilibrium steady states of boundary-driven XXZ chains and their spin-helix limit."""

from .config import TOL, Tolerances
from .gft import GftSpectrum, gft, inverse_gft, profile_spectrum, twisted_frequencies
from .model import (
    BlochVector,
    ChainSpec,
    SpinHelixSpec,
    bloch_vector,
    critical_anisotropy,
    dark_state,
    energy_current_operator,
    helix_state,
    lindblad_operator,
    polarizer,
    psi,
    psi_perp,
    shs_state,
    spin_current_operator,
    winding_number,
    xxz_hamiltonian,
)
from .ness import (
    DegenerateKernelError,
    InvalidDensityMatrix,
    Liouvillian,
    NessObservables,
    NessResult,
    NessSolverError,
    TraceDriftError,
    build_liouvillian,
    evolve,
    observables,
    purity_defect,
    solve_ness,
    trace_distance,
    von_neumann_entropy,
)
from .operators import NotHermitianError, embed, expectation, hermitian_spectrum, identity, partial_trace, pauli
from .singularities import (
    RationalAngle,
    SingularAngleSet,
    classify_numerically,
    omega_k,
    omega_lambda,
    omega_star,
    omega_star_cardinality,
)
from .zeno import (
    BlockDecomposition,
    CharacteristicDissipation,
    ZenoBasis,
    c_ratio,
    characteristic_dissipation,
    closed_form_blocks,
    gamma_ch,
    gamma_ch_n3_closed,
    principal_eigencheck,
    project_blocks,
    purity_condition,
    purity_prediction,
    reconstruct,
    zeno_basis,
)

__version__ = "0.1.0"
