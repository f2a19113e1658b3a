"""ADAPT-VQE with orbital optimization (VQE-SCF)."""
from .adapt import AdaptState, VQEResult, adapt_gradient_screen, run_adapt, select_operator, vqe_minimize
from .core import (
    OrbitalProblem,
    VQESCFConvergenceError,
    VQESCFOptions,
    VQESCFResult,
    optimize_orbitals_fixed_rdms,
    run_vqescf,
)
from .optimize import OptimizeResult, bfgs
from .orbitals import (
    energy_from_rdms,
    full_rdms,
    generalized_fock,
    kappa_matrix,
    nonredundant_pairs,
    orbital_gradient,
    orbital_step,
    rotated_mo,
    rotation,
)
from .pool import OperatorPool, build_pool
