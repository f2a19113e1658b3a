"""VQE-SCF: ADAPT-VQE for the active-space state alternating with orbital optimization."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..molint import IntegralSet
from ..qop import build_hamiltonian
from ..qsim import AnsatzCircuit, compute_rdms, hf_occupation
from ..scf import ActiveSpace, EmbeddedIntegrals, MOIntegrals, reduce_to_active_space, transform_to_mo
from .adapt import AdaptState, run_adapt
from .optimize import bfgs
from .orbitals import (
    OrbitalStepResult,
    energy_from_rdms,
    kappa_matrix,
    nonredundant_pairs,
    orbital_gradient,
    rotated_mo,
    rotation,
)
from .pool import OperatorPool, build_pool

log = logging.getLogger("pevqe.vqescf")


class VQESCFConvergenceError(RuntimeError):
    pass


@dataclass
class VQESCFOptions:
    pool: str = "fermionic-SD"
    adapt_eps: float = 1e-3
    max_operators: int = 50
    vqe_tol: float = 1e-8
    theta_tol: float = 1e-7
    orbital_tol: float = 1e-6
    max_cycles: int = 50
    orbital_max_iter: int = 200
    optimize_orbitals: bool = True
    diis_size: int = 6


class OrbitalProblem:
    """Supplies orbital-dependent integrals: the vacuum Hamiltonian plus an optional
    frozen AO one-electron operator and scalar energy (the embedding terms)."""

    def __init__(self, integrals: IntegralSet, active: ActiveSpace, one_electron=None, e_scalar: float = 0.0):
        self.integrals = integrals
        self.active = active
        self.one_electron = one_electron
        self.e_scalar = float(e_scalar)

    def mo(self, C) -> MOIntegrals:
        h_ao = self.integrals.h if self.one_electron is None else self.integrals.h + self.one_electron
        mo = transform_to_mo(self.integrals, C, h_ao)
        return MOIntegrals(mo.h, mo.g, mo.e_nuc + self.e_scalar)

    def embedded(self, C) -> EmbeddedIntegrals:
        return reduce_to_active_space(self.mo(C), self.active)


def anderson_step(xs: list[np.ndarray], rs: list[np.ndarray]) -> np.ndarray:
    """Extrapolated next iterate for the fixed-point map x -> x + r(x).

    Minimizes |sum_i c_i r_i| subject to sum_i c_i = 1 and returns sum_i c_i (x_i + r_i).
    """
    m = len(rs)
    if m == 1:
        return xs[0] + rs[0]
    R = np.array(rs)
    B = np.zeros((m + 1, m + 1))
    B[:m, :m] = R @ R.T
    B[:m, m] = B[m, :m] = -1.0
    rhs = np.zeros(m + 1)
    rhs[m] = -1.0
    scale = np.max(np.abs(np.diag(B)[:m]))
    B[:m, :m] /= scale
    try:
        c = np.linalg.solve(B, rhs)[:m]
    except np.linalg.LinAlgError:
        return xs[-1] + rs[-1]
    return sum(ci * (x + r) for ci, x, r in zip(c, xs, rs))


def optimize_orbitals_fixed_rdms(mo: MOIntegrals, active: ActiveSpace, D, d, pairs, gtol, max_iter) -> OrbitalStepResult:
    """Quasi-Newton minimization of E(kappa) with the active RDMs held fixed."""
    n = mo.n_mo

    def fg(kappa):
        U = rotation(kappa_matrix(kappa, pairs, n))
        rmo = rotated_mo(mo, U)
        return energy_from_rdms(rmo, active, D, d), orbital_gradient(rmo, active, D, d, pairs)

    res = bfgs(fg, np.zeros(len(pairs)), gtol=gtol, max_iter=max_iter, max_step=0.5)
    return OrbitalStepResult(rotation(kappa_matrix(res.x, pairs, n)), res.x, res.fun, res.converged, res.nit)


@dataclass
class VQESCFResult:
    C: np.ndarray
    adapt: AdaptState
    energy: float
    D: np.ndarray
    d: np.ndarray
    converged: bool
    cycles: int
    trace: list[dict] = field(default_factory=list)
    theta_gradient: float = 0.0
    orbital_gradient: float = 0.0

    @property
    def circuit(self) -> AnsatzCircuit:
        return self.adapt.circuit


def run_vqescf(
    problem: OrbitalProblem,
    C0: np.ndarray,
    options: VQESCFOptions | None = None,
    warm: AdaptState | None = None,
    pool: OperatorPool | None = None,
    raise_on_failure: bool = False,
    refresh=None,
) -> VQESCFResult:
    """Alternate ADAPT-VQE at fixed orbitals with orbital optimization at fixed RDMs.

    The returned orbitals are those at which the returned state and RDMs were
    evaluated. ``refresh(C, D_active)``, if given, is called before every cycle
    after the first and returns a replacement OrbitalProblem.
    """
    opts = options or VQESCFOptions()
    active = problem.active
    n_act = active.n_active
    pool = pool or build_pool(n_act, opts.pool)
    circuit = warm.circuit if warm is not None else AnsatzCircuit(hf_occupation(n_act, active.n_active_electrons))
    history = list(warm.history) if warm is not None else []
    C = C0.copy()
    n_mo = C.shape[1]
    pairs = nonredundant_pairs(active, n_mo) if opts.optimize_orbitals else []
    trace = []
    converged = False
    # cumulative rotation parameters (first-order bookkeeping) and frozen-RDM steps
    x = np.zeros(len(pairs))
    xs: list[np.ndarray] = []
    rs: list[np.ndarray] = []
    prev_energy = np.inf
    for cycle in range(1, opts.max_cycles + 1):
        if refresh is not None and cycle > 1:
            problem = refresh(C, D)
        mo = problem.mo(C)
        H = build_hamiltonian(reduce_to_active_space(mo, active))
        state = run_adapt(H, pool, circuit, opts.adapt_eps, opts.max_operators, opts.vqe_tol, history)
        circuit, history = state.circuit, state.history
        D, d = compute_rdms(circuit.state(), n_act)
        energy = state.energy
        gk = orbital_gradient(mo, active, D, d, pairs) if pairs else np.zeros(0)
        gk_max = float(np.max(np.abs(gk))) if gk.size else 0.0
        gt_max = float(np.max(np.abs(state.theta_gradient))) if state.theta_gradient.size else 0.0
        rec = dict(cycle=cycle, energy=energy, grad_theta=gt_max, grad_kappa=gk_max,
                   n_ops=state.n_operators, n_cnots=state.cnots)
        trace.append(rec)
        C_eval = C
        log.info("%d, %.12f, %.3e, %.3e, %d, %d", cycle, energy, gt_max, gk_max, state.n_operators, state.cnots)
        if gk_max < opts.orbital_tol and gt_max < opts.theta_tol and state.converged:
            converged = True
            break
        if gk_max >= opts.orbital_tol:
            step = optimize_orbitals_fixed_rdms(mo, active, D, d, pairs, 0.1 * opts.orbital_tol, opts.orbital_max_iter)
            if energy > prev_energy + 1e-9:
                xs, rs = [], []
            xs.append(x.copy())
            rs.append(step.kappa.copy())
            xs, rs = xs[-opts.diis_size:], rs[-opts.diis_size:]
            x_next = anderson_step(xs, rs) if opts.diis_size > 1 else x + step.kappa
            C = C @ rotation(kappa_matrix(x_next - x, pairs, n_mo))
            x = x_next
        prev_energy = energy
    if not converged and raise_on_failure:
        raise VQESCFConvergenceError(f"VQE-SCF not converged in {opts.max_cycles} cycles")
    return VQESCFResult(C_eval, state, energy, D, d, converged, cycle, trace, gt_max, gk_max)
