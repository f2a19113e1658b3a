"""The double-SCF loop: induced dipoles outside, VQE-SCF inside."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..molint import IntegralSet, Molecule, build_basis, compute_core_integrals, read_xyz
from ..pe import EmbeddingPotential, InducedDipoles, PolarizableEmbedding, induction_energy, read_potential
from ..qop import PauliSum, build_hamiltonian
from ..qsim import SampleEstimate, expectation_sampled
from ..scf import ActiveSpace, SCFResult, reduce_to_active_space, run_rhf
from ..vqescf import OrbitalProblem, VQESCFOptions, VQESCFResult, build_pool, run_vqescf
from .config import ConfigError, RunConfig

log = logging.getLogger("pevqe.driver")


@dataclass
class MacroIterationRecord:
    iteration: int
    energy: float
    e_vacuum: float
    e_es: float
    e_ind: float
    delta_energy: float
    dipole_rms: float
    cycles: int
    n_operators: int
    cnots: int

    def as_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "energy": self.energy,
            "e_vacuum": self.e_vacuum,
            "e_es": self.e_es,
            "e_ind": self.e_ind,
            "delta_energy": self.delta_energy,
            "dipole_rms": self.dipole_rms,
            "vqescf_cycles": self.cycles,
            "n_operators": self.n_operators,
            "cnots": self.cnots,
        }


@dataclass
class System:
    """Everything fixed before the first macro-iteration."""

    molecule: Molecule
    shells: list
    integrals: IntegralSet
    rhf: SCFResult
    active: ActiveSpace
    potential: EmbeddingPotential | None = None
    embedding: PolarizableEmbedding | None = None


@dataclass
class RunResult:
    config: RunConfig
    system: System
    vqescf: VQESCFResult
    records: list[MacroIterationRecord]
    converged: bool
    energy: float
    e_vacuum: float
    e_es: float = 0.0
    e_ind: float = 0.0
    dipoles: InducedDipoles | None = None
    sample: SampleEstimate | None = None
    vacuum_reference: VQESCFResult | None = None
    message: str = ""

    @property
    def C(self) -> np.ndarray:
        return self.vqescf.C

    @property
    def cnots(self) -> int:
        return self.vqescf.adapt.cnots


def resolve_active_space(config: RunConfig, n_electrons: int, n_mo: int) -> ActiveSpace:
    n_el, orbitals = config.active_electrons, config.active_orbitals
    if orbitals is None:
        if n_el is not None and n_el != n_electrons:
            raise ConfigError("active_electrons given without active_orbitals")
        return ActiveSpace(n_electrons, tuple(range(n_mo)))
    if n_el is None:
        raise ConfigError("active_orbitals requires active_electrons")
    if isinstance(orbitals, int):
        return ActiveSpace.window(n_electrons, n_mo, n_el, orbitals)
    n_inactive, rem = divmod(n_electrons - n_el, 2)
    if rem or n_inactive < 0:
        raise ConfigError("inactive electron count must be even and non-negative")
    inactive = tuple(i for i in range(n_mo) if i not in orbitals)[:n_inactive]
    active = ActiveSpace(n_el, orbitals, inactive)
    active.validate(n_mo, n_electrons)
    return active


def prepare_system(config: RunConfig) -> System:
    molecule = read_xyz(config.geometry, charge=config.charge)
    if molecule.n_electrons % 2:
        raise ConfigError("only closed-shell (even electron count) molecules are supported")
    shells = build_basis(molecule, config.basis)
    integrals = compute_core_integrals(molecule, shells)
    rhf = run_rhf(integrals, molecule)
    active = resolve_active_space(config, molecule.n_electrons, rhf.C.shape[1])
    potential = embedding = None
    if config.potential is not None:
        if not config.potential.exists():
            raise FileNotFoundError(f"potential file {config.potential} not found")
        potential = read_potential(config.potential)
        embedding = PolarizableEmbedding(shells, molecule, potential, config.dipole_solver)
    return System(molecule, shells, integrals, rhf, active, potential, embedding)


def vqescf_options(config: RunConfig) -> VQESCFOptions:
    return VQESCFOptions(
        pool=config.pool,
        adapt_eps=config.adapt_eps,
        max_operators=config.max_operators,
        theta_tol=config.theta_tol,
        orbital_tol=config.orbital_tol,
        max_cycles=config.max_cycles,
        optimize_orbitals=config.optimize_orbitals,
    )


def ao_density(C: np.ndarray, active: ActiveSpace, D_active: np.ndarray) -> np.ndarray:
    """AO density from doubly occupied inactive orbitals plus the active 1-RDM."""
    Ci = C[:, list(active.inactive)]
    Ca = C[:, list(active.active)]
    return 2.0 * Ci @ Ci.T + Ca @ D_active @ Ca.T


def reference_rdm(active: ActiveSpace) -> np.ndarray:
    """Active 1-RDM of the closed-shell determinant in the active window."""
    D = np.zeros((active.n_active, active.n_active))
    n_docc = active.n_active_electrons // 2
    D[np.arange(n_docc), np.arange(n_docc)] = 2.0
    if active.n_active_electrons % 2:
        D[n_docc, n_docc] = 1.0
    return D


def _rms(a, b) -> float:
    diff = np.asarray(a) - np.asarray(b)
    return float(np.sqrt(np.mean(diff**2))) if diff.size else 0.0


def free_energy_problem(system: System, mu: InducedDipoles) -> OrbitalProblem:
    """Orbital problem whose expectation value is the reported (free) energy.

    Uses v_es + 1/2 v_ind with the scalar E_es,nuc - 1/2 mu.F_static, which
    equals <H_vac> + E_es + E_ind when mu is consistent with the density.
    """
    emb = system.embedding
    if emb is None:
        return OrbitalProblem(system.integrals, system.active)
    f_static = emb.field_nuclear.values + emb.field_multipole.values
    scalar = emb.e_es_nuc - 0.5 * float(np.sum(mu.mu * f_static))
    return OrbitalProblem(system.integrals, system.active, emb.v_es + 0.5 * emb.induction_operator(mu), scalar)


def sampling_hamiltonian(system: System, C: np.ndarray, mu: InducedDipoles | None) -> PauliSum:
    problem = free_energy_problem(system, mu) if mu is not None else OrbitalProblem(system.integrals, system.active)
    return build_hamiltonian(reduce_to_active_space(problem.mo(C), system.active))


def run_vacuum(system: System, config: RunConfig) -> VQESCFResult:
    pool = build_pool(system.active.n_active, config.pool)
    return run_vqescf(OrbitalProblem(system.integrals, system.active), system.rhf.C, vqescf_options(config), pool=pool)


def run_pe_vqescf(config: RunConfig, system: System | None = None) -> RunResult:
    system = system or prepare_system(config)
    active = system.active
    opts = vqescf_options(config)
    pool = build_pool(active.n_active, config.pool)

    if system.embedding is None:
        res = run_vqescf(OrbitalProblem(system.integrals, active), system.rhf.C, opts, pool=pool)
        rec = MacroIterationRecord(1, res.energy, res.energy, 0.0, 0.0, 0.0, 0.0, res.cycles,
                                   res.adapt.n_operators, res.adapt.cnots)
        result = RunResult(config, system, res, [rec], res.converged, res.energy, res.energy,
                           message="" if res.converged else "VQE-SCF did not converge")
        return _finish(result, config)

    emb = system.embedding
    C = system.rhf.C
    D_ao = ao_density(C, active, reference_rdm(active))
    mu, _ = emb.induced_dipoles(D_ao)
    current = {"mu": mu}

    def problem_for(mu_):
        return OrbitalProblem(system.integrals, active, emb.v_es + emb.induction_operator(mu_), emb.e_es_nuc)

    def refresh(C_, D_):
        current["mu"], _ = emb.induced_dipoles(ao_density(C_, active, D_))
        return problem_for(current["mu"])

    records: list[MacroIterationRecord] = []
    warm = None
    e_prev = np.inf
    converged = False
    for it in range(1, config.max_macro + 1):
        mu = current["mu"]
        res = run_vqescf(problem_for(mu), C, opts, warm=warm, pool=pool,
                         refresh=refresh if config.refresh_dipoles else None)
        C, warm = res.C, res.adapt
        mu_used = current["mu"]
        D_ao = ao_density(C, active, res.D)
        mu_new, F_new = emb.induced_dipoles(D_ao)
        e_es = float(np.sum(D_ao * emb.v_es)) + emb.e_es_nuc
        e_ind = induction_energy(mu_new, F_new)
        e_vac = res.energy - float(np.sum(D_ao * (emb.v_es + emb.induction_operator(mu_used)))) - emb.e_es_nuc
        energy = e_vac + e_es + e_ind
        d_e = energy - e_prev if np.isfinite(e_prev) else np.inf
        rms = _rms(mu_new.mu, mu.mu)
        rec = MacroIterationRecord(it, energy, e_vac, e_es, e_ind, float(d_e), rms, res.cycles,
                                   res.adapt.n_operators, res.adapt.cnots)
        records.append(rec)
        log.info("macro %d, %.12f, dE %.3e, dmu %.3e, E_ind %.3e", it, energy, d_e, rms, e_ind)
        current["mu"] = mu_new
        e_prev = energy
        if abs(d_e) < config.energy_tol and rms < config.dipole_tol and res.converged:
            converged = True
            break
    message = "" if converged else f"double SCF not converged in {config.max_macro} macro-iterations"
    last = records[-1]
    result = RunResult(config, system, res, records, converged, last.energy, last.e_vacuum,
                       last.e_es, last.e_ind, current["mu"], message=message)
    return _finish(result, config)


def _finish(result: RunResult, config: RunConfig) -> RunResult:
    if config.shots > 0:
        H = sampling_hamiltonian(result.system, result.C, result.dipoles)
        psi = result.vqescf.adapt.circuit.state()
        result.sample = expectation_sampled(psi, H, config.shots, config.seed)
    if config.compare_vacuum and result.system.embedding is not None:
        result.vacuum_reference = run_vacuum(result.system, config)
    return result
