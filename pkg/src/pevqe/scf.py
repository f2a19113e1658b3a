"""Restricted Hartree-Fock, MO transformation and active-space reduction."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .molint import IntegralSet, Molecule


class SCFConvergenceError(RuntimeError):
    def __init__(self, message, last_energy):
        super().__init__(f"{message} (last energy {last_energy:.12f})")
        self.last_energy = last_energy


@dataclass
class SCFResult:
    C: np.ndarray
    orbital_energies: np.ndarray
    E_total: float
    converged: bool
    density: np.ndarray
    fock: np.ndarray
    n_occ: int
    n_iter: int = 0


def fix_phase(C: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude coefficient of every column positive."""
    C = C.copy()
    idx = np.argmax(np.abs(C), axis=0)
    signs = np.sign(C[idx, np.arange(C.shape[1])])
    signs[signs == 0] = 1.0
    return C * signs


def coulomb_exchange(eri, D):
    J = np.einsum("pqrs,rs->pq", eri, D, optimize=True)
    K = np.einsum("prqs,rs->pq", eri, D, optimize=True)
    return J, K


def run_rhf(
    integrals: IntegralSet,
    molecule: Molecule,
    one_electron_addition=None,
    *,
    max_iter: int = 200,
    diis_size: int = 8,
    e_tol: float = 1e-10,
    diis_tol: float = 1e-8,
    energy_offset: float = 0.0,
) -> SCFResult:
    """Closed-shell RHF with DIIS from a core-Hamiltonian guess.

    ``one_electron_addition`` is an AO matrix added to the core Hamiltonian
    (the embedding operator when an environment is present);
    ``energy_offset`` is a constant added to the reported energy.
    """
    nelec = molecule.n_electrons
    if nelec % 2:
        raise ValueError(f"RHF needs an even electron count, got {nelec}")
    S = integrals.S
    if np.linalg.eigvalsh(S).min() <= 0:
        raise ValueError("overlap matrix is not positive definite")
    nocc = nelec // 2
    h = integrals.h.copy()
    if one_electron_addition is not None:
        h = h + one_electron_addition
    e_const = integrals.e_nuc + energy_offset

    eps, C = scipy.linalg.eigh(h, S)
    D = 2.0 * C[:, :nocc] @ C[:, :nocc].T
    focks, errors = deque(maxlen=diis_size), deque(maxlen=diis_size)
    e_old = None
    for it in range(1, max_iter + 1):
        J, K = coulomb_exchange(integrals.eri, D)
        F = h + J - 0.5 * K
        energy = 0.5 * np.sum(D * (h + F)) + e_const
        err = F @ D @ S - S @ D @ F
        err_norm = np.linalg.norm(err)
        if e_old is not None and abs(energy - e_old) < e_tol and err_norm < diis_tol:
            C = fix_phase(C)
            return SCFResult(C, eps, energy, True, D, F, nocc, it)
        e_old = energy
        focks.append(F)
        errors.append(err)
        F_use = _diis_extrapolate(focks, errors) if len(focks) > 1 else F
        eps, C = scipy.linalg.eigh(F_use, S)
        D = 2.0 * C[:, :nocc] @ C[:, :nocc].T
    raise SCFConvergenceError(f"RHF not converged in {max_iter} iterations", energy)


def _diis_extrapolate(focks, errors):
    n = len(focks)
    B = -np.ones((n + 1, n + 1))
    B[n, n] = 0.0
    for i in range(n):
        for j in range(i + 1):
            B[i, j] = B[j, i] = np.sum(errors[i] * errors[j])
    rhs = np.zeros(n + 1)
    rhs[n] = -1.0
    try:
        c = np.linalg.solve(B, rhs)
    except np.linalg.LinAlgError:
        c = np.linalg.lstsq(B, rhs, rcond=None)[0]
    return sum(ci * Fi for ci, Fi in zip(c[:n], focks))


@dataclass(frozen=True)
class MOIntegrals:
    h: np.ndarray
    g: np.ndarray
    e_nuc: float = 0.0

    @property
    def n_mo(self) -> int:
        return self.h.shape[0]


def transform_eri(eri: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Four quarter-transformations, O(N^5) each."""
    g = np.tensordot(eri, C, axes=([3], [0]))
    g = np.tensordot(g, C, axes=([2], [0])).transpose(0, 1, 3, 2)
    g = np.tensordot(C, g, axes=([0], [1])).transpose(1, 0, 2, 3)
    g = np.tensordot(C, g, axes=([0], [0]))
    return np.ascontiguousarray(g)


def transform_to_mo(integrals: IntegralSet, C: np.ndarray, one_electron=None) -> MOIntegrals:
    h_ao = integrals.h if one_electron is None else one_electron
    if C.shape[0] != h_ao.shape[0]:
        raise ValueError(f"C has {C.shape[0]} rows but the AO basis has {h_ao.shape[0]} functions")
    return MOIntegrals(C.T @ h_ao @ C, transform_eri(integrals.eri, C), integrals.e_nuc)


@dataclass(frozen=True)
class ActiveSpace:
    n_active_electrons: int
    active: tuple[int, ...]
    inactive: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "active", tuple(int(i) for i in self.active))
        object.__setattr__(self, "inactive", tuple(int(i) for i in self.inactive))
        if set(self.active) & set(self.inactive):
            raise ValueError("active and inactive orbital lists overlap")
        if len(set(self.active)) != len(self.active) or len(set(self.inactive)) != len(self.inactive):
            raise ValueError("duplicate orbital index in active space")
        if not 0 <= self.n_active_electrons <= 2 * len(self.active):
            raise ValueError("active electron count exceeds 2 x active orbitals")

    @property
    def n_active(self) -> int:
        return len(self.active)

    @property
    def n_electrons(self) -> int:
        return self.n_active_electrons + 2 * len(self.inactive)

    def virtual(self, n_mo: int) -> tuple[int, ...]:
        used = set(self.active) | set(self.inactive)
        return tuple(i for i in range(n_mo) if i not in used)

    def validate(self, n_mo: int, n_electrons: int | None = None):
        for i in self.active + self.inactive:
            if not 0 <= i < n_mo:
                raise ValueError(f"orbital index {i} outside 0..{n_mo - 1}")
        if n_electrons is not None and self.n_electrons != n_electrons:
            raise ValueError(
                f"active space holds {self.n_electrons} electrons but the molecule has {n_electrons}"
            )

    @classmethod
    def window(cls, n_electrons: int, n_mo: int, n_active_electrons: int, n_active_orbitals: int):
        """HOMO/LUMO-centred window: the lowest doubly occupied orbitals are inactive."""
        n_inactive, rem = divmod(n_electrons - n_active_electrons, 2)
        if rem or n_inactive < 0:
            raise ValueError("inactive electron count must be even and non-negative")
        if n_inactive + n_active_orbitals > n_mo:
            raise ValueError("active space does not fit in the MO basis")
        return cls(n_active_electrons, tuple(range(n_inactive, n_inactive + n_active_orbitals)), tuple(range(n_inactive)))


@dataclass(frozen=True)
class EmbeddedIntegrals:
    h_eff: np.ndarray
    g_active: np.ndarray
    e_core: float
    n_active_electrons: int

    @property
    def n_orbitals(self) -> int:
        return self.h_eff.shape[0]

    def shifted(self, delta: float) -> "EmbeddedIntegrals":
        return EmbeddedIntegrals(self.h_eff, self.g_active, self.e_core + delta, self.n_active_electrons)


def reduce_to_active_space(mo: MOIntegrals, active: ActiveSpace, pe_one_electron=None, e_scalar: float = 0.0) -> EmbeddedIntegrals:
    """Fold the inactive orbitals into an effective one-electron operator and core energy.

    ``pe_one_electron`` (MO basis, full dimension) is treated like ``h``, so it
    also acts on the inactive electrons; ``e_scalar`` is added to the core energy.
    """
    active.validate(mo.n_mo)
    h = mo.h if pe_one_electron is None else mo.h + pe_one_electron
    g = mo.g
    act = np.array(active.active, dtype=int)
    ina = np.array(active.inactive, dtype=int)
    h_eff = h[np.ix_(act, act)].copy()
    e_core = mo.e_nuc + e_scalar
    if ina.size:
        g_ttii = g[np.ix_(act, act, ina, ina)]
        g_tiiu = g[np.ix_(act, ina, ina, act)]
        h_eff += 2.0 * np.einsum("tuii->tu", g_ttii) - np.einsum("tiiu->tu", g_tiiu)
        g_iijj = g[np.ix_(ina, ina, ina, ina)]
        e_core += 2.0 * np.trace(h[np.ix_(ina, ina)])
        e_core += 2.0 * np.einsum("iijj->", g_iijj) - np.einsum("ijji->", g_iijj)
    g_act = np.ascontiguousarray(g[np.ix_(act, act, act, act)])
    return EmbeddedIntegrals(h_eff, g_act, float(e_core), active.n_active_electrons)
