"""Gaussian-basis integrals: overlap, kinetic, nuclear attraction, ERI and
potential-derivative integrals at arbitrary points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import Shell, build_basis, cartesian_components, n_basis_functions, parse_basis_text
from .engine import (
    DERIVATIVE_COMPONENTS,
    electron_repulsion,
    nuclear_attraction,
    overlap_kinetic,
    potential_derivative_integrals,
    potential_integrals,
)
from .geometry import BOHR_PER_ANGSTROM, Atom, Molecule, parse_xyz, read_xyz

__all__ = [
    "Atom", "Molecule", "Shell", "IntegralSet", "BOHR_PER_ANGSTROM", "DERIVATIVE_COMPONENTS",
    "build_basis", "cartesian_components", "compute_core_integrals", "electron_repulsion",
    "n_basis_functions", "nuclear_attraction", "nuclear_field_and_potential", "overlap_kinetic",
    "parse_basis_text", "parse_xyz", "potential_derivative_integrals", "potential_integrals", "read_xyz",
]


@dataclass(frozen=True)
class IntegralSet:
    S: np.ndarray
    T: np.ndarray
    V: np.ndarray
    eri: np.ndarray
    e_nuc: float = 0.0

    @property
    def h(self) -> np.ndarray:
        return self.T + self.V

    @property
    def nao(self) -> int:
        return self.S.shape[0]


def compute_core_integrals(molecule: Molecule, shells) -> IntegralSet:
    if not shells:
        raise ValueError("empty shell list")
    S, T = overlap_kinetic(shells)
    V = nuclear_attraction(shells, molecule)
    g = electron_repulsion(shells)
    return IntegralSet(S, T, V, g, molecule.nuclear_repulsion())


def nuclear_field_and_potential(molecule: Molecule, site, tol: float = 1e-10):
    """Potential, field (3) and field gradient (xx xy xz yy yz zz) of the nuclei at ``site``.

    The field gradient is dF_i/dr_j = -d^2 phi / dr_i dr_j.
    """
    site = np.asarray(site, dtype=float).reshape(3)
    phi = 0.0
    field = np.zeros(3)
    grad = np.zeros((3, 3))
    for k, atom in enumerate(molecule.atoms):
        r = site - atom.position
        d = np.linalg.norm(r)
        if d < tol:
            raise ZeroDivisionError(f"site {site.tolist()} coincides with nucleus {k} ({atom.symbol})")
        Z = atom.element
        phi += Z / d
        field += Z * r / d**3
        grad += Z * (3.0 * np.outer(r, r) - d * d * np.eye(3)) / d**5
    iu = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
    return phi, field, np.array([grad[i, j] for i, j in iu])
