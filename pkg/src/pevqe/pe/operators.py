"""Quantum-side embedding operators in the AO basis."""
from __future__ import annotations

import numpy as np

from ..molint import DERIVATIVE_COMPONENTS, potential_integrals
from .classical import (
    FieldVector,
    InducedDipoles,
    ResponseSolver,
    induction_energy,
    multipole_nuclear_energy,
    static_fields,
)
from .potential import EmbeddingPotential


def _site_integrals(shells, potential: EmbeddingPotential, order: int, sites=None):
    sites = range(potential.N) if sites is None else sites
    pts = np.array([potential.sites[s].position for s in sites]).reshape(-1, 3)
    if len(pts) == 0:
        return None
    return potential_integrals(shells, pts, order)


def electrostatic_operator_matrix(shells, potential: EmbeddingPotential, molecule=None):
    """AO matrix of the permanent-multipole operator and the multipole-nuclear energy.

    Each Cartesian component enters with weight (-1)^|k| / k!; the electron
    charge makes the matrix -sum (...) t^(k).
    """
    if potential.K > 2:
        raise ValueError("multipoles above quadrupole order are unsupported")
    from ..molint.basis import n_basis_functions

    n = n_basis_functions(shells)
    v = np.zeros((n, n))
    for order in range(max(potential.K, -1) + 1):
        ints = _site_integrals(shells, potential, order)
        comps = DERIVATIVE_COMPONENTS[order]
        for s, site in enumerate(potential.sites):
            for k, weight in site.multipoles():
                if sum(k) != order:
                    continue
                v -= (-1) ** order * weight * ints[s, comps.index(k)]
    e_nuc = multipole_nuclear_energy(potential, molecule) if molecule is not None else 0.0
    return v, e_nuc


def electronic_fields(shells, density_ao, potential: EmbeddingPotential, t1=None) -> FieldVector:
    """Field of the electron density at each polarizable site: -sum_pq D_pq t^(1)_pq."""
    if t1 is None:
        t1 = _site_integrals(shells, potential, 1, potential.polarizable)
    if t1 is None:
        return FieldVector(np.zeros((0, 3)), "electronic")
    return FieldVector(-np.einsum("scpq,pq->sc", t1, density_ao), "electronic")


def induction_operator_matrix(shells, mu: InducedDipoles, potential: EmbeddingPotential, t1=None):
    """v_ind = -sum_s mu_s . F_el-operator = sum_s mu_s . t^(1)(R_s)."""
    if t1 is None:
        t1 = _site_integrals(shells, potential, 1, potential.polarizable)
    if t1 is None:
        from ..molint.basis import n_basis_functions

        n = n_basis_functions(shells)
        return np.zeros((n, n))
    return np.einsum("sc,scpq->pq", mu.mu, t1)


def pe_energy_terms(density_ao, mu: InducedDipoles, field_total: FieldVector, v_es, e_es_nuc: float):
    """(E_es, E_ind) with E_es = tr(D v_es) + E_es,nuc and E_ind = -1/2 mu.F."""
    e_es = float(np.sum(density_ao * v_es)) + e_es_nuc
    return e_es, induction_energy(mu, field_total)


class PolarizableEmbedding:
    """Caches everything about an environment that does not depend on the density."""

    def __init__(self, shells, molecule, potential: EmbeddingPotential, solver_method: str = "direct"):
        self.shells = shells
        self.molecule = molecule
        self.potential = potential
        self.solver_method = solver_method
        self.v_es, self.e_es_nuc = electrostatic_operator_matrix(shells, potential, molecule)
        nuc, mult = static_fields(potential, molecule)
        self.field_nuclear = nuc
        self.field_multipole = mult
        self.response = ResponseSolver(potential)
        self.t1 = _site_integrals(shells, potential, 1, potential.polarizable)

    @property
    def n_polarizable(self) -> int:
        return self.response.n

    def total_field(self, density_ao) -> FieldVector:
        el = electronic_fields(self.shells, density_ao, self.potential, self.t1)
        return FieldVector(self.field_nuclear.values + self.field_multipole.values + el.values, "total")

    def induced_dipoles(self, density_ao):
        F = self.total_field(density_ao)
        return self.response.solve(F, self.solver_method), F

    def induction_operator(self, mu: InducedDipoles):
        return induction_operator_matrix(self.shells, mu, self.potential, self.t1)

    def energy_terms(self, density_ao, mu, field_total):
        return pe_energy_terms(density_ao, mu, field_total, self.v_es, self.e_es_nuc)
