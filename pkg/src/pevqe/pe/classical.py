"""Classical electrostatics of the environment: interaction tensors, static
fields, and the induced-dipole response."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..molint import nuclear_field_and_potential
from .potential import EmbeddingPotential

PROVENANCE = ("nuclear", "multipole", "electronic", "total", "static")


class InducedDipoleError(RuntimeError):
    pass


@dataclass
class FieldVector:
    """Electric field at the polarizable sites, shape (n_polarizable, 3)."""

    values: np.ndarray
    provenance: str = "total"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1, 3)
        if self.provenance not in PROVENANCE:
            raise ValueError(f"unknown field provenance {self.provenance!r}")

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def __add__(self, other: "FieldVector") -> "FieldVector":
        return FieldVector(self.values + other.values, "total")


@dataclass
class InducedDipoles:
    mu: np.ndarray  # (n_polarizable, 3)
    residual_norm: float = 0.0
    iterations: int = 0

    @property
    def flat(self) -> np.ndarray:
        return self.mu.ravel()


def dipole_interaction_tensor(r1, r2) -> np.ndarray:
    """T = (3 r r^T - |r|^2 I) / |r|^5 with r = r2 - r1."""
    r = np.asarray(r2, dtype=float) - np.asarray(r1, dtype=float)
    d2 = r @ r
    if d2 == 0.0:
        raise ZeroDivisionError("dipole interaction tensor of coincident sites")
    d = np.sqrt(d2)
    return (3.0 * np.outer(r, r) - d2 * np.eye(3)) / d**5


def coulomb_tensor(r, k: tuple[int, int, int]) -> float:
    """Partial derivative d^k (1/|r|) for a multi-index k with |k| <= 3."""
    r = np.asarray(r, dtype=float)
    d2 = r @ r
    if d2 == 0.0:
        raise ZeroDivisionError("Coulomb tensor at zero separation")
    d = np.sqrt(d2)
    idx = [ax for ax in range(3) for _ in range(k[ax])]
    n = len(idx)
    if n == 0:
        return 1.0 / d
    if n == 1:
        return -r[idx[0]] / d**3
    if n == 2:
        i, j = idx
        return (3.0 * r[i] * r[j] - d2 * (i == j)) / d**5
    if n == 3:
        i, j, l = idx
        return (-15.0 * r[i] * r[j] * r[l] + 3.0 * d2 * (r[i] * (j == l) + r[j] * (i == l) + r[l] * (i == j))) / d**7
    raise ValueError("Coulomb tensors above third order are not needed")


def _shift(k, axis):
    k = list(k)
    k[axis] += 1
    return tuple(k)


def site_potential_and_field(site, point) -> tuple[float, np.ndarray]:
    """Potential and field at ``point`` from the permanent multipoles of ``site``."""
    r = np.asarray(point, dtype=float) - site.position
    phi = 0.0
    field = np.zeros(3)
    for k, weight in site.multipoles():
        sign = (-1) ** sum(k)
        phi += sign * weight * coulomb_tensor(r, k)
        for ax in range(3):
            field[ax] -= sign * weight * coulomb_tensor(r, _shift(k, ax))
    return phi, field


def multipole_fields(potential: EmbeddingPotential) -> FieldVector:
    pol = potential.polarizable
    F = np.zeros((len(pol), 3))
    for a, s in enumerate(pol):
        for o, other in enumerate(potential.sites):
            if potential.excluded(s, o):
                continue
            F[a] += site_potential_and_field(other, potential.sites[s].position)[1]
    return FieldVector(F, "multipole")


def nuclear_fields(potential: EmbeddingPotential, molecule) -> FieldVector:
    pol = potential.polarizable
    F = np.zeros((len(pol), 3))
    for a, s in enumerate(pol):
        F[a] = nuclear_field_and_potential(molecule, potential.sites[s].position)[1]
    return FieldVector(F, "nuclear")


def static_fields(potential: EmbeddingPotential, molecule) -> tuple[FieldVector, FieldVector]:
    """(nuclear, multipole) fields at the polarizable sites."""
    return nuclear_fields(potential, molecule), multipole_fields(potential)


def multipole_nuclear_energy(potential: EmbeddingPotential, molecule) -> float:
    """Interaction of the nuclei with the permanent multipoles."""
    e = 0.0
    for atom in molecule.atoms:
        for site in potential.sites:
            if np.linalg.norm(atom.position - site.position) < 1e-10:
                raise ZeroDivisionError(f"environment site {site.label} coincides with nucleus {atom.symbol}")
            e += atom.element * site_potential_and_field(site, atom.position)[0]
    return e


class ResponseSolver:
    """The 3N x 3N matrix B^-1 (alpha^-1 blocks, -T couplings) over polarizable sites."""

    def __init__(self, potential: EmbeddingPotential):
        self.potential = potential
        self.sites = potential.polarizable
        n = len(self.sites)
        Binv = np.zeros((3 * n, 3 * n))
        self.alpha = []
        for a, s in enumerate(self.sites):
            alpha = potential.sites[s].polarizability
            try:
                ainv = np.linalg.inv(alpha)
                if not np.all(np.isfinite(ainv)) or np.linalg.cond(alpha) > 1e14:
                    raise np.linalg.LinAlgError
            except np.linalg.LinAlgError:
                raise np.linalg.LinAlgError(f"polarizability of site {s + 1} ({potential.sites[s].label}) is singular") from None
            self.alpha.append(alpha)
            Binv[3 * a : 3 * a + 3, 3 * a : 3 * a + 3] = ainv
            for b in range(a):
                o = self.sites[b]
                if potential.excluded(s, o):
                    continue
                T = dipole_interaction_tensor(potential.sites[s].position, potential.sites[o].position)
                Binv[3 * a : 3 * a + 3, 3 * b : 3 * b + 3] = -T
                Binv[3 * b : 3 * b + 3, 3 * a : 3 * a + 3] = -T
        self.Binv = Binv
        # a stable environment has a positive definite B^-1; otherwise the
        # dipoles diverge (polarization catastrophe) and there is no solution
        self._cho = None
        if n:
            try:
                self._cho = scipy.linalg.cho_factor(Binv)
            except np.linalg.LinAlgError:
                pass

    @property
    def stable(self) -> bool:
        return self.n == 0 or self._cho is not None

    def _require_stable(self):
        if not self.stable:
            raise InducedDipoleError("response matrix is not positive definite (polarization catastrophe); "
                                     "check site separations, polarizabilities and exclusion lists")

    @property
    def n(self) -> int:
        return len(self.sites)

    def B(self) -> np.ndarray:
        return np.linalg.inv(self.Binv) if self.n else np.zeros((0, 0))

    def residual(self, mu_flat, F_flat) -> np.ndarray:
        return self.Binv @ mu_flat - F_flat

    def solve(self, field: FieldVector, method: str = "direct", tol: float = 1e-10, max_iter: int = 200) -> InducedDipoles:
        F = field.flat
        if F.size != 3 * self.n:
            raise ValueError(f"field has {F.size // 3} sites, expected {self.n}")
        if self.n == 0:
            return InducedDipoles(np.zeros((0, 3)))
        if method == "direct":
            self._require_stable()
            mu = scipy.linalg.cho_solve(self._cho, F)
            return InducedDipoles(mu.reshape(-1, 3), float(np.linalg.norm(self.residual(mu, F))), 1)
        if method in ("iterative", "jacobi"):
            return self._jacobi(F, tol, max_iter)
        if method == "cg":
            return self._cg(F, tol, max_iter)
        raise ValueError(f"unknown induced-dipole method {method!r}")

    def _jacobi(self, F, tol, max_iter):
        """Successive substitution mu_s = alpha_s (F_s + sum_s' T_ss' mu_s')."""
        n = self.n
        coupling = -self.Binv.copy()
        for a in range(n):
            coupling[3 * a : 3 * a + 3, 3 * a : 3 * a + 3] = 0.0
        alpha = scipy.linalg.block_diag(*self.alpha)
        mu = alpha @ F
        for it in range(1, max_iter + 1):
            mu = alpha @ (F + coupling @ mu)
            res = np.max(np.abs(self.residual(mu, F)))
            if res < tol:
                return InducedDipoles(mu.reshape(-1, 3), float(res), it)
            if not np.isfinite(res):
                break
        raise InducedDipoleError(f"Jacobi induced-dipole iterations did not converge (residual {res:.3e})")

    def _cg(self, F, tol, max_iter):
        self._require_stable()
        A = self.Binv
        mu = np.zeros_like(F)
        r = F - A @ mu
        p = r.copy()
        rr = r @ r
        for it in range(1, max(max_iter, F.size * 4) + 1):
            Ap = A @ p
            step = rr / (p @ Ap)
            mu = mu + step * p
            r = r - step * Ap
            res = np.max(np.abs(self.residual(mu, F)))
            if res < tol:
                return InducedDipoles(mu.reshape(-1, 3), float(res), it)
            rr_new = r @ r
            p = r + (rr_new / rr) * p
            rr = rr_new
        raise InducedDipoleError(f"CG induced-dipole iterations did not converge (residual {res:.3e})")


def build_response_matrix(potential: EmbeddingPotential) -> ResponseSolver:
    return ResponseSolver(potential)


def solve_induced_dipoles(potential, field: FieldVector, method: str = "direct", **kw) -> InducedDipoles:
    solver = potential if isinstance(potential, ResponseSolver) else ResponseSolver(potential)
    return solver.solve(field, method, **kw)


def induction_energy(mu: InducedDipoles, field: FieldVector) -> float:
    return -0.5 * float(mu.flat @ field.flat)
