"""Orbital rotations C -> C exp(K) and the orbital gradient from RDMs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..scf import ActiveSpace, EmbeddedIntegrals, MOIntegrals, reduce_to_active_space, transform_eri


def nonredundant_pairs(active: ActiveSpace, n_mo: int) -> list[tuple[int, int]]:
    """(p, q) with p > q across different orbital classes (inactive/active/virtual)."""
    cls = {}
    for i in active.inactive:
        cls[i] = 0
    for t in active.active:
        cls[t] = 1
    for a in active.virtual(n_mo):
        cls[a] = 2
    return [(p, q) for p in range(n_mo) for q in range(p) if cls[p] != cls[q]]


def kappa_matrix(kappa, pairs, n_mo: int) -> np.ndarray:
    K = np.zeros((n_mo, n_mo))
    for v, (p, q) in zip(kappa, pairs):
        K[p, q] = v
        K[q, p] = -v
    return K


def rotation(K: np.ndarray) -> np.ndarray:
    if not np.allclose(K, -K.T, atol=1e-14):
        raise ValueError("orbital rotation generator must be antisymmetric")
    return scipy.linalg.expm(K)


def orbital_step(C: np.ndarray, K: np.ndarray) -> np.ndarray:
    """C exp(K) for an antisymmetric K."""
    return C @ rotation(K)


def full_rdms(active: ActiveSpace, n_mo: int, D_act, d_act):
    """Embed active-space RDMs in the full MO space with doubly occupied inactives."""
    D = np.zeros((n_mo, n_mo))
    d = np.zeros((n_mo,) * 4)
    act = np.array(active.active, dtype=int)
    ina = np.array(active.inactive, dtype=int)
    D[np.ix_(act, act)] = D_act
    d[np.ix_(act, act, act, act)] = d_act
    for i in ina:
        D[i, i] = 2.0
        for j in ina:
            d[i, i, j, j] += 4.0
            d[i, j, j, i] -= 2.0
        d[i, i][np.ix_(act, act)] += 2.0 * D_act
        d[np.ix_(act, act, [i], [i])] += 2.0 * D_act[:, :, None, None]
        d[np.ix_(act, [i], [i], act)] -= D_act[:, None, None, :]
        d[np.ix_([i], act, act, [i])] -= D_act.T[None, :, :, None]
    return D, d


def generalized_fock(h, g, D, d) -> np.ndarray:
    """F_pq = sum_r D_pr h_qr + sum_rst d_prst g_qrst."""
    return D @ h.T + np.einsum("prst,qrst->pq", d, g, optimize=True)


def orbital_gradient(mo: MOIntegrals, active: ActiveSpace, D_act, d_act, pairs=None) -> np.ndarray:
    """dE/dkappa_pq at kappa = 0 for every non-redundant pair, C' = C exp(K)."""
    n = mo.n_mo
    pairs = nonredundant_pairs(active, n) if pairs is None else pairs
    D, d = full_rdms(active, n, D_act, d_act)
    F = generalized_fock(mo.h, mo.g, D, d)
    return np.array([2.0 * (F[q, p] - F[p, q]) for p, q in pairs])


def rotated_mo(mo: MOIntegrals, U: np.ndarray) -> MOIntegrals:
    return MOIntegrals(U.T @ mo.h @ U, transform_eri(mo.g, U), mo.e_nuc)


def energy_from_rdms(mo: MOIntegrals, active: ActiveSpace, D_act, d_act, e_extra: float = 0.0) -> float:
    emb = reduce_to_active_space(mo, active)
    return float(emb.e_core + e_extra + np.sum(emb.h_eff * D_act) + 0.5 * np.sum(emb.g_active * d_act))


@dataclass
class OrbitalStepResult:
    U: np.ndarray
    kappa: np.ndarray
    energy: float
    converged: bool
    nit: int
