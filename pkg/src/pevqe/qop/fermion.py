"""Jordan-Wigner images of fermionic operators and the active-space Hamiltonian.

Spin-blocked ordering: qubit p is orbital p with alpha spin, qubit m + p the
same orbital with beta spin (m spatial orbitals, 2m qubits).  An occupied
spin orbital is |1>.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .pauli import PauliString, PauliSum


def spin_orbital(p: int, spin: int, n_spatial: int) -> int:
    return p + spin * n_spatial


@lru_cache(maxsize=4096)
def ladder(j: int, n_qubits: int, dagger: bool) -> PauliSum:
    """a_j or a_j^dagger = Z_0...Z_{j-1} (X_j +/- iY_j) / 2."""
    if not 0 <= j < n_qubits:
        raise IndexError(f"mode {j} outside 0..{n_qubits - 1}")
    zmask = (1 << j) - 1
    X = PauliString(n_qubits, 1 << j, zmask)
    Y = PauliString(n_qubits, 1 << j, zmask | (1 << j))
    s = -0.5j if dagger else 0.5j
    return PauliSum(n_qubits, {X: 0.5, Y: s})


@lru_cache(maxsize=8192)
def hopping(p: int, q: int, n_qubits: int) -> PauliSum:
    """a_p^dagger a_q on spin orbitals."""
    return ladder(p, n_qubits, True) * ladder(q, n_qubits, False)


def jordan_wigner_excitation(p: int, q: int, n_spatial: int) -> PauliSum:
    """Singlet excitation E_pq = sum_sigma a_{p sigma}^dagger a_{q sigma}."""
    for i in (p, q):
        if not 0 <= i < n_spatial:
            raise IndexError(f"orbital index {i} outside 0..{n_spatial - 1}")
    n = 2 * n_spatial
    return hopping(p, q, n) + hopping(p + n_spatial, q + n_spatial, n)


def number_operator(n_spatial: int) -> PauliSum:
    n = 2 * n_spatial
    total = PauliSum(n)
    for j in range(n):
        total = total + hopping(j, j, n)
    return total


def build_hamiltonian(emb, tol: float = 1e-14) -> PauliSum:
    """Qubit image of E_core + sum h_pq E_pq + 1/2 sum g_pqrs (E_pq E_rs - d_qr E_ps).

    Uses the normal-ordered spin-orbital form
    1/2 sum g_pqrs a+_{p s} a+_{r t} a_{s t} a_{q s}.
    """
    h, g = emb.h_eff, emb.g_active
    m = h.shape[0]
    n = 2 * m
    acc: dict[PauliString, complex] = {PauliString(n): emb.e_core}

    def add(ps: PauliSum, scale):
        for p, c in ps.items():
            acc[p] = acc.get(p, 0.0) + scale * c

    for p in range(m):
        for q in range(m):
            if abs(h[p, q]) > tol:
                for s in (0, 1):
                    add(hopping(p + s * m, q + s * m, n), h[p, q])
    pair = {}
    for p in range(m):
        for q in range(m):
            for r in range(m):
                for s_ in range(m):
                    v = g[p, q, r, s_]
                    if abs(v) <= tol:
                        continue
                    for a in (0, 1):
                        for b in (0, 1):
                            P, Q, R, S = p + a * m, q + a * m, r + b * m, s_ + b * m
                            if P == R or Q == S:
                                continue
                            key = (P, R, S, Q)
                            if key not in pair:
                                pair[key] = hopping(P, Q, n) * hopping(R, S, n) - (hopping(P, S, n) if Q == R else PauliSum(n))
                            add(pair[key], 0.5 * v)
    return PauliSum(n, acc).real()
