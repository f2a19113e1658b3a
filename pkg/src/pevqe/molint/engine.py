"""McMurchie-Davidson integrals over Cartesian Gaussian shells.

A single Hermite Coulomb kernel R_tuv serves nuclear attraction, the
potential-derivative integrals at arbitrary points, and electron repulsion.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import pi

import numpy as np

from .basis import Shell, n_basis_functions, shell_offsets
from .boys import boys

# Cartesian derivative components, alphabetical.
DERIVATIVE_COMPONENTS = {
    0: [(0, 0, 0)],
    1: [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
    2: [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)],
}


def hermite_expansion(la: int, lb: int, a, b, xab):
    """E^{ij}_t for i <= la, j <= lb; a, b broadcast against xab = A_x - B_x."""
    a, b, xab = np.broadcast_arrays(*map(np.asarray, (a, b, xab)))
    p = a + b
    xpa = -b / p * xab
    xpb = a / p * xab
    E = np.zeros((la + 1, lb + 1, la + lb + 1) + p.shape)
    E[0, 0, 0] = np.exp(-a * b / p * xab**2)
    inv2p = 0.5 / p
    for i in range(la + 1):
        for j in range(lb + 1):
            if i == 0 and j == 0:
                continue
            if i > 0:
                prev, x, ii, jj = E[i - 1, j], xpa, i - 1, j
            else:
                prev, x, ii, jj = E[i, j - 1], xpb, i, j - 1
            for t in range(ii + jj + 2):
                val = x * prev[t]
                if t > 0:
                    val = val + inv2p * prev[t - 1]
                if t + 1 <= ii + jj:
                    val = val + (t + 1) * prev[t + 1]
                E[i, j, t] = val
    return E


def hermite_coulomb(L: int, p, PC):
    """R_tuv(p, PC) for t+u+v <= L.  PC has trailing axis 3; returns dict."""
    p = np.asarray(p, dtype=float)
    X, Y, Z = PC[..., 0], PC[..., 1], PC[..., 2]
    T = p * (X * X + Y * Y + Z * Z)
    F = boys(L, T)
    R = {}
    fac = np.ones_like(T)
    for n in range(L + 1):
        R[(n, 0, 0, 0)] = fac * F[n]
        fac = fac * (-2.0 * p)
    for N in range(1, L + 1):
        for n in range(L - N + 1):
            for t in range(N + 1):
                for u in range(N - t + 1):
                    v = N - t - u
                    if t > 0:
                        val = X * R[(n + 1, t - 1, u, v)]
                        if t > 1:
                            val = val + (t - 1) * R[(n + 1, t - 2, u, v)]
                    elif u > 0:
                        val = Y * R[(n + 1, t, u - 1, v)]
                        if u > 1:
                            val = val + (u - 1) * R[(n + 1, t, u - 2, v)]
                    else:
                        val = Z * R[(n + 1, t, u, v - 1)]
                        if v > 1:
                            val = val + (v - 1) * R[(n + 1, t, u, v - 2)]
                    R[(n, t, u, v)] = val
    return {k[1:]: v for k, v in R.items() if k[0] == 0}


@dataclass
class _Pair:
    """Primitive-pair data for two shells, flattened over primitive pairs."""

    A: Shell
    B: Shell
    extra: int = 0

    def __post_init__(self):
        A, B = self.A, self.B
        a = A.exponents[:, None] * np.ones_like(B.exponents)[None, :]
        b = np.ones_like(A.exponents)[:, None] * B.exponents[None, :]
        self.a = a.ravel()
        self.b = b.ravel()
        self.p = self.a + self.b
        self.P = (self.a[:, None] * A.center + self.b[:, None] * B.center) / self.p[:, None]
        self.cc = np.outer(A.norm_coefficients, B.norm_coefficients).ravel()
        AB = A.center - B.center
        self.E = [hermite_expansion(A.L, B.L + self.extra, self.a, self.b, AB[d]) for d in range(3)]
        fa, fb = A.component_factors, B.component_factors
        self.comp_pairs = [
            (ia, ib, ca, cb, fa[ia] * fb[ib])
            for (ia, ca), (ib, cb) in product(enumerate(A.components), enumerate(B.components))
        ]

    def hermite_coefficients(self):
        """Array [n_compA*n_compB, n_tuv, n_prim] of E^x_t E^y_u E^z_v and the tuv list."""
        L = self.A.L + self.B.L
        tuv = [(t, u, v) for t in range(L + 1) for u in range(L + 1 - t) for v in range(L + 1 - t - u)]
        out = np.zeros((len(self.comp_pairs), len(tuv), self.p.size))
        Ex, Ey, Ez = self.E
        for k, (_, _, ca, cb, f) in enumerate(self.comp_pairs):
            for m, (t, u, v) in enumerate(tuv):
                if t > ca[0] + cb[0] or u > ca[1] + cb[1] or v > ca[2] + cb[2]:
                    continue
                out[k, m] = f * Ex[ca[0], cb[0], t] * Ey[ca[1], cb[1], u] * Ez[ca[2], cb[2], v]
        return out, tuv


def _guard(fn):
    def wrapped(*args, **kwargs):
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            try:
                return fn(*args, **kwargs)
            except FloatingPointError as exc:
                raise FloatingPointError(f"{fn.__name__}: numerical overflow ({exc}); check Gaussian exponents") from exc
    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


@_guard
def overlap_kinetic(shells):
    n = n_basis_functions(shells)
    off = shell_offsets(shells)
    S = np.zeros((n, n))
    T = np.zeros((n, n))
    for I, A in enumerate(shells):
        for J in range(I + 1):
            B = shells[J]
            pr = _Pair(A, B, extra=2)
            Ex, Ey, Ez = pr.E
            pref = pr.cc * (pi / pr.p) ** 1.5
            b = pr.b
            for ia, ib, ca, cb, f in pr.comp_pairs:
                s = [Ex[ca[0], :, 0], Ey[ca[1], :, 0], Ez[ca[2], :, 0]]
                s1 = [s[d][cb[d]] for d in range(3)]
                k1 = []
                for d in range(3):
                    j = cb[d]
                    val = -2.0 * b * (2 * j + 1) * s[d][j] + 4.0 * b * b * s[d][j + 2]
                    if j >= 2:
                        val = val + j * (j - 1) * s[d][j - 2]
                    k1.append(val)
                sval = f * np.sum(pref * s1[0] * s1[1] * s1[2])
                tval = -0.5 * f * np.sum(pref * (k1[0] * s1[1] * s1[2] + s1[0] * k1[1] * s1[2] + s1[0] * s1[1] * k1[2]))
                S[off[I] + ia, off[J] + ib] = S[off[J] + ib, off[I] + ia] = sval
                T[off[I] + ia, off[J] + ib] = T[off[J] + ib, off[I] + ia] = tval
    return S, T


@_guard
def potential_integrals(shells, points, order: int = 0) -> np.ndarray:
    """int phi_p d^k/dr^k (1/|r - C|) phi_q dr for every point C.

    Derivatives are taken with respect to the electron coordinate r.  Returns
    an array of shape (n_points, n_components, nao, nao); components follow
    ``DERIVATIVE_COMPONENTS[order]``.
    """
    if order not in DERIVATIVE_COMPONENTS:
        raise ValueError(f"derivative order {order} not supported (0, 1 or 2)")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if not np.all(np.isfinite(points)):
        raise ValueError("site coordinates must be finite")
    comps = DERIVATIVE_COMPONENTS[order]
    n = n_basis_functions(shells)
    off = shell_offsets(shells)
    out = np.zeros((len(points), len(comps), n, n))
    for I, A in enumerate(shells):
        for J in range(I + 1):
            B = shells[J]
            pr = _Pair(A, B)
            Ecoef, tuv = pr.hermite_coefficients()
            L = A.L + B.L + order
            PC = pr.P[:, None, :] - points[None, :, :]
            R = hermite_coulomb(L, pr.p[:, None], PC)
            pref = pr.cc * 2.0 * pi / pr.p
            na, nb = A.n_functions, B.n_functions
            for c, (dx, dy, dz) in enumerate(comps):
                Rm = np.stack([R[(t + dx, u + dy, v + dz)] for t, u, v in tuv])  # [tuv, prim, point]
                block = np.einsum("kmp,mpc,p->ck", Ecoef, Rm, pref).reshape(len(points), na, nb)
                out[:, c, off[I] : off[I] + na, off[J] : off[J] + nb] = block
                out[:, c, off[J] : off[J] + nb, off[I] : off[I] + na] = block.transpose(0, 2, 1)
    return out


def potential_derivative_integrals(shells, site, order: int) -> np.ndarray:
    """t^(k)_pq at one site: 1, 3 or 6 symmetric matrices for k = 0, 1, 2."""
    site = np.asarray(site, dtype=float).reshape(3)
    return potential_integrals(shells, site[None, :], order)[0]


def nuclear_attraction(shells, molecule) -> np.ndarray:
    if not molecule.atoms:
        n = n_basis_functions(shells)
        return np.zeros((n, n))
    t0 = potential_integrals(shells, molecule.coords, 0)[:, 0]
    return -np.einsum("a,apq->pq", molecule.charges, t0)


@_guard
def electron_repulsion(shells) -> np.ndarray:
    """(pq|rs) in chemists' notation with full 8-fold symmetry filled in."""
    n = n_basis_functions(shells)
    off = shell_offsets(shells)
    pairs = []
    for I in range(len(shells)):
        for J in range(I + 1):
            pr = _Pair(shells[I], shells[J])
            Ecoef, tuv = pr.hermite_coefficients()
            pairs.append((I, J, pr, Ecoef, tuv))
    g = np.zeros((n, n, n, n))
    for ij, (I, J, P1, E1, tuv1) in enumerate(pairs):
        for kl in range(ij + 1):
            K, Lq, P2, E2, tuv2 = pairs[kl]
            p = P1.p[:, None]
            q = P2.p[None, :]
            alpha = p * q / (p + q)
            PQ = P1.P[:, None, :] - P2.P[None, :, :]
            Ltot = P1.A.L + P1.B.L + P2.A.L + P2.B.L
            R = hermite_coulomb(Ltot, alpha, PQ)
            sign = np.array([(-1) ** (t + u + v) for t, u, v in tuv2])
            Rm = np.empty((len(tuv1), len(tuv2)) + alpha.shape)
            for m, (t, u, v) in enumerate(tuv1):
                for m2, (t2, u2, v2) in enumerate(tuv2):
                    Rm[m, m2] = sign[m2] * R[(t + t2, u + u2, v + v2)]
            pref = 2.0 * pi**2.5 / (p * q * np.sqrt(p + q)) * P1.cc[:, None] * P2.cc[None, :]
            block = np.einsum("amx,bny,mnxy,xy->ab", E1, E2, Rm, pref, optimize=True)
            na, nb = P1.A.n_functions, P1.B.n_functions
            nc, nd = P2.A.n_functions, P2.B.n_functions
            block = block.reshape(na, nb, nc, nd)
            i0, j0, k0, l0 = off[I], off[J], off[K], off[Lq]
            si, sj, sk, sl = slice(i0, i0 + na), slice(j0, j0 + nb), slice(k0, k0 + nc), slice(l0, l0 + nd)
            g[si, sj, sk, sl] = block
            g[sj, si, sk, sl] = block.transpose(1, 0, 2, 3)
            g[si, sj, sl, sk] = block.transpose(0, 1, 3, 2)
            g[sj, si, sl, sk] = block.transpose(1, 0, 3, 2)
            g[sk, sl, si, sj] = block.transpose(2, 3, 0, 1)
            g[sl, sk, si, sj] = block.transpose(3, 2, 0, 1)
            g[sk, sl, sj, si] = block.transpose(2, 3, 1, 0)
            g[sl, sk, sj, si] = block.transpose(3, 2, 1, 0)
    return g
