"""Reference implementations used only by the test-suite.

Everything here is written independently of the package internals: integrals
by explicit quadrature or by differentiating closed-form s-type formulas in
high precision, CI by looping over determinants, CASSCF by brute-force
minimization over orbital rotations, and the polarizable-embedding double SCF
by a straightforward fixed-point loop around that CASSCF.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import mpmath as mp
import numpy as np
import scipy.linalg
import scipy.optimize

# ---------------------------------------------------------------------------
# basis functions evaluated on grids


def primitive_weights(shell):
    """Relative weights of the primitives inside a contracted shell."""
    return shell.coefficients * shell.exponents ** ((2 * shell.L + 3) / 4)


def ao_list(shells):
    """(center, powers, exponents, weights) for every AO, unnormalized."""
    out = []
    for sh in shells:
        w = primitive_weights(sh)
        for comp in sh.components:
            out.append((np.asarray(sh.center, float), comp, sh.exponents, w))
    return out


def _poly(r, center, powers):
    d = r - center
    return d[..., 0] ** powers[0] * d[..., 1] ** powers[1] * d[..., 2] ** powers[2]


def _poly_grad(r, center, powers, alpha):
    """Gradient of (x^l y^m z^n) exp(-alpha d^2) divided by the Gaussian."""
    d = r - center
    base = _poly(r, center, powers)
    out = []
    for ax in range(3):
        p = list(powers)
        if p[ax] > 0:
            p[ax] -= 1
            lower = powers[ax] * _poly(r, center, p)
        else:
            lower = 0.0
        out.append(lower - 2 * alpha * d[..., ax] * base)
    return np.stack(out, axis=-1)


@lru_cache(maxsize=None)
def _gh(n):
    return np.polynomial.hermite.hermgauss(n)


def _gh_grid(center, expo, n=14):
    """Nodes and weights for int f(r) exp(-expo |r - center|^2) d^3r."""
    x, w = _gh(n)
    x = x / np.sqrt(expo)
    w = w / np.sqrt(expo)
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    W = (w[:, None, None] * w[None, :, None] * w[None, None, :]).ravel()
    pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1) + center
    return pts, W


def quadrature_one_electron(shells, kind="S", point=None, deriv=(0, 0, 0), n_t=500):
    """S, T, or t^(k) at ``point`` by Gauss-Hermite quadrature.

    Potential-type integrals use 1/|r-C| = 2/sqrt(pi) int_0^inf exp(-t^2 |r-C|^2) dt,
    differentiated analytically in r and integrated over log t by Gauss-Legendre.
    """
    aos = ao_list(shells)
    n = len(aos)
    M = np.zeros((n, n))
    if kind == "V":
        xs, ws = np.polynomial.legendre.leggauss(n_t)
        lo, hi = -32.0, 16.0
        u = 0.5 * (hi - lo) * xs + 0.5 * (hi + lo)
        t_nodes = np.exp(u)
        t_weights = 0.5 * (hi - lo) * ws * t_nodes * 2 / np.sqrt(np.pi)
    for i, j in itertools.product(range(n), range(n)):
        if j < i:
            M[i, j] = M[j, i]
            continue
        A, pa, ea, wa = aos[i]
        B, pb, eb, wb = aos[j]
        total = 0.0
        for a, ca in zip(ea, wa):
            for b, cb in zip(eb, wb):
                p = a + b
                P = (a * A + b * B) / p
                K = np.exp(-a * b / p * np.sum((A - B) ** 2))
                if kind == "S":
                    pts, W = _gh_grid(P, p)
                    val = np.sum(W * _poly(pts, A, pa) * _poly(pts, B, pb))
                elif kind == "T":
                    pts, W = _gh_grid(P, p)
                    ga = _poly_grad(pts, A, pa, a)
                    gb = _poly_grad(pts, B, pb, b)
                    val = 0.5 * np.sum(W * np.sum(ga * gb, axis=-1))
                else:
                    C = np.asarray(point, float)
                    q = p + t_nodes**2
                    Q = (p * P[None, :] + (t_nodes**2)[:, None] * C[None, :]) / q[:, None]
                    Kt = np.exp(-p * t_nodes**2 / q * np.sum((P - C) ** 2))
                    x, w = _gh(14)
                    grid = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
                    W = np.prod(w[np.stack(np.meshgrid(*[np.arange(14)] * 3, indexing="ij"), -1).reshape(-1, 3)], axis=1)
                    pts = Q[:, None, :] + grid[None, :, :] / np.sqrt(q)[:, None, None]
                    f = _poly(pts, A, pa) * _poly(pts, B, pb) * _gauss_deriv(pts - C, t_nodes[:, None], deriv)
                    inner = (f @ W) / q**1.5
                    val = float(np.sum(t_weights * Kt * inner))
                total += ca * cb * K * val
        M[i, j] = total
    return M


def _gauss_deriv(d, t, k):
    """d^k/dr^k of exp(-t^2 d^2) divided by the Gaussian itself, for |k| <= 2."""
    s = t * t
    kx = tuple(k)
    if sum(kx) == 0:
        return np.ones(d.shape[:-1])
    if sum(kx) == 1:
        ax = kx.index(1)
        return -2 * s * d[..., ax]
    if 2 in kx:
        ax = kx.index(2)
        return 4 * s * s * d[..., ax] ** 2 - 2 * s
    a, b = [i for i, v in enumerate(kx) if v == 1]
    return 4 * s * s * d[..., a] * d[..., b]


def normalize(M, S):
    n = np.sqrt(np.diag(S))
    return M / np.outer(n, n)


# ---------------------------------------------------------------------------
# primitive integrals from closed-form s-type formulas (mpmath)


def _expansion(power, alpha):
    """x^l exp(-a x^2) written as sum c * d^k/dA^k exp(-a (x-A)^2) (shifted coordinates)."""
    a = mp.mpf(alpha)
    if power == 0:
        return [(1, 0)]
    if power == 1:
        return [(1 / (2 * a), 1)]
    if power == 2:
        return [(1 / (4 * a * a), 2), (1 / (2 * a), 0)]
    raise ValueError("power > 2")


def _terms(prims):
    """Cartesian expansion of a product of primitives into derivative multi-indices."""
    per_axis = []
    for alpha, _, powers in prims:
        per_axis.append([_expansion(p, alpha) for p in powers])
    out = []
    choices = [itertools.product(*axes) for axes in per_axis]
    for combo in itertools.product(*choices):
        coef = mp.mpf(1)
        orders = []
        for prim in combo:
            for c, k in prim:
                coef *= c
                orders.append(k)
        out.append((coef, orders))
    return out


def _boys0(T):
    if T < mp.mpf("1e-30"):
        return mp.mpf(1)
    return mp.sqrt(mp.pi / T) * mp.erf(mp.sqrt(T)) / 2


def _ss_eri(a, b, c, d, A, B, C, D):
    p, q = a + b, c + d
    P = [(a * A[i] + b * B[i]) / p for i in range(3)]
    Q = [(c * C[i] + d * D[i]) / q for i in range(3)]
    ab2 = sum((A[i] - B[i]) ** 2 for i in range(3))
    cd2 = sum((C[i] - D[i]) ** 2 for i in range(3))
    pq2 = sum((P[i] - Q[i]) ** 2 for i in range(3))
    pre = 2 * mp.pi ** mp.mpf(2.5) / (p * q * mp.sqrt(p + q))
    return pre * mp.exp(-a * b / p * ab2 - c * d / q * cd2) * _boys0(p * q / (p + q) * pq2)


def _ss_overlap(a, b, A, B):
    p = a + b
    ab2 = sum((A[i] - B[i]) ** 2 for i in range(3))
    return (mp.pi / p) ** mp.mpf(1.5) * mp.exp(-a * b / p * ab2)


def _ss_nuclear(a, b, A, B, C):
    p = a + b
    P = [(a * A[i] + b * B[i]) / p for i in range(3)]
    ab2 = sum((A[i] - B[i]) ** 2 for i in range(3))
    pc2 = sum((P[i] - C[i]) ** 2 for i in range(3))
    return 2 * mp.pi / p * mp.exp(-a * b / p * ab2) * _boys0(p * pc2)


def _differentiate(fn, prims, extra=()):
    """Integral of a product of Cartesian primitives via derivatives of the s-type formula."""
    mp.mp.dps = 40
    centers = [list(map(mp.mpf, c)) for _, c, _ in prims]
    alphas = [mp.mpf(a) for a, _, _ in prims]
    total = mp.mpf(0)
    for coef, orders in _terms(prims):
        x0 = [v for c in centers for v in c]

        def f(*xs):
            cs = [list(xs[3 * i : 3 * i + 3]) for i in range(len(prims))]
            return fn(*alphas, *cs, *extra)

        if any(orders):
            # an explicit step: the automatic one is unreliable for high-order mixed partials
            total += coef * mp.diff(f, x0, tuple(orders), h=mp.mpf("1e-12"))
        else:
            total += coef * f(*x0)
    return total


def primitive_overlap(pa, pb):
    return _differentiate(_ss_overlap, [pa, pb])


def primitive_nuclear(pa, pb, C):
    return _differentiate(_ss_nuclear, [pa, pb], extra=(list(map(mp.mpf, C)),))


def primitive_eri(pa, pb, pc, pd):
    return _differentiate(_ss_eri, [pa, pb, pc, pd])


# ---------------------------------------------------------------------------
# determinant-based CI


def _bit_sign(det, j):
    return -1 if bin(det & ((1 << j) - 1)).count("1") % 2 else 1


def annihilate(det, j):
    if not det >> j & 1:
        return None, 0
    return det ^ (1 << j), _bit_sign(det, j)


def create(det, j):
    if det >> j & 1:
        return None, 0
    return det | (1 << j), _bit_sign(det, j)


def sector_dets(m, n_alpha, n_beta):
    """Determinants (bit j = spin orbital j; alpha 0..m-1, beta m..2m-1)."""
    out = []
    for occ_a in itertools.combinations(range(m), n_alpha):
        for occ_b in itertools.combinations(range(m), n_beta):
            det = sum(1 << p for p in occ_a) + sum(1 << (m + p) for p in occ_b)
            out.append(det)
    return sorted(out)


def excitation_matrices(m, n_alpha, n_beta):
    """Spin-summed E_pq as dense matrices on the (N_alpha, N_beta) sector."""
    dets = sector_dets(m, n_alpha, n_beta)
    index = {d: i for i, d in enumerate(dets)}
    E = np.zeros((m, m, len(dets), len(dets)))
    for p, q in itertools.product(range(m), repeat=2):
        for spin in (0, 1):
            P, Q = p + spin * m, q + spin * m
            for col, det in enumerate(dets):
                d1, s1 = annihilate(det, Q)
                if d1 is None:
                    continue
                d2, s2 = create(d1, P)
                if d2 is None:
                    continue
                E[p, q, index[d2], col] += s1 * s2
    return dets, E


def ci_hamiltonian(h, g, e_core, E):
    H = np.einsum("pq,pqij->ij", h, E)
    EE = np.einsum("pqij,rsjk->pqrsik", E, E)
    H += 0.5 * np.einsum("pqrs,pqrsik->ik", g, EE)
    H -= 0.5 * np.einsum("pqqs,psij->ij", g, E)
    return H + e_core * np.eye(H.shape[0])


def ci_ground(h, g, e_core, n_electrons):
    m = h.shape[0]
    _, E = excitation_matrices(m, (n_electrons + 1) // 2, n_electrons // 2)
    H = ci_hamiltonian(h, g, e_core, E)
    w, v = np.linalg.eigh(H)
    c = v[:, 0]
    D = np.einsum("i,pqij,j->pq", c, E, c)
    return w[0], c, D


def fci_energy(h, g, e_core, n_electrons):
    return ci_ground(h, g, e_core, n_electrons)[0]


# ---------------------------------------------------------------------------
# active-space integrals and brute-force CASSCF


def naive_mo_eri(eri, C):
    """(pq|rs) in the MO basis by a direct quadruple sum (slow but obvious)."""
    n = C.shape[1]
    out = np.zeros((n, n, n, n))
    for p, q, r, s in itertools.product(range(n), repeat=4):
        out[p, q, r, s] = np.einsum("a,b,c,d,abcd->", C[:, p], C[:, q], C[:, r], C[:, s], eri)
    return out


def cas_integrals(h_ao, eri, e_nuc, C, inactive, active):
    Ci = C[:, list(inactive)]
    Ca = C[:, list(active)]
    Dc = 2 * Ci @ Ci.T
    J = np.einsum("pqrs,rs->pq", eri, Dc)
    K = np.einsum("prqs,rs->pq", eri, Dc)
    Fc = h_ao + J - 0.5 * K
    e_core = e_nuc + 0.5 * np.sum(Dc * (h_ao + Fc))
    h = Ca.T @ Fc @ Ca
    g = np.einsum("ap,bq,cr,ds,abcd->pqrs", Ca, Ca, Ca, Ca, eri, optimize=True)
    return h, g, e_core


def rotation_pairs(n_mo, inactive, active):
    virtual = [i for i in range(n_mo) if i not in inactive and i not in active]
    pairs = [(p, q) for p in active for q in inactive]
    pairs += [(p, q) for p in virtual for q in inactive]
    pairs += [(p, q) for p in virtual for q in active]
    return pairs


def rotate(C, kappa, pairs):
    n = C.shape[1]
    K = np.zeros((n, n))
    for k, (p, q) in zip(kappa, pairs):
        K[p, q] = k
        K[q, p] = -k
    return C @ scipy.linalg.expm(K)


def brute_force_casscf(h_ao, eri, e_nuc, C0, inactive, active, n_active_electrons, tol=1e-11):
    """Direct minimization of the CI ground energy over non-redundant rotations."""
    pairs = rotation_pairs(C0.shape[1], inactive, active)
    m = len(active)
    _, E = excitation_matrices(m, (n_active_electrons + 1) // 2, n_active_electrons // 2)

    def energy(kappa):
        C = rotate(C0, kappa, pairs)
        h, g, ec = cas_integrals(h_ao, eri, e_nuc, C, inactive, active)
        return np.linalg.eigvalsh(ci_hamiltonian(h, g, ec, E))[0]

    x = np.zeros(len(pairs))
    if pairs:
        res = scipy.optimize.minimize(energy, x, method="BFGS", options={"gtol": 1e-9, "maxiter": 2000})
        x = res.x
        res = scipy.optimize.minimize(energy, x, method="Nelder-Mead",
                                      options={"xatol": 1e-10, "fatol": tol, "maxiter": 20000})
        x = res.x
    C = rotate(C0, x, pairs)
    h, g, ec = cas_integrals(h_ao, eri, e_nuc, C, inactive, active)
    H = ci_hamiltonian(h, g, ec, E)
    w, v = np.linalg.eigh(H)
    D = np.einsum("i,pqij,j->pq", v[:, 0], E, v[:, 0])
    return w[0], C, D


# ---------------------------------------------------------------------------
# polarizable embedding pieces


def quadrupole_matrix(q6):
    xx, xy, xz, yy, yz, zz = q6
    return np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])


def env_potential(site, r):
    """Electrostatic potential of one site's multipoles at point r."""
    R = np.asarray(r, float) - site.position
    d = np.linalg.norm(R)
    phi = 0.0
    if site.charge is not None:
        phi += site.charge / d
    if site.dipole is not None:
        phi += np.dot(site.dipole, R) / d**3
    if site.quadrupole is not None:
        Q = quadrupole_matrix(site.quadrupole)
        phi += 0.5 * np.einsum("ij,ij->", Q, (3 * np.outer(R, R) - d * d * np.eye(3)) / d**5)
    return phi


def env_field(site, r, h=1e-3):
    """-grad phi by a fourth-order central difference."""
    r = np.asarray(r, float)
    F = np.zeros(3)
    for ax in range(3):
        e = np.zeros(3)
        e[ax] = h
        F[ax] = -(8 * (env_potential(site, r + e) - env_potential(site, r - e))
                  - (env_potential(site, r + 2 * e) - env_potential(site, r - 2 * e))) / (12 * h)
    return F


def response_matrix(potential):
    """Dense B = [alpha^-1 - T]^-1 over polarizable sites."""
    pol = list(potential.polarizable)
    n = len(pol)
    Binv = np.zeros((3 * n, 3 * n))
    for a, s in enumerate(pol):
        Binv[3 * a : 3 * a + 3, 3 * a : 3 * a + 3] = np.linalg.inv(potential.sites[s].polarizability)
        for b, o in enumerate(pol):
            if a == b or potential.excluded(s, o):
                continue
            R = potential.sites[s].position - potential.sites[o].position
            d = np.linalg.norm(R)
            T = (3 * np.outer(R, R) - d * d * np.eye(3)) / d**5
            Binv[3 * a : 3 * a + 3, 3 * b : 3 * b + 3] = -T
    return np.linalg.inv(Binv)


def pe_static(potential, molecule):
    """(field from nuclei + other sites' multipoles at polarizable sites, E_es,nuc)."""
    pol = list(potential.polarizable)
    F = np.zeros((len(pol), 3))
    for a, s in enumerate(pol):
        r = potential.sites[s].position
        for atom in molecule.atoms:
            R = r - atom.position
            F[a] += atom.element * R / np.linalg.norm(R) ** 3
        for o, other in enumerate(potential.sites):
            if o != s and not potential.excluded(s, o):
                F[a] += env_field(other, r)
    e_nuc = sum(atom.element * env_potential(site, atom.position)
                for atom in molecule.atoms for site in potential.sites)
    return F, e_nuc


def pe_operators(shells, potential):
    """(v_es, t1) with v_es = -sum phi-integrals and t1 per polarizable site."""
    from pevqe.molint import potential_integrals

    n = sum(sh.n_functions for sh in shells)
    v = np.zeros((n, n))
    for site in potential.sites:
        pt = site.position[None, :]
        if site.charge is not None:
            v -= site.charge * potential_integrals(shells, pt, 0)[0, 0]
        if site.dipole is not None:
            v += np.einsum("c,cpq->pq", site.dipole, potential_integrals(shells, pt, 1)[0])
        if site.quadrupole is not None:
            t2 = potential_integrals(shells, pt, 2)[0]
            comps = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
            for c, (i, j) in enumerate(comps):
                w = 0.5 if i == j else 1.0
                v -= w * site.quadrupole[c] * t2[c]
    pts = np.array([potential.sites[s].position for s in potential.polarizable])
    t1 = potential_integrals(shells, pts, 1) if len(pts) else np.zeros((0, 3, n, n))
    return v, t1


def brute_force_pe_casscf(integrals, molecule, shells, potential, C0, inactive, active, n_active_electrons,
                          tol=1e-10, max_iter=60):
    """Fixed-point loop: dipoles from the density, CASSCF in the frozen-dipole operator."""
    v_es, t1 = pe_operators(shells, potential)
    F_static, e_es_nuc = pe_static(potential, molecule)
    B = response_matrix(potential)

    def density(C, D):
        Ci, Ca = C[:, list(inactive)], C[:, list(active)]
        return 2 * Ci @ Ci.T + Ca @ D @ Ca.T

    def dipoles(D_ao):
        F = F_static - np.einsum("scpq,pq->sc", t1, D_ao)
        return (B @ F.ravel()).reshape(-1, 3), F

    n_docc = n_active_electrons // 2
    D_act = np.diag([2.0] * n_docc + [0.0] * (len(active) - n_docc))
    C = C0
    mu, _ = dipoles(density(C, D_act))
    e_prev = np.inf
    for _ in range(max_iter):
        v_ind = np.einsum("sc,scpq->pq", mu, t1)
        h_ao = integrals.h + v_es + v_ind
        e_cas, C, D_act = brute_force_casscf(h_ao, integrals.eri, integrals.e_nuc + e_es_nuc, C, inactive, active,
                                             n_active_electrons)
        D_ao = density(C, D_act)
        mu_new, F_new = dipoles(D_ao)
        e_ind = -0.5 * float(mu_new.ravel() @ F_new.ravel())
        energy = e_cas - np.sum(D_ao * v_ind) + e_ind
        converged = abs(energy - e_prev) < tol and np.max(np.abs(mu_new - mu)) < 1e-8
        mu, e_prev = mu_new, energy
        if converged:
            break
    return energy, mu


def rhf_plain(S, h, eri, e_nuc, n_occ, n_iter=500):
    """Plain Roothaan iterations (no DIIS, no damping)."""
    X = scipy.linalg.fractional_matrix_power(S, -0.5).real
    P = np.zeros_like(S)
    e_old = 0.0
    for _ in range(n_iter):
        G = np.einsum("pqrs,rs->pq", eri, P) - 0.5 * np.einsum("prqs,rs->pq", eri, P)
        F = h + G
        e = 0.5 * np.sum(P * (h + F)) + e_nuc
        _, v = np.linalg.eigh(X @ F @ X)
        c = X @ v[:, :n_occ]
        P = 2 * c @ c.T
        if abs(e - e_old) < 1e-13:
            break
        e_old = e
    return e
