"""Exact statevector simulation of product-of-exponentials ansatze.

States are plain complex numpy arrays of length 2^n; basis index bit j is
qubit j.  Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64),
so a fixed seed reproduces every sample bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse.linalg

from .qop import PauliString, PauliSum
from .qop.fermion import spin_orbital

MAX_QUBITS = 24


def _check_width(n: int):
    if n > MAX_QUBITS:
        raise MemoryError(f"statevector of {n} qubits exceeds the {MAX_QUBITS}-qubit cap")


@lru_cache(maxsize=32)
def _indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def prepare_reference(occupation, n: int | None = None) -> np.ndarray:
    """Basis state from a bitstring; character j is qubit j."""
    bits = [int(b) for b in occupation]
    n = len(bits) if n is None else n
    if len(bits) != n:
        raise ValueError(f"bitstring has {len(bits)} bits, expected {n}")
    _check_width(n)
    psi = np.zeros(1 << n, dtype=complex)
    psi[sum(b << j for j, b in enumerate(bits))] = 1.0
    return psi


def hf_occupation(n_spatial: int, n_electrons: int) -> str:
    """Spin-blocked closed-shell (or high-spin for odd counts) reference bitstring."""
    n_alpha = (n_electrons + 1) // 2
    n_beta = n_electrons // 2
    bits = ["0"] * (2 * n_spatial)
    for p in range(n_alpha):
        bits[spin_orbital(p, 0, n_spatial)] = "1"
    for p in range(n_beta):
        bits[spin_orbital(p, 1, n_spatial)] = "1"
    return "".join(bits)


def apply_pauli(psi: np.ndarray, P: PauliString) -> np.ndarray:
    idx = _indices(P.n)
    out = np.empty_like(psi)
    sign = 1.0 - 2.0 * (np.bitwise_count(idx & P.z) & 1)
    out[idx ^ P.x] = (1j ** (P.y_count() % 4)) * sign * psi
    return out


def apply_pauli_rotation(psi: np.ndarray, P: PauliString, theta: float) -> np.ndarray:
    """exp(i theta P) psi = cos(theta) psi + i sin(theta) P psi."""
    if len(psi) != 1 << P.n:
        raise ValueError("state and Pauli string widths differ")
    return np.cos(theta) * psi + 1j * np.sin(theta) * apply_pauli(psi, P)


@dataclass(frozen=True, eq=False)
class Generator:
    """Anti-hermitian generator A = sum_k c_k (i P_k) with real c_k."""

    operator: PauliSum
    label: str = ""

    def __post_init__(self):
        if not self.operator.is_antihermitian(tol=1e-12):
            raise ValueError(f"generator {self.label!r} is not anti-hermitian")

    @cached_property
    def rotations(self) -> list[tuple[PauliString, float]]:
        """(P_k, c_k) such that exp(theta A) = prod_k exp(i theta c_k P_k) when terms commute."""
        return [(p, float(np.imag(c))) for p, c in sorted(self.operator.items(), key=lambda t: t[0].label)]

    @cached_property
    def commuting(self) -> bool:
        return self.operator.all_commute()

    @property
    def n(self) -> int:
        return self.operator.n

    def matrix(self):
        return self.operator.to_sparse()

    def apply(self, psi):
        return self.operator.apply(psi)

    def exp_apply(self, psi, theta):
        if theta == 0.0:
            return psi.copy()
        if self.commuting:
            for p, c in self.rotations:
                psi = apply_pauli_rotation(psi, p, theta * c)
            return psi
        if self._conserves_spin_sectors:
            return self._sector_exp(psi, theta)
        return scipy.sparse.linalg.expm_multiply(theta * self.matrix(), psi)

    @cached_property
    def _sector_labels(self) -> np.ndarray:
        n = self.n
        idx = _indices(n)
        low = (1 << (n // 2)) - 1
        return np.bitwise_count(idx & low).astype(np.int64) * (n + 1) + np.bitwise_count(idx >> (n // 2))

    @cached_property
    def _conserves_spin_sectors(self) -> bool:
        coo = self.matrix().tocoo()
        nz = np.abs(coo.data) > 1e-14
        lab = self._sector_labels
        return bool(np.all(lab[coo.row[nz]] == lab[coo.col[nz]]))

    @cached_property
    def _sector_cache(self) -> dict:
        return {}

    def _sector_exp(self, psi, theta):
        """exp(theta A) via a cached eigendecomposition of A on each occupied (N_alpha, N_beta) sector."""
        out = np.zeros_like(psi)
        lab = self._sector_labels
        for key in np.unique(lab[np.abs(psi) > 0]):
            if key not in self._sector_cache:
                sel = np.nonzero(lab == key)[0]
                block = self.matrix()[sel][:, sel].toarray()
                w, V = np.linalg.eigh(-1j * block)  # -iA is hermitian
                self._sector_cache[key] = (sel, w, V)
            sel, w, V = self._sector_cache[key]
            out[sel] = V @ (np.exp(1j * theta * w) * (V.conj().T @ psi[sel]))
        return out


@dataclass
class AnsatzCircuit:
    """U(theta)|ref> = prod_i exp(theta_i A_i) |ref>, applied left to right."""

    reference: str
    generators: list[Generator] = field(default_factory=list)
    parameters: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.parameters = np.asarray(self.parameters, dtype=float)
        if len(self.parameters) != len(self.generators):
            raise ValueError("one parameter per generator required")

    @property
    def n_qubits(self) -> int:
        return len(self.reference)

    @property
    def rotations(self) -> list[tuple[PauliString, int]]:
        """Flattened (Pauli string, parameter index) list of the compiled circuit."""
        return [(p, i) for i, g in enumerate(self.generators) for p, _ in g.rotations]

    def append(self, gen: Generator, theta: float = 0.0) -> "AnsatzCircuit":
        return AnsatzCircuit(self.reference, self.generators + [gen], np.append(self.parameters, theta))

    def with_parameters(self, theta) -> "AnsatzCircuit":
        return AnsatzCircuit(self.reference, list(self.generators), theta)

    def state(self, theta=None) -> np.ndarray:
        theta = self.parameters if theta is None else np.asarray(theta, dtype=float)
        psi = prepare_reference(self.reference)
        for g, t in zip(self.generators, theta):
            psi = g.exp_apply(psi, t)
        return psi


def expectation_exact(psi: np.ndarray, H: PauliSum) -> float:
    val = np.vdot(psi, H.apply(psi))
    return float(val.real)


def energy_and_gradient(circuit: AnsatzCircuit, H: PauliSum, theta=None):
    """Energy and exact d E / d theta by one forward and one reverse sweep."""
    theta = circuit.parameters if theta is None else np.asarray(theta, dtype=float)
    psi = circuit.state(theta)
    lam = H.apply(psi)
    energy = float(np.vdot(psi, lam).real)
    grad = np.zeros(len(theta))
    phi = psi
    for k in range(len(theta) - 1, -1, -1):
        g = circuit.generators[k]
        grad[k] = 2.0 * np.vdot(lam, g.apply(phi)).real
        phi = g.exp_apply(phi, -theta[k])
        lam = g.exp_apply(lam, -theta[k])
    return energy, grad


def parameter_gradient(circuit: AnsatzCircuit, H: PauliSum, theta=None) -> np.ndarray:
    return energy_and_gradient(circuit, H, theta)[1]


@dataclass(frozen=True)
class SampleEstimate:
    mean: float
    stderr: float
    shots: int


def qubitwise_groups(H: PauliSum) -> list[list[tuple[PauliString, float]]]:
    """Greedy first-fit grouping of non-identity terms, largest |c| first."""
    terms = [(p, float(np.real(c))) for p, c in H.items() if not p.is_identity()]
    terms.sort(key=lambda t: (-abs(t[1]), t[0].label))
    groups: list[list] = []
    for p, c in terms:
        for grp in groups:
            if all(p.qubitwise_commutes(q) for q, _ in grp):
                grp.append((p, c))
                break
        else:
            groups.append([(p, c)])
    return groups


_H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
_BASIS_CHANGE = {"X": _H, "Y": _H @ np.diag([1, -1j]), "Z": np.eye(2)}


def _measurement_probabilities(psi, group, n):
    letters = {}
    for p, _ in group:
        for j in p.support:
            letters[j] = p.label[j]
    t = psi.reshape((2,) * n)
    for j, letter in letters.items():
        if letter == "Z":
            continue
        axis = n - 1 - j
        t = np.moveaxis(np.tensordot(_BASIS_CHANGE[letter], t, axes=([1], [axis])), 0, axis)
    probs = np.abs(t.reshape(-1)) ** 2
    return probs / probs.sum()


def expectation_sampled(psi: np.ndarray, H: PauliSum, shots: int, seed: int) -> SampleEstimate:
    """Finite-shot estimate of <H> by sampling qubit-wise commuting groups.

    Each shot picks group g with probability p_g = w_g / W, where w_g is the
    group's sum of |c|, measures it once and records the importance-weighted
    value (group value) / p_g. Shots are therefore allocated proportionally to
    w_g on average, every shot is an independent unbiased estimate, and the
    standard error is the sample standard deviation over sqrt(shots), which
    stays consistent even when there are fewer shots than groups.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    n = H.n
    idx = _indices(n)
    const = float(np.real(H.identity_coefficient()))
    groups = qubitwise_groups(H)
    if not groups:
        return SampleEstimate(const, 0.0, shots)
    w = np.array([sum(abs(c) for _, c in g) for g in groups])
    p = w / w.sum()
    per_group = rng.multinomial(shots, p)
    values, weights = [], []
    for grp, s, pg in zip(groups, per_group, p):
        if s == 0:
            continue
        counts = rng.multinomial(s, _measurement_probabilities(psi, grp, n))
        hit = np.nonzero(counts)[0]
        v = np.zeros(len(hit))
        for q, c in grp:
            v += c * (1.0 - 2.0 * (np.bitwise_count(idx[hit] & (q.x | q.z)) & 1))
        values.append(v / pg)
        weights.append(counts[hit])
    x, k = np.concatenate(values), np.concatenate(weights)
    m = float(np.sum(k * x) / shots)
    var = float(np.sum(k * (x - m) ** 2) / (shots - 1)) if shots > 1 else 0.0
    return SampleEstimate(const + m, float(np.sqrt(var / shots)), int(shots))


def _annihilate(psi, j, n):
    """a_j psi under Jordan-Wigner (parity of occupied modes below j)."""
    idx = _indices(n)
    occ = (idx >> j) & 1
    sign = 1.0 - 2.0 * (np.bitwise_count(idx & ((1 << j) - 1)) & 1)
    out = np.zeros_like(psi)
    src = idx[occ == 1]
    out[src ^ (1 << j)] = sign[src] * psi[src]
    return out


def compute_rdms(psi: np.ndarray, n_spatial: int):
    """Spin-summed D_pq = <E_pq> and d_pqrs = <E_pq E_rs - delta_qr E_ps>."""
    n = 2 * n_spatial
    if len(psi) != 1 << n:
        raise ValueError("state width does not match 2 * n_spatial qubits")
    single = np.array([_annihilate(psi, j, n) for j in range(n)])
    Dso = np.conj(single) @ single.T  # <a+_i a_j> = <a_i psi | a_j psi>
    pairs = np.zeros((n, n, len(psi)), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i != j:
                pairs[i, j] = _annihilate(single[j], i, n)  # a_i a_j psi
    flat = pairs.reshape(n * n, -1)
    G = (np.conj(flat) @ flat.T).reshape(n, n, n, n)  # <a_r a_p psi | a_s a_q psi> indexed [r,p,s,q]
    m = n_spatial
    D = np.zeros((m, m))
    d = np.zeros((m, m, m, m))
    for s in (0, 1):
        sl = slice(s * m, (s + 1) * m)
        D += Dso[sl, sl].real
    # <a+_{p s} a+_{r t} a_{s t} a_{q s}> = <a_{r t} a_{p s} psi | a_{s t} a_{q s} psi>
    for a in (0, 1):
        for b in (0, 1):
            sa, sb = slice(a * m, (a + 1) * m), slice(b * m, (b + 1) * m)
            d += np.einsum("rpsq->pqrs", G[sb, sa, sb, sa]).real
    return D, d


def rdm_energy(D, d, h, g, e_core) -> float:
    return float(e_core + np.sum(h * D) + 0.5 * np.sum(g * d))
