"""ADAPT operator pools over the active orbitals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qop import PauliString, PauliSum
from ..qop.fermion import hopping
from ..qsim import Generator

POOL_KINDS = ("fermionic-SD", "qubit")


@dataclass
class OperatorPool:
    kind: str
    generators: list[Generator]

    def __len__(self):
        return len(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    def __iter__(self):
        return iter(self.generators)


def _canonical_key(op: PauliSum):
    items = sorted(((p.label, complex(c)) for p, c in op.items()))
    ref = items[0][1]
    return tuple((lab, round((c / ref).real, 10), round((c / ref).imag, 10)) for lab, c in items)


def _antihermitian(T: PauliSum) -> PauliSum:
    return (T - T.dagger()).simplify(1e-12)


def fermionic_sd_generators(n_spatial: int):
    """Spin-adapted singles and spin-complemented generalized doubles.

    Singles: E_pq - E_qp for p > q.  Doubles: for spatial pairs (p<=q), (r<=s)
    with (p, q) before (r, s), the three spin-complemented excitations
    a+_r a_p a+_s a_q (same-spin, opposite-spin, spin-exchanged), each summed
    with its alpha<->beta mirror image and made anti-hermitian.
    """
    m, n = n_spatial, 2 * n_spatial
    a = lambda p: p
    b = lambda p: p + m
    out = []
    for p in range(m):
        for q in range(p):
            T = hopping(a(p), a(q), n) + hopping(b(p), b(q), n)
            out.append((f"S({p},{q})", _antihermitian(T)))
    pairs = [(p, q) for p in range(m) for q in range(p, m)]
    for ipq, (p, q) in enumerate(pairs):
        for (r, s) in pairs[ipq + 1 :]:
            terms = [
                hopping(a(r), a(p), n) * hopping(a(s), a(q), n) + hopping(b(r), b(p), n) * hopping(b(s), b(q), n),
                hopping(a(r), a(p), n) * hopping(b(s), b(q), n) + hopping(b(r), b(p), n) * hopping(a(s), a(q), n),
                hopping(a(r), b(p), n) * hopping(b(s), a(q), n) + hopping(b(r), a(p), n) * hopping(a(s), b(q), n),
            ]
            for k, T in enumerate(terms):
                out.append((f"D{k}({r},{s}<-{p},{q})", _antihermitian(T)))
    return out


def build_pool(n_spatial: int, kind: str = "fermionic-SD") -> OperatorPool:
    if n_spatial < 1:
        raise ValueError("empty active space")
    if kind not in POOL_KINDS:
        raise ValueError(f"unknown pool kind {kind!r}; choose from {POOL_KINDS}")
    seen = set()
    gens = []
    if kind == "fermionic-SD":
        for label, A in fermionic_sd_generators(n_spatial):
            if len(A) == 0:
                continue
            key = _canonical_key(A)
            if key in seen:
                continue
            seen.add(key)
            gens.append(Generator(A, label))
        return OperatorPool(kind, gens)
    strings = []
    for _, A in fermionic_sd_generators(n_spatial):
        for p in A:
            stripped = PauliString(p.n, p.x, p.z & p.x)  # drop Z letters
            if stripped.y_count() % 2 == 1 and stripped not in seen:
                seen.add(stripped)
                strings.append(stripped)
    strings.sort(key=lambda p: (p.weight, p.label))
    for p in strings:
        gens.append(Generator(PauliSum(p.n, {p: 1j}), p.label))
    return OperatorPool(kind, gens)
