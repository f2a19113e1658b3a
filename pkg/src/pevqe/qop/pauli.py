"""Pauli strings as (x, z) bitmasks and sparse weighted sums of them.

Qubit j corresponds to bit j of a computational-basis index and to character
j of the textual label, e.g. ``"XIZ"`` is X on qubit 0 and Z on qubit 2.
A string with masks (x, z) is the operator prod_j i^(x_j z_j) X^x_j Z^z_j,
so x = z = 1 on a qubit means Y.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse

DROP_TOL = 1e-14
_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTER.items()}


def popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, order=True)
class PauliString:
    n: int
    x: int = 0
    z: int = 0

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        x = z = 0
        for j, ch in enumerate(label.upper()):
            if ch not in _BITS:
                raise ValueError(f"invalid Pauli letter {ch!r}")
            bx, bz = _BITS[ch]
            x |= bx << j
            z |= bz << j
        return cls(len(label), x, z)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        bx, bz = _BITS[letter]
        return cls(n, bx << qubit, bz << qubit)

    @property
    def label(self) -> str:
        return "".join(_LETTER[((self.x >> j) & 1, (self.z >> j) & 1)] for j in range(self.n))

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    @property
    def support(self) -> list[int]:
        m = self.x | self.z
        return [j for j in range(self.n) if (m >> j) & 1]

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def multiply(self, other: "PauliString") -> tuple[complex, "PauliString"]:
        """Return (phase, string) with self * other = phase * string."""
        if self.n != other.n:
            raise ValueError(f"width mismatch: {self.n} vs {other.n}")
        x, z = self.x ^ other.x, self.z ^ other.z
        k = popcount(self.x & self.z) + popcount(other.x & other.z) - popcount(x & z) + 2 * popcount(self.z & other.x)
        return 1j ** (k % 4), PauliString(self.n, x, z)

    def commutes(self, other: "PauliString") -> bool:
        return (popcount(self.x & other.z) + popcount(self.z & other.x)) % 2 == 0

    def qubitwise_commutes(self, other: "PauliString") -> bool:
        mine = self.x | self.z
        theirs = other.x | other.z
        both = mine & theirs
        return (self.x & both) == (other.x & both) and (self.z & both) == (other.z & both)

    def y_count(self) -> int:
        return popcount(self.x & self.z)

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


class PauliSum:
    """Immutable map PauliString -> complex coefficient on ``n`` qubits."""

    def __init__(self, n: int, terms=None, *, simplify: bool = True):
        self.n = int(n)
        acc: dict[PauliString, complex] = {}
        for p, c in (terms.items() if isinstance(terms, dict) else (terms or [])):
            if isinstance(p, str):
                p = PauliString.from_label(p)
            if p.n != self.n:
                raise ValueError(f"width mismatch: term on {p.n} qubits in a {self.n}-qubit sum")
            acc[p] = acc.get(p, 0.0) + c
        if simplify:
            acc = {p: c for p, c in acc.items() if abs(c) >= DROP_TOL}
        self._terms = acc

    @classmethod
    def identity(cls, n: int, coeff=1.0) -> "PauliSum":
        return cls(n, {PauliString(n): coeff})

    @classmethod
    def from_string(cls, p: PauliString, coeff=1.0) -> "PauliSum":
        return cls(p.n, {p: coeff})

    @property
    def terms(self) -> dict[PauliString, complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def coefficient(self, p) -> complex:
        if isinstance(p, str):
            p = PauliString.from_label(p)
        return self._terms.get(p, 0.0)

    def _check(self, other):
        if other.n != self.n:
            raise ValueError(f"width mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, PauliSum):
            other = PauliSum.identity(self.n, other)
        self._check(other)
        acc = dict(self._terms)
        for p, c in other._terms.items():
            acc[p] = acc.get(p, 0.0) + c
        return PauliSum(self.n, acc)

    __radd__ = __add__

    def __neg__(self):
        return PauliSum(self.n, {p: -c for p, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            self._check(other)
            acc: dict[PauliString, complex] = {}
            for p1, c1 in self._terms.items():
                for p2, c2 in other._terms.items():
                    phase, p = p1.multiply(p2)
                    acc[p] = acc.get(p, 0.0) + phase * c1 * c2
            return PauliSum(self.n, acc)
        return PauliSum(self.n, {p: c * other for p, c in self._terms.items()})

    def __rmul__(self, other):
        return PauliSum(self.n, {p: other * c for p, c in self._terms.items()})

    def dagger(self) -> "PauliSum":
        return PauliSum(self.n, {p: np.conj(c) for p, c in self._terms.items()})

    def commutator(self, other: "PauliSum") -> "PauliSum":
        return self * other - other * self

    def simplify(self, tol: float = DROP_TOL) -> "PauliSum":
        return PauliSum(self.n, {p: c for p, c in self._terms.items() if abs(c) >= tol})

    def is_hermitian(self, tol: float = 0.0) -> bool:
        return all(abs(np.imag(c)) <= tol for c in self._terms.values())

    def is_antihermitian(self, tol: float = 0.0) -> bool:
        return all(abs(np.real(c)) <= tol for c in self._terms.values())

    def real(self, tol: float = 1e-12) -> "PauliSum":
        """Drop imaginary parts, asserting they are below ``tol``."""
        bad = [p.label for p, c in self._terms.items() if abs(np.imag(c)) > tol]
        if bad:
            raise ValueError(f"non-hermitian terms: {bad[:3]}")
        return PauliSum(self.n, {p: float(np.real(c)) for p, c in self._terms.items()})

    def all_commute(self) -> bool:
        ps = list(self._terms)
        return all(ps[i].commutes(ps[j]) for i in range(len(ps)) for j in range(i))

    def identity_coefficient(self) -> complex:
        return self._terms.get(PauliString(self.n), 0.0)

    def strings(self) -> set[PauliString]:
        return set(self._terms)

    @cached_property
    def _sparse(self):
        dim = 1 << self.n
        if self.n > 24:
            raise MemoryError("refusing to build operators on more than 24 qubits")
        idx = np.arange(dim, dtype=np.int64)
        rows, cols, vals = [], [], []
        for p, c in self._terms.items():
            sign = 1.0 - 2.0 * (np.bitwise_count(idx & p.z) & 1)
            rows.append(idx ^ p.x)
            cols.append(idx)
            vals.append(c * (1j ** (p.y_count() % 4)) * sign)
        if not rows:
            return scipy.sparse.csr_matrix((dim, dim), dtype=complex)
        m = scipy.sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
        )
        return m.tocsr()

    def to_sparse(self):
        return self._sparse

    def to_matrix(self) -> np.ndarray:
        return self._sparse.toarray()

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self._sparse @ psi

    def to_text(self) -> str:
        """Lines ``coefficient  LABEL`` in lexicographic label order."""
        lines = []
        for p in sorted(self._terms, key=lambda s: s.label):
            c = self._terms[p]
            if np.imag(c) == 0:
                lines.append(f"{float(np.real(c)):+.16e}  {p.label}")
            else:
                lines.append(f"({complex(c).real:+.16e}{complex(c).imag:+.16e}j)  {p.label}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "PauliSum":
        terms, n = [], None
        for line in text.splitlines():
            if not line.strip():
                continue
            coef, label = line.split()
            n = len(label) if n is None else n
            terms.append((PauliString.from_label(label), complex(coef.strip("()")) if "j" in coef else float(coef)))
        return cls(n or 0, terms)

    def __repr__(self) -> str:
        return f"PauliSum(n={self.n}, terms={len(self)})"


def cnot_count(rotations) -> int:
    """CNOTs of a textbook CNOT-ladder compilation: 2 (w - 1) per rotation."""
    total = 0
    for p in rotations:
        if isinstance(p, str):
            p = PauliString.from_label(p)
        w = p.weight
        total += 2 * (w - 1) if w >= 1 else 0
    return total
