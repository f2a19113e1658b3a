"""Cartesian Gaussian shells and the bundled basis-set library.

Basis files live in ``pevqe/molint/data`` and use NWChem-style blocks::

    O    S
          5.484671660E+03   1.831074430E-03
          ...
    O    SP
          1.553961625E+01  -1.107775495E-01   7.087426823E-02
    END

Each block starts with ``<symbol> <shell type>`` followed by one row per
primitive: the exponent (bohr^-2) and one contraction coefficient per angular
momentum in the type (``SP`` rows carry the s then the p coefficient).
Coefficients refer to normalized primitives.  Lines starting with ``#`` are
comments.

Cartesian components within a shell are ordered alphabetically, e.g.
``xx, xy, xz, yy, yz, zz`` for d shells.  Every AO function, including the
off-diagonal d components, is normalized to one.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from math import pi, sqrt

import numpy as np

from .geometry import ATOMIC_NUMBERS, Molecule

ANGULAR_LETTERS = "SPDF"
MAX_L = 2

BASIS_FILES = {
    "sto-3g": "sto-3g.nw",
    "3-21g": "3-21g.nw",
    "6-31g*": "6-31gs.nw",
    "6-31gs": "6-31gs.nw",
}


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def cartesian_components(L: int) -> list[tuple[int, int, int]]:
    return [(lx, ly, L - lx - ly) for lx in range(L, -1, -1) for ly in range(L - lx, -1, -1)]


@dataclass(frozen=True, eq=False)
class Shell:
    """A contracted Cartesian Gaussian shell.

    ``coefficients`` are the user-facing contraction coefficients (for
    normalized primitives); ``norm_coefficients`` fold in primitive and
    contraction normalization for the (L, 0, 0) component.
    """

    center: np.ndarray
    L: int
    exponents: np.ndarray
    coefficients: np.ndarray
    atom_index: int = -1

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(3)
        exps = np.atleast_1d(np.asarray(self.exponents, dtype=float))
        coefs = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        if self.L < 0 or self.L > MAX_L:
            raise ValueError(f"angular momentum {self.L} not supported (max {MAX_L})")
        if exps.shape != coefs.shape:
            raise ValueError("exponent and coefficient lists differ in length")
        if np.any(exps <= 0):
            raise ValueError("Gaussian exponents must be strictly positive")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "coefficients", coefs)

    @property
    def n_functions(self) -> int:
        return (self.L + 1) * (self.L + 2) // 2

    @property
    def components(self) -> list[tuple[int, int, int]]:
        return cartesian_components(self.L)

    @property
    def component_factors(self) -> np.ndarray:
        L = self.L
        num = double_factorial(2 * L - 1)
        return np.array(
            [sqrt(num / (double_factorial(2 * l - 1) * double_factorial(2 * m - 1) * double_factorial(2 * n - 1)))
             for l, m, n in self.components]
        )

    @property
    def norm_coefficients(self) -> np.ndarray:
        a, L = self.exponents, self.L
        prim = (2 * a / pi) ** 0.75 * (4 * a) ** (L / 2) / sqrt(double_factorial(2 * L - 1))
        c = self.coefficients * prim
        p = a[:, None] + a[None, :]
        ovl = (pi / p) ** 1.5 * double_factorial(2 * L - 1) / (2 * p) ** L
        return c / sqrt(c @ ovl @ c)

    def translated(self, shift) -> "Shell":
        return Shell(self.center + np.asarray(shift, dtype=float), self.L, self.exponents, self.coefficients, self.atom_index)


def parse_basis_text(text: str) -> dict[int, list[tuple[int, np.ndarray, np.ndarray]]]:
    """Parse basis blocks into {Z: [(L, exponents, coefficients), ...]}."""
    out: dict[int, list] = {}
    block = None

    def flush():
        if block is None:
            return
        z, kind, rows = block
        if not rows:
            raise ValueError(f"empty shell block for element {z}")
        arr = np.array(rows, dtype=float)
        if arr.shape[1] != len(kind) + 1:
            raise ValueError(f"shell type {kind} expects {len(kind) + 1} columns")
        for col, letter in enumerate(kind, start=1):
            out.setdefault(z, []).append((ANGULAR_LETTERS.index(letter), arr[:, 0].copy(), arr[:, col].copy()))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0].upper() == "END":
            flush()
            block = None
            continue
        if parts[0][0].isalpha():
            flush()
            if len(parts) != 2 or parts[0].upper() not in ATOMIC_NUMBERS:
                raise ValueError(f"basis line {lineno}: expected '<element> <shell type>'")
            kind = parts[1].upper()
            if any(ch not in ANGULAR_LETTERS for ch in kind):
                raise ValueError(f"basis line {lineno}: unknown shell type {parts[1]!r}")
            block = (ATOMIC_NUMBERS[parts[0].upper()], kind, [])
            continue
        if block is None:
            raise ValueError(f"basis line {lineno}: data row outside a shell block")
        try:
            block[2].append([float(v.replace("D", "E").replace("d", "e")) for v in parts])
        except ValueError:
            raise ValueError(f"basis line {lineno}: malformed number") from None
    flush()
    return out


@lru_cache(maxsize=None)
def load_basis(name: str):
    key = name.strip().lower()
    if key not in BASIS_FILES:
        raise ValueError(f"unknown basis {name!r}; bundled: sto-3g, 3-21g, 6-31g*")
    text = resources.files("pevqe.molint").joinpath("data", BASIS_FILES[key]).read_text()
    return parse_basis_text(text)


def build_basis(molecule: Molecule, basis_name: str) -> list[Shell]:
    library = load_basis(basis_name)
    shells = []
    for idx, atom in enumerate(molecule.atoms):
        if atom.element not in library:
            raise ValueError(f"element {atom.symbol} missing from basis {basis_name}")
        entries = sorted(library[atom.element], key=lambda e: e[0])
        for L, exps, coefs in entries:
            if L > MAX_L:
                raise ValueError(f"basis {basis_name} has L={L} shells for {atom.symbol}; max is {MAX_L}")
            shells.append(Shell(atom.position, L, exps, coefs, idx))
    return shells


def n_basis_functions(shells) -> int:
    return sum(s.n_functions for s in shells)


def shell_offsets(shells) -> list[int]:
    offsets, n = [], 0
    for s in shells:
        offsets.append(n)
        n += s.n_functions
    return offsets
