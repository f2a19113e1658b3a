from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

BOHR_PER_ANGSTROM = 1.8897261246

SYMBOLS = (
    "X H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar "
    "K Ca Sc Ti V Cr Mn Fe Co Ni Cu Zn Ga Ge As Se Br Kr"
).split()
ATOMIC_NUMBERS = {s.upper(): z for z, s in enumerate(SYMBOLS) if z > 0}


def atomic_number(symbol: str) -> int:
    try:
        return ATOMIC_NUMBERS[symbol.strip().upper()]
    except KeyError:
        raise ValueError(f"unknown element symbol {symbol!r}") from None


@dataclass(frozen=True)
class Atom:
    element: int
    position: np.ndarray  # bohr

    def __post_init__(self):
        if int(self.element) < 1:
            raise ValueError(f"atomic number must be >= 1, got {self.element}")
        pos = np.asarray(self.position, dtype=float).reshape(3)
        if not np.all(np.isfinite(pos)):
            raise ValueError("atom coordinates must be finite")
        object.__setattr__(self, "position", pos)

    @property
    def symbol(self) -> str:
        return SYMBOLS[self.element]


@dataclass(frozen=True)
class Molecule:
    atoms: tuple[Atom, ...] = field(default_factory=tuple)
    charge: int = 0
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")
        if self.n_electrons < 0:
            raise ValueError("negative electron count")

    @property
    def n_electrons(self) -> int:
        return sum(a.element for a in self.atoms) - self.charge

    @property
    def charges(self) -> np.ndarray:
        return np.array([a.element for a in self.atoms], dtype=float)

    @property
    def coords(self) -> np.ndarray:
        if not self.atoms:
            return np.zeros((0, 3))
        return np.array([a.position for a in self.atoms])

    def nuclear_repulsion(self) -> float:
        Z, R = self.charges, self.coords
        e = 0.0
        for i in range(len(Z)):
            for j in range(i):
                d = np.linalg.norm(R[i] - R[j])
                if d < 1e-8:
                    raise ValueError(f"atoms {j} and {i} coincide")
                e += Z[i] * Z[j] / d
        return e

    def translated(self, shift) -> "Molecule":
        shift = np.asarray(shift, dtype=float)
        atoms = [Atom(a.element, a.position + shift) for a in self.atoms]
        return Molecule(atoms, self.charge, self.multiplicity)

    @classmethod
    def from_symbols(cls, symbols, coords, charge=0, multiplicity=1, unit="bohr"):
        scale = BOHR_PER_ANGSTROM if unit.lower() in ("angstrom", "aa", "a") else 1.0
        atoms = [Atom(atomic_number(s), np.asarray(c, dtype=float) * scale) for s, c in zip(symbols, coords)]
        return cls(atoms, charge, multiplicity)


def parse_xyz(text: str, charge: int = 0, multiplicity: int = 1) -> Molecule:
    """Read an XYZ block (coordinates in angstrom)."""
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty XYZ input")
    try:
        n = int(lines[0].split()[0])
    except (ValueError, IndexError):
        raise ValueError("XYZ line 1: expected atom count") from None
    if len(lines) < 2 + n:
        raise ValueError(f"XYZ: expected {n} atom lines, found {max(len(lines) - 2, 0)}")
    symbols, coords = [], []
    for i, line in enumerate(lines[2 : 2 + n], start=3):
        parts = line.split()
        if len(parts) < 4:
            raise ValueError(f"XYZ line {i}: expected 'El x y z'")
        symbols.append(parts[0])
        try:
            coords.append([float(v) for v in parts[1:4]])
        except ValueError:
            raise ValueError(f"XYZ line {i}: malformed coordinate") from None
    return Molecule.from_symbols(symbols, coords, charge, multiplicity, unit="angstrom")


def read_xyz(path, charge: int = 0, multiplicity: int = 1) -> Molecule:
    return parse_xyz(Path(path).read_text(), charge, multiplicity)
