"""Embedding potentials: environment sites and the plain-text potential file.

File layout (sections in this order; ``!`` starts a comment)::

    @COORDINATES
    3
    AA                      # or AU
    O   0.000  0.000  0.000
    H   0.757  0.586  0.000
    H  -0.757  0.586  0.000
    @MULTIPOLES
    ORDER 0
    3
    1  -0.67
    2   0.335
    3   0.335
    ORDER 1
    1
    1   0.0  0.0  0.1       # x y z
    ORDER 2
    1
    1   0.1 0.0 0.0 0.2 0.0 0.3   # xx xy xz yy yz zz (raw Cartesian, not traceless)
    @POLARIZABILITIES
    ORDER 1 1
    1
    1   5.0 0.0 0.0 5.0 0.0 5.0   # xx xy xz yy yz zz
    EXCLISTS
    3 3
    1 2 3
    2 1 3
    3 1 2

Site indices are 1-based.  Multipoles and polarizabilities are in atomic
units; coordinates are converted to bohr.  ``EXCLISTS`` rows list the sites
whose multipoles and induced dipoles do not interact with the leading site;
zero entries are padding.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..molint.geometry import BOHR_PER_ANGSTROM

UPPER = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


class PotentialParseError(ValueError):
    def __init__(self, message, lineno=None):
        prefix = f"potential line {lineno}: " if lineno is not None else "potential: "
        super().__init__(prefix + message)
        self.lineno = lineno


def sym_from_upper(v) -> np.ndarray:
    m = np.zeros((3, 3))
    for val, (i, j) in zip(v, UPPER):
        m[i, j] = m[j, i] = val
    return m


def upper_from_sym(m) -> np.ndarray:
    return np.array([m[i, j] for i, j in UPPER])


@dataclass
class EnvironmentSite:
    position: np.ndarray
    label: str = "X"
    charge: float | None = None
    dipole: np.ndarray | None = None
    quadrupole: np.ndarray | None = None  # 6 components xx xy xz yy yz zz
    polarizability: np.ndarray | None = None  # 3x3
    exclusions: frozenset = field(default_factory=frozenset)  # 0-based site indices

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).reshape(3)
        if self.dipole is not None:
            self.dipole = np.asarray(self.dipole, dtype=float).reshape(3)
        if self.quadrupole is not None:
            self.quadrupole = np.asarray(self.quadrupole, dtype=float).reshape(6)
        if self.polarizability is not None:
            a = np.asarray(self.polarizability, dtype=float)
            a = sym_from_upper(a) if a.shape == (6,) else a.reshape(3, 3)
            if not np.allclose(a, a.T, atol=1e-12):
                raise ValueError("polarizability tensor must be symmetric")
            self.polarizability = a
        self.exclusions = frozenset(int(i) for i in self.exclusions)

    @property
    def is_polarizable(self) -> bool:
        return self.polarizability is not None and np.any(self.polarizability != 0.0)

    @property
    def max_order(self) -> int:
        for k, m in ((2, self.quadrupole), (1, self.dipole), (0, self.charge)):
            if m is not None:
                return k
        return -1

    def multipoles(self):
        """Yield (derivative multi-index, M_k / k!) over all stored Cartesian components."""
        if self.charge is not None:
            yield (0, 0, 0), float(self.charge)
        if self.dipole is not None:
            for d, val in enumerate(self.dipole):
                k = [0, 0, 0]
                k[d] = 1
                yield tuple(k), float(val)
        if self.quadrupole is not None:
            for val, (i, j) in zip(self.quadrupole, UPPER):
                k = [0, 0, 0]
                k[i] += 1
                k[j] += 1
                yield tuple(k), float(val) * (0.5 if i == j else 1.0)


@dataclass
class EmbeddingPotential:
    sites: list[EnvironmentSite]

    def __post_init__(self):
        n = len(self.sites)
        for s, site in enumerate(self.sites):
            for o in site.exclusions:
                if not 0 <= o < n:
                    raise ValueError(f"site {s + 1} excludes unknown site {o + 1}")
                if s not in self.sites[o].exclusions and o != s:
                    raise ValueError(f"exclusion lists not symmetric: site {s + 1} excludes {o + 1} but not vice versa")

    @property
    def N(self) -> int:
        return len(self.sites)

    @property
    def K(self) -> int:
        return max((s.max_order for s in self.sites), default=-1)

    @property
    def positions(self) -> np.ndarray:
        return np.array([s.position for s in self.sites]).reshape(-1, 3)

    @property
    def polarizable(self) -> list[int]:
        return [i for i, s in enumerate(self.sites) if s.is_polarizable]

    def excluded(self, s: int, o: int) -> bool:
        return s == o or o in self.sites[s].exclusions


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise PotentialParseError("expected integers", lineno) from None


def _floats(tokens, lineno):
    try:
        return [float(t.replace("D", "E")) for t in tokens]
    except ValueError:
        raise PotentialParseError("malformed number", lineno) from None


def parse_potential_file(text: str) -> EmbeddingPotential:
    lines = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("!", 1)[0].split("#", 1)[0].strip()
        if line:
            lines.append((n, line))
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise PotentialParseError("unexpected end of file", lines[-1][0] if lines else None)
        item = lines[pos]
        pos += 1
        return item

    def count(expect_section):
        lineno, line = take()
        vals = _ints(line.split()[:1], lineno)
        if vals[0] < 0:
            raise PotentialParseError(f"negative count in {expect_section}", lineno)
        return vals[0]

    lineno, line = take()
    if line.upper() != "@COORDINATES":
        raise PotentialParseError("file must start with @COORDINATES", lineno)
    n_sites = count("@COORDINATES")
    lineno, unit = take()
    unit = unit.upper()
    if unit not in ("AA", "AU"):
        raise PotentialParseError(f"unit must be AA or AU, got {unit!r}", lineno)
    scale = BOHR_PER_ANGSTROM if unit == "AA" else 1.0
    sites = []
    for _ in range(n_sites):
        lineno, line = take()
        parts = line.split()
        if len(parts) != 4:
            raise PotentialParseError("expected 'label x y z'", lineno)
        xyz = np.array(_floats(parts[1:], lineno)) * scale
        sites.append(EnvironmentSite(xyz, label=parts[0]))

    def site_index(tok, lineno):
        i = _ints([tok], lineno)[0]
        if not 1 <= i <= n_sites:
            raise PotentialParseError(f"site index {i} out of range 1..{n_sites}", lineno)
        return i - 1

    exclusions = [set() for _ in range(n_sites)]
    section = None
    while pos < len(lines):
        lineno, line = take()
        head = line.upper()
        if head in ("@MULTIPOLES", "@POLARIZABILITIES", "EXCLISTS", "@EXCLISTS"):
            section = head.lstrip("@")
            if section == "EXCLISTS":
                hdr = _ints(take()[1].split(), lineno)
                if len(hdr) != 2:
                    raise PotentialParseError("EXCLISTS header must be 'N M'", lineno)
                for _ in range(hdr[0]):
                    ln, row = take()
                    vals = _ints(row.split(), ln)
                    if len(vals) > hdr[1]:
                        raise PotentialParseError(f"exclusion row longer than M={hdr[1]}", ln)
                    s = site_index(vals[0], ln)
                    for o in vals[1:]:
                        if o == 0:
                            continue
                        exclusions[s].add(site_index(o, ln))
                section = None
            continue
        parts = head.split()
        if parts[0] == "ORDER":
            if section == "MULTIPOLES":
                if len(parts) != 2:
                    raise PotentialParseError("multipole section header is 'ORDER k'", lineno)
                order = _ints(parts[1:], lineno)[0]
                if order not in (0, 1, 2):
                    raise PotentialParseError(f"multipole order {order} unsupported (max 2)", lineno)
                width = {0: 1, 1: 3, 2: 6}[order]
                for _ in range(count("ORDER")):
                    ln, row = take()
                    toks = row.split()
                    if len(toks) != width + 1:
                        raise PotentialParseError(f"order-{order} row needs index + {width} values", ln)
                    s = site_index(toks[0], ln)
                    vals = _floats(toks[1:], ln)
                    if order == 0:
                        sites[s].charge = vals[0]
                    elif order == 1:
                        sites[s].dipole = np.array(vals)
                    else:
                        sites[s].quadrupole = np.array(vals)
            elif section == "POLARIZABILITIES":
                if parts[1:] != ["1", "1"]:
                    raise PotentialParseError("only 'ORDER 1 1' polarizabilities are supported", lineno)
                for _ in range(count("ORDER 1 1")):
                    ln, row = take()
                    toks = row.split()
                    if len(toks) != 7:
                        raise PotentialParseError("polarizability row needs index + 6 values", ln)
                    s = site_index(toks[0], ln)
                    sites[s].polarizability = sym_from_upper(_floats(toks[1:], ln))
            else:
                raise PotentialParseError("ORDER outside @MULTIPOLES/@POLARIZABILITIES", lineno)
            continue
        raise PotentialParseError(f"unexpected line {line!r}", lineno)

    for s in range(n_sites):
        for o in exclusions[s]:
            if s not in exclusions[o] and o != s:
                raise PotentialParseError(f"exclusion lists not symmetric: site {s + 1} excludes {o + 1} but not vice versa")
        sites[s].exclusions = frozenset(exclusions[s] - {s})
    return EmbeddingPotential(sites)


def read_potential(path) -> EmbeddingPotential:
    with open(path) as fh:
        return parse_potential_file(fh.read())


def serialize_potential(pot: EmbeddingPotential) -> str:
    """Write ``pot`` in AU with full float precision (parse(serialize(p)) == p)."""
    f = lambda x: repr(float(x))
    out = ["@COORDINATES", str(pot.N), "AU"]
    out += [f"{s.label} {f(s.position[0])} {f(s.position[1])} {f(s.position[2])}" for s in pot.sites]
    blocks = []
    for order, attr in ((0, "charge"), (1, "dipole"), (2, "quadrupole")):
        rows = []
        for i, s in enumerate(pot.sites):
            val = getattr(s, attr)
            if val is None:
                continue
            vals = [val] if order == 0 else list(val)
            rows.append(f"{i + 1} " + " ".join(f(v) for v in vals))
        if rows:
            blocks += [f"ORDER {order}", str(len(rows))] + rows
    if blocks:
        out += ["@MULTIPOLES"] + blocks
    pol = [(i, s) for i, s in enumerate(pot.sites) if s.polarizability is not None]
    if pol:
        out += ["@POLARIZABILITIES", "ORDER 1 1", str(len(pol))]
        out += [f"{i + 1} " + " ".join(f(v) for v in upper_from_sym(s.polarizability)) for i, s in pol]
    if any(s.exclusions for s in pot.sites):
        width = 1 + max(len(s.exclusions) for s in pot.sites)
        out += ["EXCLISTS", f"{pot.N} {width}"]
        for i, s in enumerate(pot.sites):
            row = [i + 1] + sorted(o + 1 for o in s.exclusions)
            row += [0] * (width - len(row))
            out.append(" ".join(map(str, row)))
    return "\n".join(out) + "\n"
