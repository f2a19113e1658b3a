"""Run configuration: plain-text ``key = value`` files with ``#`` comments.

Recognized keys (paths are resolved relative to the config file):

    geometry          xyz file in angstrom                         (required)
    basis             sto-3g | 3-21g | 6-31g*                      (required)
    charge            total charge                                 (0)
    active_electrons  number of active electrons                   (all)
    active_orbitals   an orbital count, or explicit 0-based MO indices
    potential         embedding potential file                     (none)
    shots             measurement shots for the final estimate     (0 = exact)
    seed              RNG seed for shot sampling                   (0)
    pool              fermionic-SD | qubit                         (fermionic-SD)
    adapt_eps         ADAPT gradient threshold                     (1e-3)
    theta_tol         VQE parameter-gradient threshold             (1e-7)
    orbital_tol       orbital-gradient threshold                   (1e-6)
    energy_tol        macro-iteration energy change                (1e-8)
    dipole_tol        macro-iteration induced-dipole RMS change    (1e-8)
    max_macro         macro-iteration limit                        (30)
    max_cycles        VQE-SCF cycle limit per macro-iteration      (50)
    max_operators     ADAPT ansatz size limit                      (50)
    optimize_orbitals true | false                                 (true)
    refresh_dipoles   true: re-solve dipoles every VQE-SCF cycle   (false)
    dipole_solver     direct | iterative | cg                      (direct)
    compare_vacuum    also run without the environment             (false)
    output            results file                                 (none)
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from ..vqescf.pool import POOL_KINDS


class ConfigError(ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


@dataclass
class RunConfig:
    geometry: Path
    basis: str
    charge: int = 0
    active_electrons: int | None = None
    active_orbitals: int | tuple[int, ...] | None = None
    potential: Path | None = None
    shots: int = 0
    seed: int = 0
    pool: str = "fermionic-SD"
    adapt_eps: float = 1e-3
    theta_tol: float = 1e-7
    orbital_tol: float = 1e-6
    energy_tol: float = 1e-8
    dipole_tol: float = 1e-8
    max_macro: int = 30
    max_cycles: int = 50
    max_operators: int = 50
    optimize_orbitals: bool = True
    refresh_dipoles: bool = False
    dipole_solver: str = "direct"
    compare_vacuum: bool = False
    output: Path | None = None

    def __post_init__(self):
        for name in ("adapt_eps", "theta_tol", "orbital_tol", "energy_tol", "dipole_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("max_macro", "max_cycles"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.shots < 0:
            raise ConfigError("shots must be non-negative")
        if self.max_operators < 0:
            raise ConfigError("max_operators must be non-negative")
        if self.pool not in POOL_KINDS:
            raise ConfigError(f"pool must be one of {', '.join(POOL_KINDS)}")
        if self.dipole_solver not in ("direct", "iterative", "jacobi", "cg"):
            raise ConfigError(f"unknown dipole_solver {self.dipole_solver!r}")

    @property
    def exact(self) -> bool:
        """True when expectation values are exact (no shot sampling)."""
        return self.shots == 0

    @property
    def embedded(self) -> bool:
        return self.potential is not None

    def thresholds(self) -> dict:
        return {
            "adapt_eps": self.adapt_eps,
            "theta_tol": self.theta_tol,
            "orbital_tol": self.orbital_tol,
            "energy_tol": self.energy_tol,
            "dipole_tol": self.dipole_tol,
        }


def _bool(v: str) -> bool:
    low = v.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _orbitals(v: str):
    parts = v.replace(",", " ").split()
    if len(parts) == 1:
        return int(parts[0])
    return tuple(int(p) for p in parts)


def _converters(base: Path):
    def path(v):
        p = Path(v).expanduser()
        return p if p.is_absolute() else base / p

    conv = {
        "geometry": path,
        "potential": path,
        "output": path,
        "basis": str.lower,
        "pool": str,
        "dipole_solver": str.lower,
        "active_orbitals": _orbitals,
    }
    for f in fields(RunConfig):
        if f.name in conv:
            continue
        kind = str(f.type)
        conv[f.name] = _bool if "bool" in kind else int if "int" in kind else float
    return conv


def parse_config(text: str, base_dir=".") -> RunConfig:
    conv = _converters(Path(base_dir))
    values: dict = {}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in conv:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", lineno)
        if not value:
            raise ConfigError(f"empty value for {key!r}", lineno)
        try:
            values[key] = conv[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno) from None
        seen[key] = lineno
    for key in ("geometry", "basis"):
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    return RunConfig(**values)


def read_config(path) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)
