import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pevqe.driver import prepare_system, read_config, run_pe_vqescf  # noqa: E402
from pevqe.molint import Molecule, build_basis, compute_core_integrals  # noqa: E402
from pevqe.scf import run_rhf  # noqa: E402

INPUTS = Path(__file__).resolve().parent.parent / "inputs"

WATER = (["O", "H", "H"], [[0.0, 0.0, 0.2217], [0.0, 1.4309, -0.8867], [0.0, -1.4309, -0.8867]])


@pytest.fixture(scope="session")
def inputs_dir():
    return INPUTS


def _system(symbols, coords, basis="sto-3g", charge=0):
    mol = Molecule.from_symbols(symbols, coords, charge=charge)
    shells = build_basis(mol, basis)
    ints = compute_core_integrals(mol, shells)
    return mol, shells, ints, run_rhf(ints, mol)


@pytest.fixture(scope="session")
def h2():
    return _system(["H", "H"], [[0, 0, 0], [0, 0, 1.4]])


@pytest.fixture(scope="session")
def lih():
    return _system(["Li", "H"], [[0, 0, 0], [0, 0, 3.015]])


@pytest.fixture(scope="session")
def water():
    return _system(*WATER)


@pytest.fixture(scope="session")
def water_pe_config():
    cfg = read_config(INPUTS / "h2o_pe.cfg")
    cfg.compare_vacuum = False
    cfg.output = None
    return cfg


@pytest.fixture(scope="session")
def water_pe_system(water_pe_config):
    return prepare_system(water_pe_config)


@pytest.fixture(scope="session")
def water_pe_timed(water_pe_config):
    start = time.perf_counter()
    result = run_pe_vqescf(water_pe_config, prepare_system(water_pe_config))
    return result, time.perf_counter() - start


@pytest.fixture(scope="session")
def water_pe_run(water_pe_timed):
    return water_pe_timed[0]


@pytest.fixture(scope="session")
def water_pe_oracle(water_pe_system):
    import oracles

    s = water_pe_system
    a = s.active
    return oracles.brute_force_pe_casscf(s.integrals, s.molecule, s.shells, s.potential, s.rhf.C,
                                         a.inactive, a.active, a.n_active_electrons)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def water_vacuum_run(water_pe_config, water_pe_system):
    from pevqe.driver import run_vacuum

    return run_vacuum(water_pe_system, water_pe_config)
