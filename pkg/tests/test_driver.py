import dataclasses
import json

import numpy as np
import pytest

from pevqe.driver import (
    ConfigError,
    RunConfig,
    ao_density,
    build_report,
    dumps_report,
    emit_report,
    free_energy_problem,
    parse_config,
    prepare_system,
    read_config,
    resolve_active_space,
    run_pe_vqescf,
)
from pevqe.driver.runner import vqescf_options
from pevqe.qop import build_hamiltonian
from pevqe.qsim import expectation_exact
from pevqe.scf import reduce_to_active_space
from pevqe.vqescf import OrbitalProblem, run_vqescf

REPORT_KEYS = ["schema", "converged", "message", "molecule", "active_space", "energies", "trace",
               "ansatz", "sampling", "thresholds", "environment", "vacuum_reference"]


def _config(inputs_dir, tmp_path=None, **extra):
    lines = [f"geometry = {inputs_dir / 'lih.xyz'}", "basis = sto-3g", "active_electrons = 2",
             "active_orbitals = 2", "adapt_eps = 1e-6"]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    return parse_config("\n".join(lines), tmp_path or inputs_dir)


# -- configuration ------------------------------------------------------------


def test_config_defaults_and_relative_paths(inputs_dir):
    cfg = parse_config("geometry = h2.xyz\nbasis = STO-3G  # comment\n", inputs_dir)
    assert cfg.geometry == inputs_dir / "h2.xyz"
    assert cfg.basis == "sto-3g"
    assert cfg.adapt_eps == 1e-3 and cfg.max_operators == 50 and cfg.max_macro == 30
    assert cfg.shots == 0 and cfg.exact and not cfg.embedded
    assert cfg.pool == "fermionic-SD" and cfg.dipole_solver == "direct"


def test_config_reads_all_example_files(inputs_dir):
    for path in sorted(inputs_dir.glob("*.cfg")):
        cfg = read_config(path)
        assert cfg.geometry.exists()
        assert cfg.potential is None or cfg.potential.exists()


@pytest.mark.parametrize("text, lineno, fragment", [
    ("geometry = a.xyz\nbasis = sto-3g\nfoo = 1\n", 3, "unknown key"),
    ("geometry = a.xyz\n\nbasis = sto-3g\ngeometry = b.xyz\n", 4, "first set on line 1"),
    ("geometry = a.xyz\nbasis =\n", 2, "empty value"),
    ("geometry = a.xyz\nbasis = sto-3g\nshots = many\n", 3, "bad value"),
    ("geometry = a.xyz\nbasis sto-3g\n", 2, "key = value"),
    ("geometry = a.xyz\nbasis = sto-3g\noptimize_orbitals = maybe\n", 3, "bad value"),
])
def test_config_errors_name_the_line(text, lineno, fragment):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value) and fragment in str(info.value)


@pytest.mark.parametrize("extra", ["adapt_eps = 0", "shots = -1", "pool = uccsd", "max_macro = 0",
                                   "dipole_solver = magic", "max_operators = -2"])
def test_config_value_validation(extra):
    with pytest.raises(ConfigError):
        parse_config(f"geometry = a.xyz\nbasis = sto-3g\n{extra}\n")


def test_missing_required_key():
    with pytest.raises(ConfigError, match="basis"):
        parse_config("geometry = a.xyz\n")


def test_active_space_resolution():
    cfg = RunConfig("x", "sto-3g", active_electrons=4, active_orbitals=4)
    a = resolve_active_space(cfg, 10, 7)
    assert a.inactive == (0, 1, 2) and a.active == (3, 4, 5, 6)
    cfg = RunConfig("x", "sto-3g", active_electrons=4, active_orbitals=(2, 4, 5))
    a = resolve_active_space(cfg, 10, 7)
    assert a.active == (2, 4, 5) and a.inactive == (0, 1, 3)
    full = resolve_active_space(RunConfig("x", "sto-3g"), 4, 6)
    assert full.active == tuple(range(6)) and full.inactive == ()
    with pytest.raises(ConfigError):
        resolve_active_space(RunConfig("x", "sto-3g", active_orbitals=2), 4, 6)
    with pytest.raises(ConfigError):
        resolve_active_space(RunConfig("x", "sto-3g", active_electrons=3, active_orbitals=(1, 2)), 4, 6)


def test_open_shell_and_missing_files_rejected(inputs_dir, tmp_path):
    with pytest.raises(ConfigError, match="closed-shell"):
        prepare_system(parse_config(f"geometry = {inputs_dir / 'h2.xyz'}\nbasis = sto-3g\ncharge = 1\n"))
    with pytest.raises(FileNotFoundError):
        prepare_system(_config(inputs_dir, potential=tmp_path / "absent.pot"))


# -- double SCF -----------------------------------------------------------------


def test_without_potential_matches_plain_vqescf(inputs_dir):
    cfg = _config(inputs_dir)
    system = prepare_system(cfg)
    result = run_pe_vqescf(cfg, system)
    plain = run_vqescf(OrbitalProblem(system.integrals, system.active), system.rhf.C, vqescf_options(cfg))
    assert result.energy == plain.energy
    assert np.array_equal(result.C, plain.C)
    assert result.e_es == 0.0 and result.e_ind == 0.0 and len(result.records) == 1


def test_inert_environment_reproduces_vacuum(inputs_dir, tmp_path):
    """A site with no multipoles and no polarizability changes nothing."""
    pot = tmp_path / "inert.pot"
    pot.write_text("@COORDINATES\n1\nAU\nX 0.0 0.0 9.0\n@MULTIPOLES\nORDER 0\n1\n1 0.0\n")
    vac = run_pe_vqescf(_config(inputs_dir))
    emb = run_pe_vqescf(_config(inputs_dir, tmp_path, potential=pot))
    assert emb.converged
    assert emb.energy == pytest.approx(vac.energy, abs=1e-10)
    assert emb.e_es == 0.0 and emb.e_ind == 0.0
    assert emb.dipoles.mu.shape == (0, 3)


def test_macro_iterations_converge_with_nonpositive_induction(water_pe_run):
    r = water_pe_run
    assert r.converged
    assert all(rec.e_ind <= 0.0 for rec in r.records)
    assert r.records[-1].dipole_rms < r.config.dipole_tol
    assert abs(r.records[-1].delta_energy) < r.config.energy_tol


def test_energy_decomposition_identities(water_pe_run):
    r = water_pe_run
    s = r.system
    assert r.energy == pytest.approx(r.e_vacuum + r.e_es + r.e_ind, abs=1e-12)
    psi = r.vqescf.adapt.circuit.state()
    vac = build_hamiltonian(reduce_to_active_space(OrbitalProblem(s.integrals, s.active).mo(r.C), s.active))
    assert expectation_exact(psi, vac) == pytest.approx(r.e_vacuum, abs=1e-10)
    D_ao = ao_density(r.C, s.active, r.vqescf.D)
    e_es, e_ind = s.embedding.energy_terms(D_ao, *s.embedding.induced_dipoles(D_ao))
    assert e_es == pytest.approx(r.e_es, abs=1e-10)
    assert e_ind == pytest.approx(r.e_ind, abs=1e-10)
    free = free_energy_problem(s, r.dipoles)
    H_free = build_hamiltonian(reduce_to_active_space(free.mo(r.C), s.active))
    assert expectation_exact(psi, H_free) == pytest.approx(r.energy, abs=1e-8)


def test_converged_point_is_a_fixed_point(water_pe_run):
    """One more macro-iteration from the converged state moves neither energy nor dipoles."""
    r = water_pe_run
    s = r.system
    emb = s.embedding
    problem = OrbitalProblem(s.integrals, s.active, emb.v_es + emb.induction_operator(r.dipoles), emb.e_es_nuc)
    again = run_vqescf(problem, r.C, vqescf_options(r.config), warm=r.vqescf.adapt)
    mu, F = emb.induced_dipoles(ao_density(again.C, s.active, again.D))
    assert np.sqrt(np.mean((mu.mu - r.dipoles.mu) ** 2)) < 1e-9
    e_vac = again.energy - np.sum(ao_density(again.C, s.active, again.D)
                                  * (emb.v_es + emb.induction_operator(r.dipoles))) - emb.e_es_nuc
    D_ao = ao_density(again.C, s.active, again.D)
    e_es, e_ind = emb.energy_terms(D_ao, mu, F)
    assert e_vac + e_es + e_ind == pytest.approx(r.energy, abs=1e-9)


def test_per_cycle_dipole_refresh_reaches_same_energy(water_pe_config, water_pe_system, water_pe_run):
    cfg = dataclasses.replace(water_pe_config, refresh_dipoles=True)
    r = run_pe_vqescf(cfg, water_pe_system)
    assert r.converged
    assert r.energy == pytest.approx(water_pe_run.energy, abs=1e-7)


# -- reporting ------------------------------------------------------------------


def test_report_layout(water_pe_run, water_vacuum_run):
    r = dataclasses.replace(water_pe_run, vacuum_reference=water_vacuum_run)
    rep = build_report(r)
    assert list(rep) == REPORT_KEYS
    assert rep["schema"] == "pevqe-results/1"
    assert rep["energies"]["total"] == r.energy
    assert len(rep["trace"]) == len(r.records)
    assert rep["environment"]["n_sites"] == 3
    assert len(rep["ansatz"]["operators"]) == len(rep["ansatz"]["parameters"])
    vac = rep["vacuum_reference"]
    assert vac["cnot_ratio"] == pytest.approx(r.cnots / water_vacuum_run.adapt.cnots)
    json.loads(dumps_report(rep))


def test_seeded_runs_are_byte_identical(inputs_dir, tmp_path):
    cfg = _config(inputs_dir, tmp_path, shots=2000, seed=11)
    out = []
    for name in ("a.json", "b.json"):
        emit_report(run_pe_vqescf(cfg), tmp_path / name)
        out.append((tmp_path / name).read_bytes())
    assert out[0] == out[1]
    rep = json.loads(out[0])
    s = rep["sampling"]
    assert s["shots"] == 2000 and s["seed"] == 11 and s["stderr"] > 0
    assert abs(s["mean"] - rep["energies"]["total"]) < 5 * s["stderr"]


def test_unwritable_results_path(inputs_dir, tmp_path):
    result = run_pe_vqescf(_config(inputs_dir))
    with pytest.raises(OSError, match="cannot write"):
        emit_report(result, tmp_path / "missing-dir" / "out.json")
