import json

import pytest

from pevqe.driver.cli import main
from pevqe.qop import PauliSum


def _write_config(tmp_path, inputs_dir, name="run.cfg", **extra):
    lines = [f"geometry = {inputs_dir / 'h2.xyz'}", "basis = sto-3g"]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return path


def test_run_writes_results(tmp_path, inputs_dir, capsys):
    cfg = _write_config(tmp_path, inputs_dir)
    out = tmp_path / "h2.json"
    assert main(["run", str(cfg), "-o", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["converged"] and rep["energies"]["total"] == pytest.approx(-1.1372701748, abs=1e-8)
    assert "E(total)" in capsys.readouterr().out


def test_unconverged_run_exits_with_2(tmp_path, inputs_dir):
    cfg = tmp_path / "lih.cfg"
    cfg.write_text(f"geometry = {inputs_dir / 'lih.xyz'}\nbasis = sto-3g\nactive_electrons = 2\n"
                   "active_orbitals = 2\nmax_cycles = 1\n")
    assert main(["run", str(cfg)]) == 2


def test_rhf_command(tmp_path, inputs_dir, capsys):
    assert main(["rhf", str(_write_config(tmp_path, inputs_dir))]) == 0
    out = capsys.readouterr().out
    assert "E(RHF)" in out and "-1.11" in out


def test_dipoles_command(inputs_dir, capsys):
    assert main(["dipoles", str(inputs_dir / "h2o_3site.pot"), "--field", "0", "0", "0.01"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4 and lines[-1].startswith("E_ind")
    assert float(lines[-1].split()[1]) <= 0.0


def test_hamiltonian_dump_round_trips(tmp_path, inputs_dir):
    cfg = _write_config(tmp_path, inputs_dir)
    path = tmp_path / "h.txt"
    assert main(["hamiltonian", str(cfg), "--dump-hamiltonian", str(path)]) == 0
    H = PauliSum.from_text(path.read_text())
    assert H.n == 4 and H.is_hermitian()
    assert H.to_text() == path.read_text()


@pytest.mark.parametrize("body", ["geometry = h2.xyz\nbasis = sto-3g\nbogus = 1\n",
                                  "geometry = nowhere.xyz\nbasis = sto-3g\n"])
def test_bad_input_exits_with_1(tmp_path, body, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(body)
    assert main(["run", str(cfg)]) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_polarization_catastrophe_exits_with_1(tmp_path, capsys):
    pot = tmp_path / "bad.pot"
    pot.write_text("@COORDINATES\n2\nAU\nA 0 0 0\nB 0 0 2\n@POLARIZABILITIES\nORDER 1 1\n2\n"
                   "1 8 0 0 8 0 8\n2 8 0 0 8 0 8\n")
    assert main(["dipoles", str(pot), "--field", "0", "0", "0.01"]) == 1
    assert "polarization catastrophe" in capsys.readouterr().err
