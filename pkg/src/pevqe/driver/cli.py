"""Command-line entry point."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from ..pe import InducedDipoleError
from ..scf import SCFConvergenceError
from .config import ConfigError, read_config
from .report import emit_report
from .runner import ao_density, prepare_system, reference_rdm, run_pe_vqescf


def _cmd_run(args) -> int:
    config = read_config(args.config)
    output = args.output or config.output
    result = run_pe_vqescf(config)
    emit_report(result, output, sys.stdout)
    return 0 if result.converged else 2


def _cmd_rhf(args) -> int:
    config = read_config(args.config)
    system = prepare_system(config)
    rhf = system.rhf
    print(f"E(RHF)       {rhf.E_total:.10f}")
    print(f"iterations   {rhf.n_iter}")
    print("orbital energies")
    for i, e in enumerate(rhf.orbital_energies):
        tag = "A" if i in system.active.active else "I" if i in system.active.inactive else "V"
        print(f"  {i:3d} {tag} {e:14.8f}")
    return 0


def _cmd_dipoles(args) -> int:
    from ..pe import FieldVector, ResponseSolver, induction_energy, multipole_fields, read_potential

    pot = read_potential(args.potential)
    ext = np.tile(np.asarray(args.field, dtype=float), (len(pot.polarizable), 1))
    F = FieldVector(ext + multipole_fields(pot).values, "total")
    mu = ResponseSolver(pot).solve(F, args.method)
    for s, m in zip(pot.polarizable, mu.mu):
        print(f"{pot.sites[s].label:>8s} {m[0]: .10e} {m[1]: .10e} {m[2]: .10e}")
    print(f"E_ind {induction_energy(mu, F):.12e}")
    return 0


def _cmd_hamiltonian(args) -> int:
    from ..qop import build_hamiltonian
    from ..vqescf import OrbitalProblem

    config = read_config(args.config)
    system = prepare_system(config)
    C, active = system.rhf.C, system.active
    if system.embedding is None:
        problem = OrbitalProblem(system.integrals, active)
    else:
        emb = system.embedding
        mu, _ = emb.induced_dipoles(ao_density(C, active, reference_rdm(active)))
        problem = OrbitalProblem(system.integrals, active, emb.v_es + emb.induction_operator(mu), emb.e_es_nuc)
    H = build_hamiltonian(problem.embedded(C))
    text = H.to_text()
    if args.dump_hamiltonian:
        with open(args.dump_hamiltonian, "w") as fh:
            fh.write(text)
        print(f"{len(H)} Pauli terms on {H.n} qubits written to {args.dump_hamiltonian}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pevqe", description="Polarizable-embedding ADAPT-VQE-SCF.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v: progress, -vv: debug")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full PE-VQE-SCF calculation")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="results file (overrides the config)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("rhf", help="restricted Hartree-Fock only")
    p.add_argument("config")
    p.set_defaults(func=_cmd_rhf)

    p = sub.add_parser("dipoles", help="classical induced dipoles in a uniform external field")
    p.add_argument("potential")
    p.add_argument("--field", nargs=3, type=float, default=[0.0, 0.0, 0.0], metavar=("X", "Y", "Z"))
    p.add_argument("--method", default="direct", choices=["direct", "iterative", "cg"])
    p.set_defaults(func=_cmd_dipoles)

    p = sub.add_parser("hamiltonian", help="active-space qubit Hamiltonian at the RHF orbitals")
    p.add_argument("config")
    p.add_argument("--dump-hamiltonian", metavar="PATH")
    p.set_defaults(func=_cmd_hamiltonian)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ValueError, OSError, InducedDipoleError, SCFConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
