"""Standard error of the sampled energy versus shot count, in vacuum and with PE.

    python scripts/shot_noise.py inputs/h2o_pe.cfg [--seed 7]

Prints one row per shot count and the log-log slope for each case.
"""
import argparse
import dataclasses

import numpy as np

from pevqe.driver import prepare_system, read_config, run_pe_vqescf, run_vacuum, sampling_hamiltonian
from pevqe.qsim import expectation_exact, expectation_sampled

SHOTS = [10**k for k in range(2, 7)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--seed", type=int, default=None, help="defaults to the config seed")
    args = ap.parse_args()

    cfg = dataclasses.replace(read_config(args.config), output=None, compare_vacuum=False, shots=0)
    seed = cfg.seed if args.seed is None else args.seed
    system = prepare_system(cfg)
    pe = run_pe_vqescf(cfg, system)
    vac = run_vacuum(system, cfg)
    cases = {
        "vacuum": (vac.adapt.circuit.state(), sampling_hamiltonian(system, vac.C, None)),
        "PE": (pe.vqescf.adapt.circuit.state(), sampling_hamiltonian(system, pe.C, pe.dipoles)),
    }
    print(f"{'shots':>9s} " + " ".join(f"{name + ' mean':>16s} {name + ' stderr':>14s}" for name in cases))
    errors = {name: [] for name in cases}
    for s in SHOTS:
        row = [f"{s:9d}"]
        for name, (psi, H) in cases.items():
            est = expectation_sampled(psi, H, s, seed)
            errors[name].append(est.stderr)
            row.append(f"{est.mean:16.8f} {est.stderr:14.3e}")
        print(" ".join(row))
    for name, (psi, H) in cases.items():
        slope = np.polyfit(np.log10(SHOTS), np.log10(errors[name]), 1)[0]
        print(f"{name:7s} exact {expectation_exact(psi, H):.10f}  slope {slope:+.3f}")


if __name__ == "__main__":
    main()
