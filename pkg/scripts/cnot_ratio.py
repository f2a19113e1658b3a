"""ADAPT ansatz size and CNOT count with the environment relative to vacuum.

    python scripts/cnot_ratio.py inputs/h2o_pe.cfg inputs/h2o_dipole.cfg

CNOTs follow the CNOT-ladder rule of 2 (w - 1) per Pauli rotation of weight w.
"""
import argparse
import dataclasses

from pevqe.driver import prepare_system, read_config, run_pe_vqescf, run_vacuum


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("configs", nargs="+")
    args = ap.parse_args()

    print(f"{'config':28s} {'E(PE)':>16s} {'E(vac)':>16s} {'ops PE':>7s} {'ops vac':>7s} "
          f"{'CNOT PE':>8s} {'CNOT vac':>8s} {'ratio':>6s}")
    for path in args.configs:
        cfg = dataclasses.replace(read_config(path), output=None, compare_vacuum=False, shots=0)
        system = prepare_system(cfg)
        pe = run_pe_vqescf(cfg, system)
        vac = run_vacuum(system, cfg)
        ratio = pe.cnots / vac.adapt.cnots if vac.adapt.cnots else float("nan")
        print(f"{path:28s} {pe.energy:16.10f} {vac.energy:16.10f} {pe.vqescf.adapt.n_operators:7d} "
              f"{vac.adapt.n_operators:7d} {pe.cnots:8d} {vac.adapt.cnots:8d} {ratio:6.3f}")


if __name__ == "__main__":
    main()
