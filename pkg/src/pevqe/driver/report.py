"""Machine-readable results file and a short human summary.

The results file is JSON with a fixed key order and no timestamps, so two runs
with the same configuration and seed produce identical bytes. Top-level keys:

    schema            "pevqe-results/1"
    converged         bool; message holds the reason when false
    molecule          symbols, charge, electron count, basis, basis size
    active_space      active electrons, active and inactive MO indices
    energies          total, vacuum expectation, electrostatic, induction, RHF
    trace             one object per macro-iteration
    ansatz            pool kind, operator labels, parameters, CNOT count
    sampling          shots (0 = exact), seed, and mean/stderr when shots > 0
    thresholds        every convergence threshold used
    environment       null, or site counts and the final induced dipoles
    vacuum_reference  null, or vacuum energy, vacuum CNOT count, CNOT ratio
"""
from __future__ import annotations

import json
from pathlib import Path

from .runner import RunResult

SCHEMA = "pevqe-results/1"


def build_report(result: RunResult) -> dict:
    cfg, system = result.config, result.system
    circuit = result.vqescf.adapt.circuit
    report = {
        "schema": SCHEMA,
        "converged": bool(result.converged),
        "message": result.message,
        "molecule": {
            "symbols": [a.symbol for a in system.molecule.atoms],
            "charge": system.molecule.charge,
            "n_electrons": system.molecule.n_electrons,
            "basis": cfg.basis,
            "n_basis": int(system.integrals.nao),
        },
        "active_space": {
            "n_electrons": system.active.n_active_electrons,
            "active": list(system.active.active),
            "inactive": list(system.active.inactive),
        },
        "energies": {
            "total": result.energy,
            "vacuum_expectation": result.e_vacuum,
            "electrostatic": result.e_es,
            "induction": result.e_ind,
            "rhf": system.rhf.E_total,
        },
        "trace": [r.as_dict() for r in result.records],
        "ansatz": {
            "pool": cfg.pool,
            "operators": [g.label for g in circuit.generators],
            "parameters": [float(t) for t in circuit.parameters],
            "cnot_count": int(result.cnots),
        },
        "sampling": {"shots": cfg.shots, "seed": cfg.seed},
        "thresholds": cfg.thresholds(),
        "environment": None,
        "vacuum_reference": None,
    }
    if result.sample is not None:
        report["sampling"].update(mean=result.sample.mean, stderr=result.sample.stderr)
    if system.potential is not None:
        report["environment"] = {
            "n_sites": system.potential.N,
            "n_polarizable": len(system.potential.polarizable),
            "induced_dipoles": result.dipoles.mu.tolist() if result.dipoles is not None else [],
        }
    if result.vacuum_reference is not None:
        vac = result.vacuum_reference
        vac_cnots = int(vac.adapt.cnots)
        report["vacuum_reference"] = {
            "energy": vac.energy,
            "cnot_count": vac_cnots,
            "cnot_ratio": result.cnots / vac_cnots if vac_cnots else None,
        }
    return report


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def summary(result: RunResult) -> str:
    lines = [
        f"status       {'converged' if result.converged else 'NOT converged: ' + result.message}",
        f"E(total)     {result.energy:.10f}",
    ]
    if result.system.embedding is not None:
        lines += [
            f"<H_vac>      {result.e_vacuum:.10f}",
            f"E_es         {result.e_es:.10f}",
            f"E_ind        {result.e_ind:.10f}",
            f"macro iters  {len(result.records)}",
        ]
    lines.append(f"operators    {result.vqescf.adapt.n_operators}  CNOTs {result.cnots}")
    if result.sample is not None:
        s = result.sample
        lines.append(f"sampled      {s.mean:.8f} +/- {s.stderr:.2e} ({s.shots} shots)")
    if result.vacuum_reference is not None:
        vac = result.vacuum_reference
        lines.append(f"vacuum       {vac.energy:.10f}  CNOTs {vac.adapt.cnots}")
        if vac.adapt.cnots:
            lines.append(f"CNOT ratio   {result.cnots / vac.adapt.cnots:.3f}")
    return "\n".join(lines)


def emit_report(result: RunResult, path=None, stream=None) -> dict:
    """Write the results file (if a path is given) and print the summary."""
    report = build_report(result)
    if path is not None:
        path = Path(path)
        try:
            path.write_text(dumps_report(report))
        except OSError as exc:
            raise OSError(f"cannot write results file {path}: {exc}") from exc
    if stream is not None:
        print(summary(result), file=stream)
    return report
