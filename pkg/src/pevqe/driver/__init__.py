"""Configuration, the PE-VQE-SCF double-SCF loop, reporting and the CLI."""
from .config import ConfigError, RunConfig, parse_config, read_config
from .report import build_report, dumps_report, emit_report, summary
from .runner import (
    MacroIterationRecord,
    RunResult,
    System,
    ao_density,
    free_energy_problem,
    prepare_system,
    reference_rdm,
    resolve_active_space,
    run_pe_vqescf,
    run_vacuum,
    sampling_hamiltonian,
)
