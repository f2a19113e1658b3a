"""Polarizable embedding: potentials, classical response, and AO operators."""
from .classical import (
    FieldVector,
    InducedDipoleError,
    InducedDipoles,
    ResponseSolver,
    build_response_matrix,
    coulomb_tensor,
    dipole_interaction_tensor,
    induction_energy,
    multipole_fields,
    multipole_nuclear_energy,
    nuclear_fields,
    site_potential_and_field,
    solve_induced_dipoles,
    static_fields,
)
from .operators import (
    PolarizableEmbedding,
    electronic_fields,
    electrostatic_operator_matrix,
    induction_operator_matrix,
    pe_energy_terms,
)
from .potential import (
    EmbeddingPotential,
    EnvironmentSite,
    PotentialParseError,
    parse_potential_file,
    read_potential,
    serialize_potential,
)
