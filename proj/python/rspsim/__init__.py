"""Simulator for remote preparation of an atomic qubit via atom-photon
entanglement, spatial-mode encoding, and a complete Bell-state measurement."""

from ._core import (
    NoiseParams,
    analytic_curves,
    analytic_prepared_fidelity,
    branch_probabilities,
    calibrate,
    distinct_state_count,
    entangled_atom_photon,
    outcome_names,
    prepared_state,
    reconstruct_rates,
    run_sweep,
    run_table1,
    spatial_encoding,
    standard_grid_points,
    target_bloch,
    target_state,
    tomo_analyze,
    verification_fidelity,
)

__all__ = [
    "NoiseParams",
    "analytic_curves",
    "analytic_prepared_fidelity",
    "branch_probabilities",
    "calibrate",
    "distinct_state_count",
    "entangled_atom_photon",
    "outcome_names",
    "prepared_state",
    "reconstruct_rates",
    "run_sweep",
    "run_table1",
    "spatial_encoding",
    "standard_grid_points",
    "target_bloch",
    "target_state",
    "tomo_analyze",
    "verification_fidelity",
]
