"""Pareto-coordination detection in multi-agent response data."""

from ._core import (
    Certificate,
    Dataset,
    TrackingModel,
    Verdict,
    Violation,
    add_noise,
    afriat_matrix,
    are_residual,
    datasets_close,
    detect,
    garp_oracle,
    generate_coordinated,
    generate_noncoordinated,
    generate_reference,
    kalman_step,
    load_model,
    phi_hat,
    phi_star,
    precision_monotone_check,
    read_dataset,
    reconstruct_utility_values,
    run_cli,
    sample_psi,
    solve_are,
    solve_radar_budget,
    test_rationalizable,
    type1_mc,
    validate_dataset,
    write_dataset,
)

__all__ = [
    "Certificate",
    "Dataset",
    "TrackingModel",
    "Verdict",
    "Violation",
    "add_noise",
    "afriat_matrix",
    "are_residual",
    "datasets_close",
    "detect",
    "garp_oracle",
    "generate_coordinated",
    "generate_noncoordinated",
    "generate_reference",
    "kalman_step",
    "load_model",
    "phi_hat",
    "phi_star",
    "precision_monotone_check",
    "read_dataset",
    "reconstruct_utility_values",
    "run_cli",
    "sample_psi",
    "solve_are",
    "solve_radar_budget",
    "test_rationalizable",
    "type1_mc",
    "validate_dataset",
    "write_dataset",
]

__version__ = "0.1.0"
