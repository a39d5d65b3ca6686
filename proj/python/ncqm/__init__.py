"""Voros-star quantum mechanics on a discretized noncommutative space-time."""

from ._core import (
    ConvergenceFailure,
    Flavor,
    InvalidInput,
    coherent_variance_matrix,
    experiments,
    m_transform,
    oscillator_spectrum,
    packet_width,
    packet_width_sample,
    plane_wave_star_factor,
    printed_variance_matrix,
    run_config,
    run_experiment,
    symplectic_eigenvalues,
    transition,
)

__all__ = [
    "ConvergenceFailure",
    "Flavor",
    "InvalidInput",
    "coherent_variance_matrix",
    "experiments",
    "m_transform",
    "oscillator_spectrum",
    "packet_width",
    "packet_width_sample",
    "plane_wave_star_factor",
    "printed_variance_matrix",
    "run_config",
    "run_experiment",
    "symplectic_eigenvalues",
    "transition",
]
