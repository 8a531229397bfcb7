"""Scharfetter-Gummel finite-volume solver for nonlocal cross-diffusion systems."""

from ._sgfv import (
    ConfigError,
    DiscreteKernel,
    ExperimentConfig,
    Mesh,
    NumericalStateError,
    SolverFailure,
    StepFailure,
    UsageError,
    check_kernel,
    converge_space,
    converge_time,
    entropy_boltzmann,
    eval_B,
    initial_fields,
    run_experiment,
    simulate,
)

__all__ = [
    "ConfigError",
    "DiscreteKernel",
    "ExperimentConfig",
    "Mesh",
    "NumericalStateError",
    "SolverFailure",
    "StepFailure",
    "UsageError",
    "check_kernel",
    "converge_space",
    "converge_time",
    "entropy_boltzmann",
    "eval_B",
    "initial_fields",
    "run_experiment",
    "simulate",
]
