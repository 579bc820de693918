"""GAN training through the discriminator's convex dual.

The heavy lifting lives in the compiled extension; this package re-exports
the operations most useful from python.
"""

from dualgan._core import (
    Mlp,
    NumericalError,
    ValidationError,
    binary_entropy,
    check_duality,
    lambda_histogram,
    mode_coverage,
    model_cost_lin,
    model_score_lin,
    primal_objective_linear,
    rbf_features,
    rbf_features_batch,
    ring_mixture_centers,
    run_experiment,
    sample_ring_mixture,
    solve_dual_linear,
    solve_tr_dual,
    step_cost_lin,
)

__all__ = [
    "Mlp",
    "NumericalError",
    "ValidationError",
    "binary_entropy",
    "check_duality",
    "lambda_histogram",
    "mode_coverage",
    "model_cost_lin",
    "model_score_lin",
    "primal_objective_linear",
    "rbf_features",
    "rbf_features_batch",
    "ring_mixture_centers",
    "run_experiment",
    "sample_ring_mixture",
    "solve_dual_linear",
    "solve_tr_dual",
    "step_cost_lin",
]
