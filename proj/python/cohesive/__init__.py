"""Cohesive laws of phase-field damage models (bindings to the C++ core)."""

from ._core import (
    CohesiveError,
    ForwardSolver,
    HypothesisViolation,
    Model,
    capital_phi,
    catalog_entry,
    catalog_names,
    discrete_g,
    h_sigma,
    load_model,
    reconstruct,
    run_criterion,
)

__all__ = [
    "CohesiveError",
    "ForwardSolver",
    "HypothesisViolation",
    "Model",
    "capital_phi",
    "catalog_entry",
    "catalog_names",
    "discrete_g",
    "h_sigma",
    "load_model",
    "reconstruct",
    "run_criterion",
]
