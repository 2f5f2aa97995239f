"""Bayesian mixture transition distribution models for high-order Markov chains."""

from ._core import (
    CapacityError,
    Fit,
    dirichlet_marginal_loglik,
    discretize,
    fit,
    l1_loss,
    mtdg_reduce,
    param_count,
    profiles,
    sdm_marginal_loglik,
    simulate,
)

__all__ = [
    "CapacityError",
    "Fit",
    "dirichlet_marginal_loglik",
    "discretize",
    "fit",
    "l1_loss",
    "mtdg_reduce",
    "param_count",
    "profiles",
    "sdm_marginal_loglik",
    "simulate",
]
