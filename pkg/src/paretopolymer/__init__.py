"""Pareto polymer: a self-repellent random walk in a heavy-tailed random potential.

Scales and the potential live in ``model``; point measures in
``point_process``; the variational problem in ``variational``; walks and
partition-function estimators in ``walk``; seeded batch runs in
``experiments``.
"""
from ._rng import derive_seed, make_rng
from .model import ModelParams, PotentialField, ScaleSet, derive_scales, sample_field, sample_pareto
from .point_process import ConeSet, PointMeasure, rescale_field, sample_ppp
from .variational import WeightedMeasure, d0, phi_k, solve_xi
from .walk import (
    MCEstimate,
    StrategySpec,
    estimate_logZ_guided,
    estimate_logZ_naive,
    pam_oracle,
    simulate_walk,
)

__version__ = "0.1.0"

__all__ = [
    "ConeSet",
    "MCEstimate",
    "ModelParams",
    "PointMeasure",
    "PotentialField",
    "ScaleSet",
    "StrategySpec",
    "WeightedMeasure",
    "d0",
    "derive_scales",
    "derive_seed",
    "estimate_logZ_guided",
    "estimate_logZ_naive",
    "make_rng",
    "pam_oracle",
    "phi_k",
    "rescale_field",
    "sample_field",
    "sample_pareto",
    "sample_ppp",
    "simulate_walk",
    "solve_xi",
]
