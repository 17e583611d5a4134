"""Exact stochastic simulation of polynomial-rate chains."""

from .engine import (
    SimConfig,
    TrialBatch,
    TrialResult,
    available_backends,
    default_backend,
    kaplan_meier,
    simulate,
)
from .expansion import ExpansionRow, check_generator_expansion, expansion_terms
from .model import SimModel, SimulationError
from .tail import TailEstimate, TailEstimationError, estimate_hitting_tail

__all__ = [
    "ExpansionRow",
    "SimConfig",
    "SimModel",
    "SimulationError",
    "TailEstimate",
    "TailEstimationError",
    "TrialBatch",
    "TrialResult",
    "available_backends",
    "check_generator_expansion",
    "default_backend",
    "estimate_hitting_tail",
    "expansion_terms",
    "kaplan_meier",
    "simulate",
]
