"""Differential-privacy verification for multi-variable online automata."""

from .augmentation import AugAutomaton, ResourceLimitError, build_augmentation
from .model import (
    TAU,
    DipAutomaton,
    Guard,
    GuardAtom,
    Interval,
    Output,
    State,
    StateParams,
    Transition,
    adjacent,
    check_initialized,
    check_output_distinct,
    validate,
)
from .report import VerdictReport, run_check
from .simulate import Estimate, estimate_prob, estimate_ratio, sample_laplace
from .weight import compute_weight
from .wellformed import Violation, check_well_formed
from .witness import WitnessPair, gen_witness

__version__ = "0.1.0"

__all__ = [
    "AugAutomaton",
    "DipAutomaton",
    "Estimate",
    "Guard",
    "GuardAtom",
    "Interval",
    "Output",
    "ResourceLimitError",
    "State",
    "StateParams",
    "TAU",
    "Transition",
    "VerdictReport",
    "Violation",
    "WitnessPair",
    "adjacent",
    "build_augmentation",
    "check_initialized",
    "check_output_distinct",
    "check_well_formed",
    "compute_weight",
    "estimate_prob",
    "estimate_ratio",
    "gen_witness",
    "run_check",
    "sample_laplace",
    "validate",
]
