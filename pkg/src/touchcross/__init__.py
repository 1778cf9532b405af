"""Touchings versus crossings in arrangements of closed curves."""
from .arrangement import (
    REPORT_ONLY,
    STRICT,
    Arc,
    Arrangement,
    Lens,
    apex,
    arc_length,
    enumerate_lenses,
    extract_arrangement,
    orient_curves,
)
from .charging import (
    ChargeLedger,
    EmptySchedule,
    PhaseParams,
    PhaseSchedule,
    analyze_family,
    check_richter_thomassen,
    default_schedule,
    run_phase,
    run_schedule,
    schedule_from_scales,
)
from .generators import (
    GeneratorSpec,
    gen_counterexample,
    gen_random_intersecting,
    gen_tangent_family,
    inflate_arcs,
)
from .geometry import ClosedCurve, intersect_pair, validate_general_position
from .happiness import classify_happy, redblue_greedy, redblue_verify

__version__ = "0.1.0"

__all__ = [
    "analyze_family",
    "apex",
    "Arc",
    "arc_length",
    "Arrangement",
    "ChargeLedger",
    "check_richter_thomassen",
    "classify_happy",
    "ClosedCurve",
    "default_schedule",
    "EmptySchedule",
    "enumerate_lenses",
    "extract_arrangement",
    "gen_counterexample",
    "gen_random_intersecting",
    "gen_tangent_family",
    "GeneratorSpec",
    "inflate_arcs",
    "intersect_pair",
    "Lens",
    "orient_curves",
    "PhaseParams",
    "PhaseSchedule",
    "redblue_greedy",
    "redblue_verify",
    "REPORT_ONLY",
    "run_phase",
    "run_schedule",
    "schedule_from_scales",
    "STRICT",
    "validate_general_position",
]
