"""
Feedback-based optimization loops.

The driver coefficient of each layer is set from the measured commutator
expectation of the previous one, so <H_p> decreases layer by layer for a
small enough time step.
"""

from .bounds import delta_t_bound
from .calibration import (
    CalibrationPreset,
    CriticalDtScan,
    load_calibration_preset,
    save_calibration_preset,
    scan_critical_dt,
)
from .config import FalqonConfig, FeedbackLaw, StopRule
from .runner import (
    beta_sign_alternation,
    linear_reference_schedule,
    monotonicity_violations,
    run_falqon,
    run_falqon_iterative,
    run_falqon_multidriver,
    run_falqon_reference,
)
from .trace import FalqonTrace, TerminationReason

__all__ = [
    "CalibrationPreset",
    "CriticalDtScan",
    "FalqonConfig",
    "FalqonTrace",
    "FeedbackLaw",
    "StopRule",
    "TerminationReason",
    "beta_sign_alternation",
    "delta_t_bound",
    "linear_reference_schedule",
    "load_calibration_preset",
    "monotonicity_violations",
    "run_falqon",
    "run_falqon_iterative",
    "run_falqon_multidriver",
    "run_falqon_reference",
    "save_calibration_preset",
    "scan_critical_dt",
]
