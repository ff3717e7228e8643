"""Nonclassicality certification from on-off detector no-click statistics."""

from .certify import (CertificationReport, UncertaintyDomain, decide,
                      hull_membership_oracle, max_violation, robust_violation)
from .geometry import CurveSpec, TightDirection, ZeroSet, tight_direction
from .moments import build_moment_matrices, envelope_three, envelope_two, is_classical_moments
from .simulate import EmpiricalRecord, TrialPlan, run_experiment, witness_error
from .states import EfficiencySettings, StateModel, probability_vector

__version__ = "0.1.0"

__all__ = [
    "CertificationReport",
    "CurveSpec",
    "EfficiencySettings",
    "EmpiricalRecord",
    "StateModel",
    "TightDirection",
    "TrialPlan",
    "UncertaintyDomain",
    "ZeroSet",
    "build_moment_matrices",
    "decide",
    "envelope_three",
    "envelope_two",
    "hull_membership_oracle",
    "is_classical_moments",
    "max_violation",
    "probability_vector",
    "robust_violation",
    "run_experiment",
    "tight_direction",
    "witness_error",
]
