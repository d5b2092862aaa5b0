"""Analytic oracles and solver checks."""

from uro_fsi.verification.oracles import (
    acceptance_checks,
    acoustic_speed_check,
    breathing_frequency,
    format_results,
    lame_refinement_check,
    lame_static_check,
    lame_thick_sphere,
    membrane_transmission,
    run_verification,
)

__all__ = [
    "acceptance_checks",
    "acoustic_speed_check",
    "breathing_frequency",
    "format_results",
    "lame_refinement_check",
    "lame_static_check",
    "lame_thick_sphere",
    "membrane_transmission",
    "run_verification",
]
