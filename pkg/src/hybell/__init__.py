"""CHSH Bell-violation analysis for hybrid atom-light entangled states.

The package computes and maximizes violations of the CHSH inequality for the
state cos(nu)|s,0> + sin(nu)|g,alpha> under transmission and detection
losses, and cross-validates every closed form against a brute-force
truncated-Fock-space oracle.
"""

__version__ = "0.1.0"

from .catstates import (
    CascadeSpec,
    CatState,
    equal_amplitude_cascade,
    herald_cat,
    herald_probability,
    split_cat,
)
from .chsh import (
    OptimizerSettings,
    Theorem1Witness,
    chsh_from_coefficients,
    conditions,
    gamma_opt,
    s_gamma,
    s_gamma_atomic,
    s_max_atomic,
    s_max_closed,
    s_max_over_alpha,
    scenario_coefficients,
    theorem1_witness,
    violation_threshold,
)
from .coefficients import (
    QuadratureError,
    QuadratureSettings,
    c1,
    c2_photocount,
    c2_twohomodyne,
    c3_photocount,
    optimal_bin,
    p_threshold_midpoint,
    visibility,
)
from .model import (
    ChannelSpec,
    ChshResult,
    Coefficients,
    LossConvention,
    MeasurementSpec,
    Scenario,
    ScenarioKind,
    StateSpec,
    TSIRELSON_BOUND,
    validate,
)

__all__ = [
    "CascadeSpec",
    "CatState",
    "ChannelSpec",
    "ChshResult",
    "Coefficients",
    "LossConvention",
    "MeasurementSpec",
    "OptimizerSettings",
    "QuadratureError",
    "QuadratureSettings",
    "Scenario",
    "ScenarioKind",
    "StateSpec",
    "TSIRELSON_BOUND",
    "Theorem1Witness",
    "c1",
    "c2_photocount",
    "c2_twohomodyne",
    "c3_photocount",
    "chsh_from_coefficients",
    "conditions",
    "equal_amplitude_cascade",
    "gamma_opt",
    "herald_cat",
    "herald_probability",
    "optimal_bin",
    "p_threshold_midpoint",
    "s_gamma",
    "s_gamma_atomic",
    "s_max_atomic",
    "s_max_closed",
    "s_max_over_alpha",
    "scenario_coefficients",
    "split_cat",
    "theorem1_witness",
    "validate",
    "violation_threshold",
    "visibility",
]
