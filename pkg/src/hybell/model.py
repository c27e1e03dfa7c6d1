"""Value types shared by every part of the calculation.

Convention used throughout the package: the coherent amplitude of the field
branch is purely imaginary, alpha = i*|alpha|.  The two branches of the
hybrid state then overlap maximally along the X quadrature while separating
along P, which is what makes the binned X measurement useful.  Every formula
in this package consumes only the magnitude ``alpha_mag``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

HALF_PI = math.pi / 2.0

# Quantum ceiling for the CHSH combination.
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


class ScenarioKind(Enum):
    """Which dichotomized field measurement plays the role of B1."""

    PHOTOCOUNT = "photocount"
    TWO_HOMODYNE = "two-homodyne"


class LossConvention(Enum):
    """No-click statistic of lossy photocounting on a coherent state.

    Two conventions for the exponent appear in the literature, differing by
    a factor of two:

    * ``PAPER``: 2*exp(-eta*T*|alpha|^2 / 2) - 1, keeping the vacuum-overlap
      amplitude in the exponent.  This is the closed form that the asymptotic
      low-efficiency violation bound is derived from.
    * ``BORN``: 2*exp(-eta*T*|alpha|^2) - 1, the standard projection-rule
      probability |<0|beta>|^2 with beta = sqrt(eta*T)*alpha.  This is the
      physically standard choice and reproduces the reference optima
      (S = 2.324 at |alpha| = 2.1 and the 52.2% transmission threshold), so
      it is the package default.
    """

    PAPER = "paper"
    BORN = "born"


@dataclass(frozen=True)
class StateSpec:
    """Hybrid-state parameters: mixing angle and coherent amplitude magnitude."""

    nu: float
    alpha_mag: float


@dataclass(frozen=True)
class ChannelSpec:
    """Loss parameters of the optical line and the two detectors.

    ``t_line`` is the intensity transmission of the propagation line,
    ``eta`` the photocounting efficiency and ``eta_a`` the atomic detection
    efficiency.  All are probabilities in [0, 1].
    """

    t_line: float = 1.0
    eta: float = 1.0
    eta_a: float = 1.0


@dataclass(frozen=True)
class Scenario:
    """Measurement scenario plus, for photocounting, the loss convention.

    ``loss_convention`` is ignored when ``kind`` is TWO_HOMODYNE (no
    photocounter is involved there).
    """

    kind: ScenarioKind
    loss_convention: LossConvention = LossConvention.BORN


@dataclass(frozen=True)
class MeasurementSpec:
    """Measurement settings: atomic angle, X-bin half width, P threshold.

    ``gamma`` parametrizes the atomic observables cos(gamma)*sz +/- sin(gamma)*sx,
    ``b`` is the half width of the +1 bin of the X-quadrature measurement and
    ``p_threshold`` the upper integration limit of the thresholded P
    measurement used in the two-homodyne scenario.
    """

    gamma: float
    b: float
    p_threshold: float = 0.0


@dataclass(frozen=True)
class Coefficients:
    """Correlator triple (c1, c2, c3) that fully determines the CHSH value.

    c1 is the interference coefficient of the binned X measurement across the
    two branches, c2 and c3 the B1 expectations on the vacuum branch and the
    coherent branch respectively.  All three lie in [-1, 1].
    """

    c1: float
    c2: float
    c3: float


@dataclass(frozen=True)
class ChshResult:
    """Optimized CHSH value together with the optimizing parameters.

    ``c1_ok`` and ``c2_ok`` are the two necessary conditions for S > 2,
    evaluated at the reported optimum (see :func:`hybell.chsh.conditions`).
    """

    s_value: float
    nu_opt: float
    gamma_opt: float
    b_opt: float
    alpha_opt: float
    c1_ok: bool
    c2_ok: bool


def validate(spec):
    """Return ``spec`` unchanged if its field invariants hold.

    Raises ValueError naming the offending field and bound otherwise.
    Accepts StateSpec, ChannelSpec and MeasurementSpec.
    """
    if isinstance(spec, StateSpec):
        if not 0.0 <= spec.nu <= HALF_PI:
            raise ValueError("nu out of [0, pi/2]")
        if not spec.alpha_mag >= 0.0:
            raise ValueError("alpha_mag out of [0, inf)")
    elif isinstance(spec, ChannelSpec):
        for name in ("t_line", "eta", "eta_a"):
            value = getattr(spec, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} out of [0,1]")
    elif isinstance(spec, MeasurementSpec):
        if not spec.b > 0.0:
            raise ValueError("b out of (0, inf)")
    else:
        raise TypeError(f"cannot validate {type(spec).__name__}")
    return spec
