"""Correlator coefficients of the lossy Bell-test scenarios.

The hybrid state cos(nu)|s,0> + sin(nu)|g,alpha> propagates through a loss
line of intensity transmission T, modeled as a beamsplitter of amplitude
transmittivity sqrt(T).  The field branch is attenuated to |sqrt(T) alpha>
and tracing out the environment damps the atom-field coherence by the
visibility

    V = exp(-(1 - T) |alpha|^2 / 2).

With alpha purely imaginary both branch X-distributions are centered at the
origin and the interference coefficient of the binned X measurement reduces
to a cosine-weighted Gaussian integral (convention x = (a + a^dag)/sqrt(2)):

    c1 = V * [ (2/sqrt(pi)) * int_{-b}^{b} exp(-x^2) cos(sqrt(2) x sqrt(T) |alpha|) dx
               - exp(-T |alpha|^2 / 2) ].

The remaining coefficients have closed forms: for photocounting c2 = 1 and
c3 = 2*exp(-eta*T*|alpha|^2 * k) - 1 with k = 1 (Born projection rule) or
k = 1/2 (amplitude convention); for the thresholded P measurement
c2 = erf(sqrt(T/2) |alpha|) and c3 = -c2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.integrate import quad
from scipy.special import erf

from .model import LossConvention


@dataclass(frozen=True)
class QuadratureSettings:
    """Error control for the adaptive quadrature behind c1.

    Deliberately far tighter than any figure tolerance so that optimizer
    noise floors sit well below the quantities being resolved.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200


DEFAULT_QUADRATURE = QuadratureSettings()


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def _quad(func, lo, hi, settings: QuadratureSettings) -> float:
    if settings.abs_tol <= 0.0 or settings.rel_tol <= 0.0:
        raise ValueError("quadrature tolerances must be positive")
    result = quad(
        func,
        lo,
        hi,
        epsabs=settings.abs_tol,
        epsrel=settings.rel_tol,
        limit=settings.max_subdivisions,
        full_output=1,
    )
    if len(result) > 3:
        # scipy appends a message (and sometimes an explanation) on failure
        raise QuadratureError(
            f"quadrature did not converge: achieved error estimate {result[1]:.3e}"
        )
    return result[0]


def visibility(alpha_mag: float, t_line: float) -> float:
    """Coherence left between the branches after the loss line.

    V = exp(-(1 - T) |alpha|^2 / 2), the overlap of the two environment
    states produced by the loss beamsplitter.
    """
    return math.exp(-(1.0 - t_line) * alpha_mag * alpha_mag / 2.0)


@lru_cache(maxsize=1 << 18)
def _c1_cached(alpha_mag, t_line, b, abs_tol, rel_tol, limit):
    settings = QuadratureSettings(abs_tol, rel_tol, limit)
    freq = math.sqrt(2.0 * t_line) * alpha_mag
    integral = _quad(
        lambda x: math.exp(-x * x) * math.cos(freq * x), -b, b, settings
    )
    bracket = (2.0 / math.sqrt(math.pi)) * integral - math.exp(
        -t_line * alpha_mag * alpha_mag / 2.0
    )
    return visibility(alpha_mag, t_line) * bracket


def c1(
    alpha_mag: float,
    t_line: float,
    b: float,
    settings: QuadratureSettings | None = None,
) -> float:
    """Interference coefficient of the X measurement binned to [-b, b].

    Evaluated by adaptive quadrature of the cosine-weighted Gaussian integral
    (see module docstring).  Raises QuadratureError, reporting the achieved
    error estimate, if the integrator cannot meet the requested tolerance.
    """
    if not b > 0.0:
        raise ValueError("b out of (0, inf)")
    s = settings or DEFAULT_QUADRATURE
    return _c1_cached(
        float(alpha_mag), float(t_line), float(b), s.abs_tol, s.rel_tol, s.max_subdivisions
    )


def c2_photocount() -> float:
    """B1 expectation on the vacuum branch: the vacuum never clicks."""
    return 1.0


def c3_photocount(
    alpha_mag: float,
    t_line: float,
    eta: float,
    convention: LossConvention = LossConvention.BORN,
) -> float:
    """B1 expectation on the coherent branch seen by a lossy photocounter.

    The branch reaching the detector is |sqrt(eta*T) alpha>.  Under BORN the
    no-click probability is the vacuum projection |<0|beta>|^2, giving
    2*exp(-eta*T*|alpha|^2) - 1; under PAPER the exponent is halved.
    """
    x = eta * t_line * alpha_mag * alpha_mag
    if convention is LossConvention.PAPER:
        return 2.0 * math.exp(-x / 2.0) - 1.0
    return 2.0 * math.exp(-x) - 1.0


def c2_twohomodyne(alpha_mag: float, t_line: float) -> float:
    """B1 expectation on the vacuum branch for the thresholded P measurement.

    With the threshold placed at the midpoint between the P distributions of
    the two branches (see :func:`p_threshold_midpoint`) this is
    erf(sqrt(T/2) |alpha|), and the coherent-branch expectation is exactly
    the negative of it.
    """
    return float(erf(math.sqrt(t_line / 2.0) * alpha_mag))


def p_threshold_midpoint(alpha_mag: float, t_line: float) -> float:
    """Upper limit of the +1 bin of the thresholded P measurement.

    The two branches after the line are |0> and |i sqrt(T) alpha>, with P
    distributions centered at 0 and sqrt(2 T) |alpha|.  The midpoint
    sqrt(T/2) |alpha| is the unique threshold for which the two branch
    expectations are equal and opposite (c3 = -c2), which the closed-form
    optimization over the state angle relies on.
    """
    return math.sqrt(t_line / 2.0) * alpha_mag


def optimal_bin(alpha_mag: float, t_line: float = 1.0) -> float:
    """Half width b maximizing c1 at fixed amplitude and transmission.

    The derivative of the c1 integral with respect to b vanishes at the
    first zero of the cosine, b = pi / (2 sqrt(2 T) |alpha|); the attenuated
    amplitude sqrt(T)|alpha| is what enters the cosine, hence the sqrt(T)
    in the denominator.  At T = 1 this reduces to pi / (2 sqrt(2) |alpha|).
    At T = 0 no displacement survives and the bin covers the whole line.
    """
    if not alpha_mag > 0.0:
        raise ValueError("bin undefined for vacuum amplitude")
    if t_line == 0.0:
        return math.inf
    return math.pi / (2.0 * math.sqrt(2.0 * t_line) * alpha_mag)
