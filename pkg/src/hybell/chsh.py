"""CHSH values and the layered maximization over measurement and state.

For fixed correlator coefficients the optimization proceeds analytically in
two stages.  Writing cx = 2 c1 cos(nu) sin(nu) and cz = c2 cos^2(nu) -
c3 sin^2(nu), the CHSH combination at atomic angle gamma is

    S = 2 cos(gamma) cz + 2 sin(gamma) cx,

maximized over gamma by S_gamma = 2 sqrt(cx^2 + cz^2).  Substituting
u = sin^2(nu) turns S_gamma^2/4 into the parabola f(u) = A u^2 + B u + c2^2
with A = (c2+c3)^2 - 4 c1^2 and B = 4 c1^2 - 2 c2 (c2+c3), so the optimum
over the state angle is either the interior vertex (when it exists inside
(0, 1), equivalent to the two necessary violation conditions below) or one
of the endpoints.

The remaining parameters, the bin width b (closed form) and the amplitude
|alpha| (numeric), are handled by :func:`s_max_over_alpha`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .coefficients import (
    QuadratureSettings,
    c1,
    c2_photocount,
    c2_twohomodyne,
    c3_photocount,
    optimal_bin,
)
from .model import (
    ChannelSpec,
    ChshResult,
    Coefficients,
    LossConvention,
    Scenario,
    ScenarioKind,
    validate,
)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerSettings:
    """Grid and refinement controls for the numeric amplitude search.

    The default grid reaches |alpha| = 12 because optimal amplitudes near the
    transmission threshold of the two-homodyne scenario grow past 9.  The
    dense nu grid is used only on the inefficient-atomic-detection path,
    where the stationarity condition is transcendental.
    """

    alpha_grid: tuple[float, float, float] = (0.05, 12.0, 0.05)
    refine_tol: float = 1e-6
    nu_grid_points: int = 2001

    def grid_values(self) -> np.ndarray:
        lo, hi, step = self.alpha_grid
        if not (lo >= 0.0 and step > 0.0 and hi > lo):
            raise ValueError("alpha_grid must satisfy min >= 0, step > 0, max > min")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        values = lo + step * np.arange(count)
        if values.size == 0:
            raise ValueError("alpha grid is empty")
        return values


DEFAULT_OPTIMIZER = OptimizerSettings()


def s_gamma(coeffs: Coefficients, nu: float) -> float:
    """CHSH value already maximized over the atomic angle, at fixed nu.

    S_gamma = 2 sqrt((2 c1 cos nu sin nu)^2 + (c2 cos^2 nu - c3 sin^2 nu)^2).
    """
    cx = 2.0 * coeffs.c1 * math.cos(nu) * math.sin(nu)
    cz = coeffs.c2 * math.cos(nu) ** 2 - coeffs.c3 * math.sin(nu) ** 2
    return 2.0 * math.hypot(cx, cz)


def gamma_opt(coeffs: Coefficients, nu: float) -> float:
    """Atomic angle achieving s_gamma: tan(gamma) = <sx B0> / <sz B1>."""
    cx = 2.0 * coeffs.c1 * math.cos(nu) * math.sin(nu)
    cz = coeffs.c2 * math.cos(nu) ** 2 - coeffs.c3 * math.sin(nu) ** 2
    if cx == 0.0 and cz == 0.0:
        raise ValueError("gamma undefined; S=0")
    return math.atan2(cx, cz)


def chsh_from_coefficients(coeffs: Coefficients, nu: float, gamma: float) -> float:
    """CHSH combination at explicit settings, before any optimization."""
    cx = 2.0 * coeffs.c1 * math.cos(nu) * math.sin(nu)
    cz = coeffs.c2 * math.cos(nu) ** 2 - coeffs.c3 * math.sin(nu) ** 2
    return 2.0 * math.cos(gamma) * cz + 2.0 * math.sin(gamma) * cx


def conditions(coeffs: Coefficients) -> tuple[bool, bool]:
    """The two necessary conditions for S > 2 (both strict).

    C1: c3 (c2 + c3) < 2 c1^2 and C2: c2 (c2 + c3) < 2 c1^2.  Together they
    are equivalent to the parabola f(u) having two interior maxima in
    sin(nu) on (-1, 1).
    """
    total = coeffs.c2 + coeffs.c3
    limit = 2.0 * coeffs.c1 * coeffs.c1
    return (coeffs.c3 * total < limit, coeffs.c2 * total < limit)


def s_max_closed(coeffs: Coefficients) -> tuple[float, float]:
    """Maximum of s_gamma over the state angle, in closed form.

    Returns (S, nu_opt).  When both violation conditions hold the optimum is
    interior at sin^2(nu) = B / (-2A) with

        S = 2 sqrt([2 c1^2 - c2 (c2+c3)]^2 / [4 c1^2 - (c2+c3)^2] + c2^2);

    otherwise the maximum sits on the boundary, max(2|c2|, 2|c3|) at nu = 0
    or pi/2.
    """
    total = coeffs.c2 + coeffs.c3
    a_coef = total * total - 4.0 * coeffs.c1 ** 2
    b_coef = 4.0 * coeffs.c1 ** 2 - 2.0 * coeffs.c2 * total
    if a_coef < 0.0:
        sin_sq = b_coef / (-2.0 * a_coef)
        if 0.0 < sin_sq < 1.0:
            s = 2.0 * math.sqrt(
                (2.0 * coeffs.c1 ** 2 - coeffs.c2 * total) ** 2 / (-a_coef)
                + coeffs.c2 ** 2
            )
            return s, math.asin(math.sqrt(sin_sq))
    if abs(coeffs.c2) >= abs(coeffs.c3):
        return 2.0 * abs(coeffs.c2), 0.0
    return 2.0 * abs(coeffs.c3), math.pi / 2.0


def scenario_coefficients(
    alpha_mag: float,
    channel: ChannelSpec,
    scenario: Scenario,
    b: float | None = None,
    settings: QuadratureSettings | None = None,
) -> Coefficients:
    """Correlator coefficients of a scenario at given amplitude and channel.

    The bin width defaults to the c1-maximizing value for the channel.
    """
    if b is None:
        b = optimal_bin(alpha_mag, channel.t_line)
    c1_val = c1(alpha_mag, channel.t_line, b, settings)
    if scenario.kind is ScenarioKind.PHOTOCOUNT:
        c3_val = c3_photocount(
            alpha_mag, channel.t_line, channel.eta, scenario.loss_convention
        )
        return Coefficients(c1=c1_val, c2=c2_photocount(), c3=c3_val)
    c2_val = c2_twohomodyne(alpha_mag, channel.t_line)
    return Coefficients(c1=c1_val, c2=c2_val, c3=-c2_val)


def _golden_max(func, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section maximization of a unimodal scalar function on [lo, hi]."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = func(x1), func(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = func(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = func(x1)
    x = 0.5 * (lo + hi)
    return x, func(x)


# Two refined maxima differing by less than this are a genuine tie.  Near a
# violation threshold the physical signal S - 2 itself drops below any loose
# tolerance, so ties must be judged at numerical-noise scale or the maximum
# would be rounded down onto the S = 2 plateau and thresholds would drift.
_TIE_EPS = 1e-12


def _refine_grid_maxima(func, grid: np.ndarray, values: np.ndarray, tol: float):
    """Golden-refine every local maximum of sampled values; smaller-x wins ties.

    Returns (x_best, f_best).  A plateau of equal samples counts as a single
    candidate at its left edge, so flat (violationless) regions do not spawn
    one refinement per grid point.  Refined maxima that agree in value within
    noise are tied and the smaller abscissa is kept, since smaller amplitudes
    are experimentally cheaper.
    """
    n = values.size
    candidates = []
    for i in range(n):
        rising = i == 0 or values[i] > values[i - 1]
        falling_or_flat = i == n - 1 or values[i] >= values[i + 1]
        if rising and falling_or_flat:
            lo = grid[max(i - 1, 0)]
            hi = grid[min(i + 1, n - 1)]
            if hi > lo:
                candidates.append(_golden_max(func, float(lo), float(hi), tol))
            else:
                candidates.append((float(grid[i]), float(values[i])))
    if not candidates:  # non-increasing samples: the first point is the maximum
        candidates.append((float(grid[0]), float(values[0])))
    best_x, best_f = candidates[0]
    for x, f in candidates[1:]:
        if f > best_f + _TIE_EPS or (abs(f - best_f) <= _TIE_EPS and x < best_x):
            best_x, best_f = x, f
    return best_x, best_f


def _assemble_result(
    alpha: float,
    channel: ChannelSpec,
    scenario: Scenario,
    nu: float,
    s: float,
    quadrature: QuadratureSettings | None,
) -> ChshResult:
    b = optimal_bin(alpha, channel.t_line)
    coeffs = scenario_coefficients(alpha, channel, scenario, b, quadrature)
    cx = 2.0 * coeffs.c1 * math.cos(nu) * math.sin(nu)
    cz = coeffs.c2 * math.cos(nu) ** 2 - coeffs.c3 * math.sin(nu) ** 2
    gamma = math.atan2(cx, cz) if (cx != 0.0 or cz != 0.0) else 0.0
    c1_ok, c2_ok = conditions(coeffs)
    return ChshResult(
        s_value=s,
        nu_opt=nu,
        gamma_opt=gamma,
        b_opt=b,
        alpha_opt=alpha,
        c1_ok=c1_ok,
        c2_ok=c2_ok,
    )


def s_max_over_alpha(
    channel: ChannelSpec,
    scenario: Scenario,
    settings: OptimizerSettings | None = None,
    quadrature: QuadratureSettings | None = None,
) -> ChshResult:
    """Full maximization: closed forms over gamma, nu, b, numeric over alpha.

    Scans the amplitude grid, golden-refines around every grid local maximum
    and keeps the best (smaller alpha on ties).  For the two-homodyne
    scenario the state angle is pi/4 exactly and S = 2 sqrt(c1^2 + c2^2).
    """
    validate(channel)
    settings = settings or DEFAULT_OPTIMIZER
    grid = settings.grid_values()
    two_homodyne = scenario.kind is ScenarioKind.TWO_HOMODYNE

    def value(alpha: float) -> float:
        coeffs = scenario_coefficients(alpha, channel, scenario, None, quadrature)
        if two_homodyne:
            return 2.0 * math.hypot(coeffs.c1, coeffs.c2)
        return s_max_closed(coeffs)[0]

    values = np.array([value(a) for a in grid])
    alpha_best, s_best = _refine_grid_maxima(value, grid, values, settings.refine_tol)
    if two_homodyne:
        nu = math.pi / 4.0
    else:
        coeffs = scenario_coefficients(alpha_best, channel, scenario, None, quadrature)
        s_best, nu = s_max_closed(coeffs)
    return _assemble_result(alpha_best, channel, scenario, nu, s_best, quadrature)


def s_gamma_atomic(coeffs: Coefficients, nu, eta_a: float):
    """Gamma-optimized CHSH with imperfect atomic detection (two-homodyne).

    With probability eta_a the atomic measurement works, otherwise it acts
    as the identity (outcome +1):

        S_gamma = 2 [ eta_a sqrt(c1^2 sin^2(2 nu) + c2^2)
                      + (1 - eta_a) c2 cos(2 nu) ].

    Requires two-homodyne coefficients (c3 = -c2).  Accepts array nu.
    """
    sin_2nu = np.sin(2.0 * np.asarray(nu, dtype=float))
    cos_2nu = np.cos(2.0 * np.asarray(nu, dtype=float))
    s = 2.0 * (
        eta_a * np.sqrt(coeffs.c1 ** 2 * sin_2nu ** 2 + coeffs.c2 ** 2)
        + (1.0 - eta_a) * coeffs.c2 * cos_2nu
    )
    return float(s) if np.isscalar(nu) or np.ndim(nu) == 0 else s


def _atomic_stationarity(coeffs: Coefficients, nu: float, eta_a: float) -> float:
    sin_2nu = math.sin(2.0 * nu)
    cos_2nu = math.cos(2.0 * nu)
    root = math.sqrt(coeffs.c1 ** 2 * sin_2nu ** 2 + coeffs.c2 ** 2)
    return (
        eta_a * coeffs.c1 ** 2 * sin_2nu * cos_2nu / root
        - (1.0 - eta_a) * coeffs.c2 * sin_2nu
    )


_NU_REFINE_TOL = 1e-8
_STATIONARITY_TOL = 1e-5


def _atomic_nu_opt(coeffs: Coefficients, eta_a: float, n_points: int):
    """Dense-grid plus golden-section maximum of s_gamma_atomic over nu.

    Cross-checks that the returned angle is stationary or on the boundary;
    the stationarity condition is transcendental, so there is no closed form
    to fall back on.
    """
    c1_sq = coeffs.c1 ** 2
    c2 = coeffs.c2

    def scalar_s(nu: float) -> float:
        sin_2nu = math.sin(2.0 * nu)
        return 2.0 * (
            eta_a * math.sqrt(c1_sq * sin_2nu * sin_2nu + c2 * c2)
            + (1.0 - eta_a) * c2 * math.cos(2.0 * nu)
        )

    grid = np.linspace(0.0, math.pi / 2.0, n_points)
    values = s_gamma_atomic(coeffs, grid, eta_a)
    i = int(np.argmax(values))
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, n_points - 1)])
    nu, s = _golden_max(scalar_s, lo, hi, _NU_REFINE_TOL)
    boundary = nu < 1e-6 or nu > math.pi / 2.0 - 1e-6
    if not boundary and abs(_atomic_stationarity(coeffs, nu, eta_a)) > _STATIONARITY_TOL:
        raise RuntimeError(
            f"nu optimizer failed stationarity cross-check at nu={nu:.6f}"
        )
    return nu, s


def s_max_atomic(
    channel: ChannelSpec,
    settings: OptimizerSettings | None = None,
    quadrature: QuadratureSettings | None = None,
) -> ChshResult:
    """Two-homodyne maximization with inefficient atomic detection.

    The state angle is optimized numerically for every amplitude (dense grid
    plus refinement, with a stationarity cross-check), then the amplitude
    search proceeds as in :func:`s_max_over_alpha`.  The scan over the
    amplitude grid evaluates the whole (alpha, nu) surface in one broadcast;
    the per-amplitude refinement then re-optimizes nu properly around each
    surviving candidate.
    """
    validate(channel)
    settings = settings or DEFAULT_OPTIMIZER
    grid = settings.grid_values()
    scenario = Scenario(kind=ScenarioKind.TWO_HOMODYNE)

    def nu_and_value(alpha: float) -> tuple[float, float]:
        coeffs = scenario_coefficients(alpha, channel, scenario, None, quadrature)
        return _atomic_nu_opt(coeffs, channel.eta_a, settings.nu_grid_points)

    def value(alpha: float) -> float:
        return nu_and_value(alpha)[1]

    c1_col = np.array(
        [
            c1(float(a), channel.t_line, optimal_bin(float(a), channel.t_line), quadrature)
            for a in grid
        ]
    )[:, None]
    c2_col = np.array([c2_twohomodyne(float(a), channel.t_line) for a in grid])[:, None]
    nu_row = np.linspace(0.0, math.pi / 2.0, settings.nu_grid_points)[None, :]
    surface = 2.0 * (
        channel.eta_a * np.sqrt(c1_col ** 2 * np.sin(2.0 * nu_row) ** 2 + c2_col ** 2)
        + (1.0 - channel.eta_a) * c2_col * np.cos(2.0 * nu_row)
    )
    values = surface.max(axis=1)
    alpha_best, _ = _refine_grid_maxima(value, grid, values, settings.refine_tol)
    nu_best, s_best = nu_and_value(alpha_best)
    return _assemble_result(alpha_best, channel, scenario, nu_best, s_best, quadrature)


@dataclass(frozen=True)
class Theorem1Witness:
    """Outcome of the low-efficiency violation search at perfect transmission.

    ``alpha`` and ``s_value`` are None when no violation was found below the
    search cap; ``asymptotic_alpha`` is the smallest amplitude beyond which
    the sufficient condition exp(-eta |alpha|^2/4) < sqrt(2/pi) * 2/|alpha|
    holds (0 when it holds everywhere).
    """

    eta: float
    alpha: float | None
    s_value: float | None
    asymptotic_alpha: float

    @property
    def found(self) -> bool:
        return self.alpha is not None


def _asymptotic_condition_edge(eta: float) -> float:
    # log of LHS/RHS of the sufficient condition; negative means it holds
    def log_ratio(alpha: float) -> float:
        return -eta * alpha * alpha / 4.0 + math.log(alpha) - math.log(
            2.0 * math.sqrt(2.0 / math.pi)
        )

    grid = np.geomspace(1.0, 1e5, 2000)
    signs = np.sign([log_ratio(a) for a in grid])
    crossings = np.where(np.diff(signs) < 0)[0]
    if crossings.size == 0:
        return 0.0
    lo, hi = float(grid[crossings[-1]]), float(grid[crossings[-1] + 1])
    while hi - lo > 1e-9 * hi:
        mid = 0.5 * (lo + hi)
        if log_ratio(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def theorem1_witness(
    eta: float,
    alpha_search_max: float = 500.0,
    quadrature: QuadratureSettings | None = None,
) -> Theorem1Witness:
    """Search for an amplitude violating CHSH at T = 1 for the given eta.

    Uses the amplitude-exponent (PAPER) photocounting convention, for which
    the asymptotic sufficient condition above guarantees a violation at large
    enough amplitude for every eta > 0.  Scans a log-spaced amplitude grid
    upward and refines the first local maximum of S past the onset of
    violation, so the returned witness is robustly above 2 rather than a
    marginal onset point.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta out of (0,1]")
    channel = ChannelSpec(t_line=1.0, eta=eta)
    scenario = Scenario(kind=ScenarioKind.PHOTOCOUNT, loss_convention=LossConvention.PAPER)
    edge = _asymptotic_condition_edge(eta)

    def value(alpha: float) -> float:
        coeffs = scenario_coefficients(alpha, channel, scenario, None, quadrature)
        return s_max_closed(coeffs)[0]

    count = max(200, int(120 * math.log10(alpha_search_max / 0.1)))
    grid = np.geomspace(0.1, alpha_search_max, count)
    hit = None
    for i, alpha in enumerate(grid):
        if value(float(alpha)) > 2.0:
            hit = i
            break
    if hit is None:
        return Theorem1Witness(eta=eta, alpha=None, s_value=None, asymptotic_alpha=edge)
    j = hit
    while j + 1 < grid.size and value(float(grid[j + 1])) > value(float(grid[j])):
        j += 1
    lo = float(grid[max(j - 1, 0)])
    hi = float(grid[min(j + 1, grid.size - 1)])
    alpha_w, s_w = _golden_max(value, lo, hi, 1e-6)
    return Theorem1Witness(eta=eta, alpha=alpha_w, s_value=s_w, asymptotic_alpha=edge)


def violation_threshold(
    scenario: Scenario,
    free_param: str,
    fixed: ChannelSpec,
    settings: OptimizerSettings | None = None,
    tol: float = 1e-4,
) -> float:
    """Smallest value of a channel parameter still allowing S > 2.

    ``free_param`` is "t_line" or "eta_a"; the other channel fields are taken
    from ``fixed``.  Bisection on the optimized S against 2, to absolute
    tolerance ``tol`` in the parameter.  Bisection rather than a derivative
    method because the optimized S comes from an inner search and is only
    piecewise smooth.
    """
    if free_param not in ("t_line", "eta_a"):
        raise ValueError("free_param must be 't_line' or 'eta_a'")
    if free_param == "eta_a" and scenario.kind is not ScenarioKind.TWO_HOMODYNE:
        raise ValueError("atomic-inefficiency threshold requires the two-homodyne scenario")

    def optimized_s(value: float) -> float:
        channel = replace(fixed, **{free_param: value})
        if free_param == "eta_a":
            return s_max_atomic(channel, settings).s_value
        return s_max_over_alpha(channel, scenario, settings).s_value

    lo, hi = 0.0, 1.0
    if not optimized_s(hi) > 2.0:
        raise ValueError(f"no threshold in range: S <= 2 across {free_param} in [0,1]")
    if optimized_s(lo) > 2.0:
        raise ValueError(f"no threshold in range: S > 2 across {free_param} in [0,1]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if optimized_s(mid) > 2.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
