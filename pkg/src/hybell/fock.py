"""Brute-force verification engine on a truncated Fock space.

Everything here is built explicitly as complex vectors and dense matrices in
the photon-number basis {|0>, ..., |n_max>} and evaluated by direct matrix
algebra.  None of the closed forms from :mod:`hybell.coefficients` are
reused, which is the whole point: agreement between the two routes is the
correctness check for both.

Conventions match the analytic side: x = (a + a^dag)/sqrt(2),
p = (a - a^dag)/(i sqrt(2)), so the vacuum X distribution is
pi^(-1/2) exp(-x^2) and the number-state wavefunctions are the Hermite
functions psi_n with psi_0(x) = pi^(-1/4) exp(-x^2/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .coefficients import QuadratureSettings, visibility
from .model import StateSpec, validate

NORM_DEFICIT_TOL = 1e-10

_OPERATOR_QUADRATURE = QuadratureSettings(abs_tol=1e-13, rel_tol=1e-11)


def fock_cutoff(alpha_mag: float) -> int:
    """Truncation rule: n_max = ceil(|alpha|^2 + 10 |alpha| + 20).

    Keeps the Poisson tail of every coherent state appearing in a branch
    (including the loss environment) below 1e-10 for |alpha| <= 6.
    """
    a = abs(alpha_mag)
    return int(math.ceil(a * a + 10.0 * a + 20.0))


def coherent_fock(alpha: complex, n_max: int | None = None) -> np.ndarray:
    """Coherent-state amplitude vector a_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!).

    Amplitudes are built by the stable ratio recurrence a_n = a_{n-1} alpha/sqrt(n).
    Raises ValueError if the truncation leaves a norm deficit above 1e-10,
    reporting the n_max required by the truncation rule.
    """
    if n_max is None:
        n_max = fock_cutoff(abs(alpha))
    vec = np.zeros(n_max + 1, dtype=complex)
    vec[0] = math.exp(-abs(alpha) ** 2 / 2.0)
    for n in range(1, n_max + 1):
        vec[n] = vec[n - 1] * alpha / math.sqrt(n)
    deficit = 1.0 - float(np.vdot(vec, vec).real)
    if deficit > NORM_DEFICIT_TOL:
        raise ValueError(
            f"truncation n_max={n_max} too small for |alpha|={abs(alpha):.3f}: "
            f"norm deficit {deficit:.2e}; need n_max >= {fock_cutoff(abs(alpha))}"
        )
    return vec


def hermite_functions(x, n_max: int) -> np.ndarray:
    """Hermite functions psi_0..psi_n_max evaluated at x (scalar or array).

    Stable upward recurrence on the normalized functions,
    psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1},
    seeded with psi_0 = pi^(-1/4) exp(-x^2/2).  No factorials appear.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-x * x / 2.0)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(
            n / (n + 1.0)
        ) * out[n - 1]
    return out


def _support_edge(n_max: int) -> float:
    # Classical turning point of psi_n_max plus a generous Gaussian margin;
    # every psi_n is negligible beyond it.
    return math.sqrt(2.0 * n_max + 1.0) + 8.0


def _hermite_gram(lo: float, hi: float, n_max: int, settings: QuadratureSettings):
    """int_lo^hi psi_m(x) psi_n(x) dx for all m, n at once.

    One adaptive vector quadrature with max-norm error control integrates
    every matrix element simultaneously; the Hermite recurrence runs once
    per quadrature node.
    """
    def integrand(x):
        psi = hermite_functions(x, n_max)
        return np.outer(psi, psi)

    gram, _ = quad_vec(
        integrand,
        lo,
        hi,
        epsabs=settings.abs_tol,
        epsrel=settings.rel_tol,
        norm="max",
    )
    return gram


def x_bin_operator(
    b: float, n_max: int, settings: QuadratureSettings | None = None
) -> np.ndarray:
    """Binned X observable 2 * int_{-b}^{b} |x><x| dx - 1 as a dense matrix.

    Real symmetric; odd-parity elements (m + n odd) vanish exactly on the
    symmetric interval and are zeroed rather than integrated.  Eigenvalues
    lie in [0, 1] for the projector part, hence in [-1, 1] here.
    """
    if not b > 0.0:
        raise ValueError("b out of (0, inf)")
    settings = settings or _OPERATOR_QUADRATURE
    upper = min(b, _support_edge(n_max))
    gram = 2.0 * _hermite_gram(0.0, upper, n_max, settings)
    n = np.arange(n_max + 1)
    gram[(n[:, None] + n[None, :]) % 2 == 1] = 0.0
    return 2.0 * gram - np.eye(n_max + 1)


def p_threshold_operator(
    threshold: float, n_max: int, settings: QuadratureSettings | None = None
) -> np.ndarray:
    """Thresholded P observable 2 * int_{-inf}^{threshold} |p><p| dp - 1.

    Momentum-space number states pick up the Fourier phase
    <p|n> = (-i)^n psi_n(p), so element (m, n) carries i^(m-n) on top of the
    real Hermite integral.  The integral over (-inf, threshold] is computed
    as completeness minus the tail over [threshold, edge], with the edge past
    the classical turning point of psi_n_max.
    """
    settings = settings or _OPERATOR_QUADRATURE
    edge = _support_edge(n_max)
    eye = np.eye(n_max + 1, dtype=complex)
    if threshold >= edge:
        return eye
    n = np.arange(n_max + 1)
    phase = 1j ** (n[:, None] - n[None, :])
    tail = _hermite_gram(max(threshold, -edge), edge, n_max, settings)
    return eye - 2.0 * phase * tail


def noclick_operator(eta: float, n_max: int) -> np.ndarray:
    """Photocounting observable of an efficiency-eta detector.

    The no-click POVM element on |n> is (1-eta)^n (each photon escapes
    detection independently), so the +1/-1 observable is the diagonal matrix
    2 (1-eta)^n - 1.  At eta = 1 this is 2|0><0| - 1; at eta = 0 a blind
    detector never clicks and the observable is the identity.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta out of [0,1]")
    return np.diag(2.0 * (1.0 - eta) ** np.arange(n_max + 1) - 1.0)


@dataclass(frozen=True)
class HybridState:
    """Rank-2 atom-field state after the loss line.

    ``branch_s`` and ``branch_g`` carry the cos(nu)/sin(nu) weights folded
    in, so the total weight ||branch_s||^2 + ||branch_g||^2 is 1.  The
    off-diagonal atom coherence is damped by ``decoherence_v``, the overlap
    of the two environment states.
    """

    branch_s: np.ndarray
    branch_g: np.ndarray
    decoherence_v: float


def lossy_hybrid_state(
    state: StateSpec, t_line: float, n_max: int | None = None
) -> HybridState:
    """Hybrid state after the transmission loss beamsplitter.

    Branch amplitudes become cos(nu)|0> and sin(nu)|i sqrt(T) alpha|; the
    environment keeps |0> and |i sqrt(1-T) alpha|, whose overlap (computed
    here as an explicit Fock inner product, not from the closed form) is the
    coherence factor V.
    """
    validate(state)
    if not 0.0 <= t_line <= 1.0:
        raise ValueError("t_line out of [0,1]")
    if n_max is None:
        n_max = fock_cutoff(state.alpha_mag)
    branch_s = math.cos(state.nu) * coherent_fock(0.0, n_max)
    branch_g = math.sin(state.nu) * coherent_fock(
        1j * math.sqrt(t_line) * state.alpha_mag, n_max
    )
    env_s = coherent_fock(0.0, n_max)
    env_g = coherent_fock(1j * math.sqrt(1.0 - t_line) * state.alpha_mag, n_max)
    v = abs(complex(np.vdot(env_s, env_g)))
    return HybridState(branch_s=branch_s, branch_g=branch_g, decoherence_v=v)


_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def density_matrix(hybrid: HybridState) -> np.ndarray:
    """Dense atom (x) field density matrix of a lossy hybrid state."""
    bs, bg = hybrid.branch_s, hybrid.branch_g
    v = hybrid.decoherence_v
    e = [np.zeros((2, 2)) for _ in range(4)]
    for k, (i, j) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        e[k][i, j] = 1.0
    e_ss, e_sg, e_gs, e_gg = e
    return (
        np.kron(e_ss, np.outer(bs, bs.conj()))
        + np.kron(e_gg, np.outer(bg, bg.conj()))
        + v * np.kron(e_sg, np.outer(bs, bg.conj()))
        + v * np.kron(e_gs, np.outer(bg, bs.conj()))
    )


def chsh_expectation(
    hybrid: HybridState, gamma: float, b0: np.ndarray, b1: np.ndarray
) -> float:
    """CHSH combination <A0 B1> + <A1 B1> + <A0 B0> - <A1 B0> by direct trace.

    The atomic observables are A0/A1 = cos(gamma) sz +/- sin(gamma) sx in the
    (|s>, |g>) basis; b0 and b1 are field observables on the same truncation
    as the state branches.
    """
    dim = hybrid.branch_s.shape[0]
    if b0.shape != (dim, dim) or b1.shape != (dim, dim):
        raise ValueError(
            f"operator truncation {b0.shape}/{b1.shape} does not match state dimension {dim}"
        )
    a0 = math.cos(gamma) * _SIGMA_Z + math.sin(gamma) * _SIGMA_X
    a1 = math.cos(gamma) * _SIGMA_Z - math.sin(gamma) * _SIGMA_X
    rho = density_matrix(hybrid)
    chsh_op = np.kron(a0, b1) + np.kron(a1, b1) + np.kron(a0, b0) - np.kron(a1, b0)
    return float(np.trace(rho @ chsh_op).real)


# Coefficient probes: same quantities as hybell.coefficients, obtained purely
# from the matrices above.

def oracle_c1(
    alpha_mag: float, t_line: float, b: float, n_max: int | None = None
) -> float:
    """c1 as (V/2) Tr[(|0><beta| + |beta><0|) B0] with beta = i sqrt(T) alpha."""
    if n_max is None:
        n_max = fock_cutoff(alpha_mag)
    op = x_bin_operator(b, n_max)
    v0 = coherent_fock(0.0, n_max)
    vb = coherent_fock(1j * math.sqrt(t_line) * alpha_mag, n_max)
    cross = np.vdot(vb, op @ v0) + np.vdot(v0, op @ vb)
    return visibility(alpha_mag, t_line) * 0.5 * float(cross.real)


def oracle_c2_photocount(eta: float, n_max: int = 30) -> float:
    """Tr(|0><0| B1) for the lossy photocounter; equals 1 for every eta."""
    v0 = coherent_fock(0.0, n_max)
    return float(np.vdot(v0, noclick_operator(eta, n_max) @ v0).real)


def oracle_c3_photocount(
    alpha_mag: float, t_line: float, eta: float, n_max: int | None = None
) -> float:
    """Tr(|beta><beta| B1) with beta = i sqrt(T) alpha and the no-click POVM.

    This is the projection-rule (BORN) statistic; the amplitude-exponent
    convention has no POVM model and is checked against its closed form
    directly instead.
    """
    if n_max is None:
        n_max = fock_cutoff(alpha_mag)
    vb = coherent_fock(1j * math.sqrt(t_line) * alpha_mag, n_max)
    return float(np.vdot(vb, noclick_operator(eta, n_max) @ vb).real)


def oracle_c2_twohomodyne(
    alpha_mag: float, t_line: float, n_max: int | None = None
) -> float:
    """Vacuum-branch expectation of the midpoint-thresholded P observable."""
    if n_max is None:
        n_max = fock_cutoff(alpha_mag)
    threshold = math.sqrt(t_line / 2.0) * alpha_mag
    op = p_threshold_operator(threshold, n_max)
    v0 = coherent_fock(0.0, n_max)
    return float(np.vdot(v0, op @ v0).real)


def oracle_c3_twohomodyne(
    alpha_mag: float, t_line: float, n_max: int | None = None
) -> float:
    """Coherent-branch expectation of the midpoint-thresholded P observable."""
    if n_max is None:
        n_max = fock_cutoff(alpha_mag)
    threshold = math.sqrt(t_line / 2.0) * alpha_mag
    op = p_threshold_operator(threshold, n_max)
    vb = coherent_fock(1j * math.sqrt(t_line) * alpha_mag, n_max)
    return float(np.vdot(vb, op @ vb).real)
