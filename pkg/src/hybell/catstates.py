"""Heralded coherent-state superpositions and beamsplitter splitting.

Measuring the atom of the hybrid state in the (|s> +/- |g>)/sqrt(2) basis
and keeping the + outcome projects the field onto
cos(nu)|0> + sin(nu)|alpha> (unnormalized).  Recentering with a displacement
by -alpha/2 turns this into the symmetric superposition

    N (cos(nu) |-alpha/2> + sin(nu) |+alpha/2>),

a cat state whose branch amplitude is half the input amplitude.  Sending it
through a chain of beamsplitters distributes the amplitude over many modes
with coherent signs, one branch the global negation of the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import StateSpec, validate


@dataclass(frozen=True)
class CatState:
    """Superposition N (cos(nu)|-alpha> + sin(nu)|+alpha>).

    ``alpha`` is the branch amplitude of the cat itself (complex, half the
    amplitude of the hybrid state it was heralded from); ``norm`` is
    N = [1 + sin(2 nu) exp(-2 |alpha|^2)]^(-1/2).
    """

    nu: float
    alpha: complex
    norm: float


@dataclass(frozen=True)
class CascadeSpec:
    """Transmittivities t_i of a beamsplitter chain; t_i^2 + r_i^2 = 1."""

    transmittivities: tuple[float, ...]

    @property
    def reflectivities(self) -> tuple[float, ...]:
        return tuple(math.sqrt(1.0 - t * t) for t in self.transmittivities)


def cat_norm(nu: float, cat_alpha: complex) -> float:
    """Normalization of the superposition, from <-a|a> = exp(-2|a|^2)."""
    overlap = math.exp(-2.0 * abs(cat_alpha) ** 2)
    return (1.0 + math.sin(2.0 * nu) * overlap) ** -0.5


def herald_cat(state: StateSpec) -> CatState:
    """Cat state heralded by the + outcome of the atomic superposition basis.

    The returned branch amplitude is half of ``state.alpha_mag`` (the
    recentering displacement splits the separation symmetrically); it keeps
    the purely imaginary phase convention of the package.
    """
    validate(state)
    cat_alpha = 0.5j * state.alpha_mag
    return CatState(nu=state.nu, alpha=cat_alpha, norm=cat_norm(state.nu, cat_alpha))


def herald_probability(state: StateSpec) -> float:
    """Probability of the + outcome: (1 + sin(2 nu) exp(-|alpha|^2/2)) / 2."""
    validate(state)
    return 0.5 * (
        1.0 + math.sin(2.0 * state.nu) * math.exp(-state.alpha_mag ** 2 / 2.0)
    )


def split_cat(cat: CatState, cascade: CascadeSpec) -> np.ndarray:
    """Per-mode amplitudes of the positive branch after the cascade.

    Mode k < n is the reflected output of the k-th splitter, carrying
    f_k = r_k * prod_{i<k} t_i of the input amplitude; the last entry is the
    fully transmitted remainder prod_i t_i.  The negative branch of the cat
    maps to the global negation of the returned vector, never to mixed
    signs.  Energy is conserved: sum_k f_k^2 + (prod_i t_i)^2 = 1.
    """
    if not cascade.transmittivities:
        raise ValueError("cascade must contain at least one beamsplitter")
    t = np.asarray(cascade.transmittivities, dtype=float)
    if np.any(t <= 0.0) or np.any(t > 1.0):
        raise ValueError("transmittivities out of (0,1]")
    r = np.sqrt(1.0 - t * t)
    through = np.concatenate(([1.0], np.cumprod(t)))
    factors = np.append(r * through[:-1], through[-1])
    return factors * cat.alpha


def equal_amplitude_cascade(n_modes: int) -> CascadeSpec:
    """Cascade distributing the cat amplitude equally over ``n_modes`` modes.

    Seeding t_1^2 = (N-1)/N and applying the recursion t_k^2 = 2 - 1/t_{k-1}^2
    makes every |f_k| equal to 1/sqrt(N); the last splitter always comes out
    50/50.  The guard on the recursion cannot trigger from the valid seed but
    protects against future misuse.
    """
    if n_modes < 2:
        raise ValueError("need at least two output modes")
    t_sq = (n_modes - 1.0) / n_modes
    values = [math.sqrt(t_sq)]
    for _ in range(n_modes - 2):
        t_sq = 2.0 - 1.0 / t_sq
        if t_sq <= 0.0:
            raise ValueError("equal-amplitude recursion left no transmitted amplitude")
        values.append(math.sqrt(t_sq))
    return CascadeSpec(transmittivities=tuple(values))
