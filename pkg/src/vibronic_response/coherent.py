"""Exact coherent-state kinematics under displaced-oscillator Hamiltonians.

A coherent state ``|alpha>`` evolved by ``(omega - i kappa/2)(a^+ + z)(a + z)``
stays coherent; all that needs tracking is the amplitude, a real phase and,
with relaxation, the log of the norm.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

from .model import Pathway, PathwayError, VibronicModel, as_times


@dataclass(frozen=True)
class LabeledCoherentState:
    alpha: complex = 0j
    phase: float = 0.0
    log_magnitude: float = 0.0


def overlap(bra: complex, ket: complex) -> complex:
    """``<bra|ket>`` for two coherent states."""
    return cmath.exp(-abs(ket - bra) ** 2 / 2 + 1j * (bra.conjugate() * ket).imag)


def evolve(state: LabeledCoherentState, z: float, t: float, omega: float = 1.0,
           kappa: float = 0.0) -> LabeledCoherentState:
    """Propagate one labelled coherent state for a time ``t``.

    The oscillator is centred at ``-z``; the phase picks up
    ``z * Im(alpha' - alpha)`` and the norm the factor
    ``exp(-|alpha + z|^2 (1 - e^{-kappa t}) / 2)``.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if kappa > 0 and t < 0:
        raise ValueError("relaxed evolution needs t >= 0")
    alpha = state.alpha
    shifted = alpha + z
    new_alpha = shifted * cmath.exp(-(kappa / 2 + 1j * omega) * t) - z
    dphase = z * (new_alpha - alpha).imag
    dlog = -abs(shifted) ** 2 / 2 * (-math.expm1(-kappa * t)) if kappa else 0.0
    return LabeledCoherentState(new_alpha, state.phase + dphase, state.log_magnitude + dlog)


def run_pathway(model: VibronicModel, pathway: Pathway, times: Sequence[float],
                alpha0: complex = 0j, mode: int = 0, kappa: float | None = None):
    """Ket and bra coherent states at the end of every waiting time.

    Returns two lists of length ``M + 1`` (index 0 is the initial state).
    ``kappa`` defaults to the model's decay rate.
    """
    pathway.check_model(model)
    times = as_times(times, pathway.order)
    if kappa is None:
        kappa = model.kappa
    m = model.modes[mode]
    z = m.displacements
    ket_levels, bra_levels = pathway.sequences()
    start = LabeledCoherentState(complex(alpha0))
    kets, bras = [start], [start]
    for kj, bj, t in zip(ket_levels, bra_levels, times):
        kets.append(evolve(kets[-1], z[kj], t, m.frequency, kappa))
        bras.append(evolve(bras[-1], z[bj], t, m.frequency, kappa))
    return kets, bras


def response_from_states(ket: LabeledCoherentState, bra: LabeledCoherentState) -> complex:
    """Vibrational response ``<phi_bra|phi_ket>`` from the final labelled states."""
    return (
        math.exp(ket.log_magnitude + bra.log_magnitude)
        * overlap(bra.alpha, ket.alpha)
        * cmath.exp(1j * (ket.phase - bra.phase))
    )


def kinematic_response(model: VibronicModel, pathway: Pathway, times, alpha0: complex = 0j,
                       mode: int = 0, kappa: float | None = None) -> complex:
    """Single-mode vibrational response of a pathway through the state ladder."""
    kets, bras = run_pathway(model, pathway, times, alpha0, mode, kappa)
    return response_from_states(kets[-1], bras[-1])


def linear_response(z: float, t: float, omega: float = 1.0) -> complex:
    """First-order vibrational factor ``exp(-z^2) exp(z^2 e^{-i omega t})``."""
    return cmath.exp(-z * z + z * z * cmath.exp(-1j * omega * t))


def check_single_mode(model: VibronicModel, mode: int) -> None:
    if not 0 <= mode < model.n_modes:
        raise PathwayError(f"mode {mode} out of range")
