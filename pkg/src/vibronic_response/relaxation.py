"""Vibrational relaxation through a non-Hermitian oscillator term.

The reference route propagates the labelled coherent states with the complex
frequency ``omega - i kappa / 2`` and tracks their shrinking norm. A second
exact route evaluates the pathway exponent with decay attached to the ket and
bra spans of each term. The tabulated closed forms (complex-frequency tables
times a product ``F`` of norm factors) are kept as an independent layer so
they can be compared against both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coherent import kinematic_response, run_pathway
from .general import build_exponent, evaluate
from .model import BRA, KET, Pathway, VibronicModel, as_times, third_order_pathway
from .third_order import KINDS_WITH_DOUBLES, tabulated_relaxed_exponent


@dataclass(frozen=True)
class RelaxedLambda:
    """``Lambda~ = (omega + i kappa/2)(p . t)``; conjugated terms use ``Lambda~*``."""

    p: tuple[int, int, int]
    conjugated: bool
    omega: float = 1.0
    kappa: float = 0.0

    def phase_factor(self, times) -> complex:
        span = float(np.dot(self.p, times))
        lam = complex(self.omega, self.kappa / 2) * span
        return np.exp(-1j * lam.conjugate()) if self.conjugated else np.exp(1j * lam)


def f_factor(t: float, alpha: complex, z: float, kappa: float) -> float:
    """Norm factor ``exp[-|alpha + z|^2 (1 - e^{-kappa t}) / 2]``."""
    if kappa < 0 or t < 0:
        raise ValueError("kappa and t must be nonnegative")
    return math.exp(-abs(alpha + z) ** 2 / 2 * -math.expm1(-kappa * t))


def _single_model(z: Sequence[float], omega: float) -> VibronicModel:
    return VibronicModel.single_mode([0.0] * len(z), z, omega=omega)


def relaxed_r_v3(kind: int, levels: Sequence[int], z: Sequence[float], times, kappa: float,
                 omega: float = 1.0) -> complex:
    """Relaxed third-order vibrational response from the kinematic ladder."""
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    model = _single_model(z, omega)
    return kinematic_response(model, third_order_pathway(kind, levels), times, kappa=kappa)


def relaxed_general(model: VibronicModel, pathway: Pathway, times, kappa: float | None = None,
                    mode: int = 0) -> complex:
    """Relaxed single-mode response of any pathway (kinematic route)."""
    kappa = model.kappa if kappa is None else kappa
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    return kinematic_response(model, pathway, times, kappa=kappa, mode=mode)


def relaxed_from_exponent(model: VibronicModel, pathway: Pathway, times, kappa: float | None = None) -> complex:
    """Relaxed response from the pathway exponent with decaying terms (all modes)."""
    kappa = model.kappa if kappa is None else kappa
    return complex(evaluate(build_exponent(model, pathway), as_times(times, pathway.order), kappa))


def decay_product(model: VibronicModel, pathway: Pathway, times, kappa: float, mode: int = 0) -> float:
    """``F = prod_i f_{k_i}(t_i, alpha_ket,i-1) f_{b_i}(t_i, alpha_bra,i-1)``."""
    times = as_times(times, pathway.order)
    kets, bras = run_pathway(model, pathway, times, 0j, mode, kappa)
    z = model.modes[mode].displacements
    ket_lv, bra_lv = pathway.sequences()
    value = 1.0
    for i, t in enumerate(times):
        value *= f_factor(t, kets[i].alpha, z[ket_lv[i]], kappa)
        value *= f_factor(t, bras[i].alpha, z[bra_lv[i]], kappa)
    return value


# tabulated nontrivial norm factors per kind: (level, first, last, side, ladder index)
F_TABLES = {
    1: (("k", 2, 3, KET, 1), ("j", 1, 2, BRA, 0), ("0", 3, 3, KET, 2)),
    2: (("k", 3, 3, KET, 2), ("j", 1, 1, BRA, 0), ("0", 2, 3, BRA, 1)),
    3: (("k", 2, 2, KET, 1), ("l", 3, 3, KET, 2), ("j", 1, 3, BRA, 0)),
    4: (("j", 1, 3, KET, 0), ("k", 2, 2, BRA, 1)),
    5: (("j", 1, 1, KET, 0), ("0", 2, 2, KET, 1), ("k", 3, 3, KET, 2)),
    6: (("j", 1, 2, KET, 0), ("l", 3, 3, KET, 2), ("k", 2, 3, BRA, 1)),
    7: (("j", 1, 1, KET, 0), ("l", 2, 3, KET, 1), ("k", 3, 3, BRA, 2)),
    8: (("j", 1, 1, KET, 0), ("l", 2, 2, KET, 1), ("k", 3, 3, BRA, 2)),
}


def tabulated_decay_product(kind: int, levels: Sequence[int], z: Sequence[float], times, kappa: float,
                          omega: float = 1.0) -> float:
    """``F`` assembled from the tabulated per-kind factor lists."""
    times = as_times(times, 3)
    model = _single_model(z, omega)
    kets, bras = run_pathway(model, third_order_pathway(kind, levels), times, 0j, 0, kappa)
    idx = {"0": 0, "j": levels[0], "k": levels[1]}
    if kind in KINDS_WITH_DOUBLES:
        idx["l"] = levels[2]
    value = 1.0
    for name, first, last, side, ladder in F_TABLES[kind]:
        alpha = (kets if side == KET else bras)[ladder].alpha
        value *= f_factor(sum(times[first - 1:last]), alpha, z[idx[name]], kappa)
    return value


def tabulated_relaxed_r_v3(kind: int, levels: Sequence[int], z: Sequence[float], times, kappa: float,
                         omega: float = 1.0) -> complex:
    """Tabulated closed form: ``F * exp(table with Lambda -> Lambda~)``."""
    f = tabulated_relaxed_exponent(kind, levels, z, times, kappa, omega)
    return tabulated_decay_product(kind, levels, z, times, kappa, omega) * np.exp(f)
