"""Closed-form third-order vibrational response functions.

Each of the eight diagram kinds is stored as a table of six oscillating
terms ``z_{ab} z_{cd} exp(s i Lambda_p)`` with ``Lambda_p = omega (p . t)``.
The exponent is ``sum c (exp(s i Lambda_p) - 1)``, which vanishes at t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import (
    KINDS_WITH_DOUBLES,
    THIRD_ORDER_KINDS,
    PathwayError,
    VibronicModel,
    electronic_prefactor,
    enumerate_third_order,
)

CHI = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, 1, 1))


@dataclass(frozen=True)
class LambdaIndex:
    """``Lambda_{p1 p2 p3}``; ``conjugated`` marks an ``exp(-i Lambda)`` term."""

    p: tuple[int, int, int]
    conjugated: bool

    @property
    def sign(self) -> int:
        return -1 if self.conjugated else 1


@dataclass(frozen=True)
class TableTerm:
    pair1: str
    pair2: str
    index: LambdaIndex
    relaxed: bool = True  # carries the complex frequency in the relaxed form

    def coefficient(self, z_of) -> float:
        return z_of(self.pair1) * z_of(self.pair2)


def _t(pair1, pair2, p, sign, relaxed=True):
    return TableTerm(pair1, pair2, LambdaIndex(tuple(int(c) for c in p), sign < 0), relaxed)


# pair "ab" stands for z_a - z_b; "j0" is z_j
TABLES: dict[int, tuple[TableTerm, ...]] = {
    1: (_t("j0", "j0", "110", +1), _t("k0", "k0", "011", -1), _t("j0", "k0", "001", +1),
        _t("0j", "k0", "010", -1), _t("j0", "k0", "100", +1), _t("0j", "k0", "111", +1)),
    2: (_t("j0", "j0", "100", +1), _t("k0", "k0", "001", -1), _t("0j", "k0", "010", +1),
        _t("j0", "k0", "011", +1), _t("j0", "k0", "110", +1), _t("0j", "k0", "111", +1)),
    3: (_t("lk", "lj", "001", -1), _t("k0", "kl", "010", -1), _t("j0", "k0", "100", +1),
        _t("k0", "lj", "011", -1), _t("0j", "kl", "110", +1), _t("0j", "lj", "111", +1)),
    4: (_t("j0", "j0", "111", -1), _t("k0", "k0", "010", +1), _t("j0", "k0", "001", +1),
        _t("j0", "k0", "100", -1), _t("0j", "k0", "011", +1), _t("0j", "k0", "110", -1)),
    5: (_t("j0", "j0", "100", -1), _t("k0", "k0", "001", -1), _t("j0", "k0", "010", -1),
        _t("0j", "k0", "011", -1), _t("0j", "k0", "110", -1),
        _t("j0", "k0", "111", -1, relaxed=False)),
    6: (_t("lk", "lj", "001", -1), _t("k0", "lj", "010", +1), _t("j0", "k0", "100", -1),
        _t("0k", "lk", "011", +1), _t("j0", "jl", "110", -1), _t("j0", "lk", "111", -1)),
    7: (_t("k0", "kl", "001", +1), _t("k0", "lj", "010", -1), _t("0j", "lj", "100", -1),
        _t("lj", "lk", "011", -1), _t("j0", "k0", "110", -1), _t("j0", "lk", "111", -1)),
    8: (_t("k0", "kl", "001", -1), _t("lk", "lj", "010", -1), _t("j0", "jl", "100", -1),
        _t("k0", "lj", "011", -1), _t("j0", "lk", "110", -1), _t("j0", "k0", "111", -1)),
}


def _check(kind, levels):
    if kind not in THIRD_ORDER_KINDS:
        raise PathwayError(f"third-order kind must be 1..8, got {kind}")
    need = 3 if kind in KINDS_WITH_DOUBLES else 2
    if len(levels) != need:
        raise PathwayError(f"kind {kind} needs {need} level indices, got {len(levels)}")


def pair_value(z: Sequence[float], levels: Sequence[int]):
    """Closure mapping a pair symbol such as ``"lj"`` to ``z_l - z_j``."""
    idx = {"0": 0, "j": levels[0], "k": levels[1]}
    if len(levels) > 2:
        idx["l"] = levels[2]
    for lv in idx.values():
        if not 0 <= lv < len(z):
            raise PathwayError(f"level {lv} out of range for {len(z)} displacements")

    def z_of(pair: str) -> float:
        return z[idx[pair[0]]] - z[idx[pair[1]]]

    return z_of


def coefficients(kind: int, levels: Sequence[int], z: Sequence[float]):
    """``[(c, p, s), ...]`` for the six oscillating terms of one kind."""
    _check(kind, levels)
    z_of = pair_value(z, levels)
    return [(term.coefficient(z_of), term.index.p, term.index.sign) for term in TABLES[kind]]


def h_of_z(kind: int, levels: Sequence[int], z: Sequence[float]) -> float:
    """Constant part ``h`` of the exponent, ``f = -h + sum c exp(...)``."""
    return float(sum(c for c, _, _ in coefficients(kind, levels, z)))


def exponent(kind: int, levels: Sequence[int], z: Sequence[float], times, omega: float = 1.0):
    """``ln R^{(v,3)}``; broadcasts over array-valued times."""
    t1, t2, t3 = (np.asarray(t, dtype=float) for t in times)
    f = 0j
    for c, p, s in coefficients(kind, levels, z):
        lam = omega * (p[0] * t1 + p[1] * t2 + p[2] * t3)
        f = f + c * np.expm1(1j * s * lam)
    return f


def r_v3(kind: int, levels: Sequence[int], z: Sequence[float], times, omega: float = 1.0):
    """Third-order vibrational response of one pathway (closed form)."""
    return np.exp(exponent(kind, levels, z, times, omega))


def r_phi_decomposition(kind, levels, z, times, omega=1.0):
    """``(r, phi)`` with ``R = exp(r) exp(i phi)``."""
    f = exponent(kind, levels, z, times, omega)
    return np.real(f), np.imag(f)


def full_response3(model: VibronicModel, kind: int, times) -> complex:
    """Sum over pathways of electronic factor times vibrational factor (all modes)."""
    total = 0j
    for levels, _ in enumerate_third_order(model, kind):
        vib = 1.0 + 0j
        for mode in model.modes:
            vib *= r_v3(kind, levels, mode.displacements, times, mode.frequency)
        total += electronic_prefactor(model, kind, levels, times) * vib
    return total


def tabulated_relaxed_exponent(kind, levels, z, times, kappa, omega=1.0) -> complex:
    """Exponent with ``omega -> omega + i kappa/2`` term by term as tabulated.

    ``exp(i Lambda~)`` for ``s = +1`` and ``exp(-i Lambda~*)`` for ``s = -1``,
    both of which decay as ``exp(-kappa (p . t) / 2)``.
    """
    t = np.asarray(times, dtype=float)
    f = 0j
    for term, (c, p, s) in zip(TABLES[kind], coefficients(kind, levels, z)):
        span = float(np.dot(p, t))
        decay = np.exp(-kappa * span / 2) if term.relaxed else 1.0
        f += c * (np.exp(1j * s * omega * span) * decay - 1.0)
    return f
