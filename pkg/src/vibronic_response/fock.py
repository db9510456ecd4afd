"""Brute-force verifier in a truncated number basis.

Nothing here uses coherent-state algebra: displacement operators are dense
matrices built from their Laguerre matrix elements, ket and bra vectors are
propagated segment by segment and the response is a plain inner product (or a
trace against a Boltzmann mixture).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .model import Pathway, VibronicModel, as_times

DEFAULT_NMAX = 64
TOP_FRACTION = 0.1
TOP_TOLERANCE = 1e-12
# a Boltzmann mixture at <n> = 2 already has weight ~1e-11 above n = 60, so
# mixtures are judged by their weighted leak plus the discarded tail weight
MIXTURE_TOLERANCE = 1e-8


class TruncationError(RuntimeError):
    """Population leaked into the top of the truncated basis."""


@dataclass(frozen=True)
class TruncatedOperator:
    n_max: int
    entries: np.ndarray

    def __matmul__(self, other):
        if isinstance(other, TruncatedOperator):
            return TruncatedOperator(self.n_max, self.entries @ other.entries)
        return self.entries @ other


def displacement(alpha: complex, n_max: int) -> TruncatedOperator:
    """``D(alpha)`` restricted to the lowest ``n_max`` number states."""
    alpha = complex(alpha)
    m = np.arange(n_max)[:, None]
    n = np.arange(n_max)[None, :]
    x = abs(alpha) ** 2
    lo = np.minimum(m, n)
    d = np.abs(m - n)
    if alpha == 0:
        return TruncatedOperator(n_max, np.eye(n_max, dtype=complex))
    # |<m|D|n>| = sqrt(lo!/hi!) |alpha|^d e^{-x/2} L_lo^{(d)}(x)
    log_mag = 0.5 * (gammaln(lo + 1) - gammaln(lo + d + 1)) + d * np.log(abs(alpha)) - x / 2
    lag = eval_genlaguerre(lo, d, x)
    phase = np.where(m >= n, (alpha / abs(alpha)) ** d, (-alpha.conjugate() / abs(alpha)) ** d)
    return TruncatedOperator(n_max, np.exp(log_mag) * lag * phase)


def number_propagator(t: float, omega: float, kappa: float, n_max: int) -> np.ndarray:
    n = np.arange(n_max)
    return np.exp(-1j * (omega - 0.5j * kappa) * n * t)


def propagator(z: float, t: float, omega: float = 1.0, kappa: float = 0.0,
               n_max: int = DEFAULT_NMAX) -> TruncatedOperator:
    """``exp(-i t (omega - i kappa/2)(a^+ + z)(a + z))`` as ``D(-z) diag D(z)``."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    d_plus = displacement(z, n_max).entries
    d_minus = displacement(-z, n_max).entries
    diag = number_propagator(t, omega, kappa, n_max)
    return TruncatedOperator(n_max, d_minus @ (diag[:, None] * d_plus))


def number_state(n: int, n_max: int) -> np.ndarray:
    v = np.zeros(n_max, dtype=complex)
    v[n] = 1.0
    return v


def coherent_vector(alpha: complex, n_max: int) -> np.ndarray:
    return displacement(alpha, n_max).entries[:, 0].copy()


def thermal_weights(temperature: float, omega: float, n_max: int, cutoff: float = 1e-14):
    """Boltzmann populations, cut where the cumulative weight reaches 1 - cutoff."""
    if temperature <= 0:
        w = np.zeros(n_max)
        w[0] = 1.0
        return w
    n = np.arange(n_max)
    w = np.exp(-omega * n / temperature) * (-np.expm1(-omega / temperature))
    keep = np.searchsorted(np.cumsum(w), 1 - cutoff) + 1
    w[keep:] = 0.0
    return w


def _top_population(v: np.ndarray) -> float:
    n_top = max(1, int(np.ceil(TOP_FRACTION * len(v))))
    return float(np.sum(np.abs(v[-n_top:]) ** 2))


def _propagate(vectors, levels, times, z, omega, kappa, n_max, cache):
    for lv, t in zip(levels, times):
        key = (z[lv], t)
        if key not in cache:
            cache[key] = propagator(z[lv], t, omega, kappa, n_max).entries
        vectors = cache[key] @ vectors
    return vectors


def brute_force_response(model: VibronicModel, pathway: Pathway, times: Sequence[float],
                         initial: str | tuple = "vacuum", n_max: int = DEFAULT_NMAX,
                         mode: int = 0, kappa: float | None = None, check: bool = True) -> complex:
    """Vibrational response by explicit ket/bra propagation.

    Parameters
    ----------
    initial : "vacuum" | ("coherent", alpha0) | ("thermal", T)
        Initial state of the mode. The thermal state is a Boltzmann mixture of
        number states.
    check : bool
        Raise :class:`TruncationError` when more than 1e-12 of any propagated
        pure state sits in the top 10% of the basis. For the thermal mixture
        the Boltzmann-weighted leak plus the weight beyond ``n_max`` must stay
        below 1e-8.
    """
    pathway.check_model(model)
    times = as_times(times, pathway.order)
    m = model.modes[mode]
    kappa = model.kappa if kappa is None else kappa
    weights = None
    discarded = 0.0
    if initial == "vacuum":
        start = number_state(0, n_max)[:, None]
    elif initial[0] == "coherent":
        start = coherent_vector(initial[1], n_max)[:, None]
    elif initial[0] == "thermal":
        weights = thermal_weights(initial[1], m.frequency, n_max)
        discarded = max(0.0, 1.0 - float(np.sum(weights)))
        used = np.nonzero(weights)[0]
        start = np.eye(n_max, dtype=complex)[:, used]
        weights = weights[used]
    else:
        raise ValueError(f"unknown initial state {initial!r}")
    ket_levels, bra_levels = pathway.sequences()
    cache: dict = {}
    kets = _propagate(start, ket_levels, times, m.displacements, m.frequency, kappa, n_max, cache)
    bras = _propagate(start, bra_levels, times, m.displacements, m.frequency, kappa, n_max, cache)
    if check:
        for vecs in (kets, bras):
            tops = np.array([_top_population(vecs[:, c]) for c in range(vecs.shape[1])])
            if weights is None:
                leak, limit = float(tops.max()), TOP_TOLERANCE
            else:
                leak, limit = float(np.dot(weights, tops)) + discarded, MIXTURE_TOLERANCE
            if leak > limit:
                raise TruncationError(
                    f"n_max={n_max} too small: top-of-basis population {leak:.2e}"
                )
    overlaps = np.einsum("ij,ij->j", bras.conj(), kets)
    if weights is None:
        return complex(overlaps[0])
    return complex(np.dot(weights, overlaps))


def multimode_brute_force(model: VibronicModel, pathway: Pathway, times, n_max: int = 32) -> complex:
    """Vibrational response for two modes in the tensor-product basis."""
    if model.n_modes > 2:
        raise ValueError("dense tensor-product oracle supports at most two modes")
    times = as_times(times, pathway.order)
    eye = np.eye(n_max)
    ket_levels, bra_levels = pathway.sequences()

    def step(level, t):
        ops = [propagator(mode.displacements[level], t, mode.frequency, model.kappa, n_max).entries
               for mode in model.modes]
        if len(ops) == 1:
            return ops[0]
        return np.kron(ops[0], eye) @ np.kron(eye, ops[1])

    dim = n_max ** model.n_modes
    ket = np.zeros(dim, dtype=complex)
    ket[0] = 1.0
    bra = ket.copy()
    for kl, bl, t in zip(ket_levels, bra_levels, times):
        ket = step(kl, t) @ ket
        bra = step(bl, t) @ bra
    return complex(np.vdot(bra, ket))


def unitarity_defect(z: complex, n_max: int = DEFAULT_NMAX, block: float = 0.75) -> float:
    """``max |D^+ D - 1|`` on the lowest ``block`` fraction of the basis."""
    d = displacement(z, n_max).entries
    k = int(block * n_max)
    prod = d.conj().T @ d
    return float(np.max(np.abs(prod[:k, :k] - np.eye(k))))
