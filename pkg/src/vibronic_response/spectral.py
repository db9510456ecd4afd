"""Taylor decomposition of third-order responses into discrete spectral peaks.

Writing ``r_v3 = exp(-h) prod_chi exp(c_chi e^{i s_chi Lambda_chi})`` and
expanding every factor gives ``r_v3 = exp(-h) sum_p C_p e^{i Lambda_p}``.
For a given order ``q = sum n_chi`` the three frequency constraints and the
order constraint leave ``n_110`` and ``n_111`` free.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .third_order import CHI, coefficients, h_of_z

DEFAULT_QMAX = 16
DEFAULT_P2MAX = 12


@dataclass(frozen=True)
class SpectralCoefficient:
    p: tuple[int, int, int]
    q: int
    value: float
    remainder: float  # magnitude of the last included shell

    def __float__(self):
        return self.value


def _by_chi(kind, levels, z):
    table = {p: (c, s) for c, p, s in coefficients(kind, levels, z)}
    return [table[chi] for chi in CHI]


def _term(c, n):
    # exact integer factorial; float power of the coupling
    return c ** n / math.factorial(n)


def coefficient_shells(kind: int, levels, z, p: Sequence[int], q_max: int = DEFAULT_QMAX) -> list[float]:
    """``[C_p^{(0)}, ..., C_p^{(q_max)}]`` by explicit elimination."""
    if q_max < 0:
        raise ValueError("q_max must be nonnegative")
    (c100, s100), (c010, s010), (c001, s001), (c110, s110), (c011, s011), (c111, s111) = _by_chi(kind, levels, z)
    p1, p2, p3 = (int(x) for x in p)
    d = 1 - s011 * (s001 + s010)
    shells = []
    for q in range(q_max + 1):
        parts = []
        for n110 in range(q + 1):
            for n111 in range(q + 1 - n110):
                n100 = s100 * (p1 - s110 * n110 - s111 * n111)
                rest = q - n100 - n110 - n111
                if n100 < 0 or rest < 0:
                    continue
                big_p3 = p3 - s111 * n111
                big_p2 = p2 - s110 * n110 - s111 * n111
                num = rest - s001 * big_p3 - s010 * big_p2
                if num % d:
                    continue
                n011 = num // d
                n001 = s001 * (big_p3 - s011 * n011)
                n010 = s010 * (big_p2 - s011 * n011)
                if min(n011, n001, n010) < 0:
                    continue
                parts.append(_term(c100, n100) * _term(c010, n010) * _term(c001, n001)
                             * _term(c110, n110) * _term(c011, n011) * _term(c111, n111))
        shells.append(math.fsum(parts))
    return shells


def coefficient(kind: int, levels, z, p: Sequence[int], q_max: int = DEFAULT_QMAX) -> float:
    """``C_{p1 p2 p3}`` summed over orders ``q <= q_max``; zero outside the support."""
    return math.fsum(coefficient_shells(kind, levels, z, p, q_max))


def coefficient_with_remainder(kind, levels, z, p, q_max=DEFAULT_QMAX) -> SpectralCoefficient:
    shells = coefficient_shells(kind, levels, z, p, q_max)
    return SpectralCoefficient(tuple(int(x) for x in p), q_max, math.fsum(shells), abs(shells[-1]))


def coefficient_grid(kind: int, levels, z, p_max: int, q_max: int = DEFAULT_QMAX) -> np.ndarray:
    """All ``C_p`` with ``|p_i| <= p_max`` as an array indexed ``[p1+P, p2+P, p3+P]``.

    Same elimination as :func:`coefficient`, vectorised over ``p``.
    """
    (c100, s100), (c010, s010), (c001, s001), (c110, s110), (c011, s011), (c111, s111) = _by_chi(kind, levels, z)
    rng = np.arange(-p_max, p_max + 1)
    p1, p2, p3 = np.meshgrid(rng, rng, rng, indexing="ij")
    d = 1 - s011 * (s001 + s010)
    fact = np.array([math.factorial(n) for n in range(q_max + 1)], dtype=float)

    def table(c):
        # c^n / n! for n = 0..q_max, then a zero slot for anything out of range
        return np.append(np.array([c ** n for n in range(q_max + 1)]) / fact, 0.0)

    def term(tab, n):
        return tab[np.where((n >= 0) & (n <= q_max), n, q_max + 1)]

    t100, t010, t001, t011 = table(c100), table(c010), table(c001), table(c011)

    out = np.zeros(p1.shape)
    for q in range(q_max + 1):
        for n110 in range(q + 1):
            for n111 in range(q + 1 - n110):
                n100 = s100 * (p1 - s110 * n110 - s111 * n111)
                rest = q - n100 - n110 - n111
                big_p3 = p3 - s111 * n111
                big_p2 = p2 - s110 * n110 - s111 * n111
                num = rest - s001 * big_p3 - s010 * big_p2
                n011 = num // d
                n001 = s001 * (big_p3 - s011 * n011)
                n010 = s010 * (big_p2 - s011 * n011)
                ok = (n100 >= 0) & (rest >= 0) & (num % d == 0) & (n011 >= 0) & (n001 >= 0) & (n010 >= 0)
                if not ok.any():
                    continue
                val = (term(t100, n100) * term(t010, n010) * term(t001, n001) * term(t011, n011)
                       * (c110 ** n110 / fact[n110]) * (c111 ** n111 / fact[n111]))
                out += np.where(ok, val, 0.0)
    return out


def brute_force_coefficients(kind: int, levels, z, q_max: int) -> dict[tuple[int, int, int], float]:
    """Independent check: enumerate every ``n`` tuple with ``sum n <= q_max``."""
    pairs = _by_chi(kind, levels, z)
    vecs = [np.array(chi) * s for chi, (_, s) in zip(CHI, pairs)]
    out: dict[tuple[int, int, int], list[float]] = {}
    for ns in itertools.product(range(q_max + 1), repeat=6):
        if sum(ns) > q_max:
            continue
        p = tuple(int(v) for v in sum(n * v for n, v in zip(ns, vecs)))
        val = 1.0
        for n, (c, _) in zip(ns, pairs):
            val *= _term(c, n)
        out.setdefault(p, []).append(val)
    return {p: math.fsum(v) for p, v in out.items()}


def reconstruct(kind, levels, z, times, p_max: int = DEFAULT_P2MAX, q_max: int = DEFAULT_QMAX,
                omega: float = 1.0, grid: np.ndarray | None = None):
    """``exp(-h) sum_{|p_i| <= p_max} C_p e^{i Lambda_p}`` at the given times."""
    if grid is None:
        grid = coefficient_grid(kind, levels, z, p_max, q_max)
    t1, t2, t3 = (np.asarray(t, dtype=float) for t in times)
    rng = np.arange(-p_max, p_max + 1)
    # separable sum: contract one axis at a time
    e1 = np.exp(1j * omega * np.multiply.outer(t1, rng))
    e2 = np.exp(1j * omega * np.multiply.outer(t2, rng))
    e3 = np.exp(1j * omega * np.multiply.outer(t3, rng))
    val = np.einsum("...a,...b,...c,abc->...", e1, e2, e3, grid)
    return np.exp(-h_of_z(kind, levels, z)) * val


def peak_amplitude(kind: int, levels, z, p1: int, p3: int, t2, q_max: int = DEFAULT_QMAX,
                   p2_max: int = DEFAULT_P2MAX, omega: float = 1.0):
    """``A_{p1,p3}(t2) = exp(-h) sum_{|p2| <= p2_max} C_{p1 p2 p3} e^{i p2 omega t2}``."""
    if q_max < 0 or p2_max < 0:
        raise ValueError("truncations must be nonnegative")
    t2 = np.asarray(t2, dtype=float)
    total = np.zeros(t2.shape, dtype=complex)
    for p2 in range(-p2_max, p2_max + 1):
        c = coefficient(kind, levels, z, (p1, p2, p3), q_max)
        if c:
            total = total + c * np.exp(1j * p2 * omega * t2)
    return np.exp(-h_of_z(kind, levels, z)) * total


# --- 2D spectra ----------------------------------------------------------------

@dataclass(frozen=True)
class Axis:
    start: float
    step: float
    count: int

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("time step must be positive")
        if self.count < 1:
            raise ValueError("count must be at least 1")

    @property
    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @classmethod
    def from_samples(cls, t: Sequence[float], rtol: float = 1e-9) -> "Axis":
        t = np.asarray(t, dtype=float)
        if t.size < 2:
            raise ValueError("need at least two samples to define a step")
        dt = np.diff(t)
        if np.any(np.abs(dt - dt[0]) > rtol * abs(dt[0])) or dt[0] <= 0:
            raise ValueError("time grid must be uniform and increasing")
        return cls(float(t[0]), float(dt[0]), int(t.size))


def _transform_axis(data, axis_index, ax: Axis, pad: int, half_first: bool):
    n = ax.count
    weights = np.ones(n)
    if half_first and ax.start == 0:
        weights[0] = 0.5
    shape = [1] * data.ndim
    shape[axis_index] = n
    data = data * weights.reshape(shape)
    size = pad * n
    # sum_t f(t) e^{+i w t} = N * ifft
    spec = np.fft.ifft(data, n=size, axis=axis_index) * size * ax.step
    freq = 2 * np.pi * np.fft.fftfreq(size, d=ax.step)
    if ax.start:
        phase = np.exp(1j * freq * ax.start)
        shape[axis_index] = size
        spec = spec * phase.reshape(shape)
    return np.fft.fftshift(freq), np.fft.fftshift(spec, axes=axis_index)


def spectrum_2d(response: Callable, t2: float, t1_axis: Axis, t3_axis: Axis, gamma: float = 0.0,
                pad: int = 4, half_first: bool = True):
    """Broadened 2D spectrum ``S(w1, w3)``.

    Convention: ``S = sum_{t1,t3} dt1 dt3 R(t1, t2, t3) e^{-gamma (t1 + t3)}
    e^{+i (w1 t1 + w3 t3)}``, so a phase ``e^{-i e t}`` produces a peak at
    ``w = +e``. Each axis is zero padded to ``pad`` times its length and the
    ``t = 0`` sample carries weight 1/2.

    Returns
    -------
    w1, w3 : 1D arrays in ascending order
    S : 2D complex array indexed ``[w1, w3]``
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if pad < 1:
        raise ValueError("pad must be at least 1")
    t1 = t1_axis.values[:, None]
    t3 = t3_axis.values[None, :]
    data = np.asarray(response(t1, t2, t3), dtype=complex)
    data = np.broadcast_to(data, (t1_axis.count, t3_axis.count)) * np.exp(-gamma * (t1 + t3))
    w1, spec = _transform_axis(data, 0, t1_axis, pad, half_first)
    w3, spec = _transform_axis(spec, 1, t3_axis, pad, half_first)
    return w1, w3, spec
