"""Coherent and thermal initial states, and the continuum (bath) limit.

A coherent initial state ``|alpha0>`` only adds a phase to the response. A
Boltzmann average of that phase multiplies the real part of the exponent by
``coth(omega / 2T)``. Replacing a discrete set of modes by a density of
couplings turns every ``z z' chi(t)`` term into a line-shape function ``g``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate
from scipy.stats import qmc

from .coherent import run_pathway
from .general import ExponentForm, build_exponent, exponent_value
from .model import Pathway, PathwayError, VibronicModel, as_times
from .third_order import KINDS_WITH_DOUBLES, THIRD_ORDER_KINDS


class IntegrabilityError(ValueError):
    """The density does not vanish fast enough at zero frequency."""


@dataclass(frozen=True)
class ThermalParameters:
    temperature: float
    omega: float = 1.0

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be nonnegative")
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @property
    def mean_occupation(self) -> float:
        return mean_occupation(self.temperature, self.omega)

    @property
    def coth(self) -> float:
        return coth_factor(self.temperature, self.omega)


def mean_occupation(temperature: float, omega: float = 1.0) -> float:
    """Bose occupation ``1 / (exp(omega / T) - 1)``; zero at ``T = 0``."""
    if temperature < 0:
        raise ValueError("temperature must be nonnegative")
    if temperature == 0:
        return 0.0
    x = omega / temperature
    return math.exp(-x) / -math.expm1(-x)


def coth_factor(temperature: float, omega: float = 1.0) -> float:
    """``coth(omega / 2T) = 1 + 2 <n>``."""
    return 1.0 + 2.0 * mean_occupation(temperature, omega)


def temperature_for_occupation(n_mean: float, omega: float = 1.0) -> float:
    if n_mean <= 0:
        return 0.0
    return omega / math.log1p(1.0 / n_mean)


# --- coherent initial state ------------------------------------------------------

def delta_phase(model: VibronicModel, pathway: Pathway, times, alpha0: complex, mode: int = 0) -> float:
    """Extra phase from starting in ``|alpha0>``, via the final amplitudes.

    ``2 Im[alpha0^* (alpha_ket - alpha_bra) e^{i omega sum t}]`` with the
    amplitudes taken from the ``alpha0 = 0`` ladder.
    """
    times = as_times(times, pathway.order)
    kets, bras = run_pathway(model, pathway, times, 0j, mode, kappa=0.0)
    w = model.modes[mode].frequency
    q = kets[-1].alpha - bras[-1].alpha
    return 2.0 * (complex(alpha0).conjugate() * q * cmath.exp(1j * w * sum(times))).imag


def delta_phase_sum(model: VibronicModel, pathway: Pathway, times, alpha0: complex, mode: int = 0) -> float:
    """The same phase written as a sum over waiting times."""
    times = as_times(times, pathway.order)
    ket, bra = pathway.sequences()
    z = model.modes[mode].displacements
    w = model.modes[mode].frequency
    a0 = complex(alpha0).conjugate()
    total, elapsed = 0.0, 0.0
    for k, b, t in zip(ket, bra, times):
        total += (z[b] - z[k]) * (a0 * (cmath.exp(1j * w * t) - 1) * cmath.exp(1j * w * elapsed)).imag
        elapsed += t
    return 2.0 * total


# --- thermal average ---------------------------------------------------------------

def thermal_exponent(f, temperature: float, omega: float = 1.0):
    return coth_factor(temperature, omega) * np.real(f) + 1j * np.imag(f)


def thermal_response(form, times, temperature: float, omega: float | None = None):
    """``exp[coth(omega/2T) Re f + i Im f]``.

    ``form`` is an :class:`ExponentForm` (each mode uses its own frequency) or
    a callable ``times -> R`` for a single mode of frequency ``omega``. For a
    callable the exponent is ``ln |R| + i arg R``; the result does not depend
    on the branch of the argument.
    """
    if isinstance(form, ExponentForm):
        f = 0j
        for mode in sorted({t.mode for t in form.terms}):
            w = next(t.omega for t in form.terms if t.mode == mode)
            f = f + thermal_exponent(exponent_value(form, times, mode=mode), temperature, w)
        return np.exp(f)
    r = np.asarray(form(times), dtype=complex)
    w = 1.0 if omega is None else omega
    return np.abs(r) ** coth_factor(temperature, w) * np.exp(1j * np.angle(r))


def thermal_sampler(n_mean: float) -> Callable[[np.ndarray], np.ndarray]:
    """Map unit-square points to ``alpha0`` distributed as the thermal P function."""
    def sample(u: np.ndarray) -> np.ndarray:
        radius = np.sqrt(-n_mean * np.log1p(-u[:, 0]))
        return radius * np.exp(2j * np.pi * u[:, 1])
    return sample


def phase_space_average(model: VibronicModel, pathway: Pathway, times, sampler, n_samples: int = 4096,
                        seed: int = 0, mode: int = 0) -> complex:
    """Quasi-Monte Carlo average of ``R_{alpha0}`` over a P-function sampler.

    ``sampler`` maps an ``(n, 2)`` array of points in the unit square to
    ``n`` complex amplitudes.
    """
    times = as_times(times, pathway.order)
    form = build_exponent(model, pathway)
    r0 = complex(np.exp(exponent_value(form, times, mode=mode)))
    kets, bras = run_pathway(model, pathway, times, 0j, mode, kappa=0.0)
    w = model.modes[mode].frequency
    q = (kets[-1].alpha - bras[-1].alpha) * cmath.exp(1j * w * sum(times))
    u = qmc.Sobol(d=2, scramble=True, seed=seed).random(n_samples)
    alphas = sampler(u)
    phases = 2.0 * np.imag(np.conj(alphas) * q)
    return r0 * complex(np.mean(np.exp(1j * phases)))


# --- spectral densities ---------------------------------------------------------------

def _kernel_re(w, t, temperature):
    c = 1.0 if temperature == 0 else 1.0 / np.tanh(w / (2 * temperature))
    return c * (1 - np.cos(w * t))


class SpectralDensity:
    """Density of couplings ``s(omega)`` on ``omega > 0``."""

    upper: float = math.inf

    def __call__(self, w):
        raise NotImplementedError

    def check_integrable(self, temperature: float) -> None:
        if temperature <= 0:
            return
        e1, e2 = 1e-9, 1e-6
        r1, r2 = float(self(e1)) / e1, float(self(e2)) / e2
        if not (math.isfinite(r1) and math.isfinite(r2)) or abs(r1) > 10 * abs(r2) + 1e-300:
            raise IntegrabilityError(
                "s(w)/w must stay bounded as w -> 0 at finite temperature"
            )

    def panels(self, t: float) -> np.ndarray:
        top = self.upper if math.isfinite(self.upper) else 60.0 * self.scale
        edges = np.geomspace(1e-8 * self.scale, top, 40)
        return np.concatenate(([0.0], edges))

    @property
    def scale(self) -> float:
        return 1.0

    def g(self, t: float, temperature: float = 0.0, epsabs: float = 1e-10) -> complex:
        """``int s(w) {coth(w/2T)[1 - cos wt] + i sin wt} dw`` by panelled quadrature."""
        if t == 0:
            return 0j
        self.check_integrable(temperature)
        edges = self.panels(t)
        tol = epsabs / (2 * len(edges))
        opts = dict(epsabs=tol, epsrel=1e-12, limit=400)
        re = im = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            re += integrate.quad(lambda w: self(w) * _kernel_re(w, t, temperature), a, b, **opts)[0]
            im += integrate.quad(self, a, b, weight="sin", wvar=t, **opts)[0]
        if not math.isfinite(self.upper):
            a = edges[-1]
            c = integrate.quad(lambda w: self(w) * (1.0 if temperature == 0 else 1 / np.tanh(w / (2 * temperature))),
                               a, np.inf, **opts)[0]
            cos_tail = integrate.quad(
                lambda w: self(w) * (1.0 if temperature == 0 else 1 / np.tanh(w / (2 * temperature))),
                a, np.inf, weight="cos", wvar=t, epsabs=tol, limlst=200)[0]
            re += c - cos_tail
            im += integrate.quad(self, a, np.inf, weight="sin", wvar=t, epsabs=tol, limlst=200)[0]
        return complex(re, im)


@dataclass(frozen=True)
class DiscreteDensity(SpectralDensity):
    """Sum of delta peaks: weights ``w_i`` at frequencies ``omega_i``."""

    frequencies: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.frequencies) != len(self.weights):
            raise ValueError("frequencies and weights differ in length")
        if any(w <= 0 for w in self.frequencies):
            raise ValueError("frequencies must be positive")

    def __call__(self, w):
        return np.zeros_like(np.asarray(w, dtype=float))

    def g(self, t: float, temperature: float = 0.0, epsabs: float = 0.0) -> complex:
        total = 0j
        for w, c in zip(self.frequencies, self.weights):
            total += c * (_kernel_re(w, t, temperature) + 1j * math.sin(w * t))
        return complex(total)


@dataclass(frozen=True)
class OhmicDensity(SpectralDensity):
    """``s(w) = eta w exp(-w / omega_c)``."""

    eta: float
    omega_c: float

    def __post_init__(self):
        if self.omega_c <= 0:
            raise ValueError("omega_c must be positive")

    def __call__(self, w):
        return self.eta * w * np.exp(-np.asarray(w) / self.omega_c)

    @property
    def scale(self) -> float:
        return self.omega_c

    def g_zero_temperature(self, t: float) -> complex:
        """Closed form at ``T = 0``: ``eta omega_c^2 [1 - (1 + i omega_c t)^{-2}]``."""
        return self.eta * self.omega_c ** 2 * (1 - 1 / (1 + 1j * self.omega_c * t) ** 2)


@dataclass(frozen=True)
class PowerLawDensity(SpectralDensity):
    """``s(w) = eta w^n exp(-w / omega_c) / omega_c^{n-1}``."""

    eta: float
    omega_c: float
    exponent: float = 1.0

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return self.eta * w ** self.exponent * np.exp(-w / self.omega_c) / self.omega_c ** (self.exponent - 1)

    @property
    def scale(self) -> float:
        return self.omega_c


@dataclass(frozen=True)
class TabulatedDensity(SpectralDensity):
    """Piecewise-linear density through ``(omega_i, s_i)``.

    Below the first node the density ramps linearly from zero; above the last
    node it is zero.
    """

    omega: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        if w.ndim != 1 or len(w) != len(self.values) or len(w) < 2:
            raise ValueError("need matching omega/value columns with at least two rows")
        if w[0] <= 0 or np.any(np.diff(w) <= 0):
            raise ValueError("omega must be positive and strictly increasing")
        object.__setattr__(self, "upper", float(w[-1]))

    def __call__(self, w):
        nodes = np.concatenate(([0.0], self.omega))
        vals = np.concatenate(([0.0], self.values))
        return np.interp(w, nodes, vals, right=0.0)

    def panels(self, t: float) -> np.ndarray:
        return np.concatenate(([0.0], self.omega))

    @classmethod
    def from_text(cls, text: str) -> "TabulatedDensity":
        """Two whitespace-separated columns; ``#`` starts a comment."""
        rows = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].split()
            if not body:
                continue
            if len(body) != 2:
                raise ValueError(f"line {lineno}: expected two columns")
            rows.append((float(body[0]), float(body[1])))
        w, s = zip(*rows)
        return cls(tuple(w), tuple(s))


@dataclass(frozen=True)
class ScaledDensity(SpectralDensity):
    factor: float
    base: SpectralDensity

    def __call__(self, w):
        return self.factor * self.base(w)

    def g(self, t: float, temperature: float = 0.0, epsabs: float = 1e-10) -> complex:
        if self.factor == 0 or t == 0:
            return 0j
        return self.factor * self.base.g(t, temperature, epsabs / abs(self.factor))


def lineshape_g(sd: SpectralDensity, t: float, temperature: float = 0.0, epsabs: float = 1e-10) -> complex:
    """Line-shape function of one pair density at time ``t``."""
    if temperature < 0:
        raise ValueError("temperature must be nonnegative")
    return sd.g(float(t), temperature, epsabs)


def trapezoid_g(sd: SpectralDensity, t: float, temperature: float = 0.0, w_max: float | None = None,
                n: int = 400001) -> complex:
    """Uniform trapezoid evaluation of the same integral, used as a cross-check."""
    top = w_max if w_max is not None else (sd.upper if math.isfinite(sd.upper) else 80.0 * sd.scale)
    w = np.linspace(0.0, top, n)[1:]
    s = sd(w)
    re = s * _kernel_re(w, t, temperature)
    im = s * np.sin(w * t)
    dw = top / (n - 1)
    # the integrand vanishes at w = 0, so the left endpoint adds nothing
    return complex((np.sum(re) - re[-1] / 2) * dw, (np.sum(im) - im[-1] / 2) * dw)


# --- bath over level pairs ------------------------------------------------------------------

Pair = tuple[int, int, int, int]


class Bath:
    """Pair densities ``s_{ab,cd}(w)`` keyed by level quadruples."""

    def density(self, pair: Pair) -> SpectralDensity:
        raise NotImplementedError

    def g(self, pair: Pair, t: float, temperature: float = 0.0, conj: bool = False) -> complex:
        val = lineshape_g(self.density(pair), t, temperature)
        return val.conjugate() if conj else val


@dataclass(frozen=True)
class PairBath(Bath):
    """Explicit mapping from quadruples to densities; missing pairs raise."""

    densities: Mapping[Pair, SpectralDensity]

    def density(self, pair: Pair) -> SpectralDensity:
        try:
            return self.densities[tuple(pair)]
        except KeyError:
            raise PathwayError(f"no spectral density for pair {pair}") from None


@dataclass(frozen=True)
class LevelCoupledBath(Bath):
    """``s_{ab,cd} = (d_a - d_b)(d_c - d_d) J(w)`` for per-level couplings ``d``."""

    couplings: tuple[float, ...]
    spectral: SpectralDensity

    def density(self, pair: Pair) -> SpectralDensity:
        d = self.couplings
        a, b, c, e = pair
        return ScaledDensity((d[a] - d[b]) * (d[c] - d[e]), self.spectral)


def delta_bath(z: Sequence[float], omega: float = 1.0) -> LevelCoupledBath:
    """A single mode seen as a bath: one delta peak with level couplings ``z``."""
    return LevelCoupledBath(tuple(z), DiscreteDensity((omega,), (1.0,)))


# tabulated third-order bath exponents: (pair, pair, window, conjugated)
_WINDOWS = {"1": (1, 1), "2": (2, 2), "3": (3, 3), "12": (1, 2), "23": (2, 3), "13": (1, 3)}


def _g(a, b, window, conj=False):
    return (a, b, _WINDOWS[window], conj)


BATH_TABLES = {
    1: (_g("0j", "k0", "1", True), _g("j0", "k0", "2"), _g("0j", "k0", "3", True),
        _g("0j", "j0", "12", True), _g("k0", "0k", "23"), _g("0j", "0k", "13", True)),
    2: (_g("0j", "j0", "1", True), _g("j0", "k0", "2", True), _g("0k", "k0", "3"),
        _g("0j", "k0", "12", True), _g("j0", "0k", "23", True), _g("0j", "0k", "13", True)),
    3: (_g("0j", "k0", "1", True), _g("k0", "lk", "2"), _g("lk", "jl", "3"),
        _g("j0", "kl", "12", True), _g("0k", "lj", "23"), _g("j0", "lj", "13", True)),
    4: (_g("0j", "k0", "1"), _g("0k", "k0", "2", True), _g("0j", "k0", "3", True),
        _g("j0", "k0", "12"), _g("j0", "k0", "23", True), _g("0j", "j0", "13")),
    5: (_g("0j", "j0", "1"), _g("0j", "k0", "2"), _g("0k", "k0", "3"),
        _g("j0", "k0", "12"), _g("j0", "k0", "23"), _g("0j", "k0", "13")),
    6: (_g("0j", "k0", "1"), _g("0k", "lj", "2", True), _g("lk", "jl", "3"),
        _g("j0", "lj", "12"), _g("k0", "lk", "23", True), _g("0j", "lk", "13")),
    7: (_g("j0", "lj", "1"), _g("0k", "lj", "2"), _g("0k", "kl", "3", True),
        _g("0j", "k0", "12"), _g("jl", "lk", "23"), _g("0j", "lk", "13")),
    8: (_g("0j", "jl", "1"), _g("kl", "lj", "2"), _g("0k", "kl", "3"),
        _g("0j", "lk", "12"), _g("0k", "lj", "23"), _g("0j", "k0", "13")),
}


def _level_lookup(kind, levels):
    if kind not in THIRD_ORDER_KINDS:
        raise PathwayError(f"third-order kind must be 1..8, got {kind}")
    need = 3 if kind in KINDS_WITH_DOUBLES else 2
    if len(levels) != need:
        raise PathwayError(f"kind {kind} needs {need} level indices")
    idx = {"0": 0, "j": levels[0], "k": levels[1]}
    if need == 3:
        idx["l"] = levels[2]
    return idx


def third_order_bath_exponent(kind: int, levels: Sequence[int], bath: Bath, times,
                              temperature: float = 0.0) -> complex:
    """Bath exponent of a third-order kind from the tabulated windows and pairs."""
    idx = _level_lookup(kind, levels)
    t = as_times(times, 3)
    f = 0j
    for a, b, (m, n), conj in BATH_TABLES[kind]:
        pair = (idx[a[0]], idx[a[1]], idx[b[0]], idx[b[1]])
        f += bath.g(pair, sum(t[m - 1:n]), temperature, conj)
    return f


def bath_exponent(form: ExponentForm, bath: Bath, times, temperature: float = 0.0, mode: int = 0) -> complex:
    """Bath exponent of any pathway: each ``z z' chi`` term becomes a ``g``."""
    if len(times) != form.order:
        raise PathwayError(f"expected {form.order} waiting times, got {len(times)}")
    f = 0j
    for term in form.for_mode(mode):
        (a, b), (c, d) = term.labels
        m, n = term.window
        f += bath.g((a, b, c, d), float(sum(times[m - 1:n])), temperature, term.conj)
    return f
