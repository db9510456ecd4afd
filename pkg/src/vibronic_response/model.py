"""Displaced-oscillator vibronic model, Feynman pathways and electronic factors.

Units: hbar = 1, energies and rates in units of the first mode frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

GROUND, SINGLE, DOUBLE = "ground", "single", "double"
KET, BRA = "ket", "bra"

THIRD_ORDER_KINDS = (1, 2, 3, 4, 5, 6, 7, 8)
KINDS_WITH_DOUBLES = (3, 6, 7, 8)


class ModelError(ValueError):
    """Invalid model definition."""


class PathwayError(ValueError):
    """Pathway inconsistent with itself or with a model."""


class ManifoldRequiredError(PathwayError):
    """A pathway kind needs a doubly excited manifold the model lacks."""


@dataclass(frozen=True)
class Mode:
    """One harmonic mode: frequency and per-level displacements z_j."""

    frequency: float
    displacements: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "frequency", float(self.frequency))
        object.__setattr__(
            self, "displacements", tuple(float(z) for z in self.displacements)
        )
        if not self.frequency > 0:
            raise ModelError(f"mode frequency must be positive, got {self.frequency}")
        if self.displacements and self.displacements[0] != 0.0:
            raise ModelError("ground-state displacement z_0 must be exactly 0")


@dataclass(frozen=True)
class VibronicModel:
    """N electronic levels linearly coupled to B displaced harmonic modes.

    Parameters
    ----------
    energies : sequence of float
        Electronic energies, ``energies[0] == 0``.
    modes : sequence of Mode
        Each mode carries one displacement per level.
    manifolds : sequence of str, optional
        ``"ground" | "single" | "double"`` per level. Defaults to level 0
        ground and every other level singly excited.
    dipoles : (N, N) array_like, optional
        Transition dipoles. ``None`` means unit dipoles everywhere.
    kappa : float
        Vibrational decay rate, shared by all levels.
    gamma_electronic : float
        Electronic dephasing rate, only used to broaden spectra.
    names : sequence of str, optional
        Level names used by the pathway DSL; defaults to ``"0", "1", ...``.
    """

    energies: tuple[float, ...]
    modes: tuple[Mode, ...]
    manifolds: tuple[str, ...] = ()
    dipoles: np.ndarray | None = field(default=None, compare=False)
    kappa: float = 0.0
    gamma_electronic: float = 0.0
    names: tuple[str, ...] = ()

    def __post_init__(self):
        energies = tuple(float(e) for e in self.energies)
        n = len(energies)
        if n < 1:
            raise ModelError("model needs at least one level")
        if energies[0] != 0.0:
            raise ModelError("ground-state energy must be exactly 0")
        modes = tuple(self.modes)
        if not modes:
            raise ModelError("model needs at least one mode")
        for i, mode in enumerate(modes):
            if len(mode.displacements) != n:
                raise ModelError(
                    f"mode {i} has {len(mode.displacements)} displacements, expected {n}"
                )
        manifolds = tuple(self.manifolds) or (GROUND,) + (SINGLE,) * (n - 1)
        if len(manifolds) != n:
            raise ModelError(f"expected {n} manifold tags, got {len(manifolds)}")
        for tag in manifolds:
            if tag not in (GROUND, SINGLE, DOUBLE):
                raise ModelError(f"unknown manifold tag {tag!r}")
        if manifolds[0] != GROUND or GROUND in manifolds[1:]:
            raise ModelError("level 0, and only level 0, must be tagged ground")
        names = tuple(str(s) for s in self.names) or tuple(str(i) for i in range(n))
        if len(names) != n or len(set(names)) != n:
            raise ModelError("level names must be unique, one per level")
        if self.kappa < 0 or self.gamma_electronic < 0:
            raise ModelError("kappa and gamma_electronic must be nonnegative")
        dipoles = self.dipoles
        if dipoles is not None:
            dipoles = np.array(dipoles, dtype=complex)
            if dipoles.shape != (n, n):
                raise ModelError(f"dipole matrix must be {n}x{n}")
            dipoles.setflags(write=False)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "manifolds", manifolds)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "dipoles", dipoles)
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "gamma_electronic", float(self.gamma_electronic))

    @property
    def n_levels(self) -> int:
        return len(self.energies)

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def z(self) -> tuple[float, ...]:
        """Displacements of the first mode."""
        return self.modes[0].displacements

    @property
    def omega(self) -> float:
        return self.modes[0].frequency

    def levels_in(self, manifold: str) -> list[int]:
        return [i for i, tag in enumerate(self.manifolds) if tag == manifold]

    def dipole(self, a: int, b: int) -> complex:
        if self.dipoles is None:
            return 1.0 + 0j
        return complex(self.dipoles[a, b])

    def level_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise PathwayError(f"unknown level name {name!r}") from None

    # convenience constructors used throughout tests and demos
    @classmethod
    def single_mode(cls, energies, z, manifolds=(), omega=1.0, **kw) -> "VibronicModel":
        return cls(tuple(energies), (Mode(omega, tuple(z)),), tuple(manifolds), **kw)

    @classmethod
    def two_level(cls, z1: float, eps1: float = 0.0, **kw) -> "VibronicModel":
        return cls.single_mode((0.0, eps1), (0.0, z1), **kw)

    @classmethod
    def v_scheme(cls, z1, z2, eps=(0.0, 0.0), **kw) -> "VibronicModel":
        return cls.single_mode((0.0, *eps), (0.0, z1, z2), (GROUND, SINGLE, SINGLE), **kw)

    @classmethod
    def xi_scheme(cls, z1, z2, eps=(0.0, 0.0), **kw) -> "VibronicModel":
        return cls.single_mode((0.0, *eps), (0.0, z1, z2), (GROUND, SINGLE, DOUBLE), **kw)


@dataclass(frozen=True)
class Interaction:
    side: str
    from_state: int
    to_state: int


@dataclass(frozen=True)
class Pathway:
    """Time-ordered field interactions of a double-sided Feynman diagram.

    Interaction ``i`` (0-based) happens at the start of waiting time
    ``t_{i+1}``. The system starts in ``|0><0|``.
    """

    interactions: tuple[Interaction, ...]

    def __post_init__(self):
        interactions = tuple(self.interactions)
        object.__setattr__(self, "interactions", interactions)
        if not interactions:
            raise PathwayError("pathway needs at least one interaction")
        current = {KET: 0, BRA: 0}
        for i, inter in enumerate(interactions):
            if inter.side not in (KET, BRA):
                raise PathwayError(f"interaction {i + 1}: side must be ket or bra")
            if inter.from_state != current[inter.side]:
                raise PathwayError(
                    f"interaction {i + 1}: {inter.side} departs from level "
                    f"{inter.from_state} but is in level {current[inter.side]}"
                )
            if inter.to_state == inter.from_state:
                raise PathwayError(f"interaction {i + 1}: transition must change level")
            current[inter.side] = inter.to_state

    @property
    def order(self) -> int:
        return len(self.interactions)

    def sequences(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Ket levels ``k_j`` and bra levels ``b_j`` during each waiting time."""
        ket, bra = [], []
        current = {KET: 0, BRA: 0}
        for inter in self.interactions:
            current[inter.side] = inter.to_state
            ket.append(current[KET])
            bra.append(current[BRA])
        return tuple(ket), tuple(bra)

    @property
    def detection(self) -> tuple[int, int]:
        """(ket, bra) levels at the end; the signal is emitted from this coherence."""
        ket, bra = self.sequences()
        return ket[-1], bra[-1]

    @property
    def n_bra(self) -> int:
        return sum(1 for inter in self.interactions if inter.side == BRA)

    @property
    def n_ket(self) -> int:
        return self.order - self.n_bra

    def levels(self) -> set[int]:
        out = {0}
        for inter in self.interactions:
            out.update((inter.from_state, inter.to_state))
        return out

    def check_model(self, model: VibronicModel) -> None:
        bad = [lv for lv in self.levels() if not 0 <= lv < model.n_levels]
        if bad:
            raise PathwayError(f"levels {sorted(bad)} not in a {model.n_levels}-level model")


def _ket(a, b):
    return Interaction(KET, a, b)


def _bra(a, b):
    return Interaction(BRA, a, b)


def third_order_pathway(kind: int, levels: Sequence[int]) -> Pathway:
    """The kind-``kind`` third-order diagram for levels ``(j, k[, l])``."""
    j, k = levels[0], levels[1]
    if kind in KINDS_WITH_DOUBLES:
        if len(levels) != 3:
            raise PathwayError(f"kind {kind} needs levels (j, k, l)")
        l = levels[2]
    elif len(levels) != 2:
        raise PathwayError(f"kind {kind} needs levels (j, k)")
    table = {
        1: (_bra(0, j), _ket(0, k), _bra(j, 0)),
        2: (_bra(0, j), _bra(j, 0), _ket(0, k)),
        4: (_ket(0, j), _bra(0, k), _bra(k, 0)),
        5: (_ket(0, j), _ket(j, 0), _ket(0, k)),
    }
    if kind in KINDS_WITH_DOUBLES:
        table.update({
            3: (_bra(0, j), _ket(0, k), _ket(k, l)),
            6: (_ket(0, j), _bra(0, k), _ket(j, l)),
            7: (_ket(0, j), _ket(j, l), _bra(0, k)),
            8: (_ket(0, j), _ket(j, l), _ket(l, k)),
        })
    if kind not in table:
        raise PathwayError(f"third-order kind must be 1..8, got {kind}")
    return Pathway(table[kind])


def enumerate_third_order(model: VibronicModel, kind: int) -> list[tuple[tuple[int, ...], Pathway]]:
    """All ``(levels, pathway)`` pairs of one third-order kind.

    ``j, k`` run over singly excited levels and ``l`` over doubly excited ones.
    """
    if kind not in THIRD_ORDER_KINDS:
        raise PathwayError(f"third-order kind must be 1..8, got {kind}")
    singles = model.levels_in(SINGLE)
    out = []
    if kind in KINDS_WITH_DOUBLES:
        doubles = model.levels_in(DOUBLE)
        if not doubles:
            raise ManifoldRequiredError(
                f"kind {kind} needs a doubly excited manifold; tag at least one level 'double'"
            )
        for j in singles:
            for k in singles:
                for l in doubles:
                    out.append(((j, k, l), third_order_pathway(kind, (j, k, l))))
    else:
        for j in singles:
            for k in singles:
                out.append(((j, k), third_order_pathway(kind, (j, k))))
    return out


def _check_levels(model, kind, levels):
    need = 3 if kind in KINDS_WITH_DOUBLES else 2
    if len(levels) != need:
        raise PathwayError(f"kind {kind} needs {need} level indices")
    for lv in levels:
        if not 0 <= lv < model.n_levels:
            raise PathwayError(f"level {lv} out of range for a {model.n_levels}-level model")


def electronic_constant(model: VibronicModel, kind: int, levels: Sequence[int]) -> complex:
    """Dipole constant C of a third-order kind, as tabulated for each diagram.

    Kind 7 uses the same dipole combination as kind 6; see
    :func:`generic_electronic_constant` for the product read off the diagram.
    """
    _check_levels(model, kind, levels)
    mu = model.dipole
    j, k = levels[0], levels[1]
    i3 = 1j ** 3
    if kind in (1, 2, 4, 5):
        return i3 * abs(mu(0, j) * mu(0, k)) ** 2
    l = levels[2]
    if kind == 3:
        return -i3 * abs(mu(0, j)) ** 2 * mu(k, 0) * mu(l, k)
    if kind in (6, 7):
        return -i3 * abs(mu(0, k)) ** 2 * mu(j, 0) * mu(l, j)
    return i3 * mu(j, 0) * mu(l, j) * mu(l, k) * mu(k, 0)


def electronic_phase(model: VibronicModel, kind: int, levels: Sequence[int], times) -> float:
    """Electronic phase of a third-order kind (hbar = 1)."""
    _check_levels(model, kind, levels)
    e = model.energies
    t1, t2, t3 = times
    j, k = levels[0], levels[1]
    ej, ek = e[j], e[k]
    el = e[levels[2]] if len(levels) == 3 else 0.0
    phases = {
        1: ej * (t1 + t2) - ek * (t2 + t3),
        2: ej * t1 - ek * t3,
        3: ej * (t1 + t2 + t3) - ek * t2 - el * t3,
        4: ek * t2 - ej * (t1 + t2 + t3),
        5: -(ej * t1 + ek * t3),
        6: ek * (t2 + t3) - ej * (t1 + t2) - el * t3,
        7: -(ej * t1 + el * (t2 + t3) - ek * t3),
        8: -(ej * t1 + el * t2 + ek * t3),
    }
    return phases[kind]


def electronic_prefactor(model: VibronicModel, kind: int, levels: Sequence[int], times) -> complex:
    """``C * exp(i * phase(t))`` for a third-order kind."""
    return electronic_constant(model, kind, levels) * np.exp(
        1j * electronic_phase(model, kind, levels, times)
    )


def generic_electronic_constant(model: VibronicModel, pathway: Pathway) -> complex:
    """``i^M (-1)^{n_bra}`` times the dipole product read off the diagram."""
    mu = model.dipole
    value = (1j ** pathway.order) * (-1) ** pathway.n_bra
    for inter in pathway.interactions:
        if inter.side == KET:
            value *= mu(inter.to_state, inter.from_state)
        else:
            value *= mu(inter.from_state, inter.to_state)
    ket, bra = pathway.detection
    return value * mu(bra, ket)


def generic_electronic_prefactor(model: VibronicModel, pathway: Pathway, times) -> complex:
    """Electronic factor of an arbitrary pathway: ``exp(-i sum (e_ket - e_bra) t)``."""
    ket, bra = pathway.sequences()
    e = model.energies
    phase = -sum((e[a] - e[b]) * t for a, b, t in zip(ket, bra, times))
    return generic_electronic_constant(model, pathway) * np.exp(1j * phase)


def displacements(model: VibronicModel, mode: int = 0) -> tuple[float, ...]:
    return model.modes[mode].displacements


def level_map(model: VibronicModel | Mapping[str, int] | None, extra: Mapping[str, int] | None = None) -> dict[str, int]:
    """Name -> index lookup for the DSL, with optional symbolic bindings on top."""
    if isinstance(model, VibronicModel):
        out = {name: i for i, name in enumerate(model.names)}
    elif model is None:
        out = {}
    else:
        out = dict(model)
    if extra:
        out.update(extra)
    return out


def as_times(times: Iterable[float], order: int) -> tuple[float, ...]:
    times = tuple(float(t) for t in times)
    if len(times) != order:
        raise PathwayError(f"expected {order} waiting times, got {len(times)}")
    return times
