"""Pathway DSL and the M-th order vibrational exponent.

Every field interaction and the final detection step is a jump between two
displaced oscillators. Walking the diagram from the bottom of the bra, up to
the detection step and down the ket, each pair of jumps contributes one term
``c (1 - exp(E))`` to ``ln R``, where ``E`` is the phase (and, with
relaxation, the decay) accumulated between the two jumps. ``M`` interactions
plus detection give ``M (M + 1) / 2`` pairs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .model import (
    BRA,
    KET,
    Interaction,
    Pathway,
    PathwayError,
    VibronicModel,
    generic_electronic_prefactor,
    level_map,
)


class DSLError(PathwayError):
    """Malformed pathway script; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


# --- DSL -------------------------------------------------------------------

_LINE = re.compile(r"^(\s*)(\S+)(\s+)(\S+?)\s*->\s*(\S+)\s*$")

PRESETS: dict[str, str] = {
    "se-r": "bra 0->j\nket 0->k\nbra j->0\n",
    "gsb-r": "bra 0->j\nbra j->0\nket 0->k\n",
    "esa-r": "bra 0->j\nket 0->k\nket k->l\n",
    "se-nr": "ket 0->j\nbra 0->k\nbra k->0\n",
    "gsb-nr": "ket 0->j\nket j->0\nket 0->k\n",
    "esa-nr": "ket 0->j\nbra 0->k\nket j->l\n",
    "dqc-1": "ket 0->j\nket j->l\nbra 0->k\n",
    "dqc-2": "ket 0->j\nket j->l\nket l->k\n",
}
PRESET_KINDS = {"se-r": 1, "gsb-r": 2, "esa-r": 3, "se-nr": 4, "gsb-nr": 5,
                "esa-nr": 6, "dqc-1": 7, "dqc-2": 8}


def _resolve(token: str, names: Mapping[str, int], line: int, column: int) -> int:
    if token in names:
        return names[token]
    if re.fullmatch(r"\d+", token):
        return int(token)
    raise DSLError(f"unknown level name {token!r}", line, column)


def parse_pathway(text: str, model: VibronicModel | Mapping[str, int] | None = None,
                  bindings: Mapping[str, int] | None = None) -> Pathway:
    """Parse a line-oriented pathway script.

    Each non-blank line is ``<side> <from> -> <to>`` with side ``ket`` or
    ``bra``; ``#`` starts a comment. Level tokens are looked up in
    ``bindings``, then in the model's level names, then read as integers.

    Examples
    --------
    >>> parse_pathway("bra 0->j\\nbra j->0\\nket 0->k", bindings={"j": 1, "k": 1}).order
    3
    """
    names = level_map(model, bindings)
    interactions = []
    current = {KET: 0, BRA: 0}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        m = _LINE.match(body)
        if not m:
            col = len(body) - len(body.lstrip()) + 1
            raise DSLError("expected '<ket|bra> <from> -> <to>'", lineno, col)
        side = m.group(2).lower()
        if side not in (KET, BRA):
            raise DSLError(f"side must be 'ket' or 'bra', got {m.group(2)!r}", lineno, m.start(2) + 1)
        a = _resolve(m.group(4), names, lineno, m.start(4) + 1)
        b = _resolve(m.group(5), names, lineno, m.start(5) + 1)
        if a != current[side]:
            raise DSLError(f"{side} is in level {current[side]}, cannot depart from {a}",
                           lineno, m.start(4) + 1)
        if a == b:
            raise DSLError("transition must change level", lineno, m.start(5) + 1)
        if isinstance(model, VibronicModel):
            for lv, g in ((a, 4), (b, 5)):
                if not 0 <= lv < model.n_levels:
                    raise DSLError(f"level {lv} outside the {model.n_levels}-level model",
                                   lineno, m.start(g) + 1)
        current[side] = b
        interactions.append(Interaction(side, a, b))
    if not interactions:
        raise DSLError("empty pathway", 1, 1)
    return Pathway(tuple(interactions))


def preset_pathway(name: str, levels: Sequence[int]) -> Pathway:
    """One of the eight named third-order scripts with ``j, k[, l]`` bound."""
    if name not in PRESETS:
        raise PathwayError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    bindings = dict(zip("jkl", levels))
    return parse_pathway(PRESETS[name], bindings=bindings)


def format_pathway(pathway: Pathway, names: Sequence[str] = ()) -> str:
    label = (lambda i: names[i]) if names else str
    return "".join(f"{x.side} {label(x.from_state)}->{label(x.to_state)}\n"
                   for x in pathway.interactions)


# --- exponent ----------------------------------------------------------------

@dataclass(frozen=True)
class Jump:
    """One arrow of the diagram, or the detection step (``time = M + 1``)."""

    side: str  # ket, bra or "det"
    time: int  # 1-based interaction index
    before: int  # level before the jump, in traversal order
    after: int

    def value(self, z: Sequence[float]) -> float:
        return z[self.before] - z[self.after]


@dataclass(frozen=True)
class ExponentTerm:
    """``coeff * (1 - exp(E))`` with ``E`` accumulated between two jumps.

    ``ket_span`` and ``bra_span`` are inclusive waiting-time ranges (or None)
    spent on each side of the closed time contour between the two jumps. At
    zero decay ``E = +/- i omega (t_m + ... + t_n)`` with ``(m, n) = window``.
    """

    coeff: float
    window: tuple[int, int]
    conj: bool
    mode: int
    labels: tuple[tuple[int, int], tuple[int, int]]
    ket_span: tuple[int, int] | None
    bra_span: tuple[int, int] | None
    omega: float = 1.0

    @property
    def sign(self) -> int:
        return 1 if self.conj else -1

    def label(self, names: Sequence[str] = ()) -> str:
        nm = (lambda i: names[i]) if names else str
        return " ".join(f"z_{{{nm(a)}{nm(b)}}}" for a, b in self.labels)

    def phase_argument(self, times, kappa: float = 0.0):
        """``E`` for array-valued ``times`` (indexable by waiting time)."""
        e = 0j
        if self.ket_span is not None:
            e = e - (1j * self.omega + kappa / 2) * _span_sum(times, self.ket_span)
        if self.bra_span is not None:
            e = e + (1j * self.omega - kappa / 2) * _span_sum(times, self.bra_span)
        return e


def _span_sum(times, span):
    m, n = span
    total = 0.0
    for i in range(m - 1, n):
        total = total + np.asarray(times[i], dtype=float)
    return total


@dataclass(frozen=True)
class ExponentForm:
    order: int
    terms: tuple[ExponentTerm, ...]
    constant: float = 0.0

    def for_mode(self, mode: int) -> tuple[ExponentTerm, ...]:
        return tuple(t for t in self.terms if t.mode == mode)

    @property
    def h(self) -> dict[int, float]:
        """Per-mode ``h`` with ``f = -h - sum coeff e^{E}``, i.e. ``h = -sum coeff``."""
        out: dict[int, float] = {}
        for t in self.terms:
            out[t.mode] = out.get(t.mode, 0.0) - t.coeff
        return out


def jumps(pathway: Pathway) -> list[Jump]:
    """Arrows in traversal order: bra upward, detection, ket downward."""
    bra = [Jump(BRA, i + 1, x.from_state, x.to_state)
           for i, x in enumerate(pathway.interactions) if x.side == BRA]
    ket = [Jump(KET, i + 1, x.to_state, x.from_state)
           for i, x in enumerate(pathway.interactions) if x.side == KET]
    k_end, b_end = pathway.detection
    det = Jump("det", pathway.order + 1, b_end, k_end)
    return bra + [det] + ket[::-1]


def _spans(a: Jump, b: Jump, order: int):
    """Ket and bra waiting-time ranges on the contour between two jumps."""
    def ket_from(j):
        return (j.time, order) if j.time <= order else None

    (x, y) = sorted((a, b), key=lambda j: j.time)
    if x.side == KET and y.side == KET:
        return (x.time, y.time - 1), None
    if x.side == BRA and y.side == BRA:
        return None, (x.time, y.time - 1)
    # one of them is the detection step or they sit on opposite sides
    ket = next((j for j in (x, y) if j.side == KET), None)
    bra = next((j for j in (x, y) if j.side == BRA), None)
    return (ket_from(ket) if ket else None), (ket_from(bra) if bra else None)


def build_exponent(model: VibronicModel, pathway: Pathway) -> ExponentForm:
    """Symbolic ``ln R`` of a pathway: ``M (M + 1) / 2`` terms per mode."""
    pathway.check_model(model)
    order = pathway.order
    seq = jumps(pathway)
    terms = []
    for mode_index, mode in enumerate(model.modes):
        z = mode.displacements
        for ia in range(len(seq)):
            for ib in range(ia + 1, len(seq)):
                a, b = seq[ia], seq[ib]
                early, late = sorted((a, b), key=lambda j: j.time)
                assert early.time != late.time
                ket_span, bra_span = _spans(a, b, order)
                terms.append(ExponentTerm(
                    coeff=a.value(z) * b.value(z),
                    window=(early.time, late.time - 1),
                    conj=early.side == BRA,
                    mode=mode_index,
                    labels=((a.before, a.after), (b.before, b.after)),
                    ket_span=ket_span,
                    bra_span=bra_span,
                    omega=mode.frequency,
                ))
    terms.sort(key=lambda t: (t.mode, t.window[1] - t.window[0], t.window[0]))
    return ExponentForm(order, tuple(terms))


def exponent_value(form: ExponentForm, times, kappa: float = 0.0, mode: int | None = None):
    """``f(t_1..t_M)``; ``times`` may hold arrays that broadcast together."""
    if len(times) != form.order:
        raise PathwayError(f"expected {form.order} waiting times, got {len(times)}")
    f = 0j
    for term in form.terms:
        if mode is not None and term.mode != mode:
            continue
        f = f - term.coeff * np.expm1(term.phase_argument(times, kappa))
    return f


def evaluate(form: ExponentForm, times, kappa: float = 0.0):
    """Vibrational response ``exp(f)``, the product over all modes.

    With ``kappa > 0`` the decay enters through each term's ket and bra spans,
    which reproduces the non-Hermitian evolution exactly.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    return np.exp(exponent_value(form, times, kappa))


def multimode_response(model: VibronicModel, pathways: Sequence[Pathway], times,
                       kappa: float | None = None) -> complex:
    """Electronic factor times the product over modes, summed over pathways."""
    kappa = model.kappa if kappa is None else kappa
    total = 0j
    for p in pathways:
        form = build_exponent(model, p)
        total += generic_electronic_prefactor(model, p, times) * evaluate(form, times, kappa)
    return complex(total)


def term_table(form: ExponentForm, names: Sequence[str] = ()) -> str:
    """Plain-text listing of the exponent, one term per line."""
    rows = ["mode  window  factor     prefactor         coeff"]
    for t in form.terms:
        m, n = t.window
        win = f"t{m}" if m == n else f"t{m}..t{n}"
        fac = "chi*" if t.conj else "chi"
        rows.append(f"{t.mode:>4}  {win:<7} {fac:<10} {t.label(names):<17} {t.coeff:+.6g}")
    return "\n".join(rows) + "\n"


def reduced_terms(form: ExponentForm, zero: Sequence[int] = (), mode: int = 0,
                  tol: float = 1e-14) -> dict[tuple[int, ...], float]:
    """Collect ``f`` as ``{p: c}`` meaning ``sum c exp(i omega p . t)``.

    Waiting times listed in ``zero`` (1-based) are set to zero before equal
    exponentials are merged. The key of all zeros holds the constant part.
    Zero decay only.
    """
    out: dict[tuple[int, ...], float] = {}
    zero = set(zero)
    const = tuple(0 for _ in range(form.order))
    for t in form.for_mode(mode):
        m, n = t.window
        p = tuple(t.sign if (m <= i <= n and i not in zero) else 0
                  for i in range(1, form.order + 1))
        out[const] = out.get(const, 0.0) + t.coeff
        out[p] = out.get(p, 0.0) - t.coeff
    return {p: c for p, c in out.items() if abs(c) > tol}
