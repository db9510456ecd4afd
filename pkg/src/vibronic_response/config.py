"""YAML model configuration with line/column error reporting.

Schema (all energies and rates in units of the first mode frequency)::

    levels:                    # required, level 0 first
      - {name: g, energy: 0, manifold: ground}
      - {name: e1, energy: 2.0, manifold: single}
    modes:                     # required, one displacement per level
      - {frequency: 1.0, displacements: [0, 0.4]}
    dipoles: [[0, 1], [1, 0]]  # optional N x N; entries real or "a+bj"
    kappa: 0.0                 # optional, one rate shared by all levels
    gamma: 0.15                # optional electronic dephasing for spectra
    bath:                      # optional, see BathConfig
      couplings: [0, 0.3]
      density: {family: ohmic, eta: 0.1, omega_c: 2.0}
    pathway: |                 # optional, DSL text or a list of mappings
      ket 0->e1
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from .general import DSLError, parse_pathway
from .model import Interaction, Mode, ModelError, Pathway, PathwayError, VibronicModel
from .thermal import Bath, LevelCoupledBath, OhmicDensity, PowerLawDensity, TabulatedDensity


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 source: str = "<config>"):
        where = f"{source}:{line}:{column}: " if line is not None else f"{source}: "
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class LoadedConfig:
    model: VibronicModel
    bath: Bath | None
    pathway: Pathway | None
    digest: str  # sha256 of the raw text


class _Reader:
    """Walks composed YAML nodes so every error can cite a position."""

    def __init__(self, source: str):
        self.source = source

    def fail(self, node, message):
        if node is None:
            raise ConfigError(message, source=self.source)
        mark = node.start_mark
        raise ConfigError(message, mark.line + 1, mark.column + 1, self.source)

    def mapping(self, node, what) -> dict[str, tuple[Any, Any]]:
        if not isinstance(node, yaml.MappingNode):
            self.fail(node, f"{what} must be a mapping")
        out = {}
        for key, value in node.value:
            if not isinstance(key, yaml.ScalarNode):
                self.fail(key, "mapping keys must be plain names")
            if key.value in out:
                self.fail(key, f"duplicate key {key.value!r}")
            out[key.value] = (key, value)
        return out

    def sequence(self, node, what):
        if not isinstance(node, yaml.SequenceNode):
            self.fail(node, f"{what} must be a list")
        return node.value

    def scalar(self, node, what):
        if not isinstance(node, yaml.ScalarNode):
            self.fail(node, f"{what} must be a single value")
        return yaml.safe_load(yaml.serialize(node))

    def number(self, node, what, minimum=None, positive=False) -> float:
        value = self.scalar(node, what)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(node, f"{what} must be a number, got {value!r}")
        value = float(value)
        if positive and not value > 0:
            self.fail(node, f"{what} must be positive")
        if minimum is not None and value < minimum:
            self.fail(node, f"{what} must be >= {minimum}")
        return value

    def complex_number(self, node, what) -> complex:
        value = self.scalar(node, what)
        if isinstance(value, bool):
            self.fail(node, f"{what} must be a number")
        try:
            return complex(str(value).replace(" ", "")) if isinstance(value, str) else complex(value)
        except (TypeError, ValueError):
            self.fail(node, f"{what} must be a number like 0.5 or '1+0.2j'")

    def unknown(self, fields, allowed, what):
        for name, (key, _) in fields.items():
            if name not in allowed:
                self.fail(key, f"unknown {what} field {name!r}; allowed: {', '.join(sorted(allowed))}")


def _levels(r: _Reader, node):
    names, energies, manifolds = [], [], []
    for i, item in enumerate(r.sequence(node, "levels")):
        fields = r.mapping(item, f"level {i}")
        if "kappa" in fields:
            r.fail(fields["kappa"][0], "per-level kappa is not supported; set a single top-level kappa")
        r.unknown(fields, {"name", "energy", "manifold"}, "level")
        if "energy" not in fields:
            r.fail(item, f"level {i} needs an energy")
        names.append(str(r.scalar(fields["name"][1], "name")) if "name" in fields else str(i))
        energies.append(r.number(fields["energy"][1], "energy"))
        default = "ground" if i == 0 else "single"
        manifolds.append(str(r.scalar(fields["manifold"][1], "manifold")) if "manifold" in fields else default)
        if manifolds[-1] not in ("ground", "single", "double"):
            r.fail(fields["manifold"][1], "manifold must be ground, single or double")
    if not energies:
        r.fail(node, "levels must not be empty")
    return names, energies, manifolds


def _modes(r: _Reader, node, n):
    modes = []
    for i, item in enumerate(r.sequence(node, "modes")):
        fields = r.mapping(item, f"mode {i}")
        r.unknown(fields, {"frequency", "displacements"}, "mode")
        freq = r.number(fields["frequency"][1], "frequency", positive=True) if "frequency" in fields else 1.0
        if "displacements" not in fields:
            r.fail(item, f"mode {i} needs displacements")
        dnode = fields["displacements"][1]
        zs = [r.number(x, "displacement") for x in r.sequence(dnode, "displacements")]
        if len(zs) != n:
            r.fail(dnode, f"expected {n} displacements (one per level), got {len(zs)}")
        if zs[0] != 0:
            r.fail(dnode, "ground-state displacement must be 0")
        modes.append(Mode(freq, tuple(zs)))
    if not modes:
        r.fail(node, "modes must not be empty")
    return modes


def _dipoles(r: _Reader, node, n):
    rows = r.sequence(node, "dipoles")
    if len(rows) != n:
        r.fail(node, f"dipoles must have {n} rows")
    out = []
    for row in rows:
        vals = [r.complex_number(x, "dipole") for x in r.sequence(row, "dipole row")]
        if len(vals) != n:
            r.fail(row, f"dipole rows must have {n} entries")
        out.append(vals)
    return out


def _bath(r: _Reader, node, n, base: Path | None):
    fields = r.mapping(node, "bath")
    r.unknown(fields, {"couplings", "density"}, "bath")
    if "couplings" not in fields or "density" not in fields:
        r.fail(node, "bath needs couplings and density")
    cnode = fields["couplings"][1]
    couplings = [r.number(x, "coupling") for x in r.sequence(cnode, "couplings")]
    if len(couplings) != n:
        r.fail(cnode, f"expected {n} couplings")
    dnode = fields["density"][1]
    d = r.mapping(dnode, "density")
    family = str(r.scalar(d["family"][1], "family")) if "family" in d else None
    if family == "ohmic":
        r.unknown(d, {"family", "eta", "omega_c"}, "ohmic density")
        density = OhmicDensity(r.number(d["eta"][1], "eta"), r.number(d["omega_c"][1], "omega_c", positive=True))
    elif family == "power":
        r.unknown(d, {"family", "eta", "omega_c", "exponent"}, "power-law density")
        density = PowerLawDensity(r.number(d["eta"][1], "eta"),
                                  r.number(d["omega_c"][1], "omega_c", positive=True),
                                  r.number(d["exponent"][1], "exponent", positive=True) if "exponent" in d else 1.0)
    elif family == "table":
        r.unknown(d, {"family", "file"}, "tabulated density")
        path = Path(str(r.scalar(d["file"][1], "file")))
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            density = TabulatedDensity.from_text(path.read_text())
        except (OSError, ValueError) as exc:
            r.fail(d["file"][1], f"cannot read density table: {exc}")
    else:
        r.fail(dnode, "density family must be ohmic, power or table")
    return LevelCoupledBath(tuple(couplings), density)


def _script_position(node, text: str, line: int, column: int) -> tuple[int, int]:
    """File position of a (line, column) inside a scalar pathway script."""
    mark = node.start_mark
    if node.style in ("|", ">"):
        # block scalars start on the line after the indicator
        file_line = mark.line + 1 + line
        raw = text.splitlines()[file_line - 1] if file_line <= len(text.splitlines()) else ""
        indent = len(raw) - len(raw.lstrip(" "))
        return file_line, indent + column
    quote = 1 if node.style in ("'", '"') else 0
    return mark.line + line, mark.column + quote + column if line == 1 else column


def _pathway(r: _Reader, node, model: VibronicModel, text: str):
    if isinstance(node, yaml.ScalarNode):
        try:
            return parse_pathway(str(node.value), model)
        except DSLError as exc:
            line, column = _script_position(node, text, exc.line, exc.column)
            message = str(exc).split(": ", 1)[-1]
            raise ConfigError(f"pathway: {message}", line, column, r.source) from None
        except PathwayError as exc:
            r.fail(node, f"pathway: {exc}")
    steps = []
    for item in r.sequence(node, "pathway"):
        f = r.mapping(item, "pathway step")
        r.unknown(f, {"side", "from", "to"}, "pathway step")
        try:
            side = str(r.scalar(f["side"][1], "side"))
            a, b = (str(r.scalar(f[k][1], k)) for k in ("from", "to"))
        except KeyError:
            r.fail(item, "pathway steps need side, from and to")
        steps.append(f"{side} {a}->{b}")
        try:
            parse_pathway("\n".join(steps), model)
        except PathwayError as exc:
            r.fail(item, str(exc).split(": ", 1)[-1])
    return parse_pathway("\n".join(steps), model)


def load_config_text(text: str, source: str = "<config>", base: Path | None = None) -> LoadedConfig:
    r = _Reader(source)
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise ConfigError(f"YAML syntax: {exc.problem}", mark.line + 1, mark.column + 1, source) from None
        raise ConfigError(f"YAML syntax: {exc}", source=source) from None
    if root is None:
        raise ConfigError("empty configuration", source=source)
    fields = r.mapping(root, "configuration")
    r.unknown(fields, {"levels", "modes", "dipoles", "kappa", "gamma", "bath", "pathway"}, "top-level")
    for required in ("levels", "modes"):
        if required not in fields:
            r.fail(root, f"missing required section {required!r}")
    names, energies, manifolds = _levels(r, fields["levels"][1])
    n = len(energies)
    modes = _modes(r, fields["modes"][1], n)
    dipoles = _dipoles(r, fields["dipoles"][1], n) if "dipoles" in fields else None
    kappa = gamma = 0.0
    if "kappa" in fields:
        knode = fields["kappa"][1]
        if not isinstance(knode, yaml.ScalarNode):
            r.fail(knode, "per-level kappa is not supported; kappa must be a single number")
        kappa = r.number(knode, "kappa", minimum=0.0)
    if "gamma" in fields:
        gamma = r.number(fields["gamma"][1], "gamma", minimum=0.0)
    try:
        model = VibronicModel(tuple(energies), tuple(modes), tuple(manifolds), dipoles, kappa, gamma, tuple(names))
    except ModelError as exc:
        r.fail(fields["levels"][1], str(exc))
    bath = _bath(r, fields["bath"][1], n, base) if "bath" in fields else None
    pathway = _pathway(r, fields["pathway"][1], model, text) if "pathway" in fields else None
    digest = hashlib.sha256(text.encode()).hexdigest()
    return LoadedConfig(model, bath, pathway, digest)


def load_config(path: str | Path) -> LoadedConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read: {exc.strerror}", source=str(path)) from None
    return load_config_text(text, str(path), path.parent)


def pathway_from_steps(steps) -> Pathway:
    """Structured alternative to the DSL: ``[(side, from, to), ...]``."""
    return Pathway(tuple(Interaction(s, int(a), int(b)) for s, a, b in steps))
