"""Command-line entry point ``vibresp``.

Every subcommand writes deterministic CSV (or a plain-text table) with
``#`` comment headers that record the configuration digest and the
truncations in use. Exit codes: 0 ok, 2 configuration or usage error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import io
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .config import ConfigError, LoadedConfig, load_config
from .fock import DEFAULT_NMAX, MIXTURE_TOLERANCE, TOP_TOLERANCE
from .general import (
    PRESET_KINDS,
    PRESETS,
    build_exponent,
    evaluate,
    format_pathway,
    parse_pathway,
    preset_pathway,
    term_table,
)
from .model import (
    KINDS_WITH_DOUBLES,
    ModelError,
    Pathway,
    PathwayError,
    enumerate_third_order,
    generic_electronic_prefactor,
)
from .spectral import DEFAULT_P2MAX, DEFAULT_QMAX, Axis, peak_amplitude, spectrum_2d
from .thermal import bath_exponent, delta_phase, thermal_response
from .verify import format_table, run_suite

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 2, 3


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    """Uniform axes for some waiting times, fixed values for the rest."""

    axes: tuple[Axis | float, ...]

    @classmethod
    def parse(cls, specs: Sequence[str | None], order: int) -> "TimeGrid":
        axes = []
        for i in range(order):
            spec = specs[i] if i < len(specs) else None
            axes.append(_parse_axis(spec, i + 1))
        return cls(tuple(axes))

    def mesh(self) -> list[np.ndarray]:
        vals = [a.values if isinstance(a, Axis) else np.array([a]) for a in self.axes]
        return [m.ravel() for m in np.meshgrid(*vals, indexing="ij")]

    def describe(self) -> str:
        parts = []
        for i, a in enumerate(self.axes, start=1):
            if isinstance(a, Axis):
                parts.append(f"t{i}={a.start!r}:{a.step!r}:{a.count}")
            else:
                parts.append(f"t{i}={a!r}")
        return " ".join(parts)


def _parse_axis(spec: str | None, index: int):
    if spec is None:
        return 0.0
    try:
        bits = spec.split(":")
        if len(bits) == 1:
            return float(bits[0])
        if len(bits) != 3:
            raise ValueError
        return Axis(float(bits[0]), float(bits[1]), int(bits[2]))
    except ValueError as exc:
        detail = f" ({exc})" if str(exc) else ""
        raise UsageError(f"--t{index} expects VALUE or START:STEP:COUNT, got {spec!r}{detail}") from None


def _levels_arg(text: str | None, model, kind: int | None):
    if text is None:
        return None
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in model.names:
            out.append(model.names.index(tok))
        elif tok.isdigit():
            out.append(int(tok))
        else:
            raise UsageError(f"unknown level {tok!r} in --levels")
    need = 3 if kind in KINDS_WITH_DOUBLES else 2
    if kind is not None and len(out) != need:
        raise UsageError(f"kind {kind} needs {need} levels in --levels")
    return tuple(out)


def _select_pathways(args, cfg: LoadedConfig) -> tuple[list[Pathway], str]:
    model = cfg.model
    chosen = [x for x in (args.kind, args.preset, args.pathway) if x is not None]
    if len(chosen) > 1:
        raise UsageError("give only one of --kind, --preset, --pathway")
    if args.pathway is not None:
        try:
            with open(args.pathway) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.pathway}: {exc.strerror}") from None
        try:
            return [parse_pathway(text, model)], f"file {args.pathway}"
        except PathwayError as exc:
            raise ConfigError(str(exc), source=args.pathway) from None
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise UsageError(f"unknown preset {args.preset!r}; choose from {', '.join(sorted(PRESETS))}")
        kind = PRESET_KINDS[args.preset]
        label = f"preset {args.preset}"
    elif args.kind is not None:
        kind = args.kind
        label = f"kind {kind}"
    elif cfg.pathway is not None:
        return [cfg.pathway], "config pathway"
    else:
        raise UsageError("select a pathway with --kind, --preset or --pathway")
    levels = _levels_arg(getattr(args, "levels", None), model, kind)
    if levels is not None:
        return [preset_pathway(_preset_for(kind), levels)], f"{label} levels {levels}"
    return [p for _, p in enumerate_third_order(model, kind)], f"{label} summed over pathways"


def _preset_for(kind: int) -> str:
    return next(name for name, k in PRESET_KINDS.items() if k == kind)


class _CachedBath:
    """Memoises line-shape integrals; grid points share window sums."""

    def __init__(self, bath):
        self.bath = bath
        self.cache: dict = {}

    def g(self, pair, t, temperature=0.0, conj=False):
        key = (tuple(pair), round(float(t), 12), temperature)
        if key not in self.cache:
            self.cache[key] = self.bath.g(pair, t, temperature)
        val = self.cache[key]
        return val.conjugate() if conj else val


def _response(cfg: LoadedConfig, pathways, times, temperature, kappa, alpha0, vib_only):
    """Sum over pathways on flattened time arrays."""
    model = cfg.model
    times = [np.asarray(t, dtype=float) for t in times]
    bath = _CachedBath(cfg.bath) if cfg.bath is not None else None
    total = np.zeros(times[0].shape, dtype=complex)
    for p in pathways:
        form = build_exponent(model, p)
        if temperature:
            vib = thermal_response(form, times, temperature)
        else:
            vib = evaluate(form, times, kappa)
        vib = np.asarray(vib, dtype=complex) * np.ones(times[0].shape)
        if alpha0:
            phase = [delta_phase(model, p, [t[i] for t in times], alpha0) for i in range(times[0].size)]
            vib = vib * np.exp(1j * np.array(phase))
        if bath is not None:
            g = [bath_exponent(form, bath, [t[i] for t in times], temperature or 0.0)
                 for i in range(times[0].size)]
            vib = vib * np.exp(np.array(g))
        if vib_only:
            total += vib
        else:
            total += generic_electronic_prefactor(model, p, times) * vib
    return total


def _fmt(x: float) -> str:
    return repr(float(x)) if x == x else "nan"


def _header(out, command: str, cfg: LoadedConfig, extra: Sequence[str]):
    out.write(f"# vibresp {__version__} {command}\n")
    out.write(f"# config sha256 {cfg.digest}\n")
    for line in extra:
        out.write(f"# {line}\n")


def _common_flags(args, cfg):
    kappa = cfg.model.kappa if args.kappa is None else args.kappa
    if kappa < 0:
        raise UsageError("--kappa must be nonnegative")
    if args.temperature is not None and args.temperature < 0:
        raise UsageError("--temperature must be nonnegative")
    if args.temperature and kappa:
        raise UsageError("temperature and relaxation (kappa) cannot be combined")
    if cfg.bath is not None and kappa:
        raise UsageError("a bath and relaxation (kappa) cannot be combined")
    if args.alpha0 is not None and kappa:
        raise UsageError("--alpha0 is only supported without relaxation")
    alpha0 = 0j
    if args.alpha0 is not None:
        try:
            alpha0 = complex(args.alpha0.replace(" ", ""))
        except ValueError:
            raise UsageError(f"--alpha0 must be a complex number like 0.3+0.1j, got {args.alpha0!r}") from None
    if alpha0 and args.temperature:
        raise UsageError("--alpha0 and --temperature are exclusive initial states")
    return kappa, args.temperature or 0.0, alpha0


def cmd_response(args, cfg: LoadedConfig, out) -> int:
    pathways, label = _select_pathways(args, cfg)
    order = pathways[0].order
    if any(p.order != order for p in pathways):
        raise UsageError("all selected pathways must have the same order")
    kappa, temperature, alpha0 = _common_flags(args, cfg)
    grid = TimeGrid.parse([args.t1, args.t2, args.t3] + list(args.t or []), order)
    times = grid.mesh()
    values = _response(cfg, pathways, times, temperature, kappa, alpha0, args.vibrational)
    _header(out, "response", cfg, [
        f"pathways {label} ({len(pathways)})",
        f"grid {grid.describe()}",
        f"kappa {kappa!r} temperature {temperature!r} alpha0 {alpha0!r}",
        f"factor {'vibrational only' if args.vibrational else 'electronic x vibrational'}",
        "bath " + ("configured" if cfg.bath is not None else "none"),
    ])
    cols = [f"t{i}" for i in range(1, order + 1)] + ["re", "im"]
    out.write(",".join(cols) + "\n")
    for i in range(values.size):
        row = [_fmt(t[i]) for t in times] + [_fmt(values[i].real), _fmt(values[i].imag)]
        out.write(",".join(row) + "\n")
    if args.spectrum:
        with open(args.spectrum, "w", newline="") as fh:
            _write_spectrum(args, cfg, pathways, label, kappa, temperature, alpha0, grid, fh)
    return EXIT_OK


def _write_spectrum(args, cfg, pathways, label, kappa, temperature, alpha0, grid, out):
    if len(grid.axes) != 3 or not isinstance(grid.axes[0], Axis) or not isinstance(grid.axes[2], Axis):
        raise UsageError("a spectrum needs third-order pathways with t1 and t3 given as START:STEP:COUNT")
    if isinstance(grid.axes[1], Axis):
        raise UsageError("a spectrum needs a single fixed t2")
    t2 = grid.axes[1]
    gamma = cfg.model.gamma_electronic if args.gamma is None else args.gamma

    def response(t1, t2_, t3):
        t1b, t3b = np.broadcast_arrays(t1, t3)
        flat = [t1b.ravel(), np.full(t1b.size, t2_), t3b.ravel()]
        return _response(cfg, pathways, flat, temperature, kappa, alpha0, args.vibrational).reshape(t1b.shape)

    w1, w3, spec = spectrum_2d(response, t2, grid.axes[0], grid.axes[2], gamma=gamma, pad=args.pad)
    _header(out, "spectrum", cfg, [
        f"pathways {label} ({len(pathways)})",
        f"grid {grid.describe()} pad {args.pad} gamma {gamma!r}",
        "convention S(w1,w3) = sum dt1 dt3 R e^{-gamma(t1+t3)} e^{+i(w1 t1 + w3 t3)}",
    ])
    out.write("w1,w3,re,im\n")
    for a in range(len(w1)):
        for b in range(len(w3)):
            v = spec[a, b]
            out.write(f"{_fmt(w1[a])},{_fmt(w3[b])},{_fmt(v.real)},{_fmt(v.imag)}\n")


def cmd_spectrum(args, cfg: LoadedConfig, out) -> int:
    pathways, label = _select_pathways(args, cfg)
    if pathways[0].order != 3:
        raise UsageError("spectra are defined for third-order pathways")
    kappa, temperature, alpha0 = _common_flags(args, cfg)
    grid = TimeGrid.parse([args.t1, args.t2, args.t3], 3)
    _write_spectrum(args, cfg, pathways, label, kappa, temperature, alpha0, grid, out)
    return EXIT_OK


def cmd_peaks(args, cfg: LoadedConfig, out) -> int:
    model = cfg.model
    if not 0 <= args.mode < model.n_modes:
        raise UsageError(f"--mode must be in 0..{model.n_modes - 1}")
    mode = model.modes[args.mode]
    try:
        kinds = [int(k) for k in args.kind.split(",")]
    except ValueError:
        raise UsageError(f"--kind expects a comma-separated list of kinds, got {args.kind!r}") from None
    columns = []
    for kind in kinds:
        if kind not in PRESET_KINDS.values():
            raise UsageError(f"kind must be 1..8, got {kind}")
        levels = _levels_arg(args.levels, model, kind) if args.levels else None
        if levels is None:
            found = enumerate_third_order(model, kind)
            if not found:
                raise UsageError("the model has no singly excited levels")
            levels = found[0][0]
        columns.append((kind, levels))
    axis = _parse_axis(args.t2, 2)
    t2 = axis.values if isinstance(axis, Axis) else np.array([axis])
    data, deltas = [], []
    for kind, levels in columns:
        a = peak_amplitude(kind, levels, mode.displacements, args.p1, args.p3, t2,
                           args.q_max, args.p2_max, mode.frequency)
        data.append(a)
        if args.convergence:
            b = peak_amplitude(kind, levels, mode.displacements, args.p1, args.p3, t2,
                               2 * args.q_max, args.p2_max, mode.frequency)
            deltas.append(float(np.max(np.abs(a - b))))
    extra = [f"peak p1={args.p1} p3={args.p3} mode {args.mode}",
             f"q_max {args.q_max} p2_max {args.p2_max}",
             "amplitude A(t2) = exp(-h) sum_p2 C_{p1 p2 p3} e^{i p2 w t2} (raw complex)"]
    extra += [f"kind {k} levels {lv}" for k, lv in columns]
    if args.convergence:
        extra += [f"convergence kind {k}: max |A(q_max) - A(2 q_max)| = {d:.3e}"
                  for (k, _), d in zip(columns, deltas)]
        for (k, _), d in zip(columns, deltas):
            print(f"kind {k}: max delta on doubling q_max = {d:.3e}", file=sys.stderr)
    _header(out, "peaks", cfg, extra)
    out.write(",".join(["t2"] + [f"{c}_k{k}" for k, _ in columns for c in ("re", "im")]) + "\n")
    for i in range(t2.size):
        row = [_fmt(t2[i])]
        for a in data:
            row += [_fmt(a[i].real), _fmt(a[i].imag)]
        out.write(",".join(row) + "\n")
    return EXIT_OK


def cmd_explain(args, cfg: LoadedConfig, out) -> int:
    pathways, label = _select_pathways(args, cfg)
    for p in pathways:
        form = build_exponent(cfg.model, p)
        out.write(f"# {label}\n")
        for line in format_pathway(p, cfg.model.names).splitlines():
            out.write(f"#   {line}\n")
        out.write(f"# {len(form.terms)} terms; ln R = sum coeff (1 - exp(E)), chi* marks bra-first windows\n")
        out.write(term_table(form, cfg.model.names))
        h = ", ".join(f"mode {m}: {v:.6g}" for m, v in sorted(form.h.items()))
        out.write(f"# h = {h}\n\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    results = run_suite(seed=args.seed, scale=args.scale)
    out.write(f"# vibresp {__version__} verify seed {args.seed} scale {args.scale}\n")
    out.write(f"# Fock truncation n_max {DEFAULT_NMAX} (thermal mixtures 128), top-of-basis tolerance "
              f"{TOP_TOLERANCE:g} (mixtures {MIXTURE_TOLERANCE:g})\n")
    out.write(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def _add_pathway_args(p, levels=True):
    p.add_argument("config", help="YAML model file")
    p.add_argument("--kind", type=int, help="third-order kind 1..8")
    p.add_argument("--preset", help=f"named pathway: {', '.join(PRESETS)}")
    p.add_argument("--pathway", help="pathway script file (DSL)")
    if levels:
        p.add_argument("--levels", help="bind j,k[,l] (names or indices) instead of summing")


def _add_physics_args(p):
    p.add_argument("--temperature", type=float, help="bath temperature in units of the mode frequency")
    p.add_argument("--kappa", type=float, help="vibrational relaxation rate (overrides config)")
    p.add_argument("--alpha0", help="coherent initial amplitude of mode 0, e.g. 0.3+0.1j")
    p.add_argument("--vibrational", action="store_true", help="omit the electronic factor")
    for i in (1, 2, 3):
        p.add_argument(f"--t{i}", help="VALUE or START:STEP:COUNT")
    p.add_argument("--gamma", type=float, help="electronic dephasing for spectra (overrides config)")
    p.add_argument("--pad", type=int, default=4, help="zero-padding factor for spectra")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vibresp", description="Vibronic response functions.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-o", "--output", help="write to this file instead of stdout")
    # -o is also accepted after the subcommand; SUPPRESS keeps the top-level value otherwise
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("-o", "--output", default=argparse.SUPPRESS, help="write to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("response", parents=[out], help="response function on a time grid")
    _add_pathway_args(p)
    _add_physics_args(p)
    p.add_argument("--t", action="append", help="further waiting times t4, t5, ... in order")
    p.add_argument("--spectrum", help="also write the 2D spectrum CSV to this path")

    p = sub.add_parser("spectrum", parents=[out], help="broadened 2D spectrum S(w1, w3) at fixed t2")
    _add_pathway_args(p)
    _add_physics_args(p)

    p = sub.add_parser("peaks", parents=[out], help="peak amplitude A_{p1,p3}(t2)")
    p.add_argument("config")
    p.add_argument("--kind", required=True, help="kind or comma-separated kinds")
    p.add_argument("--levels", help="j,k[,l]; default is the first pathway of each kind")
    p.add_argument("--p1", type=int, default=0)
    p.add_argument("--p3", type=int, default=0)
    p.add_argument("--t2", default="0:0.05:126", help="VALUE or START:STEP:COUNT")
    p.add_argument("--mode", type=int, default=0)
    p.add_argument("--q-max", type=int, default=DEFAULT_QMAX)
    p.add_argument("--p2-max", type=int, default=DEFAULT_P2MAX)
    p.add_argument("--convergence", action="store_true", help="also run with 2*q_max and report the change")

    p = sub.add_parser("explain", parents=[out], help="print the exponent term table of a pathway")
    _add_pathway_args(p)

    p = sub.add_parser("verify", parents=[out], help="run the oracle suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0, help="multiply the number of random cases")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    buf = io.StringIO()
    try:
        if args.command == "verify":
            code = cmd_verify(args, buf)
        else:
            cfg = load_config(args.config)
            handler = {"response": cmd_response, "spectrum": cmd_spectrum,
                       "peaks": cmd_peaks, "explain": cmd_explain}[args.command]
            code = handler(args, cfg, buf)
    except (ConfigError, ModelError, PathwayError, UsageError) as exc:
        print(f"vibresp: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        try:
            sys.stdout.write(buf.getvalue())
            sys.stdout.flush()
        except BrokenPipeError:
            sys.stdout = None
    return code


if __name__ == "__main__":
    sys.exit(main())
