"""Oracle suite: every closed form checked against an independent route.

Each check draws its cases from a seeded generator, so a run is
reproducible. The table printed by ``vibresp verify`` comes from here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .coherent import kinematic_response
from .fock import TruncationError, brute_force_response
from .general import build_exponent, evaluate
from .model import (
    BRA,
    DOUBLE,
    KET,
    KINDS_WITH_DOUBLES,
    THIRD_ORDER_KINDS,
    Interaction,
    Pathway,
    VibronicModel,
    third_order_pathway,
)
from .spectral import brute_force_coefficients, coefficient
from .thermal import coth_factor, delta_phase, temperature_for_occupation, thermal_response
from .third_order import r_v3


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error < self.tolerance


def random_pathway(rng: np.random.Generator, order: int, n_levels: int) -> Pathway:
    """A valid pathway with uniformly chosen sides and target levels."""
    current = {KET: 0, BRA: 0}
    steps = []
    for _ in range(order):
        side = KET if rng.random() < 0.5 else BRA
        choices = [lv for lv in range(n_levels) if lv != current[side]]
        to = int(rng.choice(choices))
        steps.append(Interaction(side, current[side], to))
        current[side] = to
    return Pathway(tuple(steps))


def _model_for(kind: int, z: np.ndarray) -> tuple[VibronicModel, tuple[int, ...]]:
    # V scheme for kinds without doubles, ladder (j, k, l) = (1, 1, 2) otherwise
    if kind in KINDS_WITH_DOUBLES:
        model = VibronicModel.single_mode([0, 0, 0], [0.0, z[0], z[1]],
                                          manifolds=("ground", "single", DOUBLE))
        return model, (1, 1, 2)
    return VibronicModel.single_mode([0, 0, 0], [0.0, z[0], z[1]]), (1, 2)


def check_third_order(rng, draws: int = 10, n_max: int = 64) -> CheckResult:
    err = 0.0
    for kind in THIRD_ORDER_KINDS:
        for _ in range(draws):
            z = rng.uniform(-1, 1, 2)
            t = rng.uniform(0, 4 * np.pi, 3)
            model, levels = _model_for(kind, z)
            exact = r_v3(kind, levels, model.z, t)
            fock = brute_force_response(model, third_order_pathway(kind, levels), t, n_max=n_max)
            err = max(err, abs(exact - fock))
    return CheckResult("closed form r_v3 vs Fock (kinds 1-8)", draws * 8, err, 1e-10)


def check_recipe(rng, cases: int = 50) -> CheckResult:
    err = 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 5))
        order = int(rng.integers(1, 7))
        pathway = random_pathway(rng, order, n)
        z = np.concatenate([[0.0], rng.uniform(-1, 1, n - 1)])
        model = VibronicModel.single_mode([0.0] * n, z)
        t = rng.uniform(0, 4 * np.pi, order)
        got = complex(evaluate(build_exponent(model, pathway), t))
        err = max(err, abs(got - kinematic_response(model, pathway, t)))
    return CheckResult("exponent recipe vs coherent ladder (M<=6)", cases, err, 1e-12)


def check_relaxation(rng, draws: int = 4, n_max: int = 64) -> CheckResult:
    err, count = 0.0, 0
    for kappa in (0.05, 0.1, 0.5):
        for kind in THIRD_ORDER_KINDS:
            for _ in range(draws):
                z = rng.uniform(-1, 1, 2)
                t = rng.uniform(0, 4 * np.pi, 3)
                model, levels = _model_for(kind, z)
                pathway = third_order_pathway(kind, levels)
                exact = complex(evaluate(build_exponent(model, pathway), t, kappa))
                fock = brute_force_response(model, pathway, t, n_max=n_max, kappa=kappa)
                err = max(err, abs(exact - fock))
                count += 1
    return CheckResult("relaxed exponent vs non-Hermitian Fock", count, err, 1e-10)


def check_thermal(rng, draws: int = 4, n_max: int = 128) -> CheckResult:
    err, count = 0.0, 0
    for kind in (1, 2, 5):
        for _ in range(draws):
            z1 = rng.uniform(-1, 1)
            n_mean = rng.uniform(0.1, 2.0)
            temp = temperature_for_occupation(n_mean)
            t = rng.uniform(0, 4 * np.pi, 3)
            model = VibronicModel.two_level(z1)
            pathway = third_order_pathway(kind, (1, 1))
            closed = complex(thermal_response(build_exponent(model, pathway), t, temp))
            fock = brute_force_response(model, pathway, t, ("thermal", temp), n_max=n_max)
            err = max(err, abs(closed - fock))
            count += 1
    return CheckResult("coth-scaled exponent vs thermal Fock mixture", count, err, 1e-8)


def check_coherent(rng, draws: int = 8, n_max: int = 64) -> CheckResult:
    err = 0.0
    for _ in range(draws):
        kind = int(rng.choice([1, 2, 4, 5]))
        model = VibronicModel.v_scheme(*rng.uniform(-0.8, 0.8, 2))
        pathway = third_order_pathway(kind, (1, 2))
        a0 = complex(*rng.uniform(-0.7, 0.7, 2))
        t = rng.uniform(0, 4 * np.pi, 3)
        r0 = complex(evaluate(build_exponent(model, pathway), t))
        closed = r0 * np.exp(1j * delta_phase(model, pathway, t, a0))
        fock = brute_force_response(model, pathway, t, ("coherent", a0), n_max=n_max)
        err = max(err, abs(closed - fock))
    return CheckResult("coherent initial state phase vs Fock", draws, err, 1e-10)


def check_spectral(rng, q_max: int = 6) -> CheckResult:
    err, count = 0.0, 0
    for kind in THIRD_ORDER_KINDS:
        z = rng.uniform(-0.8, 0.8, 2)
        model, levels = _model_for(kind, z)
        brute = brute_force_coefficients(kind, levels, model.z, q_max)
        for p, value in brute.items():
            if max(abs(x) for x in p) > 3:
                continue
            err = max(err, abs(coefficient(kind, levels, model.z, p, q_max) - value))
            count += 1
    return CheckResult("peak coefficients vs direct enumeration", count, err, 1e-14)


def check_convergence(rng, draws: int = 6) -> CheckResult:
    err = 0.0
    for _ in range(draws):
        kind = int(rng.choice(THIRD_ORDER_KINDS))
        model, levels = _model_for(kind, rng.uniform(-1, 1, 2))
        pathway = third_order_pathway(kind, levels)
        t = rng.uniform(0, 4 * np.pi, 3)
        a = brute_force_response(model, pathway, t, n_max=32, check=False)
        b = brute_force_response(model, pathway, t, n_max=64)
        err = max(err, abs(a - b))
    return CheckResult("Fock truncation 32 vs 64", draws, err, 1e-10)


CHECKS: tuple[Callable, ...] = (
    check_third_order,
    check_recipe,
    check_relaxation,
    check_thermal,
    check_coherent,
    check_spectral,
    check_convergence,
)


def run_suite(seed: int = 0, scale: float = 1.0) -> list[CheckResult]:
    """Run every check; ``scale`` multiplies the number of random draws."""
    out = []
    for i, check in enumerate(CHECKS):
        rng = np.random.default_rng([seed, i])
        kwargs = {}
        for name in ("draws", "cases"):
            if name in check.__code__.co_varnames[:check.__code__.co_argcount]:
                default = check.__defaults__[check.__code__.co_varnames.index(name) - 1]
                kwargs[name] = max(1, int(math.ceil(default * scale)))
        try:
            out.append(check(rng, **kwargs))
        except TruncationError:
            name = (check.__doc__ or check.__name__).strip()
            out.append(CheckResult(name, 0, math.inf, 0.0))
    return out


def format_table(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'cases':>5}  {'max error':>10}  {'tolerance':>9}  result"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {r.cases:>5}  {r.max_error:>10.2e}  {r.tolerance:>9.0e}  "
                     f"{'PASS' if r.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"
