"""Identity suites behind ``qprab verify``.

Each check draws its cases from a seeded generator, records the worst
residual and compares it with a fixed tolerance.  Any library error
(including :class:`NotConverged` from a starved context) fails the check
with the error message instead of being skipped.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .errors import QCalcError
from .qcalc import QFunction, q_derivative, q_integral
from .qcore import (
    QContext,
    check_pochhammer_convolution,
    check_vandermonde,
    q_factorial,
    q_gamma,
    q_number,
    q_power_frac,
)
from .qfrac import (
    boundedness_ratio,
    check_inverse_composition,
    check_left_inverse_with_initial,
    check_semigroup,
    kernel_action_residual,
    prabhakar_q_integral,
    rl_integral_fn,
    rl_q_derivative,
    rl_q_integral,
)
from .qspecial import PrabhakarParams

SUITES = ("algebraic", "calculus", "operators")
PAIRINGS = {"published": 1, "inverse": -1}


@dataclass
class CheckResult:
    name: str
    suite: str
    max_residual: float
    tolerance: float
    cases: int
    passed: bool
    error: str | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def _run(name, suite, tol, body: Callable[[], tuple[float, int]]) -> CheckResult:
    try:
        worst, cases = body()
    except QCalcError as exc:
        return CheckResult(name, suite, math.inf, tol, 0, False, f"{type(exc).__name__}: {exc}")
    ok = bool(np.isfinite(worst) and worst <= tol)
    return CheckResult(name, suite, float(worst), tol, cases, ok)


def _poly(coefs) -> QFunction:
    c = [float(v) for v in coefs]
    return QFunction(lambda t: sum(ci * t**i for i, ci in enumerate(c)), name="poly")


def _lattice_points(x: float, ctx: QContext, count: int) -> list[float]:
    return [x * ctx.q**k for k in range(count)]


# -- algebraic -----------------------------------------------------------------


def algebraic(ctx: QContext, rng: np.random.Generator) -> list[CheckResult]:
    def convolution():
        worst = 0.0
        for _ in range(200):
            g, s = rng.uniform(-2, 2, 2)
            worst = max(worst, check_pochhammer_convolution(ctx, g, s, int(rng.integers(0, 26))))
        return worst, 200

    def vandermonde():
        worst = 0.0
        for _ in range(200):
            a, b = rng.uniform(-2, 2, 2)
            worst = max(worst, check_vandermonde(ctx, a, b, int(rng.integers(0, 26))))
        return worst, 200

    def gamma_recurrence():
        xs = np.linspace(0.05, 20.0, 80)
        worst = max(
            abs(q_gamma(ctx, x + 1).value - q_number(ctx, x) * q_gamma(ctx, x).value)
            / q_gamma(ctx, x + 1).value
            for x in xs
        )
        return worst, xs.size

    def gamma_factorial():
        worst = max(
            abs(q_gamma(ctx, n + 1).value - q_factorial(ctx, n)) / q_factorial(ctx, n)
            for n in range(21)
        )
        return worst, 21

    return [
        _run("pochhammer_convolution", "algebraic", 1e-11, convolution),
        _run("q_vandermonde", "algebraic", 1e-11, vandermonde),
        _run("q_gamma_recurrence", "algebraic", 1e-10, gamma_recurrence),
        _run("q_gamma_factorial", "algebraic", 1e-10, gamma_factorial),
    ]


# -- calculus ------------------------------------------------------------------


def calculus(ctx: QContext, rng: np.random.Generator) -> list[CheckResult]:
    def fundamental():
        worst = 0.0
        for _ in range(3):
            f = _poly(rng.uniform(-1, 1, 4))
            F = QFunction(lambda t, f=f: q_integral(ctx, f, 0.0, t).value)
            for x in _lattice_points(1.0, ctx, 10):
                worst = max(worst, abs(q_derivative(ctx, F, x) - f(x)))
                Df = QFunction(lambda t, f=f: q_derivative(ctx, f, t))
                worst = max(worst, abs(q_integral(ctx, Df, 0.0, x).value - (f(x) - f(0.0))))
        return worst, 30

    def power_rule():
        worst = 0.0
        for _ in range(10):
            b, al = rng.uniform(0.0, 0.5), rng.uniform(0.5, 3.0)
            f = QFunction(lambda t, b=b, al=al: q_power_frac(ctx, t, b, al).value)
            x = 1.0
            lhs = q_derivative(ctx, f, x)
            rhs = q_number(ctx, al) * q_power_frac(ctx, x, b, al - 1).value
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
        return worst, 10

    def rl_power():
        worst, n = 0.0, 0
        for al in (0.3, 0.7, 1.5):
            for lam in (-0.5, 0.0, 0.7, 1.3, 2.0):
                f = QFunction(lambda t, lam=lam: t**lam)
                for x in (0.25, 0.5, 1.0):
                    v = rl_q_integral(ctx, al, 0.0, f, x).value
                    ex = q_gamma(ctx, lam + 1).value / q_gamma(ctx, al + lam + 1).value * x ** (al + lam)
                    worst, n = max(worst, abs(v - ex) / abs(ex)), n + 1
        return worst, n

    def rl_semigroup():
        worst = 0.0
        for _ in range(3):
            f = _poly(rng.uniform(-1, 1, 3))
            a1, a2 = rng.uniform(0.2, 1.5, 2)
            inner = rl_integral_fn(ctx, a2, 0.0, f)
            for x in _lattice_points(1.0, ctx, 5):
                lhs = rl_q_integral(ctx, a1, 0.0, inner, x).value
                rhs = rl_q_integral(ctx, a1 + a2, 0.0, f, x).value
                worst = max(worst, abs(lhs - rhs))
        return worst, 15

    def rl_inverse():
        worst = 0.0
        for _ in range(3):
            f = _poly(rng.uniform(-1, 1, 3))
            al = rng.uniform(0.2, 1.8)
            inner = rl_integral_fn(ctx, al, 0.0, f)
            for x in _lattice_points(1.0, ctx, 5):
                worst = max(worst, abs(rl_q_derivative(ctx, al, 0.0, inner, x) - f(x)))
        return worst, 15

    return [
        _run("fundamental_theorem", "calculus", 1e-9, fundamental),
        _run("q_power_derivative", "calculus", 1e-9, power_rule),
        _run("rl_power_rule", "calculus", 1e-8, rl_power),
        _run("rl_semigroup", "calculus", 1e-8, rl_semigroup),
        _run("rl_inverse", "calculus", 1e-8, rl_inverse),
    ]


# -- operators -----------------------------------------------------------------


def _draw_params(rng: np.random.Generator, beta_max: float = 1.0) -> PrabhakarParams:
    return PrabhakarParams(
        rng.uniform(0.5, 1.5), rng.uniform(0.3, beta_max), rng.uniform(-0.8, 0.8), rng.uniform(-0.2, 0.2)
    )


def operators(ctx: QContext, rng: np.random.Generator, pairing: str = "published") -> list[CheckResult]:
    shift = PAIRINGS[pairing]

    def kernel_action():
        worst = 0.0
        for _ in range(5):
            p = _draw_params(rng)
            mu, sigma = rng.uniform(0.3, 1.5), rng.uniform(-0.8, 0.8)
            worst = max(worst, kernel_action_residual(ctx, p, mu, sigma, 0.0, 1.0))
        return worst, 5

    def semigroup():
        worst = 0.0
        for _ in range(4):
            p = _draw_params(rng)
            mu, sigma = rng.uniform(0.3, 1.5), rng.uniform(-0.8, 0.8)
            f = _poly(rng.uniform(-1, 1, 3))
            worst = max(worst, check_semigroup(ctx, p, mu, sigma, 0.0, f, 1.0))
            # sigma = -gamma collapses to the RL integral of order beta + mu
            worst = max(worst, check_semigroup(ctx, p, mu, -p.gamma, 0.0, f, 0.5))
        return worst, 8

    def degenerate():
        worst = 0.0
        for _ in range(4):
            p = _draw_params(rng).with_omega(0.0)
            f = _poly(rng.uniform(-1, 1, 3))
            a = prabhakar_q_integral(ctx, p, 0.0, f, 1.0).value
            b = rl_q_integral(ctx, p.beta, 0.0, f, 1.0).value
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
        return worst, 4

    def bounded():
        worst = 0.0
        p = PrabhakarParams(0.9, 0.6, 0.4, 0.1)
        for _ in range(10):
            vals = rng.uniform(-1, 1, 40)
            f = _lattice_random(ctx, 1.0, vals)
            for pn in (1.0, 2.0):
                lhs, rhs = boundedness_ratio(ctx, p, 0.0, 1.0, f, pn)
                worst = max(worst, lhs / rhs - 1.0)
        return max(worst, 0.0), 20

    def inverse():
        worst = 0.0
        for _ in range(4):
            p = _draw_params(rng, beta_max=1.8)
            f = _poly(rng.uniform(-1, 1, 3))
            for x in _lattice_points(1.0, ctx, 3):
                worst = max(worst, check_inverse_composition(ctx, p, 0.0, f, x, shift=shift))
        return worst, 12

    def left_inverse():
        worst = 0.0
        for _ in range(3):
            p = _draw_params(rng)
            f = _poly(rng.uniform(-1, 1, 3))
            worst = max(worst, check_left_inverse_with_initial(ctx, p, 0.0, f, 0.5, shift=shift))
        return worst, 3

    return [
        _run("kernel_action", "operators", 1e-6, kernel_action),
        _run("prabhakar_semigroup", "operators", 1e-6, semigroup),
        _run("omega_zero_degeneration", "operators", 1e-10, degenerate),
        _run("boundedness", "operators", 1e-6, bounded),
        _run(f"inverse_composition[{pairing}]", "operators", 1e-6, inverse),
        _run(f"left_inverse_with_initial[{pairing}]", "operators", 1e-6, left_inverse),
    ]


def _lattice_random(ctx: QContext, b: float, vals: np.ndarray) -> QFunction:
    """Function taking ``vals[k]`` at ``b q^k`` and 0 further down, normalised in L^1_q."""
    logq = math.log(ctx.q)
    norm = (1 - ctx.q) * b * float(np.sum(np.abs(vals) * ctx.q ** np.arange(vals.size)))

    def f(t: float) -> float:
        k = round(math.log(t / b) / logq)
        return float(vals[k]) / norm if 0 <= k < vals.size else 0.0

    return QFunction(f, name="lattice_random")


def run(ctx: QContext, suite: str, seed: int, pairing: str = "published") -> list[CheckResult]:
    chosen = SUITES if suite == "all" else (suite,)
    out: list[CheckResult] = []
    for name in chosen:
        # one generator per suite keeps results independent of the selection
        rng = np.random.default_rng([seed, SUITES.index(name)])
        if name == "algebraic":
            out += algebraic(ctx, rng)
        elif name == "calculus":
            out += calculus(ctx, rng)
        else:
            out += operators(ctx, rng, pairing)
    return out
