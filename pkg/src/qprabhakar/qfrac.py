"""Riemann-Liouville and Prabhakar fractional q-operators.

The Prabhakar integral is evaluated as one Jackson sum whose weights are the
kernel ``g^{alpha,beta}_{gamma,omega}(x, t)`` on the lattice nodes; the RL
integral is the special case ``gamma = omega = 0`` of the same code path, so
the ``omega = 0`` degeneration holds bit for bit.

Identity checks take an optional ``shift``: the second operator then uses
``q^(shift*gamma) omega``.  ``shift=1`` is the published ``omega' = q^gamma omega``
pairing, ``shift=-1`` the one for which the convolution identity collapses
the composition with the order ``n - beta`` inner operator of the derivative.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceDomainError, DomainError, NotConverged
from .qcalc import LATTICE_RTOL, QFunction, kernel_integral, q_derivative_n, q_norm
from .qcore import QContext, SeriesValue, q_gamma, q_power_frac, qpowers
from .qspecial import (
    GATE_MARGIN,
    GeneralizedArgs,
    PrabhakarParams,
    convergence_ratio,
    kernel_g,
    kernel_values,
    q_prabhakar_generalized,
)

__all__ = [
    "OperatorKind",
    "FracOperatorSpec",
    "rl_q_integral",
    "rl_q_derivative",
    "rl_bound_constant",
    "prabhakar_q_integral",
    "prabhakar_q_derivative",
    "omega_prime",
    "lambda_shift",
    "prabhakar_bound_constant",
    "lattice_limit",
    "check_semigroup",
    "check_inverse_composition",
    "check_left_inverse_with_initial",
    "kernel_action_residual",
    "rl_integral_fn",
    "prabhakar_integral_fn",
    "prabhakar_derivative_fn",
]


def ceil_order(order: float) -> int:
    """Smallest integer ``>= order``, tolerant to rounding just above an integer."""
    n = math.ceil(order)
    if n - 1 >= 1 and order - (n - 1) < 1e-12:
        return n - 1
    return max(n, 1)


class OperatorKind(enum.Enum):
    RL_INTEGRAL = "rl_integral"
    RL_DERIVATIVE = "rl_derivative"
    PRABHAKAR_INTEGRAL = "prabhakar_integral"
    PRABHAKAR_DERIVATIVE = "prabhakar_derivative"


@dataclass(frozen=True)
class FracOperatorSpec:
    """Operator kind, its parameters (``PrabhakarParams`` or a bare order) and lower limit."""

    kind: OperatorKind
    params: PrabhakarParams | float
    a: float = 0.0
    n: int = field(init=False)

    def __post_init__(self):
        if self.a < 0:
            raise DomainError(f"lower limit must be >= 0, got {self.a}")
        order = self.params.beta if isinstance(self.params, PrabhakarParams) else float(self.params)
        if not order > 0:
            raise DomainError(f"operator order must be positive, got {order}")
        if self.kind in (OperatorKind.PRABHAKAR_INTEGRAL, OperatorKind.PRABHAKAR_DERIVATIVE):
            if not isinstance(self.params, PrabhakarParams):
                raise DomainError("Prabhakar operators need PrabhakarParams")
        object.__setattr__(self, "n", ceil_order(order))

    def apply(self, ctx: QContext, f: Callable[[float], float], x: float) -> SeriesValue:
        p = self.params
        if self.kind is OperatorKind.RL_INTEGRAL:
            return rl_q_integral(ctx, float(p), self.a, f, x)
        if self.kind is OperatorKind.PRABHAKAR_INTEGRAL:
            return prabhakar_q_integral(ctx, p, self.a, f, x)
        if self.kind is OperatorKind.RL_DERIVATIVE:
            return SeriesValue(rl_q_derivative(ctx, float(p), self.a, f, x), 0, 0.0, True)
        return SeriesValue(prabhakar_q_derivative(ctx, p, self.a, f, x), 0, 0.0, True)


# -- operator engine ---------------------------------------------------------


class _Kernel:
    """Weight factory for one operator ``(alpha, nu, gamma, omega)`` at one point ``x``."""

    def __init__(self, ctx, alpha, nu, gamma, omega, x):
        self.ctx, self.alpha, self.nu, self.gamma, self.omega, self.x = (
            ctx, alpha, nu, gamma, omega, x,
        )
        self.rel_tail = 0.0

    def weights_for(self, c: float):
        ctx = self.ctx

        def weights(count: int) -> np.ndarray:
            vals, rel, _ = kernel_values(
                ctx, self.alpha, self.nu, self.gamma, self.omega, self.x, c, count
            )
            self.rel_tail = max(self.rel_tail, rel)
            return c * (1.0 - ctx.q) * qpowers(ctx, count) * vals

        return weights


def _check_point(a: float, x: float) -> None:
    if a < 0:
        raise DomainError(f"lower limit must be >= 0, got a={a}")
    if x < a * (1 - LATTICE_RTOL):
        raise DomainError(f"evaluation point x={x} lies below the lower limit a={a}")


def _operator_gate(ctx: QContext, alpha: float, omega: float, x: float) -> None:
    # the kernel argument omega (x - q^beta t)^alpha_q is largest (|omega| x^alpha) as t -> 0
    ratio = convergence_ratio(ctx, alpha, abs(omega) * x**alpha)
    if ratio >= 1.0 - GATE_MARGIN:
        raise ConvergenceDomainError(
            f"convergence domain violated: |omega| x^alpha (1-q)^alpha = {ratio:.6g} >= 1 at x={x}"
        )


def _integral(ctx, alpha, nu, gamma, omega, a, f, x) -> SeriesValue:
    """``sum_n (gamma)_n omega^n I^{alpha n + nu}_{a+} f`` at ``x``; ``nu = 0`` adds ``f`` itself."""
    _check_point(a, x)
    if omega != 0.0:
        _operator_gate(ctx, alpha, omega, x)
    kern = _Kernel(ctx, alpha, nu, gamma, omega, x)
    if nu == 0.0 and (omega == 0.0 or gamma == 0.0):
        res = SeriesValue(0.0, 0, 0.0, True)
    else:
        res = kernel_integral(ctx, kern.weights_for, f, a, x)
    value = res.value
    if nu == 0.0:
        value += float(f(x))
    tail = res.tail_estimate + kern.rel_tail * abs(res.value)
    return SeriesValue(value, res.terms_used, tail, res.converged)


def rl_q_integral(
    ctx: QContext, alpha: float, a: float, f: Callable[[float], float], x: float
) -> SeriesValue:
    """RL q-integral ``(1/Gamma_q(alpha)) int_a^x (x - qt)^{alpha-1}_q f(t) d_q t``."""
    if not alpha > 0:
        raise DomainError(f"RL order must be positive, got {alpha}")
    return _integral(ctx, 1.0, alpha, 0.0, 0.0, a, f, x)


def rl_integral_fn(ctx: QContext, alpha: float, a: float, f) -> QFunction:
    """``I^alpha_{a+} f`` as a memoised :class:`QFunction`."""
    if alpha == 0.0:
        return f if isinstance(f, QFunction) else QFunction(f)
    return QFunction(lambda t: rl_q_integral(ctx, alpha, a, f, t).value, name=f"I^{alpha}")


def rl_q_derivative(
    ctx: QContext, alpha: float, a: float, f: Callable[[float], float], x: float
) -> float:
    """RL q-derivative ``D^n_q I^{n-alpha}_{a+} f`` with ``n = ceil(alpha)``."""
    if not alpha > 0:
        raise DomainError(f"RL order must be positive, got {alpha}")
    if x == 0.0:
        raise DomainError("the q-derivative is not defined at x = 0")
    n = ceil_order(alpha)
    rest = n - alpha
    inner = f if rest <= 1e-12 else rl_integral_fn(ctx, rest, a, f)
    return q_derivative_n(ctx, inner, x, n)


def rl_bound_constant(ctx: QContext, alpha: float, a: float, b: float) -> float:
    """``K = (b - qa)^alpha_q / Gamma_q(alpha + 1)``."""
    if not alpha > 0 or not 0 <= a < b:
        raise DomainError(f"need alpha > 0 and 0 <= a < b, got alpha={alpha}, a={a}, b={b}")
    return q_power_frac(ctx, b, ctx.q * a, alpha).value / q_gamma(ctx, alpha + 1.0).value


def prabhakar_q_integral(
    ctx: QContext, p: PrabhakarParams, a: float, f: Callable[[float], float], x: float
) -> SeriesValue:
    """Prabhakar q-integral ``int_a^x g^{alpha,beta}_{gamma,omega}(x,t) f(t) d_q t``."""
    return _integral(ctx, p.alpha, p.beta, p.gamma, p.omega, a, f, x)


def prabhakar_integral_fn(ctx: QContext, p: PrabhakarParams, a: float, f) -> QFunction:
    return QFunction(
        lambda t: prabhakar_q_integral(ctx, p, a, f, t).value,
        name=f"PI[{p.alpha},{p.beta},{p.gamma},{p.omega}]",
    )


def _derivative_inner(ctx: QContext, p: PrabhakarParams, a: float, f) -> tuple[int, QFunction]:
    n = ceil_order(p.beta)
    rest = n - p.beta
    if abs(rest) <= 1e-12:
        rest = 0.0
    inner = QFunction(
        lambda t: _integral(ctx, p.alpha, rest, -p.gamma, p.omega, a, f, t).value,
        name=f"PI[{p.alpha},{rest},{-p.gamma},{p.omega}]",
    )
    return n, inner


def prabhakar_q_derivative(
    ctx: QContext, p: PrabhakarParams, a: float, f: Callable[[float], float], x: float
) -> float:
    """Prabhakar q-derivative ``D^n_q PI^{alpha, n-beta, -gamma, omega}_{a+} f``, ``n = ceil(beta)``.

    For integer ``beta`` the inner order is 0: its ``n = 0`` series term is
    the identity and the remaining ``I^{alpha n}`` terms are kept.
    """
    if x == 0.0:
        raise DomainError("the q-derivative is not defined at x = 0")
    n, inner = _derivative_inner(ctx, p, a, f)
    return q_derivative_n(ctx, inner, x, n)


def prabhakar_derivative_fn(ctx: QContext, p: PrabhakarParams, a: float, f) -> QFunction:
    n, inner = _derivative_inner(ctx, p, a, f)
    return QFunction(lambda t: q_derivative_n(ctx, inner, t, n), name="PD")


def omega_prime(ctx: QContext, p: PrabhakarParams) -> float:
    """``omega' = q^gamma omega``."""
    return ctx.q**p.gamma * p.omega


def lambda_shift(ctx: QContext, p: PrabhakarParams, n: int) -> PrabhakarParams:
    """Parameter shift ``omega -> q^(n gamma) omega``; other parameters unchanged."""
    return p.with_omega(ctx.q ** (n * p.gamma) * p.omega)


def prabhakar_bound_constant(
    ctx: QContext, p: PrabhakarParams, a: float, b: float
) -> SeriesValue:
    """Boundedness constant ``M = (b - qa)^beta_q e_{alpha,beta+1}[|omega| (b - q^(beta+1) a)^alpha_q; q]``.

    The series uses ``|omega|``, the majorant under which the bound is
    derived.  Hypotheses: ``|gamma| < 1`` and
    ``|omega (b - q^(beta+1) a)^alpha_q| < (1-q)^alpha``.
    """
    if not 0 <= a < b:
        raise DomainError(f"need 0 <= a < b, got a={a}, b={b}")
    q = ctx.q
    if not abs(p.gamma) < 1:
        raise ConvergenceDomainError(f"bound constant needs |gamma| < 1, got gamma={p.gamma}")
    arg = abs(p.omega) * q_power_frac(ctx, b, q ** (p.beta + 1) * a, p.alpha).value
    if arg >= (1 - q) ** p.alpha * (1 - GATE_MARGIN):
        raise ConvergenceDomainError(
            f"convergence domain violated: |omega (b - q^(beta+1) a)^alpha_q| = {arg:.6g} "
            f">= (1-q)^alpha = {(1 - q) ** p.alpha:.6g}"
        )
    pre = q_power_frac(ctx, b, q * a, p.beta)
    ml = PrabhakarParams(p.alpha, p.beta + 1.0, 1.0)
    ser = q_prabhakar_generalized(
        ctx, ml, abs(p.omega), GeneralizedArgs(p.alpha, b, q ** (p.beta + 1) * a)
    )
    value = pre.value * ser.value
    tail = abs(pre.value) * ser.tail_estimate + abs(ser.value) * pre.tail_estimate
    return SeriesValue(value, ser.terms_used, tail, ser.converged)


# -- one-sided values and identity checks -------------------------------------


def lattice_limit(
    ctx: QContext, F: Callable[[float], float], a: float, x: float
) -> SeriesValue:
    """One-sided value ``F(a+)`` along the lattice of ``x``.

    For ``a = 0`` this is the limit of ``F(x q^k)``, accepted once two
    successive values differ by less than ``eps_series * max(1, |F|)``.
    For ``a > 0`` the lattice has no accumulation point at ``a`` and the
    value at the node ``a`` itself is returned.
    """
    if a > 0:
        return SeriesValue(float(F(a)), 1, 0.0, True)
    q = ctx.q
    prev = float(F(x))
    diffs: list[float] = []
    for k in range(1, ctx.max_terms):
        cur = float(F(x * q**k))
        d = abs(cur - prev)
        diffs.append(d)
        if d < ctx.eps_series * max(1.0, abs(cur)):
            r = diffs[-1] / diffs[-2] if len(diffs) > 1 and diffs[-2] > 0 else q
            r = min(r, 0.999)
            return SeriesValue(cur, k + 1, d * r / (1 - r), True)
        prev = cur
    partial = SeriesValue(prev, ctx.max_terms, diffs[-1] if diffs else math.inf, False)
    raise NotConverged(f"lattice limit F(0+) did not stabilise within {ctx.max_terms} nodes", partial)


def _shifted(ctx: QContext, p: PrabhakarParams, shift: int) -> PrabhakarParams:
    return lambda_shift(ctx, p, shift) if shift else p


def check_semigroup(
    ctx: QContext,
    p1: PrabhakarParams,
    mu: float,
    sigma: float,
    a: float,
    f,
    x: float,
) -> float:
    """``|PI^{a,b,g,w} PI^{a,mu,sigma,w'} f - PI^{a,b+mu,g+sigma,w} f|`` at ``x``, ``w' = q^g w``.

    The order is fixed: the composition is not commutative in the q-case.
    """
    inner_p = PrabhakarParams(p1.alpha, mu, sigma, omega_prime(ctx, p1))
    inner = prabhakar_integral_fn(ctx, inner_p, a, f)
    lhs = prabhakar_q_integral(ctx, p1, a, inner, x).value
    whole = PrabhakarParams(p1.alpha, p1.beta + mu, p1.gamma + sigma, p1.omega)
    rhs = prabhakar_q_integral(ctx, whole, a, f, x).value
    return abs(lhs - rhs)


def check_inverse_composition(
    ctx: QContext, p: PrabhakarParams, a: float, f, x: float, shift: int = 1
) -> float:
    """``|PD^{a,b,g,w} PI^{a,b,g,q^(shift g) w} f - f|`` at ``x``."""
    inner = prabhakar_integral_fn(ctx, _shifted(ctx, p, shift), a, f)
    return abs(prabhakar_q_derivative(ctx, p, a, inner, x) - float(f(x)))


def initial_functional(ctx: QContext, p: PrabhakarParams, a: float, f, x: float) -> SeriesValue:
    """``(PI^{alpha, 1-beta, -gamma, omega}_{a+} f)(a+)`` via :func:`lattice_limit`."""
    rest = 1.0 - p.beta
    if abs(rest) <= 1e-12:
        rest = 0.0
    F = QFunction(lambda t: _integral(ctx, p.alpha, rest, -p.gamma, p.omega, a, f, t).value)
    return lattice_limit(ctx, F, a, x)


def check_left_inverse_with_initial(
    ctx: QContext, p: PrabhakarParams, a: float, f, x: float, shift: int = 1
) -> float:
    """Residual of ``PI^{w_s} PD^{w} f = f - g^{alpha,beta}_{gamma,w_s}(x, a/q) F(a+)``.

    ``w_s = q^(shift gamma) omega`` and ``F = PI^{alpha,1-beta,-gamma,omega} f``;
    requires ``0 < beta <= 1``.
    """
    if not 0 < p.beta <= 1:
        raise DomainError(f"left inverse needs 0 < beta <= 1, got beta={p.beta}")
    ps = _shifted(ctx, p, shift)
    d = prabhakar_derivative_fn(ctx, p, a, f)
    lhs = prabhakar_q_integral(ctx, ps, a, d, x).value
    init = initial_functional(ctx, p, a, f, x).value
    g = kernel_g(ctx, p.alpha, p.beta, p.gamma, ps.omega, x, a / ctx.q).value
    return abs(lhs - float(f(x)) + g * init)


def kernel_action_residual(
    ctx: QContext,
    p: PrabhakarParams,
    mu: float,
    sigma: float,
    s: float,
    x: float,
) -> float:
    """Relative gap between ``PI^{p}_{qs+}[g^{alpha,mu}_{sigma,w'}(., s)](x)`` and ``g^{alpha,mu+beta}_{sigma+gamma,w}(x, s)``.

    The left side is a nested Jackson sum over the scalar kernel, the right
    side the closed form; ``w' = q^gamma w``.
    """
    wp = omega_prime(ctx, p)
    inner = QFunction(lambda t: kernel_g(ctx, p.alpha, mu, sigma, wp, t, s).value)
    lhs = prabhakar_q_integral(ctx, p, ctx.q * s, inner, x).value
    rhs = kernel_g(ctx, p.alpha, mu + p.beta, sigma + p.gamma, p.omega, x, s).value
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


def boundedness_ratio(
    ctx: QContext, p: PrabhakarParams, a: float, b: float, f, pnorm: float = 1.0
) -> tuple[float, float]:
    """``(||PI f||_p, M ||f||_p)`` on ``[a, b]``."""
    M = prabhakar_bound_constant(ctx, p, a, b).value
    pf = prabhakar_integral_fn(ctx, p, a, f)
    lhs = q_norm(ctx, pf, a, b, pnorm).value
    rhs = M * q_norm(ctx, f, a, b, pnorm).value
    return lhs, rhs
