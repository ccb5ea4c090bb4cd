"""Cauchy-type problem for the Prabhakar q-derivative via Picard iteration.

The problem ``PD^{alpha,beta,gamma,omega} y = f(x, y)`` with initial datum
``(PI^{alpha,1-beta,-gamma,omega} y)(a+) = xi0`` is solved through its
Volterra form ``y = y0 + PI^{alpha,beta,gamma,w_k} f(., y)`` where
``y0 = xi0 g^{alpha,beta}_{gamma,w_k}(x, a/q)`` and ``w_k = q^(s gamma) omega``
with ``s = prob.kernel_shift`` (1 gives the published ``omega'``).

Iterates live on the lattice ``h q^j``.  For ``a = 0`` the lattice is
extended below the reported ``lattice_depth`` nodes until the Jackson sums
are resolved to ``eps_series``; every Picard step is then one product with
a precomputed lower-triangular weight matrix.  The a-posteriori residuals
use the lazily evaluated operators of :mod:`qprabhakar.qfrac` instead.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, QCalcError, RhsDomainError
from .qcalc import QFunction, _node_key, lattice_offset
from .qcore import QContext
from .qfrac import (
    initial_functional,
    prabhakar_bound_constant,
    prabhakar_derivative_fn,
    prabhakar_q_integral,
)
from .qspecial import PrabhakarParams, kernel_g, kernel_values

__all__ = [
    "CauchyProblem",
    "SolverConfig",
    "SolverReport",
    "LatticeFunction",
    "kernel_omega",
    "contraction_constant",
    "initial_iterate",
    "picard_step",
    "solve",
    "volterra_residual",
    "initial_condition_value",
    "differential_residual",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CauchyProblem:
    """Problem data: parameters with ``0 < beta <= 1``, interval ``[a, b]``, ``xi0 != 0``, rhs."""

    params: PrabhakarParams
    a: float
    b: float
    xi0: float
    rhs: Callable[[float, float], float]
    lipschitz_A: float | None = None
    kernel_shift: int = 1

    def __post_init__(self):
        if not 0 < self.params.beta <= 1:
            raise DomainError(f"Cauchy problem needs 0 < beta <= 1, got beta={self.params.beta}")
        if self.xi0 == 0:
            raise DomainError("Cauchy problem needs xi0 != 0")
        if not 0 <= self.a < self.b:
            raise DomainError(f"Cauchy problem needs 0 <= a < b, got a={self.a}, b={self.b}")
        if self.lipschitz_A is not None and self.lipschitz_A < 0:
            raise DomainError(f"Lipschitz constant must be >= 0, got {self.lipschitz_A}")


@dataclass(frozen=True)
class SolverConfig:
    h: float
    max_iter: int = 200
    tol: float = 1e-10
    lattice_depth: int = 64

    def __post_init__(self):
        if self.max_iter < 1 or not self.tol > 0 or self.lattice_depth < 1:
            raise DomainError("max_iter, tol and lattice_depth must be positive")


class LatticeFunction(QFunction):
    """Values tabulated on ``nodes``; points below the table fall back to ``below``."""

    def __init__(self, nodes: np.ndarray, values: np.ndarray, below: Callable[[float], float], name="y"):
        super().__init__(self._lookup, name=name)
        self.nodes = np.asarray(nodes, dtype=float)
        self.table = np.asarray(values, dtype=float)
        self._index = {_node_key(float(t)): i for i, t in enumerate(self.nodes)}
        self._below = below
        self.domain = (0.0, float(self.nodes[0]))

    def _lookup(self, t: float) -> float:
        i = self._index.get(_node_key(t))
        if i is not None:
            return float(self.table[i])
        if t < self.nodes[-1]:
            return float(self._below(t))
        raise DomainError(f"point {t} is not a node of the solution lattice")


@dataclass
class SolverReport:
    solution: LatticeFunction
    iterations: int
    residual_history: list[float]
    delta1: float
    converged: bool
    contraction_ok: bool
    delta1_heuristic: bool = False
    ratios: list[float] = field(default_factory=list)
    h: float = 0.0
    b: float = 0.0
    truncated: bool = False

    def summary(self) -> dict:
        return {
            "iterations": self.iterations,
            "residual_history": list(self.residual_history),
            "ratios": list(self.ratios),
            "delta1": self.delta1,
            "delta1_heuristic": self.delta1_heuristic,
            "converged": self.converged,
            "contraction_ok": self.contraction_ok,
            "h": self.h,
            "b": self.b,
            "solved_on": [float(self.solution.nodes[-1]), self.h],
            "truncated_before_b": self.truncated,
        }


def kernel_omega(ctx: QContext, prob: CauchyProblem) -> float:
    """``q^(kernel_shift gamma) omega``; the published choice is ``omega' = q^gamma omega``."""
    p = prob.params
    return ctx.q ** (prob.kernel_shift * p.gamma) * p.omega


def _kernel_params(ctx: QContext, prob: CauchyProblem) -> PrabhakarParams:
    return prob.params.with_omega(kernel_omega(ctx, prob))


def contraction_constant(ctx: QContext, prob: CauchyProblem, h: float) -> float:
    """``delta1 = A (h - qa)^beta_q e_{alpha,beta+1}[w_k (h - q^(beta+1) a)^alpha_q; q]``."""
    if prob.lipschitz_A is None:
        raise DomainError("contraction_constant needs lipschitz_A")
    if not prob.a < h <= prob.b:
        raise DomainError(f"need a < h <= b, got h={h}")
    if prob.lipschitz_A == 0:
        return 0.0
    M = prabhakar_bound_constant(ctx, _kernel_params(ctx, prob), prob.a, h).value
    return prob.lipschitz_A * M


def _call_rhs(prob: CauchyProblem, t: float, y: float) -> float:
    try:
        v = float(prob.rhs(t, y))
    except (ArithmeticError, ValueError, TypeError) as exc:
        raise RhsDomainError(f"rhs undefined at (t={t}, y={y}): {exc}") from exc
    if not math.isfinite(v):
        raise RhsDomainError(f"rhs is not finite at (t={t}, y={y})")
    return v


def _rhs_fn(prob: CauchyProblem, y: Callable[[float], float]) -> QFunction:
    return QFunction(lambda t: _call_rhs(prob, t, y(t)), name="f(t, y(t))")


def initial_iterate(ctx: QContext, prob: CauchyProblem) -> QFunction:
    """``y0(x) = xi0 g^{alpha,beta}_{gamma,w_k}(x, a/q)``."""
    p = prob.params
    w = kernel_omega(ctx, prob)
    s = prob.a / ctx.q
    return QFunction(
        lambda x: prob.xi0 * kernel_g(ctx, p.alpha, p.beta, p.gamma, w, x, s).value,
        domain=(0.0, prob.b * (1 + 1e-12)),
        name="y0",
    )


def picard_step(
    ctx: QContext, prob: CauchyProblem, y_prev: Callable[[float], float], y0: QFunction | None = None
) -> QFunction:
    """One application of ``T y = y0 + PI^{alpha,beta,gamma,w_k} f(., y)``, lazily evaluated."""
    y0 = y0 if y0 is not None else initial_iterate(ctx, prob)
    pk = _kernel_params(ctx, prob)
    f = _rhs_fn(prob, y_prev)
    return QFunction(
        lambda x: y0(x) + prabhakar_q_integral(ctx, pk, prob.a, f, x).value,
        domain=y0.domain,
        name="T y",
    )


def _lattice(ctx: QContext, prob: CauchyProblem, cfg: SolverConfig) -> tuple[np.ndarray, int]:
    """Working nodes ``h q^j`` and the number of reported nodes."""
    q, h = ctx.q, cfg.h
    if prob.a > 0:
        m = lattice_offset(ctx, prob.a, h)
        if m is None:
            raise DomainError(f"the solver needs a on the lattice of h (a = h q^m), got a={prob.a}, h={h}")
        return h * q ** np.arange(m), m
    beta = prob.params.beta
    extra = math.ceil(math.log(ctx.eps_series) / (beta * math.log(q))) + 10
    # keep nodes far from underflow
    floor = math.floor(math.log(1e-280 / h) / math.log(q))
    total = min(cfg.lattice_depth + 2 * extra, ctx.max_terms, floor)
    return h * q ** np.arange(total), min(cfg.lattice_depth, total)


def _weight_matrix(ctx: QContext, pk: PrabhakarParams, nodes: np.ndarray) -> np.ndarray:
    q = ctx.q
    n = nodes.size
    W = np.zeros((n, n))
    for j, x in enumerate(nodes):
        count = n - j
        vals, _, _ = kernel_values(ctx, pk.alpha, pk.beta, pk.gamma, pk.omega, float(x), float(x), count)
        W[j, j:] = x * (1.0 - q) * q ** np.arange(count) * vals
    return W


def _heuristic_lipschitz(prob: CauchyProblem, nodes: np.ndarray, y0: np.ndarray) -> float:
    lo, hi = float(np.min(y0)), float(np.max(y0))
    span = max(hi - lo, 1.0)
    grid = np.linspace(lo - span, hi + span, 9)
    best = 0.0
    for x in nodes:
        vals = np.array([_call_rhs(prob, float(x), float(v)) for v in grid])
        best = max(best, float(np.max(np.abs(np.diff(vals)) / np.diff(grid))))
    return best


def solve(
    ctx: QContext,
    prob: CauchyProblem,
    cfg: SolverConfig,
    start: Callable[[float], float] | None = None,
) -> SolverReport:
    """Picard iteration on the lattice of ``cfg.h``.

    Stops once the sup over the reported nodes of ``|y_m - y_(m-1)|`` is at
    most ``cfg.tol``.  ``start`` replaces ``y0`` as the first iterate (the
    inhomogeneous term stays ``y0``).  The report is returned whether or not
    the iteration converged.
    """
    if not prob.a < cfg.h <= prob.b * (1 + 1e-12):
        raise DomainError(f"need a < h <= b, got a={prob.a}, h={cfg.h}, b={prob.b}")
    nodes, shown = _lattice(ctx, prob, cfg)
    pk = _kernel_params(ctx, prob)
    y0_fn = initial_iterate(ctx, prob)
    y0 = np.array([y0_fn(float(x)) for x in nodes])

    heuristic = prob.lipschitz_A is None
    try:
        if heuristic:
            A = _heuristic_lipschitz(prob, nodes[:shown], y0[:shown])
            M = prabhakar_bound_constant(ctx, pk, prob.a, cfg.h).value
            delta1 = A * M
        else:
            delta1 = contraction_constant(ctx, prob, cfg.h)
    except QCalcError as exc:
        log.warning("contraction constant unavailable: %s", exc)
        delta1 = math.inf
    contraction_ok = delta1 < 1.0
    if not contraction_ok:
        warnings.warn(f"contraction condition fails: delta1={delta1:.6g} >= 1", RuntimeWarning, stacklevel=2)

    W = _weight_matrix(ctx, pk, nodes)
    y = y0.copy() if start is None else np.array([float(start(float(x))) for x in nodes])
    history: list[float] = []
    ratios: list[float] = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        fvals = np.array([_call_rhs(prob, float(x), float(v)) for x, v in zip(nodes, y)])
        y_new = y0 + W @ fvals
        d = float(np.max(np.abs(y_new[:shown] - y[:shown])))
        if history and history[-1] >= cfg.tol and d >= cfg.tol:
            ratios.append(d / history[-1])
        history.append(d)
        y = y_new
        if not math.isfinite(d):
            break
        if d <= cfg.tol:
            converged = True
            break

    solution = LatticeFunction(nodes, y, y0_fn, name="y")
    return SolverReport(
        solution=solution,
        iterations=it,
        residual_history=history,
        delta1=delta1,
        converged=converged,
        contraction_ok=contraction_ok,
        delta1_heuristic=heuristic,
        ratios=ratios,
        h=cfg.h,
        b=prob.b,
        truncated=cfg.h < prob.b,
    )


def _report_nodes(y, nodes, depth: int) -> np.ndarray:
    if nodes is not None:
        return np.asarray(nodes, dtype=float)
    if isinstance(y, LatticeFunction):
        return y.nodes[:depth]
    raise DomainError("pass nodes explicitly for a function without a lattice")


def volterra_residual(
    ctx: QContext, prob: CauchyProblem, y: Callable[[float], float], nodes=None, depth: int = 64
) -> float:
    """``sup |y - PI^{alpha,beta,gamma,w_k} f(., y) - xi0 g(x, a/q)|`` over the lattice."""
    pk = _kernel_params(ctx, prob)
    y0 = initial_iterate(ctx, prob)
    f = _rhs_fn(prob, y)
    worst = 0.0
    for x in _report_nodes(y, nodes, depth):
        x = float(x)
        r = y(x) - prabhakar_q_integral(ctx, pk, prob.a, f, x).value - y0(x)
        worst = max(worst, abs(r))
    return worst


def initial_condition_value(
    ctx: QContext, prob: CauchyProblem, y: Callable[[float], float], x: float | None = None
) -> float:
    """``F(a+)`` for ``F = PI^{alpha,1-beta,-gamma,omega} y``.

    For ``a = 0`` this is the lattice limit of ``F(x q^k)``.  For ``a > 0``
    the lattice has no point between ``a`` and ``a/q`` and ``F(a) = 0`` (an
    empty sum), so ``F`` is read at the first node ``a/q``.  That value
    exceeds the continuous one by the first Jackson cell of ``f``.
    """
    if prob.a > 0:
        p = prob.params
        rest = 1.0 - p.beta
        inner = PrabhakarParams(p.alpha, rest, -p.gamma, p.omega) if rest > 1e-12 else None
        first = prob.a / ctx.q
        if inner is None:
            return float(y(first))
        return prabhakar_q_integral(ctx, inner, prob.a, y, first).value
    if x is None:
        x = float(y.nodes[0]) if isinstance(y, LatticeFunction) else prob.b
    return initial_functional(ctx, prob.params, prob.a, y, x).value


# divided differences near 0 cancel ~|y|/x digits, so the probe stays on the upper nodes
DIFFERENTIAL_DEPTH = 20


def differential_residual(
    ctx: QContext,
    prob: CauchyProblem,
    y: Callable[[float], float],
    nodes=None,
    depth: int = DIFFERENTIAL_DEPTH,
) -> float:
    """``sup |PD^{alpha,beta,gamma,omega} y - f(x, y)|`` over the first ``depth`` lattice nodes.

    For ``a > 0`` nodes whose difference stencil reaches ``a`` are skipped:
    there the q-derivative sees the jump of the inner integral from 0 at
    ``a`` to about ``xi0`` at ``a/q``, the discrete form of the initial datum.
    """
    d = prabhakar_derivative_fn(ctx, prob.params, prob.a, y)
    reach = ctx.q ** math.ceil(prob.params.beta)
    worst = 0.0
    for x in _report_nodes(y, nodes, depth):
        x = float(x)
        if prob.a > 0 and x * reach <= prob.a * (1 + 1e-9):
            continue
        worst = max(worst, abs(d(x) - _call_rhs(prob, x, y(x))))
    return worst
