"""Jackson q-derivative and q-integral on geometric lattices.

Every integral here is a Jackson sum ``x(1-q) sum_k f(x q^k) q^k``; lower
limits ``a > 0`` are handled as the difference of two sums anchored at 0.
When ``x`` lies on the lattice of ``a`` (``a = x q^m``) the two sums share
every node below ``a`` and those terms cancel identically, so only the
``m`` nodes in ``(a, x]`` are visited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NotConverged
from .qcore import QContext, SeriesValue, qpowers

__all__ = [
    "QFunction",
    "QLattice",
    "lattice_offset",
    "lattice_sum",
    "q_derivative",
    "q_derivative_n",
    "q_integral_0",
    "q_integral",
    "q_integral_n",
    "q_norm",
]

# nodes closer than this (relatively) are treated as the same lattice point
LATTICE_RTOL = 1e-9


def _node_key(x: float):
    m, e = math.frexp(x)
    return (round(m * 2.0**40), e)


class QFunction:
    """A real function on ``[a, b]`` that is evaluated lazily and memoised.

    ``fn`` must accept any node of the geometric lattices ``{x q^k}`` for
    ``x`` in ``(a, b]``.  Values are cached per node, keyed on the node
    rounded to about 12 significant digits, so the same lattice point
    reached through different products of ``q`` shares one cache entry.
    """

    def __init__(
        self,
        fn: Callable[[float], float],
        domain: tuple[float, float] = (0.0, math.inf),
        memo: bool = True,
        name: str | None = None,
    ):
        a, b = domain
        if not 0.0 <= a < b:
            raise DomainError(f"QFunction domain must satisfy 0 <= a < b, got {domain}")
        self.fn = fn
        self.domain = (float(a), float(b))
        self.memo: dict | None = {} if memo else None
        self.name = name or getattr(fn, "__name__", "f")

    def __call__(self, x: float) -> float:
        if self.memo is None:
            return float(self.fn(x))
        key = _node_key(x)
        try:
            return self.memo[key]
        except KeyError:
            value = float(self.fn(x))
            # idempotent write: concurrent evaluations store the same number
            self.memo.setdefault(key, value)
            return value

    def values(self, xs) -> np.ndarray:
        return np.array([self(float(x)) for x in np.asarray(xs, dtype=float).ravel()])

    def __repr__(self) -> str:
        return f"QFunction({self.name}, domain={self.domain})"

    @classmethod
    def constant(cls, c: float, domain=(0.0, math.inf)) -> "QFunction":
        return cls(lambda x: c, domain, memo=False, name=f"const({c})")


@dataclass(frozen=True)
class QLattice:
    """Geometric node set ``anchor * q^k`` for ``k = 0 .. depth-1``."""

    ctx: QContext
    anchor: float
    depth: int = 64

    def __post_init__(self):
        if not self.anchor > 0:
            raise DomainError(f"lattice anchor must be positive, got {self.anchor}")
        if not 1 <= self.depth <= self.ctx.max_terms:
            raise DomainError(f"lattice depth must lie in [1, max_terms], got {self.depth}")

    @property
    def nodes(self) -> np.ndarray:
        return self.anchor * qpowers(self.ctx, self.depth)

    def __len__(self) -> int:
        return self.depth


def lattice_offset(ctx: QContext, a: float, x: float) -> int | None:
    """Return ``m`` with ``a = x q^m`` (m >= 0) when ``a`` sits on the lattice of ``x``."""
    if a <= 0 or x <= 0 or a > x * (1 + LATTICE_RTOL):
        return None
    m = math.log(a / x) / math.log(ctx.q)
    k = round(m)
    if abs(m - k) < LATTICE_RTOL * max(1.0, abs(m)) * 100 and k >= 0:
        return int(k)
    return None


def _tail_from(mags: list[float]) -> float:
    last = mags[-1]
    if last == 0.0:
        return 0.0
    ratios = [b / a for a, b in zip(mags[:-1], mags[1:]) if a > 0]
    r = max(ratios) if ratios else 1.0
    if r < 1.0:
        return last * r / (1.0 - r)
    return 10.0 * last


def lattice_sum(
    ctx: QContext,
    weights: Callable[[int], np.ndarray],
    f: Callable[[float], float],
    anchor: float,
    count: int | None = None,
) -> SeriesValue:
    """Sum ``w_k f(anchor q^k)`` over the lattice of ``anchor``.

    ``weights(K)`` returns the first ``K`` weights.  With ``count`` given,
    exactly that many nodes are summed.  Otherwise the sum stops once three
    consecutive terms fall below ``eps_series`` times the larger of the
    partial sum and the largest term so far (and at least ten terms are
    used).  The second scale matters when the terms cancel to about zero:
    rounding already limits the result to ``eps`` times the largest term.
    Hitting ``max_terms`` raises :class:`NotConverged`.
    """
    if anchor == 0.0 or count == 0:
        return SeriesValue(0.0, 0, 0.0, True)
    limit = ctx.max_terms if count is None else count
    size = min(64, limit) if count is None else count
    w = weights(size)
    total = 0.0
    comp = 0.0
    small = 0
    peak = 0.0
    mags: list[float] = []
    k = 0
    while True:
        if k == size:
            if count is not None:
                return SeriesValue(total + comp, k, 0.0, True)
            if size >= limit:
                partial = SeriesValue(total + comp, k, _tail_from(mags[-3:]), False)
                raise NotConverged(
                    f"Jackson sum at anchor {anchor} not converged after {k} terms", partial
                )
            size = min(2 * size, limit)
            w = weights(size)
        node = anchor * qpowers(ctx, k + 1)[k]
        if node == 0.0:
            # the lattice underflowed; nothing representable is left
            return SeriesValue(total + comp, k, _tail_from(mags[-3:]) if mags else 0.0, True)
        term = w[k] * f(node)
        if not math.isfinite(term):
            partial = SeriesValue(total + comp, k, math.inf, False)
            raise NotConverged(f"Jackson sum at anchor {anchor}: non-finite term at node {node:.3g}", partial)
        # Neumaier compensated summation
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        k += 1
        mags.append(abs(term))
        if len(mags) > 4:
            mags.pop(0)
        if count is None:
            peak = max(peak, abs(term))
            scale = max(abs(total + comp), peak)
            small = small + 1 if abs(term) <= ctx.eps_series * scale else 0
            if small >= 3 and k >= 10:
                return SeriesValue(total + comp, k, _tail_from(mags[-3:]), True)


def _jackson_weights(ctx: QContext, anchor: float) -> Callable[[int], np.ndarray]:
    return lambda K: anchor * (1.0 - ctx.q) * qpowers(ctx, K)


def combine(upper: SeriesValue, lower: SeriesValue) -> SeriesValue:
    """``upper - lower`` with merged diagnostics."""
    return SeriesValue(
        upper.value - lower.value,
        upper.terms_used + lower.terms_used,
        upper.tail_estimate + lower.tail_estimate,
        upper.converged and lower.converged,
    )


def kernel_integral(
    ctx: QContext,
    weights_for: Callable[[float], Callable[[int], np.ndarray]],
    f: Callable[[float], float],
    a: float,
    x: float,
) -> SeriesValue:
    """``int_a^x K(x,t) f(t) d_q t`` given per-anchor weight factories.

    ``weights_for(c)`` returns the weight function of the nodes ``c q^k``
    (Jackson measure times kernel).  No ordering check between ``a`` and
    ``x`` is made here.
    """
    if x == 0.0:
        return SeriesValue(0.0, 0, 0.0, True)
    if a == 0.0:
        return lattice_sum(ctx, weights_for(x), f, x)
    if a == x:
        return SeriesValue(0.0, 0, 0.0, True)
    m = lattice_offset(ctx, a, x)
    if m is not None:
        return lattice_sum(ctx, weights_for(x), f, x, count=m)
    return combine(
        lattice_sum(ctx, weights_for(x), f, x), lattice_sum(ctx, weights_for(a), f, a)
    )


def q_derivative(ctx: QContext, f: Callable[[float], float], x: float) -> float:
    """Jackson derivative ``(f(x) - f(qx)) / (x (1-q))``, undefined at ``x = 0``."""
    if x == 0.0:
        raise DomainError("the q-derivative is not defined at x = 0")
    _check_upper(f, x)
    return (f(x) - f(ctx.q * x)) / (x * (1.0 - ctx.q))


def q_derivative_n(ctx: QContext, f: Callable[[float], float], x: float, n: int) -> float:
    """``n``-fold Jackson derivative via divided differences on ``x q^j``."""
    if n < 0:
        raise DomainError(f"derivative order must be non-negative, got {n}")
    if n == 0:
        return float(f(x))
    if x == 0.0:
        raise DomainError("the q-derivative is not defined at x = 0")
    _check_upper(f, x)
    q = ctx.q
    nodes = [x * q**j for j in range(n + 1)]
    level = [float(f(t)) for t in nodes]
    for order in range(1, n + 1):
        level = [
            (level[j] - level[j + 1]) / (nodes[j] * (1.0 - q)) for j in range(n + 1 - order)
        ]
    return level[0]


def _check_upper(f, x: float) -> None:
    domain = getattr(f, "domain", None)
    if domain is not None and x > domain[1] * (1 + LATTICE_RTOL):
        raise DomainError(f"x={x} lies above the function domain {domain}")


def q_integral_0(ctx: QContext, f: Callable[[float], float], x: float) -> SeriesValue:
    """Jackson integral ``int_0^x f(t) d_q t``."""
    if x < 0:
        raise DomainError(f"q_integral_0 needs x >= 0, got {x}")
    return lattice_sum(ctx, _jackson_weights(ctx, x), f, x)


def q_integral(ctx: QContext, f: Callable[[float], float], a: float, x: float) -> SeriesValue:
    """Jackson integral ``int_a^x f(t) d_q t`` for ``0 <= a <= x``."""
    if not 0.0 <= a <= x:
        raise DomainError(f"q_integral needs 0 <= a <= x, got a={a}, x={x}")
    _check_upper(f, x)
    return kernel_integral(ctx, lambda c: _jackson_weights(ctx, c), f, a, x)


def q_integral_n(
    ctx: QContext, f: Callable[[float], float], a: float, x: float, n: int
) -> SeriesValue:
    """``n``-fold iterated Jackson integral with lower limit ``a``."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    if n == 0:
        return SeriesValue(float(f(x)), 0, 0.0, True)
    if not 0.0 <= a <= x:
        raise DomainError(f"q_integral_n needs 0 <= a <= x, got a={a}, x={x}")
    inner = f
    for _ in range(n - 1):
        inner = _integrated(ctx, inner, a)
    return kernel_integral(ctx, lambda c: _jackson_weights(ctx, c), inner, a, x)


def _integrated(ctx: QContext, f, a: float) -> QFunction:
    def F(t: float) -> float:
        return kernel_integral(ctx, lambda c: _jackson_weights(ctx, c), f, a, t).value

    return QFunction(F, name="I_q f")


def q_norm(
    ctx: QContext, f: Callable[[float], float], a: float, x: float, p: float = 1.0
) -> SeriesValue:
    """``L^p_q[a, x]`` norm ``(int_a^x |f|^p d_q t)^(1/p)``."""
    if not p >= 1:
        raise DomainError(f"q_norm needs p >= 1, got {p}")
    s = q_integral(ctx, lambda t: abs(f(t)) ** p, a, x)
    value = s.value ** (1.0 / p) if s.value > 0 else 0.0
    # d(s^(1/p)) = s^(1/p - 1)/p ds
    tail = value / (p * s.value) * s.tail_estimate if s.value > 0 else 0.0
    return SeriesValue(value, s.terms_used, tail, s.converged)
