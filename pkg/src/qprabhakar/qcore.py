"""q-arithmetic primitives.

Scalar entry points (``q_number``, ``q_gamma``, ...) follow the textbook
definitions term by term and report truncation diagnostics through
:class:`SeriesValue`.  The ``log_*`` helpers at the bottom are vectorised
versions used by the operator modules, where the same products are needed
for hundreds of lattice nodes at once.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

try:
    from gmpy2 import mpq as Fraction
except ImportError:  # pragma: no cover
    from fractions import Fraction

from .errors import DivisionByZero, DomainError, NotConverged

__all__ = [
    "QContext",
    "SeriesValue",
    "q_number",
    "q_shifted_factorial",
    "q_shifted_factorial_inf",
    "q_factorial",
    "q_binomial",
    "q_power_int",
    "q_power_frac",
    "q_gamma",
    "q_pochhammer",
    "check_vandermonde",
    "check_pochhammer_convolution",
]

# factors of a q-product smaller than this are treated as exact lattice zeros
ZERO_FACTOR = 1e-12


@dataclass(frozen=True)
class QContext:
    """Base ``q`` together with the truncation policy for series and products.

    Parameters
    ----------
    q : float
        Base of the q-calculus, strictly inside ``(0, 1)``.
    eps_series : float
        Relative tolerance at which series (and Jackson sums) are truncated.
    eps_prod : float
        Infinite products ``(a;q)_inf`` stop once ``|a| q^i`` drops below it.
    max_terms : int
        Hard cap on the number of terms or factors of any series or product.
    """

    q: float
    eps_series: float = 1e-14
    eps_prod: float = 1e-16
    max_terms: int = 10_000

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 < q < 1.0):
            raise DomainError(f"q must lie in (0, 1), got {self.q!r}")
        if not self.eps_series > 0 or not self.eps_prod > 0:
            raise DomainError("eps_series and eps_prod must be positive")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise DomainError(f"max_terms must be a positive integer, got {self.max_terms!r}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "max_terms", int(self.max_terms))
        if q >= 0.999:
            warnings.warn(
                f"q={q} is close to 1; infinite q-products converge very slowly",
                RuntimeWarning,
                stacklevel=3,
            )

    def replace(self, **changes) -> "QContext":
        return replace(self, **changes)


@dataclass(frozen=True)
class SeriesValue:
    """A truncated series/product value with its truncation diagnostics."""

    value: float
    terms_used: int
    tail_estimate: float
    converged: bool = True

    def __float__(self) -> float:
        return float(self.value)


def _is_nonneg_int(x) -> bool:
    return float(x) >= 0 and float(x).is_integer()


@lru_cache(maxsize=64)
def _qpow_table(q: float, n: int) -> np.ndarray:
    table = q ** np.arange(n, dtype=float)
    table.setflags(write=False)
    return table


def qpowers(ctx: QContext, n: int) -> np.ndarray:
    """Read-only array ``[q^0, q^1, ..., q^(n-1)]``."""
    size = 64
    while size < n:
        size *= 2
    return _qpow_table(ctx.q, size)[:n]


def product_length(ctx: QContext, a_abs: float) -> int:
    """Number of factors kept in ``(a;q)_inf``: the least m with |a| q^m < eps_prod."""
    if a_abs == 0.0:
        return 0
    m = max(1, math.ceil((math.log(ctx.eps_prod) - math.log(a_abs)) / math.log(ctx.q)))
    while a_abs * ctx.q**m >= ctx.eps_prod:
        m += 1
    while m > 1 and a_abs * ctx.q ** (m - 1) < ctx.eps_prod:
        m -= 1
    return m


def _log_tail_bound(ctx: QContext, a_abs: float, m: int) -> float:
    """exp(sum_{i>=m} |a|q^i / (1-|a|q^i)) - 1, bounded by a geometric majorant."""
    lead = a_abs * ctx.q**m
    if lead == 0.0:
        return 0.0
    if lead >= 1.0:
        return math.inf
    return math.expm1(lead / ((1.0 - ctx.q) * (1.0 - lead)))


def _snap(factors: np.ndarray) -> np.ndarray:
    return np.where(np.abs(factors) < ZERO_FACTOR, 0.0, factors)


def q_number(ctx: QContext, alpha: float) -> float:
    """The q-real number ``[alpha]_q = (1 - q^alpha) / (1 - q)``."""
    return -math.expm1(alpha * math.log(ctx.q)) / (1.0 - ctx.q)


def _poch(a, q, n: int):
    # generic finite product, works for floats and Fractions alike
    p = a * 0 + 1
    qi = q * 0 + 1
    for _ in range(n):
        p *= 1 - a * qi
        qi *= q
    return p


def _poch_prefix(a, q, n: int) -> list:
    """``[(a;q)_0, (a;q)_1, ..., (a;q)_n]`` in the arithmetic of ``a`` and ``q``."""
    out = [a * 0 + 1]
    qi = q * 0 + 1
    for _ in range(n):
        out.append(out[-1] * (1 - a * qi))
        qi *= q
    return out


def q_shifted_factorial(ctx: QContext, a: float, n: int) -> float:
    """Finite q-shifted factorial ``(a;q)_n``; equals 1 for ``n = 0``."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    if n == 0:
        return 1.0
    factors = _snap(1.0 - a * qpowers(ctx, n))
    return float(np.prod(factors))


def q_shifted_factorial_inf(ctx: QContext, a: float) -> SeriesValue:
    """Infinite product ``(a;q)_inf`` truncated once ``|a| q^(I+1) < eps_prod``."""
    if not math.isfinite(a):
        raise DomainError(f"(a;q)_inf needs a finite a, got {a!r}")
    m = product_length(ctx, abs(a))
    if m == 0:
        return SeriesValue(1.0, 0, 0.0, True)
    if m > ctx.max_terms:
        kept = ctx.max_terms
        value = float(np.prod(_snap(1.0 - a * qpowers(ctx, kept))))
        partial = SeriesValue(value, kept, abs(value) * _log_tail_bound(ctx, abs(a), kept), False)
        raise NotConverged(f"(a;q)_inf with a={a} needs {m} factors > max_terms={kept}", partial)
    value = float(np.prod(_snap(1.0 - a * qpowers(ctx, m))))
    return SeriesValue(value, m, abs(value) * _log_tail_bound(ctx, abs(a), m), True)


def q_factorial(ctx: QContext, n: int) -> float:
    """``[n]_q! = [1]_q [2]_q ... [n]_q`` with ``[0]_q! = 1``."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    q = ctx.q
    p = 1.0
    for k in range(1, n + 1):
        p *= (1.0 - q**k) / (1.0 - q)
    return p


def q_binomial(ctx: QContext, n: int, k: int) -> float:
    """Gaussian binomial coefficient ``[n k]_q``."""
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"q-binomial needs 0 <= k <= n, got n={n}, k={k}")
    q = ctx.q
    k = min(k, n - k)
    p = 1.0
    for i in range(k):
        p *= (1.0 - q ** (n - i)) / (1.0 - q ** (i + 1))
    return p


def q_power_int(ctx: QContext, a: float, b: float, k: int) -> float:
    """``(a - b)_q^k = prod_{i<k} (a - b q^i)``, equal to 1 for ``k = 0``."""
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    p = 1.0
    qi = 1.0
    for _ in range(k):
        p *= a - b * qi
        qi *= ctx.q
    return p


def q_power_frac(ctx: QContext, a: float, b: float, alpha: float) -> SeriesValue:
    """Fractional q-power ``(a - b)_q^alpha = a^alpha (b/a;q)_inf / (q^alpha b/a;q)_inf``.

    Non-negative integer exponents are delegated to :func:`q_power_int`.
    Raises :class:`DivisionByZero` when ``q^alpha b/a`` hits ``q^(-i)``.
    """
    if _is_nonneg_int(alpha):
        k = int(alpha)
        return SeriesValue(q_power_int(ctx, a, b, k), k, 0.0, True)
    if b == 0.0:
        if a > 0.0:
            return SeriesValue(a**alpha, 0, 0.0, True)
        if a == 0.0:
            if alpha > 0:
                return SeriesValue(0.0, 0, 0.0, True)
            raise DivisionByZero(f"(0 - 0)_q^{alpha} is singular for alpha < 0")
    if a <= 0.0:
        raise DomainError(f"(a - b)_q^alpha needs a > 0 for non-integer alpha, got a={a}")
    u = b / a
    if abs(u) > 1.0:
        return _q_power_ratio(ctx, a, u, alpha)
    num = q_shifted_factorial_inf(ctx, u)
    den = q_shifted_factorial_inf(ctx, ctx.q**alpha * u)
    if den.value == 0.0:
        raise DivisionByZero(
            f"(a - b)_q^alpha singular: q^alpha b/a = {ctx.q**alpha * u} lies on q^(-i)"
        )
    value = a**alpha * num.value / den.value
    if num.value == 0.0:
        return SeriesValue(0.0, num.terms_used + den.terms_used, 0.0, True)
    rel = num.tail_estimate / abs(num.value) + den.tail_estimate / abs(den.value)
    return SeriesValue(value, max(num.terms_used, den.terms_used), abs(value) * rel, True)


def _q_power_ratio(ctx: QContext, a: float, u: float, alpha: float) -> SeriesValue:
    # |b/a| > 1: both products are huge, so divide factor by factor in log space
    qa = ctx.q**alpha
    big = max(abs(u), abs(qa * u))
    m = product_length(ctx, big)
    if m > ctx.max_terms:
        raise NotConverged(f"(a - b)_q^alpha with b/a={u} needs {m} factors > max_terms={ctx.max_terms}")
    qp = qpowers(ctx, m)
    num = _snap(1.0 - u * qp)
    den = _snap(1.0 - qa * u * qp)
    if np.any(den == 0.0):
        raise DivisionByZero(f"(a - b)_q^alpha singular: q^alpha b/a = {qa * u} lies on q^(-i)")
    if np.any(num == 0.0):
        return SeriesValue(0.0, m, 0.0, True)
    r = num / den
    sign = -1.0 if np.count_nonzero(r < 0) % 2 else 1.0
    log_abs = alpha * math.log(a) + float(np.sum(np.log(np.abs(r))))
    if log_abs > 700.0:
        raise DomainError(f"(a - b)_q^alpha overflows for b/a={u}, alpha={alpha}")
    value = sign * math.exp(log_abs)
    tail = abs(value) * 2.0 * _log_tail_bound(ctx, big, m)
    return SeriesValue(value, m, tail, True)


def q_gamma(ctx: QContext, x: float) -> SeriesValue:
    """q-gamma function ``(q;q)_inf / (q^x;q)_inf * (1-q)^(1-x)`` for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"q_gamma is defined for x > 0 only, got {x}")
    num = q_shifted_factorial_inf(ctx, ctx.q)
    den = q_shifted_factorial_inf(ctx, ctx.q**x)
    value = num.value / den.value * (1.0 - ctx.q) ** (1.0 - x)
    rel = num.tail_estimate / num.value + den.tail_estimate / den.value
    return SeriesValue(value, max(num.terms_used, den.terms_used), abs(value) * rel, True)


def q_pochhammer(ctx: QContext, gamma: float, n: int) -> float:
    """``(gamma)_{n,q} = (q^gamma;q)_n / (q;q)_n``."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    q = ctx.q
    p = 1.0
    for i in range(n):
        # exponent summed first so that gamma = -i gives an exact zero factor
        p *= (1.0 - q ** (gamma + i)) / (1.0 - q ** (i + 1))
    return p


def check_vandermonde(
    ctx: QContext, alpha: float, beta: float, n: int, exact: bool = True
) -> float:
    """Residual of the q-Vandermonde convolution for ``(q^(alpha+beta);q)_n``.

    Both sides are polynomials in ``q``, ``q^alpha`` and ``q^beta``.  With
    ``exact=True`` they are evaluated in rational arithmetic on the binary64
    values of those three numbers, so any non-zero result points at an
    algebra error rather than rounding.  ``exact=False`` evaluates in floats;
    its residual then scales with the largest summand (``q^(k beta)`` can
    reach 1e26 for negative ``beta``).
    """
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    q = ctx.q
    if exact:
        Q, A, B = Fraction(q), Fraction(q**alpha), Fraction(q**beta)
        qq = _poch_prefix(Q, Q, n)
        pa = _poch_prefix(A, Q, n)
        pb = _poch_prefix(B, Q, n)
        lhs = _poch(A * B, Q, n)
        rhs = Fraction(0)
        bk = Fraction(1)
        for k in range(n + 1):
            rhs += qq[n] / (qq[k] * qq[n - k]) * bk * pa[k] * pb[n - k]
            bk *= B
        return abs(float(lhs - rhs))
    lhs = q_shifted_factorial(ctx, q ** (alpha + beta), n)
    terms = [
        q_binomial(ctx, n, k)
        * q ** (k * beta)
        * q_shifted_factorial(ctx, q**alpha, k)
        * q_shifted_factorial(ctx, q**beta, n - k)
        for k in range(n + 1)
    ]
    return abs(lhs - math.fsum(terms))


def check_pochhammer_convolution(
    ctx: QContext, gamma: float, sigma: float, n: int, exact: bool = True
) -> float:
    """Residual of ``sum_k (gamma)_{n-k,q} q^(gamma k) (sigma)_{k,q} = (gamma+sigma)_{n,q}``.

    See :func:`check_vandermonde` for the meaning of ``exact``.
    """
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    q = ctx.q
    if exact:
        Q, G, S = Fraction(q), Fraction(q**gamma), Fraction(q**sigma)
        qq = _poch_prefix(Q, Q, n)
        pg = _poch_prefix(G, Q, n)
        ps = _poch_prefix(S, Q, n)
        lhs = Fraction(0)
        gk = Fraction(1)
        for k in range(n + 1):
            lhs += pg[n - k] / qq[n - k] * gk * ps[k] / qq[k]
            gk *= G
        return abs(float(lhs - _poch(G * S, Q, n) / qq[n]))
    terms = [
        q_pochhammer(ctx, gamma, n - k) * q ** (gamma * k) * q_pochhammer(ctx, sigma, k)
        for k in range(n + 1)
    ]
    return abs(math.fsum(terms) - q_pochhammer(ctx, gamma + sigma, n))


# ---------------------------------------------------------------------------
# vectorised log-space helpers for the operator modules


def _require_below_one(v: np.ndarray) -> None:
    if v.size and np.max(v) >= 1.0:
        raise DomainError("log-space q-product needs every argument below 1")


def log_qpoch_inf(ctx: QContext, v) -> np.ndarray:
    """``log (v;q)_inf`` elementwise, for arguments ``v < 1``."""
    v = np.asarray(v, dtype=float)
    _require_below_one(v)
    amax = float(np.max(np.abs(v))) if v.size else 0.0
    m = product_length(ctx, amax)
    if m == 0:
        return np.zeros_like(v)
    if m > ctx.max_terms:
        raise NotConverged(f"(v;q)_inf needs {m} factors > max_terms={ctx.max_terms}")
    return np.log1p(-np.multiply.outer(v, qpowers(ctx, m))).sum(axis=-1)


def log_qpoch_suffix(ctx: QContext, v, count: int) -> np.ndarray:
    """``log (v q^k;q)_inf`` for ``k = 0..count-1``; result has shape ``v.shape + (count,)``."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    _require_below_one(v)
    amax = float(np.max(np.abs(v))) if v.size else 0.0
    m = product_length(ctx, amax)
    if m > ctx.max_terms:
        raise NotConverged(f"(v;q)_inf needs {m} factors > max_terms={ctx.max_terms}")
    length = count - 1 + max(m, 1)
    logs = np.log1p(-np.multiply.outer(v, qpowers(ctx, length)))
    suffix = np.cumsum(logs[..., ::-1], axis=-1)[..., ::-1]
    return suffix[..., :count]


@lru_cache(maxsize=64)
def _log_qq_inf(ctx: QContext) -> float:
    return float(log_qpoch_inf(ctx, np.array([ctx.q]))[0])


def log_q_gamma(ctx: QContext, x) -> np.ndarray:
    """``log Gamma_q(x)`` elementwise for ``x > 0``; never overflows."""
    x = np.asarray(x, dtype=float)
    if x.size and np.min(x) <= 0:
        raise DomainError("log_q_gamma is defined for x > 0 only")
    return _log_qq_inf(ctx) - log_qpoch_inf(ctx, ctx.q**x) + (1.0 - x) * math.log1p(-ctx.q)
