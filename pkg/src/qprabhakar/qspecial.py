"""q-Mittag-Leffler and q-Prabhakar series and the Prabhakar kernel.

All series have the shape ``sum_n (gamma)_{n,q} w^n P_n / Gamma_q(alpha n + beta)``.
They are summed with Neumaier compensation and stopped by a geometric
majorant of the tail: past index ``n`` every term ratio is bounded by

    r_n = C_n |w| max(R_n, z^delta) Gamma_q(alpha n + beta) / Gamma_q(alpha n + alpha + beta)

where ``C_n = 1/(1 - q^(n+1))`` bounds the Pochhammer ratio once
``q^(gamma+n) <= 2``, ``R_n = P_(n+1)/P_n`` and the gamma ratio decreases
in ``n``.  The recorded tail is ``|term_n| r_n / (1 - r_n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceDomainError, DomainError, NotConverged
from .qcore import (
    QContext,
    SeriesValue,
    log_q_gamma,
    log_qpoch_suffix,
    q_power_frac,
)

__all__ = [
    "PrabhakarParams",
    "GeneralizedArgs",
    "q_mittag_leffler",
    "q_prabhakar",
    "q_prabhakar_generalized",
    "kernel_g",
    "kernel_values",
    "convergence_ratio",
]

# the convergence gate rejects arguments within this relative margin of the boundary
GATE_MARGIN = 1e-12
_BLOCK = 16
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PrabhakarParams:
    """Operator parameters ``(alpha, beta, gamma, omega)`` with ``alpha, beta > 0``."""

    alpha: float
    beta: float
    gamma: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "omega"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if not self.alpha > 0 or not self.beta > 0:
            raise DomainError(
                f"Prabhakar parameters need alpha > 0 and beta > 0, got "
                f"alpha={self.alpha}, beta={self.beta}"
            )

    def with_omega(self, omega: float) -> "PrabhakarParams":
        return PrabhakarParams(self.alpha, self.beta, self.gamma, omega)


@dataclass(frozen=True)
class GeneralizedArgs:
    """Argument triple ``(delta, z, s)`` of the generalized function; needs ``s < z``."""

    delta: float
    z: float
    s: float

    def __post_init__(self):
        if not self.s < self.z:
            raise DomainError(f"generalized q-Prabhakar needs s < z, got s={self.s}, z={self.z}")


def convergence_ratio(ctx: QContext, alpha: float, w_abs: float) -> float:
    """Limit ratio ``|w| (1-q)^alpha`` of consecutive series terms."""
    return w_abs * (1.0 - ctx.q) ** alpha


def _gate(ctx: QContext, alpha: float, w_abs: float, what: str) -> None:
    if convergence_ratio(ctx, alpha, w_abs) >= 1.0 - GATE_MARGIN:
        raise ConvergenceDomainError(
            f"convergence domain violated: |{what}| (1-q)^alpha = "
            f"{convergence_ratio(ctx, alpha, w_abs):.6g} >= 1"
        )


class _LogGamma:
    """``log Gamma_q(alpha n + beta)`` computed in blocks as ``n`` grows."""

    def __init__(self, ctx: QContext, alpha: float, beta: float):
        self.ctx, self.alpha, self.beta = ctx, alpha, beta
        self.table = np.empty(0)

    def __getitem__(self, n: int) -> float:
        if n >= self.table.size:
            size = max(2 * self.table.size, n + 1, _BLOCK)
            x = self.alpha * np.arange(size) + self.beta
            # order 0 has no n = 0 term; its slot is never read
            self.table = np.full(size, np.nan)
            self.table[x > 0] = log_q_gamma(self.ctx, x[x > 0])
        return float(self.table[n])


def _series(ctx, alpha, beta, gamma, w, power, zdelta) -> SeriesValue:
    """Sum ``(gamma)_n w^n power(n) / Gamma_q(alpha n + beta)``.

    ``power(n)`` returns ``P_n`` (with ``P_0 = 1``); ``zdelta`` is the limit
    of ``P_(n+1)/P_n`` used in the tail majorant (``None`` if unknown).
    The reported tail adds a rounding bound ``sum |t_n| rho_n`` to the
    truncation majorant; only the majorant decides when to stop.
    """
    q = ctx.q
    lg = _LogGamma(ctx, alpha, beta)
    total = comp = 0.0
    poch = 1.0
    p_cur = power(0)
    w_abs = abs(w)
    tail = math.inf
    rounding = 0.0
    for n in range(ctx.max_terms):
        if poch == 0.0 or p_cur == 0.0:
            term = 0.0
        elif w == 0.0 and n > 0:
            term = 0.0
        else:
            wn = w**n if n else 1.0
            term = poch * wn * p_cur * math.exp(-lg[n])
            # exp amplifies the absolute error of log Gamma_q
            rounding += abs(term) * _EPS * (32 + n + 2 * abs(lg[n]))
        t = total + term
        comp += (total - t) + term if abs(total) >= abs(term) else (term - t) + total
        total = t
        s = total + comp
        # every later term vanishes
        poch_next = poch * (1.0 - q ** (gamma + n)) / (1.0 - q ** (n + 1))
        if w == 0.0 or poch_next == 0.0:
            return SeriesValue(s, n + 1, rounding, True)
        p_next = power(n + 1)
        if p_next == 0.0 or p_cur == 0.0:
            if p_next == 0.0:
                return SeriesValue(s, n + 1, rounding, True)
            poch, p_cur = poch_next, p_next
            continue
        if q ** (gamma + n) <= 2.0:
            ratio_p = abs(p_next / p_cur)
            bound_p = ratio_p if zdelta is None else max(ratio_p, zdelta)
            r = w_abs * bound_p * math.exp(lg[n] - lg[n + 1]) / (1.0 - q ** (n + 1))
            if r < 1.0:
                tail = abs(term) * r / (1.0 - r)
                if tail <= ctx.eps_series * abs(s) or (tail == 0.0 and s == 0.0):
                    return SeriesValue(s, n + 1, tail + rounding, True)
        poch, p_cur = poch_next, p_next
    partial = SeriesValue(total + comp, ctx.max_terms, tail + rounding, False)
    raise NotConverged(f"series not converged after max_terms={ctx.max_terms} terms", partial)


def q_mittag_leffler(ctx: QContext, alpha: float, beta: float, z: float) -> SeriesValue:
    """``e_{alpha,beta}(z;q) = sum_n z^n / Gamma_q(alpha n + beta)``."""
    return q_prabhakar(ctx, alpha, beta, 1.0, z)


def q_prabhakar(ctx: QContext, alpha: float, beta: float, gamma: float, z: float) -> SeriesValue:
    """``e^gamma_{alpha,beta}(z;q) = sum_n (gamma)_{n,q} z^n / Gamma_q(alpha n + beta)``."""
    if not alpha > 0 or not beta > 0:
        raise DomainError(f"need alpha > 0 and beta > 0, got alpha={alpha}, beta={beta}")
    _gate(ctx, alpha, abs(z), "z")
    return _series(ctx, alpha, beta, gamma, z, lambda n: 1.0, 1.0)


def _generalized(ctx, alpha, beta, gamma, omega, delta, z, s) -> SeriesValue:
    # (z-s)^{delta n}_q per term: q-powers do not compose as ordinary powers
    cache: dict[int, float] = {}

    def power(n: int) -> float:
        if n not in cache:
            cache[n] = q_power_frac(ctx, z, s, delta * n).value if n else 1.0
        return cache[n]

    zdelta = z**delta if delta > 0 and z > 0 else None
    return _series(ctx, alpha, beta, gamma, omega, power, zdelta)


def q_prabhakar_generalized(
    ctx: QContext, p, omega: float, args: GeneralizedArgs
) -> SeriesValue:
    """Generalized function ``sum_n (gamma)_n omega^n (z-s)^{delta n}_q / Gamma_q(alpha n + beta)``.

    ``p`` supplies ``alpha``, ``beta`` and ``gamma`` (a :class:`PrabhakarParams`
    or any object with those attributes); its own ``omega`` is ignored.
    """
    alpha, beta, gamma = float(p.alpha), float(p.beta), float(p.gamma)
    if not alpha > 0 or not beta > 0:
        raise DomainError(f"need alpha > 0 and beta > 0, got alpha={alpha}, beta={beta}")
    if not args.s < args.z:
        raise DomainError(f"generalized q-Prabhakar needs s < z, got s={args.s}, z={args.z}")
    first = abs(omega * q_power_frac(ctx, args.z, args.s, args.delta).value)
    _gate(ctx, alpha, first, "omega (z-s)^delta_q")
    if args.delta > 0 and args.z > 0:
        _gate(ctx, alpha, abs(omega) * args.z**args.delta, "omega z^delta")
    return _generalized(ctx, alpha, beta, gamma, omega, args.delta, args.z, args.s)


def kernel_g(
    ctx: QContext, alpha: float, mu: float, sigma: float, omega: float, x: float, s: float
) -> SeriesValue:
    """Kernel ``g(x,s) = (x - qs)^{mu-1}_q e^sigma_{alpha,mu}[omega (x - q^mu s)^alpha_q; q]``.

    Where the prefactor has a lattice zero the kernel is 0 and the series is
    not evaluated.  At ``x = q^mu s`` every ``n >= 1`` term carries the
    factor ``(1;q)_inf = 0``, leaving ``1/Gamma_q(mu)``.
    """
    if not alpha > 0 or not mu > 0:
        raise DomainError(f"kernel_g needs alpha > 0 and mu > 0, got alpha={alpha}, mu={mu}")
    if not x > 0 or s < 0:
        raise DomainError(f"kernel_g needs x > 0 and s >= 0, got x={x}, s={s}")
    q = ctx.q
    pre = q_power_frac(ctx, x, q * s, mu - 1.0)
    if pre.value == 0.0:
        return SeriesValue(0.0, pre.terms_used, 0.0, True)
    shifted = q**mu * s
    if shifted <= x:
        _gate(ctx, alpha, abs(omega) * x**alpha, "omega x^alpha")
    ser = _generalized(ctx, alpha, mu, sigma, omega, alpha, x, shifted)
    value = pre.value * ser.value
    tail = abs(pre.value) * ser.tail_estimate + abs(ser.value) * pre.tail_estimate
    return SeriesValue(value, ser.terms_used, tail, ser.converged)


def kernel_values(
    ctx: QContext,
    alpha: float,
    nu: float,
    gamma: float,
    omega: float,
    x: float,
    c: float,
    count: int,
) -> tuple[np.ndarray, float, int]:
    """Operator kernel on the nodes ``t_k = c q^k``, ``k < count``.

    Returns ``K_k = sum_n (gamma)_n omega^n (x - q t_k)^{alpha n + nu - 1}_q / Gamma_q(alpha n + nu)``
    (the ``n = 0`` term is skipped when ``nu = 0``), the largest relative
    tail bound over the nodes and the number of series terms used.  This
    is the expanded form of ``g^{alpha,nu}_{gamma,omega}(x, t)``: the
    product rule ``(x-qt)^{nu-1}(x-q^nu t)^{alpha n} = (x-qt)^{alpha n+nu-1}``
    turns each series term into one ratio of infinite products.
    """
    q = ctx.q
    u = c / x
    log_num = log_qpoch_suffix(ctx, q * u, count)[0]
    logx = math.log(x)
    lg = _LogGamma(ctx, alpha, nu)
    total = np.zeros(count)
    comp = np.zeros(count)
    w_abs = abs(omega)
    log_w = math.log(w_abs) if w_abs > 0 else -math.inf
    poch = 1.0
    n0 = 1 if nu == 0.0 else 0
    if n0 == 1:
        poch = (1.0 - q**gamma) / (1.0 - q)
    n = n0
    while True:
        stop = min(n + _BLOCK, ctx.max_terms)
        orders = alpha * np.arange(n, stop) + nu
        log_den = log_qpoch_suffix(ctx, q**orders * u, count)
        for j, m in enumerate(range(n, stop)):
            if poch == 0.0 or (w_abs == 0.0 and m > 0):
                return total + comp, 0.0, m
            sign = math.copysign(1.0, poch) * (math.copysign(1.0, omega) ** m if m else 1.0)
            log_coef = math.log(abs(poch)) + (m * log_w if m else 0.0) - lg[m]
            term = sign * np.exp(log_coef + (orders[j] - 1.0) * logx + log_num - log_den[j])
            t = total + term
            big = np.abs(total) >= np.abs(term)
            comp += np.where(big, (total - t) + term, (term - t) + total)
            total = t
            poch_next = poch * (1.0 - q ** (gamma + m)) / (1.0 - q ** (m + 1))
            if w_abs == 0.0 or poch_next == 0.0:
                return total + comp, 0.0, m + 1
            if q ** (gamma + m) <= 2.0:
                r = w_abs * x**alpha * math.exp(lg[m] - lg[m + 1]) / (1.0 - q ** (m + 1))
                if r < 1.0:
                    s = np.abs(total + comp)
                    scale = np.maximum(s, 1e-8 * float(np.max(s)))
                    rel = float(np.max(np.abs(term) * r / (1.0 - r) / np.where(scale > 0, scale, 1.0)))
                    if rel <= ctx.eps_series:
                        return total + comp, rel, m + 1
            poch = poch_next
        n = stop
        if n >= ctx.max_terms:
            raise NotConverged(
                f"kernel series at x={x} not converged after max_terms={ctx.max_terms} terms"
            )
