"""Special functions and quadrature.

Pochhammer symbols, Jacobi polynomials (three-term recurrence), terminating
hypergeometric sums, Gauss-Jacobi rules (Golub-Welsch) and Abel summation of
power series.  Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, gammasgn

from .errors import ConvergenceError, DomainError, RangeError

__all__ = [
    "pochhammer",
    "log_gamma_ratio",
    "jacobi_poly",
    "jacobi_all",
    "jacobi_table",
    "jacobi_sequence",
    "jacobi_negative_upper",
    "hyp2f1_terminating",
    "hyp3f2_terminating",
    "RadialQuadrature",
    "gauss_jacobi",
    "AbelResult",
    "DEFAULT_ABEL_LADDER",
    "abel_sum",
    "extrapolate_to_zero",
    "richardson_tail",
    "tail_powers",
]

_LOG_MAX = math.log(np.finfo(float).max)


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def pochhammer(a: float, n: int) -> float:
    """Rising factorial ``(a)_n = a (a+1) ... (a+n-1)``.

    Short products are formed directly; long ones go through log-gamma with
    the sign tracked separately.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"pochhammer needs a nonnegative integer n, got {n!r}")
    n = int(n)
    if n == 0:
        return 1.0
    if _is_nonpositive_int(a) and -a < n:
        return 0.0
    if n <= 32:
        out = 1.0
        for k in range(n):
            out *= a + k
        if not math.isfinite(out):
            raise RangeError(f"pochhammer overflow for a={a!r}, n={n}")
        return out
    logmag, sign = log_gamma_ratio(a + n, a)
    if logmag > _LOG_MAX:
        raise RangeError(f"pochhammer overflow for a={a!r}, n={n}")
    return sign * math.exp(logmag)


def log_gamma_ratio(x: float, y: float) -> tuple[float, float]:
    """Return ``(log|G(x)/G(y)|, sign)`` for the gamma ratio ``G(x)/G(y)``.

    Neither argument may be a pole of the gamma function.
    """
    if _is_nonpositive_int(x) or _is_nonpositive_int(y):
        raise DomainError(f"gamma pole in ratio G({x!r})/G({y!r})")
    return float(gammaln(x) - gammaln(y)), float(gammasgn(x) * gammasgn(y))


# ---------------------------------------------------------------------------
# Jacobi polynomials


def _jacobi_explicit(n: int, alpha: float, beta: float, x):
    # sum_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^(n-s); valid for all a, b
    x = np.asarray(x, dtype=float)
    xm = (x - 1.0) / 2.0
    xp = (x + 1.0) / 2.0
    out = np.zeros_like(x)
    for s in range(n + 1):
        c = _gen_binom(n + alpha, n - s) * _gen_binom(n + beta, s)
        out = out + c * xm**s * xp ** (n - s)
    return out


def _gen_binom(top: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= (top - j) / (j + 1)
    return out


def jacobi_all(n: int, alpha: float, beta: float, x) -> np.ndarray:
    """Values ``P_0, ..., P_n`` of the Jacobi family at ``x``.

    Returns an array of shape ``(n + 1,) + np.shape(x)``.  The recurrence is
    used throughout; when one of its leading coefficients vanishes (only for
    special negative ``alpha + beta``) the remaining degrees fall back to the
    explicit binomial sum.
    """
    if n < 0:
        raise DomainError(f"degree must be nonnegative, got {n}")
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n == 0:
        return out
    ab = alpha + beta
    out[1] = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0
    for k in range(2, n + 1):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        if a1 == 0.0:
            for j in range(k, n + 1):
                out[j] = _jacobi_explicit(j, alpha, beta, x)
            break
        a2 = (c - 1.0) * (alpha * alpha - beta * beta)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        out[k] = ((a2 + a3 * x) * out[k - 1] - a4 * out[k - 2]) / a1
    return out


def jacobi_poly(n: int, alpha: float, beta: float, x):
    """Jacobi polynomial ``P_n^{(alpha, beta)}(x)`` by three-term recurrence."""
    vals = jacobi_all(n, alpha, beta, x)[n]
    return float(vals) if vals.ndim == 0 else vals


def jacobi_table(n: int, alphas, beta: float, x) -> np.ndarray:
    """``P_m^{(a, beta)}(x)`` for ``m <= n`` and every ``a`` in ``alphas``.

    Shape ``(n + 1, len(alphas), len(x))``.  Requires ``a + beta > -1`` for all
    ``a`` so the recurrence never divides by zero.
    """
    a = np.asarray(alphas, dtype=float)[:, None]
    x = np.atleast_1d(np.asarray(x, dtype=float))[None, :]
    if np.any(a + beta <= -1):
        raise DomainError("jacobi_table needs alpha + beta > -1")
    out = np.empty((n + 1, a.shape[0], x.shape[1]))
    out[0] = 1.0
    if n == 0:
        return out
    ab = a + beta
    out[1] = (a + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0
    for k in range(2, n + 1):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - beta * beta)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + a - 1.0) * (k + beta - 1.0) * c
        out[k] = ((a2 + a3 * x) * out[k - 1] - a4 * out[k - 2]) / a1
    return out


def jacobi_sequence(n: int, alpha: float, beta: float, x: float) -> np.ndarray:
    """``P_0(x), ..., P_n(x)`` at a single scalar ``x`` (plain-float loop, long ``n``)."""
    out = np.empty(n + 1)
    out[0] = 1.0
    if n == 0:
        return out
    ab = alpha + beta
    aa_bb = alpha * alpha - beta * beta
    p0, p1 = 1.0, (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0
    out[1] = p1
    for k in range(2, n + 1):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        if a1 == 0.0:
            return jacobi_all(n, alpha, beta, x)
        p0, p1 = p1, ((c - 1.0) * aa_bb + (c - 2.0) * (c - 1.0) * c * x) * p1 / a1 - (
            2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        ) * p0 / a1
        out[k] = p1
    return out


def jacobi_negative_upper(n: int, a: int, beta: float, x):
    """``P_n^{(-a, beta)}(x)`` for integer ``0 <= a <= n``.

    Uses the degree-lowering identity

        P_n^{(-a,b)}(x) = G(n+b+1) (n-a)! / (G(n+b+1-a) n!) ((x-1)/2)^a P_{n-a}^{(a,b)}(x).

    The power ``a`` on ``(x-1)/2`` matters: with a bare first power the
    identity is wrong as soon as ``a >= 2``.
    """
    if int(a) != a or a < 0:
        raise DomainError(f"a must be a nonnegative integer, got {a!r}")
    if a > n:
        raise DomainError(f"need a <= n, got a={a}, n={n}")
    if a == 0:
        return jacobi_poly(n, 0.0, beta, x)
    logc = gammaln(n + beta + 1) - gammaln(n + beta + 1 - a) + gammaln(n - a + 1) - gammaln(n + 1)
    sign = gammasgn(n + beta + 1) * gammasgn(n + beta + 1 - a)
    x = np.asarray(x, dtype=float)
    out = sign * np.exp(logc) * ((x - 1.0) / 2.0) ** a * jacobi_poly(n - a, float(a), beta, x)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Terminating hypergeometric sums


def hyp2f1_terminating(n: int, b: float, c: float, x):
    """``2F1(-n, b; c; x)`` summed exactly over its ``n + 1`` terms."""
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(int(n)):
        if c + k == 0:
            raise DomainError(f"2F1 denominator vanishes: c={c!r} hits a pole at k={k}")
        term = term * (-n + k) * (b + k) / ((c + k) * (k + 1)) * x
        total = total + term
    return float(total) if total.ndim == 0 else total


def hyp3f2_terminating(n: int, p2: float, p3: float, q1: float, q2: float, x: float = 1.0) -> float:
    """``3F2(-n, p2, p3; q1, q2; x)`` by direct summation (default ``x = 1``)."""
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    term = 1.0
    total = 1.0
    for k in range(int(n)):
        if q1 + k == 0 or q2 + k == 0:
            raise DomainError(f"3F2 denominator vanishes at k={k} (q1={q1!r}, q2={q2!r})")
        term *= (-n + k) * (p2 + k) * (p3 + k) / ((q1 + k) * (q2 + k) * (k + 1)) * x
        total += term
    return total


# ---------------------------------------------------------------------------
# Gauss-Jacobi quadrature


@dataclass(frozen=True)
class RadialQuadrature:
    """Gauss rule for the weight ``(1-v)^alpha (1+v)^beta`` on ``(-1, 1)``."""

    alpha: float
    beta: float
    nodes: np.ndarray = field(repr=False)
    unit_weights: np.ndarray = field(repr=False)
    log_mass: float = 0.0

    @property
    def order(self) -> int:
        return len(self.nodes)

    @property
    def weights(self) -> np.ndarray:
        """Weights scaled to the total mass; overflows for very large exponents,
        where ``unit_weights`` and ``log_mass`` should be used instead."""
        if self.log_mass > 700:
            raise ConvergenceError(f"Gauss-Jacobi mass exp({self.log_mass:.0f}) overflows; use unit_weights")
        return math.exp(self.log_mass) * self.unit_weights

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]):
        """Approximate ``int (1-v)^alpha (1+v)^beta f(v) dv``."""
        vals = np.asarray(f(self.nodes))
        return np.tensordot(self.weights, vals, axes=(0, 0))


@lru_cache(maxsize=256)
def _golub_welsch(order: int, alpha: float, beta: float):
    k = np.arange(order, dtype=float)
    ab = alpha + beta
    diag = np.empty(order)
    denom = (2 * k + ab) * (2 * k + ab + 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag[:] = (beta**2 - alpha**2) / denom
    diag[0] = (beta - alpha) / (ab + 2)
    kk = np.arange(1, order, dtype=float)
    c = 2 * kk + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        off2 = 4 * kk * (kk + alpha) * (kk + beta) * (kk + ab) / (c**2 * (c + 1) * (c - 1))
    if order > 1:
        # k = 1 has a removable 0/0 when alpha + beta = -1
        off2[0] = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
    nodes, vecs = eigh_tridiagonal(diag, np.sqrt(off2))
    log_mu0 = (ab + 1) * math.log(2.0) + gammaln(alpha + 1) + gammaln(beta + 1) - gammaln(ab + 2)
    weights = vecs[0, :] ** 2
    if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
        raise ConvergenceError(
            f"Golub-Welsch eigen-solve failed for order={order}, alpha={alpha}, beta={beta}"
        )
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights, float(log_mu0)


def gauss_jacobi(order: int, alpha: float, beta: float) -> RadialQuadrature:
    """Gauss-Jacobi rule with ``order`` nodes (exact through degree ``2 order - 1``)."""
    if order < 1:
        raise DomainError(f"order must be positive, got {order}")
    if alpha <= -1 or beta <= -1:
        raise DomainError(f"Gauss-Jacobi needs alpha, beta > -1, got ({alpha}, {beta})")
    nodes, weights, log_mu0 = _golub_welsch(int(order), float(alpha), float(beta))
    return RadialQuadrature(float(alpha), float(beta), nodes, weights, log_mu0)


# ---------------------------------------------------------------------------
# Extrapolation and series summation


def extrapolate_to_zero(h: Sequence[float], values) -> tuple[np.ndarray, list[float]]:
    """Neville extrapolation of ``values(h)`` to ``h = 0``.

    Returns the highest-order estimate and the list of successive changes of
    the diagonal estimates (used as residuals).  ``values`` may carry
    trailing array dimensions.
    """
    h = np.asarray(h, dtype=float)
    table = [np.asarray(v, dtype=complex if np.iscomplexobj(v) else float) for v in values]
    diag = [table[0]]
    for j in range(1, len(h)):
        for i in range(len(h) - 1, j - 1, -1):
            table[i] = table[i] + (table[i] - table[i - 1]) * h[i] / (h[i - j] - h[i])
        diag.append(table[j])
    # table[j] after pass j holds the extrapolant through points 0..j
    residuals = [float(np.max(np.abs(diag[j] - diag[j - 1]))) for j in range(1, len(diag))]
    return diag[-1], residuals


def tail_powers(first_exponent, count: int) -> np.ndarray:
    """The ``count`` smallest members of ``{p + n : p in first_exponent, n >= 0}``."""
    firsts = np.atleast_1d(np.asarray(first_exponent, dtype=float))
    cand = np.unique(np.round((firsts[:, None] + np.arange(count)[None, :]).ravel(), 12))
    return cand[:count]


def richardson_tail(partial_sums, cutoffs: Sequence[int], first_exponent):
    """Limit of partial sums ``S_K ~ S + c1 K^-p + c2 K^-(p+1) + ...``.

    ``partial_sums[j]`` is the partial sum through ``cutoffs[j]`` terms; the
    leading exponent ``p`` must be supplied.  Several leading exponents may be
    given when independent tails overlap; the ladders ``p + n`` are merged.
    Elementwise for array sums.  Returns ``(limit, error_estimate)``.
    """
    Ks = np.asarray(cutoffs, dtype=float)
    S = np.asarray(partial_sums)
    m = len(Ks)
    powers = tail_powers(first_exponent, m - 1)
    design = np.column_stack([np.ones(m)] + [Ks ** (-p) for p in powers])
    flat = S.reshape(m, -1)
    coef = np.linalg.solve(design, flat)
    limit = coef[0].reshape(S.shape[1:])
    if m > 2:
        lower = np.linalg.solve(design[1:, :-1], flat[1:])[0].reshape(S.shape[1:])
        err = float(np.max(np.abs(limit - lower)))
    else:
        err = float(np.max(np.abs(limit - S[-1])))
    return limit, err


DEFAULT_ABEL_LADDER = (0.9, 0.99, 0.999, 0.9999)


@dataclass(frozen=True)
class AbelResult:
    value: float
    error: float
    ladder: tuple[float, ...]
    partial_values: tuple[float, ...]
    residuals: tuple[float, ...]


def _power_series_at(term, t: float, tol: float, max_terms: int) -> float:
    if not callable(term):
        coeffs = np.asarray(term, dtype=float)
        tail = abs(coeffs[-1]) * t ** (len(coeffs) - 1) if len(coeffs) else 0.0
        if tail > tol * max(1.0, abs(coeffs[0])):
            raise ConvergenceError(
                f"coefficient table too short for t={t}: last term {tail:.3e} exceeds tol"
            )
        return float(np.sum(coeffs * t ** np.arange(len(coeffs))))
    total = 0.0
    start = 0
    chunk = 1024
    log_t = math.log(t)
    while start < max_terms:
        ns = np.arange(start, start + chunk)
        terms = np.asarray(term(ns), dtype=float) * np.exp(ns * log_t)
        total += float(np.sum(terms))
        if np.max(np.abs(terms[-chunk // 4 :])) < tol * max(1.0, abs(total)):
            return total
        start += chunk
        chunk = min(2 * chunk, 1 << 20)
    raise ConvergenceError(f"power series at t={t} not converged after {max_terms} terms")


def abel_sum(
    term: Callable[[np.ndarray], np.ndarray] | Sequence[float],
    t_ladder: Sequence[float] = DEFAULT_ABEL_LADDER,
    tol: float = 1e-13,
    max_terms: int = 20_000_000,
) -> AbelResult:
    """Abel sum ``lim_{t->1-} sum_n a_n t^n``.

    ``term`` is either a vectorised callable mapping an integer array ``n`` to
    the coefficients ``a_n``, or a finite coefficient table.  The power series
    is evaluated at each ``t`` of the ladder and extrapolated to ``t = 1`` by
    polynomial (Neville) extrapolation in ``1 - t``.

    Raises ConvergenceError when the extrapolation residuals stop decreasing.
    """
    ladder = tuple(sorted(float(t) for t in t_ladder))
    if any(not 0.0 < t < 1.0 for t in ladder):
        raise DomainError(f"Abel ladder must lie in (0, 1), got {ladder}")
    values = [_power_series_at(term, t, tol, max_terms) for t in ladder]
    h = [1.0 - t for t in ladder]
    value, residuals = extrapolate_to_zero(h, values)
    value = float(value)
    floor = 1e3 * np.finfo(float).eps * max(1.0, abs(value), *map(abs, values))
    if len(residuals) >= 2 and residuals[-1] > floor and residuals[-1] >= residuals[-2]:
        raise ConvergenceError(
            f"Abel sum unreliable: extrapolation residuals {residuals} are not decreasing"
        )
    error = max(residuals[-1] if residuals else abs(values[-1]), floor)
    return AbelResult(value, error, ladder, tuple(values), tuple(residuals))
