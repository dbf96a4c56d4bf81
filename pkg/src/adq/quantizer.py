"""Weight-defined quantizers and the quantization map on the disk.

A radial weight ``w(u)``, ``u = |z|^2``, defines the diagonal unit-trace
operator ``M`` (twice the boost average of the parity-dressed representation);
observables ``f`` are mapped to ``A_f = (2 eta - 1)/pi int dmu f M(p(z))``
with ``M(p(z)) = U(p(z)) M U(p(z))^dagger``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConvergenceError, DomainError
from .grid import DiskGrid, angular_count, disk_grid
from .repn import FockOperator, check_eta, parity, radial_rows
from .specfun import abel_sum, gauss_jacobi, jacobi_all, richardson_tail

__all__ = [
    "WEIGHT_KINDS",
    "WeightSpec",
    "parse_weight",
    "m_diagonal",
    "m_power_closed",
    "m_power_closed_array",
    "QuantizerOperator",
    "quantizer",
    "radial_profile",
    "displaced_m",
    "coherent_state",
    "quantize",
    "QuantizationResult",
    "resolution_identity_deviation",
    "isotropic_integral",
    "quantize_isotropic",
    "s_series",
    "gamma_constant",
    "gamma_from_quantization",
    "parity_integral_check",
]

WEIGHT_KINDS = ("power", "basis_projector", "half", "custom")
SERIES_DEPTH = 4096
SERIES_LEVELS = 6
# default truncation depth of infinite diagonals; Richardson needs a long tail
MIN_DEPTH = 320


def _cutoffs(K: int, levels: int) -> list[int]:
    return [K >> j for j in range(levels - 1, -1, -1)]


def _richardson_partial(terms: np.ndarray, p0: float, levels: int = SERIES_LEVELS):
    cs = np.cumsum(terms, axis=0)
    Ks = _cutoffs(len(terms), levels)
    return richardson_tail([cs[k - 1] for k in Ks], Ks, p0)


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class WeightSpec:
    """Isotropic weight ``w(u) = (1-u)^p g(u)`` on ``[0, 1]``.

    kinds
        ``power``            ``(s-1)/pi (1-u)^s`` with ``param = s``
        ``basis_projector``  weight whose quantizer is ``|e_m><e_m|``, ``param = m``
        ``half``             the ``s = 1/2`` weight; its quantizer is taken as ``2 P``
        ``custom``           tabulated ``(u_i, w_i)`` interpolated monotonically,
                             ``param`` is the boundary exponent ``p``
    """

    kind: str
    param: float | None = None
    eta: float | None = None
    table: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    scale: float = field(default=1.0, compare=False)

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise DomainError(f"unknown weight kind {self.kind!r}; expected one of {WEIGHT_KINDS}")
        if self.kind == "power":
            if self.param is None or not self.param > 1:
                raise DomainError(f"power weight needs s > 1, got {self.param!r}")
        if self.kind == "basis_projector":
            if self.param is None or int(self.param) != self.param or self.param < 0:
                raise DomainError(f"basis_projector needs an integer m >= 0, got {self.param!r}")
            object.__setattr__(self, "param", int(self.param))
        if self.kind in ("basis_projector", "half") and self.eta is None:
            raise DomainError(f"{self.kind} weight depends on eta; pass eta")
        if self.eta is not None:
            check_eta(self.eta)
        if self.kind == "custom":
            if self.table is None:
                raise DomainError("custom weight needs a table of (u, w) samples")
            u, w = (np.asarray(t, dtype=float) for t in self.table)
            if u.shape != w.shape or u.ndim != 1 or len(u) < 4:
                raise DomainError("custom table needs two equal-length sequences of at least 4 samples")
            if np.any(np.diff(u) <= 0) or u[0] < 0 or u[-1] > 1:
                raise DomainError("custom table abscissae must increase inside [0, 1]")
            object.__setattr__(self, "table", (tuple(u.tolist()), tuple(w.tolist())))
            if self.param is None:
                object.__setattr__(self, "param", 3.0)
            if self.param <= 1:
                raise DomainError("custom boundary exponent must exceed 1 for a normalisable weight")
            # enforce unit normalisation
            object.__setattr__(self, "scale", 1.0)
            object.__setattr__(self, "scale", 1.0 / self._raw_norm())

    # -- boundary exponent and smooth factor -------------------------------
    @property
    def exponent(self) -> float:
        if self.kind == "power":
            return float(self.param)
        if self.kind == "basis_projector":
            return self.eta + 1.0
        if self.kind == "half":
            return 0.5
        return float(self.param)

    def smooth(self, u):
        """Smooth factor ``g(u) = w(u) / (1-u)^p``."""
        u = np.asarray(u, dtype=float)
        if self.kind == "power":
            return np.full_like(u, (self.param - 1.0) / math.pi)
        if self.kind == "basis_projector":
            m, eta = self.param, self.eta
            p = jacobi_all(m, 0.0, 2 * eta - 1, 1 - 2 * u)[m]
            return (-1.0) ** m * (eta + m) / math.pi * p
        if self.kind == "half":
            return np.full_like(u, (2 * self.eta - 1) / (4 * math.pi))
        return self.scale * self._interpolant()(u)

    def _interpolant(self):
        u, w = (np.asarray(t) for t in self.table)
        inner = u < 1.0
        vals = w[inner] / (1.0 - u[inner]) ** self.param
        return PchipInterpolator(u[inner], vals, extrapolate=True)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return (1.0 - u) ** self.exponent * self.smooth(u)

    def _raw_norm(self, order: int = 96) -> float:
        p = self.exponent
        q = gauss_jacobi(order, 0.0, p - 2.0)
        return float(2 * math.pi * 2.0 ** (-p) * q.integrate(lambda v: self.smooth((1 - v) / 2)))

    def normalization(self, order: int = 96) -> float:
        """``int dmu w``; equal to one for every kind except ``half``."""
        if self.exponent <= 1:
            raise DomainError(f"weight with boundary exponent {self.exponent} is not integrable")
        return self._raw_norm(order)

    @property
    def is_positive(self) -> bool:
        """Whether the quantizer is a density operator."""
        if self.kind == "power":
            eta = self.eta
            return eta is None or self.param <= eta + 1 + 1e-15
        return self.kind == "basis_projector" and self.param == 0

    @property
    def label(self) -> str:
        if self.kind == "power":
            return f"power:{self.param:g}"
        if self.kind == "basis_projector":
            return f"projector:{self.param}"
        return self.kind

    def with_eta(self, eta: float) -> "WeightSpec":
        return WeightSpec(self.kind, self.param, eta, self.table)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "param": self.param, "eta": self.eta}
        if self.table is not None:
            d["table"] = [list(self.table[0]), list(self.table[1])]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "WeightSpec":
        table = d.get("table")
        return cls(d["kind"], d.get("param"), d.get("eta"), tuple(map(tuple, table)) if table else None)


def parse_weight(text: str, eta: float) -> WeightSpec:
    """Parse ``power:s``, ``perelomov``, ``projector:m``, ``half`` or ``custom:path.json``."""
    kind, _, arg = text.strip().partition(":")
    kind = kind.lower()
    try:
        if kind == "power":
            return WeightSpec("power", float(arg), eta)
        if kind == "perelomov":
            return WeightSpec("power", eta + 1.0, eta)
        if kind in ("projector", "basis_projector"):
            return WeightSpec("basis_projector", int(arg), eta)
        if kind == "half":
            return WeightSpec("half", None, eta)
        if kind == "custom":
            with open(arg) as fh:
                d = json.load(fh)
            return WeightSpec("custom", d.get("exponent"), eta, (tuple(d["u"]), tuple(d["w"])))
    except (ValueError, OSError, KeyError) as exc:
        raise DomainError(f"cannot parse weight {text!r}: {exc}") from exc
    raise DomainError(f"unknown weight {text!r}")


# ---------------------------------------------------------------------------
# diagonal of the quantizer


def m_diagonal(eta: float, w: WeightSpec, n_max: int, order: int | None = None) -> np.ndarray:
    """Diagonal ``M_00 .. M_{n_max-1}`` by Gauss-Jacobi quadrature in ``v = 1 - 2u``.

    The weight's boundary factor ``(1-u)^p`` is absorbed into the rule's
    ``(1+v)`` exponent, so the rule is exact for power weights.
    """
    eta = check_eta(eta)
    p = w.exponent
    beta = eta - 2.0 + p
    if beta <= -1:
        raise DomainError(f"weight/eta incompatible: (1+v)^{beta:g} is not integrable")
    order = order or (n_max + math.ceil(eta) + 5 + (32 if w.kind == "custom" else 0))
    q = gauss_jacobi(order, 0.0, beta)
    v = q.nodes
    P = jacobi_all(n_max - 1, 0.0, 2 * eta - 1, v)
    g = w.smooth((1 - v) / 2)
    vals = P @ (q.weights * g)
    signs = (-1.0) ** np.arange(n_max)
    return signs * 2.0 ** (2.0 - eta - p) * math.pi * vals


def m_power_closed(eta: float, s: float, n: int) -> float:
    """Closed-form diagonal entry for the power weight ``(s-1)/pi (1-u)^s``."""
    return float(m_power_closed_array(eta, s, n + 1)[n])


def m_power_closed_array(eta: float, s: float, n_max: int) -> np.ndarray:
    """``M_n = 2(s-1) (eta-s+1)_n / (eta+s-1)_{n+1}`` for ``n < n_max`` by forward recursion."""
    eta = check_eta(eta)
    if not s > 1:
        raise DomainError(f"power weight needs s > 1, got {s!r}")
    out = np.empty(n_max)
    m = 2.0 * (s - 1.0) / (eta + s - 1.0)
    for n in range(n_max):
        out[n] = m
        m *= (eta - s + 1.0 + n) / (eta + s + n)
    return out


class QuantizerOperator:
    """Diagonal quantizer of a weight, available to any truncation depth."""

    def __init__(self, eta: float, weight: WeightSpec, N: int, k_max: int | None = None):
        self.eta = check_eta(eta)
        self.weight = weight if weight.eta == self.eta else weight.with_eta(self.eta)
        if N < 2:
            raise DomainError("truncation dimension must be at least 2")
        self.N = int(N)
        self.k_max = int(k_max or max(4 * N, MIN_DEPTH))
        self._diag: np.ndarray | None = None

    # finite support if the diagonal vanishes beyond some index
    @property
    def support(self) -> int | None:
        w = self.weight
        if w.kind == "basis_projector":
            return w.param + 1
        if w.kind == "power":
            p = w.param - self.eta
            if p >= 1 and abs(p - round(p)) < 1e-13:
                return int(round(p))
        return None

    @property
    def alternating(self) -> bool:
        """Diagonal does not decay (summation needs Abel regularisation)."""
        return self.weight.kind == "half"

    def diagonal(self, K: int | None = None) -> np.ndarray:
        K = int(K or self.k_max)
        if self._diag is None or len(self._diag) < K:
            self._diag = self._compute(max(K, self.N))
        return self._diag[:K]

    def _compute(self, K: int) -> np.ndarray:
        w = self.weight
        if w.kind == "power":
            d = m_power_closed_array(self.eta, w.param, K)
            if self.support is not None:
                d[self.support :] = 0.0
            return d
        if w.kind == "basis_projector":
            d = np.zeros(K)
            if w.param < K:
                d[w.param] = 1.0
            return d
        if w.kind == "half":
            return 2.0 * (-1.0) ** np.arange(K)
        return m_diagonal(self.eta, w, K)

    @property
    def base(self) -> FockOperator:
        return FockOperator(self.eta, np.diag(self.diagonal(self.N)).astype(complex))

    def trace(self) -> float:
        """Unit trace (Abel sense for the alternating case; Richardson-accelerated otherwise)."""
        if self.support is not None:
            return float(np.sum(self.diagonal(self.support)))
        if self.alternating:
            return abel_sum(lambda k: 2.0 * (-1.0) ** k).value
        p0 = self.tail_exponent(0.0)
        d = self.diagonal(SERIES_DEPTH)
        if p0 is not None:
            return float(_richardson_partial(d, p0)[0])
        return float(np.sum(d))

    def tail_exponent(self, singular_order: float = 0.0) -> float | None:
        """Leading exponent of the truncation error of ``sum_{k<K}`` for a quantized
        observable growing like ``(1-u)^(-q)``; ``None`` when no power-law tail."""
        if self.support is not None or self.alternating:
            return None
        if self.weight.kind == "power":
            return 2.0 * self.weight.param - 2.0 - singular_order
        return None

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "N": self.N,
            "weight": self.weight.to_dict(),
            "diagonal": self.diagonal(self.N).tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "QuantizerOperator":
        return cls(d["eta"], WeightSpec.from_dict(d["weight"]), d["N"])


def quantizer(eta: float, weight: WeightSpec | str, N: int, k_max: int | None = None) -> QuantizerOperator:
    w = parse_weight(weight, eta) if isinstance(weight, str) else weight
    return QuantizerOperator(eta, w, N, k_max)


# ---------------------------------------------------------------------------
# displaced quantizers


def _doubled_radius(r):
    # |2z/(1+|z|^2)|: U(p(z)) P U(p(-z)) = U(p(2z/(1+|z|^2))) P
    return 2.0 * r / (1.0 + r * r)


def radial_profile(
    q: QuantizerOperator, r, n: int | None = None, cutoffs: Sequence[int] | None = None
) -> np.ndarray:
    """Real profile ``Q_ij(r)`` with ``M(p(r e^{i phi}))_ij = exp(i (j-i) phi) Q_ij(r)``.

    The leading axis runs over the k-sum truncation depths ``cutoffs``
    (default: ``q.k_max`` or the finite support); the alternating case is exact
    and has a single entry.
    """
    n = q.N if n is None else n
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if q.alternating:
        rows = radial_rows(q.eta, _doubled_radius(r), n, n)
        return (2.0 * rows * ((-1.0) ** np.arange(n))[None, :, None])[None]
    if cutoffs is None:
        cutoffs = [q.support or q.k_max]
    cutoffs = sorted(int(c) for c in cutoffs)
    d = q.diagonal(cutoffs[-1])
    out = np.empty((len(cutoffs), n, n, len(r)))
    acc = np.zeros((n, n, len(r)))
    start = 0
    for j, K in enumerate(cutoffs):
        if K > start:
            rows = radial_rows(q.eta, r, n, K)[:, start:K, :]
            acc = acc + np.einsum("ikr,jkr,k->ijr", rows, rows, d[start:K], optimize=True)
        out[j] = acc
        start = K
    return out


def displaced_m(q: QuantizerOperator, z: complex, N: int | None = None) -> FockOperator:
    """``U(p(z)) M U(p(z))^dagger`` on the leading ``N`` states."""
    N = q.N if N is None else N
    rho, phi = abs(complex(z)), np.angle(complex(z))
    if rho >= 1.0 - 1e-14:
        raise DomainError("point outside the open unit disk")
    prof = radial_profile(q, rho, N)[0, ..., 0]
    idx = np.arange(N)
    return FockOperator(q.eta, prof * np.exp(1j * (idx[None, :] - idx[:, None]) * phi))


def coherent_state(eta: float, z: complex, N: int) -> np.ndarray:
    """Coefficients of the normalised coherent state ``(1-|z|^2)^eta sum sqrt((2eta)_n/n!) z^n e_n``."""
    n = np.arange(N)
    from scipy.special import gammaln

    logc = 0.5 * (gammaln(2 * eta + n) - gammaln(2 * eta) - gammaln(n + 1))
    with np.errstate(divide="ignore"):
        return (1 - abs(z) ** 2) ** eta * np.exp(logc) * complex(z) ** n


# ---------------------------------------------------------------------------
# quantization map


@dataclass
class QuantizationResult:
    operator: FockOperator
    error_estimate: float
    k_cutoffs: tuple[int, ...]
    grid_shape: tuple[int, int]


def _default_grid(q: QuantizerOperator, N: int, K: int, order: int, n_angles: int, singular_order: float) -> DiskGrid:
    need = (K if not q.alternating else 2 * N) // 2 + N + 8
    return disk_grid(q.eta, max(order, need), max(n_angles, angular_count(4 * N)), singular_order=singular_order)


def _assemble(q: QuantizerOperator, f_vals: np.ndarray, grid: DiskGrid, N: int, cutoffs) -> np.ndarray:
    L = grid.n_angles
    # Fourier coefficients F_m(r) = int dphi f e^{i m phi}
    F = 2.0 * np.pi * np.fft.ifft(f_vals, axis=1)
    idx = np.arange(N)
    band = F[:, (idx[None, :] - idx[:, None]) % L]  # (R, N, N)
    prof = radial_profile(q, grid.r, N, cutoffs)  # (C, N, N, R)
    pref = (2 * q.eta - 1) / math.pi
    return pref * np.einsum("r,cijr,rij->cij", grid.radial_weights, prof, band, optimize=True)


def quantize(
    q: QuantizerOperator,
    f: Callable[[np.ndarray], np.ndarray],
    N: int | None = None,
    grid: DiskGrid | None = None,
    *,
    singular_order: float = 0.0,
    radial_order: int = 64,
    angular_points: int = 256,
    tail: str = "auto",
    levels: int = 5,
    check_grid: bool = False,
    grid_tol: float = 1e-8,
) -> QuantizationResult:
    """Quantize ``f`` (vectorised function of complex ``z``) into an ``N x N`` matrix.

    ``singular_order = q`` declares growth ``(1-|z|^2)^(-q)`` at the edge so the
    radial rule absorbs it.  For weights with an infinite power-law diagonal
    the k-sum is accelerated by Richardson extrapolation over doubling cutoffs
    (``tail = "auto"`` or ``"richardson"``, ``levels`` cutoffs ending at
    ``q.k_max``); ``tail = "none"`` truncates at ``q.k_max``.  The leading
    block must be small against ``q.k_max / 2^(levels-1)`` for the
    extrapolation to be in its asymptotic regime.
    """
    N = q.N if N is None else N
    p0 = q.tail_exponent(singular_order)
    if tail not in ("auto", "richardson", "none"):
        raise DomainError(f"unknown tail mode {tail!r}")
    use_rich = tail != "none" and p0 is not None
    if use_rich and p0 <= 0:
        raise ConvergenceError(
            f"k-series diverges (tail exponent {p0:g}); this weight cannot quantize the observable"
        )
    K = q.support or q.k_max
    cutoffs = _cutoffs(K, levels) if use_rich else [K]
    if grid is None:
        grid = _default_grid(q, N, K, radial_order, angular_points, singular_order)
    elif grid.quad.order < (K if not q.alternating else 2 * N) // 2 + N:
        warnings.warn(
            f"radial order {grid.quad.order} may not resolve k-cutoff {K}; results approximate",
            RuntimeWarning,
        )
    f_vals = np.asarray(f(grid.points), dtype=complex)
    if f_vals.shape != grid.shape:
        f_vals = np.broadcast_to(f_vals, grid.shape)
    mats = _assemble(q, f_vals, grid, N, cutoffs)
    if use_rich:
        A, err = richardson_tail(mats, cutoffs, p0)
    else:
        A, err = mats[-1], 0.0
    if check_grid:
        fine = grid.refined()
        f2 = np.broadcast_to(np.asarray(f(fine.points), dtype=complex), fine.shape)
        mats2 = _assemble(q, f2, fine, N, cutoffs)
        A2 = richardson_tail(mats2, cutoffs, p0)[0] if use_rich else mats2[-1]
        b = max(2, N // 2)
        gdiff = float(np.max(np.abs(A2[:b, :b] - A[:b, :b])))
        err = max(err, gdiff)
        if gdiff > grid_tol:
            warnings.warn(f"quadrature grid too coarse: refinement changed the result by {gdiff:.2e}", RuntimeWarning)
    return QuantizationResult(FockOperator(q.eta, A), float(err), tuple(cutoffs), grid.shape)


def resolution_identity_deviation(q: QuantizerOperator, N: int | None = None, grid: DiskGrid | None = None, margin: int | None = None) -> float:
    """Max deviation of the quantized constant function from the identity on the leading block."""
    N = q.N if N is None else N
    m = max(2, N // 4) if margin is None else margin
    res = quantize(q, lambda z: np.ones_like(z), N, grid)
    return res.operator.deviation(np.eye(N), N - m)


# ---------------------------------------------------------------------------
# isotropic observables


def isotropic_integral(eta: float, k: int, n: int, l: Callable, singular_order: float = 0.0, order: int | None = None) -> float:
    """``int dmu l(|z|^2) |U_nk(p(z))|^2`` by Gauss-Jacobi quadrature with exponents
    ``(|k-n|, 2 eta - 2 - q)``; ``l`` may grow like ``(1-u)^(-q)``."""
    eta = check_eta(eta)
    lo, hi = min(k, n), max(k, n)
    a = hi - lo
    beta = 2 * eta - 2 - singular_order
    if beta <= -1:
        raise DomainError(f"observable too singular for eta={eta}: exponent {beta:g}")
    order = order or (lo + 16)
    quad = gauss_jacobi(order, float(a), beta)
    v = quad.nodes
    P = jacobi_all(lo, float(a), 2 * eta - 1, v)[lo]
    from scipy.special import gammaln

    logc = (1 - 2 * eta - a) * math.log(2.0) + gammaln(lo + 1) + gammaln(2 * eta + hi) - gammaln(hi + 1) - gammaln(2 * eta + lo)
    vals = np.asarray(l((1 - v) / 2), dtype=float) * (1 + v) ** singular_order * P * P
    return float(math.pi * math.exp(logc + quad.log_mass) * np.dot(quad.unit_weights, vals))


def quantize_isotropic(
    q: QuantizerOperator,
    l: Callable,
    N: int | None = None,
    *,
    singular_order: float = 0.0,
    mode: str = "auto",
    order: int | None = None,
    tol: float = 1e-9,
) -> tuple[FockOperator, float]:
    """Diagonal quantization of a radial observable ``l(|z|^2)``.

    ``mode``: ``direct`` (partial sums with a tail monitor), ``richardson``
    (accelerated over doubling cutoffs), ``abel`` (for non-decaying
    alternating diagonals) or ``auto``.  Returns ``(operator, error)``.
    """
    N = q.N if N is None else N
    if mode == "auto":
        if q.support is not None:
            mode = "direct"
        elif q.alternating:
            mode = "abel"
        elif q.tail_exponent(singular_order) is not None:
            mode = "richardson"
        else:
            mode = "direct"
    pref = (2 * q.eta - 1) / math.pi
    out = np.zeros(N)
    err = 0.0

    def column(n, K):
        d = q.diagonal(K)
        return np.array([isotropic_integral(q.eta, k, n, l, singular_order, order) for k in range(K)]) * d[:K]

    if mode == "direct":
        K = q.support or q.k_max
        for n in range(N):
            terms = column(n, K)
            out[n] = pref * terms.sum()
            if q.support is None:
                tail_mag = pref * np.abs(terms[-max(1, K // 8) :]).sum()
                err = max(err, tail_mag)
        if q.support is None and err > tol * max(1.0, np.max(np.abs(out))):
            raise ConvergenceError(f"series S divergence; use Abel mode (tail {err:.2e})")
    elif mode == "richardson":
        p0 = q.tail_exponent(singular_order)
        if p0 is None or p0 <= 0:
            raise ConvergenceError("series S divergence; use Abel mode")
        K = q.k_max
        for n in range(N):
            val, e = _richardson_partial(column(n, K), p0, levels=4)
            out[n] = pref * val
            err = max(err, pref * e)
    elif mode == "abel":
        ladder = (0.8, 0.9, 0.95, 0.98, 0.99)
        K = int(math.ceil(math.log(1e-16) / math.log(max(ladder)))) + 8
        for n in range(N):
            res = abel_sum(column(n, K), ladder, tol=1e-14)
            out[n] = pref * res.value
            err = max(err, pref * res.error)
    else:
        raise DomainError(f"unknown summation mode {mode!r}")
    return FockOperator(q.eta, np.diag(out).astype(complex)), float(err)


# ---------------------------------------------------------------------------
# the constants of the linear observables


def s_series(q: QuantizerOperator, mode: str = "auto", tol: float = 1e-8) -> tuple[float, float]:
    """``S = sum_k k M_kk`` with an error estimate.

    ``direct`` sums (Richardson-accelerated for power-law tails); ``abel`` uses
    Abel summation.  Raises ConvergenceError ("S undefined") when neither works.
    """
    if mode == "auto":
        mode = "abel" if q.alternating else "direct"
    if q.support is not None:
        d = q.diagonal(q.support)
        return float(np.dot(np.arange(q.support), d)), 0.0
    if mode == "abel":
        if not q.alternating:
            raise DomainError("Abel mode is implemented for the alternating (half) diagonal")
        try:
            res = abel_sum(lambda k: 2.0 * (-1.0) ** k * k)
        except ConvergenceError as exc:
            raise ConvergenceError(f"S undefined: {exc}") from exc
        return res.value, res.error
    if mode != "direct":
        raise DomainError(f"unknown mode {mode!r}")
    K = SERIES_DEPTH
    terms = np.arange(K) * q.diagonal(K)
    p0 = q.tail_exponent(1.0)
    if p0 is not None:
        if p0 <= 0:
            raise ConvergenceError(f"S undefined: terms decay too slowly (tail exponent {p0:g})")
        val, err = _richardson_partial(terms, p0)
        return float(val), float(err)
    err = float(np.abs(terms[-K // 8 :]).sum())
    if err > tol:
        raise ConvergenceError(f"S undefined: direct tail {err:.2e} exceeds tolerance")
    return float(terms.sum()), err


def gamma_constant(eta: float, q: QuantizerOperator) -> float:
    """Proportionality constant between quantized linear observables and generators."""
    if eta <= 1:
        raise DomainError(f"gamma needs eta > 1, got {eta!r}")
    S, _ = s_series(q)
    return (1.0 + S / eta) / (eta - 1.0)


def gamma_from_quantization(q: QuantizerOperator, **kwargs) -> float:
    """``(A_k0)_00 / eta`` from the grid quantization of ``k0`` (independent route)."""
    from .geometry import k0

    if q.eta <= 1:
        raise DomainError(f"gamma needs eta > 1, got {q.eta!r}")
    res = quantize(q, k0, max(q.N, 4), singular_order=1.0, **kwargs)
    return float(res.operator.matrix[0, 0].real) / q.eta


def parity_integral_check(eta: float, N: int, grid: DiskGrid | None = None, block: int | None = None) -> float:
    """Deviation of ``(2eta-1)/pi int d^2z (1-|z|^2)^(-3/2) U(p(z))`` from ``2 P``."""
    eta = check_eta(eta)
    if grid is None:
        grid = disk_grid(order=N + 16, n_angles=angular_count(4 * N), beta=eta - 1.5, density_power=1.5)
    rows = radial_rows(eta, grid.r, N, N)  # (N, N, R)
    idx = np.arange(N)
    phase = np.exp(1j * (idx[None, :, None] - idx[:, None, None]) * grid.phi[None, None, :])
    vals = rows[:, :, :, None] * phase[:, :, None, :]  # (N, N, R, L)
    integral = grid.integrate(np.moveaxis(vals, (2, 3), (0, 1)))
    A = (2 * eta - 1) / math.pi * integral
    b = N if block is None else block
    return float(np.max(np.abs(A[:b, :b] - 2 * parity(N).matrix[:b, :b])))
