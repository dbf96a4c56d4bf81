"""Truncated matrices of the holomorphic discrete series of SU(1,1).

Operators act on the span of the first ``N`` orthonormal monomials ``e_n`` of
the weighted Bergman (Fock-Bargmann) space with lowest weight ``eta``.  Every
group element is handled through its Cartan factors ``g = p(z) h(theta)`` so
that no branch of ``alpha^(-2 eta)`` ever has to be chosen.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import DomainError
from .geometry import GroupElement, cartan_decompose, check_disk, inverse
from .specfun import (
    DEFAULT_ABEL_LADDER,
    AbelResult,
    abel_sum,
    hyp2f1_terminating,
    jacobi_poly,
    jacobi_sequence,
    jacobi_table,
)

__all__ = [
    "FockOperator",
    "check_eta",
    "radial_rows",
    "u_element_p",
    "u_element_p_hypergeometric",
    "u_matrix_p",
    "u_matrix_h",
    "u_matrix",
    "Generators",
    "generators",
    "casimir",
    "parity",
    "trace_u_p_closed",
    "trace_u_general",
    "trace_u_p_abel",
    "trace_parity_u_p",
    "trace_parity_u_p_abel",
    "displacement",
    "covariance_check",
    "conjugated_generator",
    "haar_integral",
    "HAAR_SCALE_UNIT_ANGLE",
    "HAAR_SCALE_FORMAL_DIM",
]

# d_haar = scale * dmu(z) dtheta with theta in [0, 4 pi)
HAAR_SCALE_UNIT_ANGLE = 1.0 / (8.0 * math.pi**2)
HAAR_SCALE_FORMAL_DIM = 1.0 / (2.0 * math.pi)


def check_eta(eta: float) -> float:
    eta = float(eta)
    if not eta > 0.5:
        raise DomainError(f"lowest weight must exceed 1/2, got {eta!r}")
    return eta


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Dense ``N x N`` truncation of an operator on the representation space.

    ``eta`` is ``None`` for operators that do not depend on the
    representation (parity, identity); such operators combine with any ``eta``.
    """

    eta: float | None
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"operator matrix must be square, got shape {m.shape}")
        if m.shape[0] < 2:
            raise DomainError("truncation dimension must be at least 2")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def _join(self, other: "FockOperator") -> float | None:
        if self.dim != other.dim:
            raise DomainError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if self.eta is not None and other.eta is not None and not math.isclose(self.eta, other.eta):
            raise DomainError(f"lowest-weight mismatch: {self.eta} vs {other.eta}")
        return self.eta if self.eta is not None else other.eta

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self._join(other), self.matrix @ other.matrix)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self._join(other), self.matrix + other.matrix)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self._join(other), self.matrix - other.matrix)

    def __mul__(self, c: complex) -> "FockOperator":
        return FockOperator(self.eta, c * self.matrix)

    __rmul__ = __mul__

    def dagger(self) -> "FockOperator":
        return FockOperator(self.eta, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def block(self, n: int) -> np.ndarray:
        """Leading ``n x n`` block of the matrix."""
        return self.matrix[:n, :n]

    def deviation(self, other, block: int | None = None) -> float:
        """Max-norm distance to ``other`` on the leading block."""
        b = self.dim if block is None else block
        om = other.matrix if isinstance(other, FockOperator) else np.asarray(other)
        return float(np.max(np.abs(self.matrix[:b, :b] - om[:b, :b])))

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "dim": self.dim,
            "real": self.matrix.real.tolist(),
            "imag": self.matrix.imag.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "FockOperator":
        return cls(d["eta"], np.asarray(d["real"]) + 1j * np.asarray(d["imag"]))


# ---------------------------------------------------------------------------
# matrix elements of boosts


def _norm_log(eta: float, lo, hi):
    # log sqrt(lo! G(2 eta + hi) / (hi! G(2 eta + lo)))
    return 0.5 * (gammaln(lo + 1.0) + gammaln(2 * eta + hi) - gammaln(hi + 1.0) - gammaln(2 * eta + lo))


def radial_rows(eta: float, r, n_rows: int, n_cols: int) -> np.ndarray:
    """Real radial parts ``R_ik(r)`` of the boost matrix elements.

    ``U_ik(p(r e^{i phi})) = exp(i (k-i) phi) R_ik(r)``.  Returns shape
    ``(n_rows, n_cols, len(r))``.
    """
    eta = check_eta(eta)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    u = r * r
    v = 1.0 - 2.0 * u
    i = np.arange(n_rows)[:, None]
    k = np.arange(n_cols)[None, :]
    lo = np.minimum(i, k)
    hi = np.maximum(i, k)
    a = hi - lo
    table = jacobi_table(min(n_rows, n_cols) - 1, np.arange(max(n_rows, n_cols)), 2 * eta - 1, v)
    coef = np.exp(_norm_log(eta, lo, hi)) * np.where((k > i) & (a % 2 == 1), -1.0, 1.0)
    with np.errstate(under="ignore"):
        rpow = r[None, None, :] ** a[..., None]
        out = coef[..., None] * table[lo, a, :] * rpow * (1.0 - u) ** eta
    return out


def u_element_p(eta: float, n: int, nprime: int, z: complex) -> complex:
    """Matrix element ``<e_n| U(p(z)) |e_nprime>`` (Jacobi form)."""
    eta = check_eta(eta)
    z = check_disk(complex(z))
    rho, phi = abs(z), np.angle(z)
    lo, hi = min(n, nprime), max(n, nprime)
    a = hi - lo
    sign = -1.0 if (nprime > n and a % 2) else 1.0
    mag = math.exp(_norm_log(eta, lo, hi)) * (1 - rho * rho) ** eta * rho**a
    return complex(sign * mag * jacobi_poly(lo, float(a), 2 * eta - 1, 1 - 2 * rho * rho) * np.exp(1j * (nprime - n) * phi))


def u_element_p_hypergeometric(eta: float, n: int, nprime: int, z: complex) -> complex:
    """Same matrix element through the terminating 2F1 form (independent route)."""
    eta = check_eta(eta)
    z = check_disk(complex(z))
    rho, phi = abs(z), np.angle(z)
    lo, hi = min(n, nprime), max(n, nprime)
    a = hi - lo
    sign = -1.0 if (nprime > n and a % 2) else 1.0
    lognorm = 0.5 * (gammaln(hi + 1.0) + gammaln(2 * eta + hi) - gammaln(lo + 1.0) - gammaln(2 * eta + lo)) - gammaln(a + 1.0)
    mag = math.exp(lognorm) * (1 - rho * rho) ** eta * rho**a
    f = hyp2f1_terminating(lo, hi + 2 * eta, a + 1, rho * rho)
    return complex(sign * mag * f * np.exp(1j * (nprime - n) * phi))


def u_matrix_p(eta: float, z: complex, N: int) -> "FockOperator":
    """Truncated ``U(p(z))``."""
    z = check_disk(complex(z))
    rows = radial_rows(eta, abs(z), N, N)[..., 0]
    n = np.arange(N)
    phase = np.exp(1j * (n[None, :] - n[:, None]) * np.angle(z))
    return FockOperator(float(eta), rows * phase)


def u_matrix_h(eta: float, theta: float, N: int) -> "FockOperator":
    """Diagonal ``U(h(theta))`` with entries ``exp(-i (eta + n) theta)``."""
    eta = check_eta(eta)
    return FockOperator(eta, np.diag(np.exp(-1j * (eta + np.arange(N)) * theta)))


def u_matrix(eta: float, g: GroupElement, N: int) -> "FockOperator":
    """Truncated ``U(g)`` assembled from the Cartan factors of ``g``."""
    z, theta = cartan_decompose(g)
    return u_matrix_p(eta, z, N) @ u_matrix_h(eta, theta, N)


# ---------------------------------------------------------------------------
# Lie algebra


class Generators(NamedTuple):
    K0: FockOperator
    Kplus: FockOperator
    Kminus: FockOperator
    K1: FockOperator
    K2: FockOperator


def generators(eta: float, N: int) -> Generators:
    """Compact generator, ladder operators and the two boost generators."""
    eta = check_eta(eta)
    n = np.arange(N)
    k0 = np.diag(eta + n).astype(complex)
    kp = np.zeros((N, N), dtype=complex)
    kp[n[1:], n[:-1]] = np.sqrt(n[1:] * (2 * eta + n[:-1]))
    km = kp.T.copy()
    k1 = 0.5j * (kp - km)
    k2 = 0.5 * (kp + km)
    return Generators(*(FockOperator(eta, m) for m in (k0, kp, km, k1, k2)))


def casimir(eta: float, N: int) -> FockOperator:
    """``(K+ K- + K- K+)/2 - K0^2``; the last row and column feel the truncation."""
    g = generators(eta, N)
    return 0.5 * (g.Kplus @ g.Kminus + g.Kminus @ g.Kplus) - g.K0 @ g.K0


def parity(N: int, eta: float | None = None) -> FockOperator:
    """Parity ``diag((-1)^n)``."""
    return FockOperator(eta, np.diag((-1.0) ** np.arange(N)))


# ---------------------------------------------------------------------------
# traces


def trace_u_p_closed(eta: float, z: complex) -> float:
    """Distributional trace of ``U(p(z))`` (singular at the identity)."""
    eta = check_eta(eta)
    rho = abs(check_disk(complex(z)))
    if rho == 0.0:
        raise DomainError("trace of U(p(0)) = I is infinite")
    return (1 - rho * rho) ** eta * (1 + rho) ** (1 - 2 * eta) / (2 * rho)


def trace_u_general(eta: float, g: GroupElement) -> float:
    """Trace of ``U(g)`` for hyperbolic ``g`` (``|Re alpha| > 1``).

    ``[Re a + sqrt(Re a^2 - 1)]^(1 - 2 eta) / (2 sqrt(Re a^2 - 1))``; this
    reduces to :func:`trace_u_p_closed` for pure boosts.
    """
    eta = check_eta(eta)
    ra = g.alpha.real
    if abs(ra) <= 1.0:
        raise DomainError(f"trace formula needs |Re alpha| > 1, got {ra!r}")
    if ra < 0:
        raise DomainError("only the identity component with Re alpha > 1 is covered")
    s = math.sqrt(ra * ra - 1.0)
    return (ra + s) ** (1 - 2 * eta) / (2 * s)


def _diag_series(eta: float, z: complex, t_max: float, tol: float, alternate: bool) -> np.ndarray:
    rho = abs(check_disk(complex(z)))
    n_terms = int(math.ceil(math.log(tol) / math.log(t_max))) + 64
    p = jacobi_sequence(n_terms, 0.0, 2 * eta - 1, 1 - 2 * rho * rho)
    coeffs = (1 - rho * rho) ** eta * p
    if alternate:
        coeffs[1::2] *= -1.0
    return coeffs


def trace_u_p_abel(eta: float, z: complex, ladder=DEFAULT_ABEL_LADDER, tol: float = 1e-15) -> AbelResult:
    """Abel-regularised sum of the diagonal of ``U(p(z))``."""
    eta = check_eta(eta)
    coeffs = _diag_series(eta, z, max(ladder), tol, alternate=False)
    return abel_sum(coeffs, ladder, tol=1e-12)


def trace_parity_u_p(eta: float, z: complex) -> float:
    """``tr(P U(p(z))) = 1/2`` for every boost."""
    check_eta(eta)
    check_disk(complex(z))
    return 0.5


def trace_parity_u_p_abel(eta: float, z: complex, ladder=DEFAULT_ABEL_LADDER, tol: float = 1e-15) -> AbelResult:
    """Abel-regularised ``sum_n (-1)^n U_nn(p(z))``."""
    eta = check_eta(eta)
    coeffs = _diag_series(eta, z, max(ladder), tol, alternate=True)
    return abel_sum(coeffs, ladder, tol=1e-12)


# ---------------------------------------------------------------------------
# displacement and covariance


def displacement(eta: float, xi: complex, N: int) -> FockOperator:
    """``exp(xi K+ - conj(xi) K-)`` on the truncated space.

    On the leading block this reproduces ``U(p(conj z))`` with
    ``z = tanh|xi| exp(i arg xi)``.
    """
    if math.tanh(abs(xi)) > 0.99:
        raise DomainError(f"|xi| = {abs(xi)!r} too large: tanh|xi| must stay <= 0.99")
    g = generators(eta, N)
    gen = xi * g.Kplus.matrix - np.conj(xi) * g.Kminus.matrix
    return FockOperator(float(eta), expm(gen))


def conjugated_generator(eta: float, g: GroupElement, which: str, N: int) -> FockOperator:
    """Exact linear combination equal to ``U(g) K U(g)^-1`` for ``K`` named by ``which``.

    With the matrix elements used here the ladder operators transform as
    ``U K- U^-1 = -2 a conj(b) K0 + a^2 K- + conj(b)^2 K+`` (and the
    conjugate relation for ``K+``), i.e. ``K-`` follows the classical ``k+``.
    """
    a, b = g.alpha, g.beta
    G = generators(eta, N)
    k0 = (abs(a) ** 2 + abs(b) ** 2) * G.K0 - (a * b) * G.Kminus - (a * b).conjugate() * G.Kplus
    km = (-2 * a * b.conjugate()) * G.K0 + a**2 * G.Kminus + b.conjugate() ** 2 * G.Kplus
    kp = (-2 * a.conjugate() * b) * G.K0 + a.conjugate() ** 2 * G.Kplus + b**2 * G.Kminus
    table = {
        "K0": k0,
        "Kplus": kp,
        "Kminus": km,
        "K1": 0.5j * (kp - km),
        "K2": 0.5 * (kp + km),
    }
    if which not in table:
        raise DomainError(f"unknown generator {which!r}; expected one of {sorted(table)}")
    return table[which]


def covariance_check(eta: float, g: GroupElement, which: str, N: int, margin: int | None = None) -> float:
    """Leading-block deviation of ``U(g) K U(g^-1)`` from its exact combination."""
    m = max(2, N // 4) if margin is None else margin
    G = generators(eta, N)._asdict()
    if which not in G:
        raise DomainError(f"unknown generator {which!r}")
    # U(g)^-1 = U(g)^dagger; U(g^-1) differs by exp(4 pi i eta) when 2 eta is not an integer
    U = u_matrix(eta, g, N)
    lhs = U @ G[which] @ U.dagger()
    return lhs.deviation(conjugated_generator(eta, g, which, N), N - m)


def haar_integral(
    eta: float,
    indices: tuple[int, int, int, int],
    grid,
    n_theta: int = 16,
    scale: float = HAAR_SCALE_FORMAL_DIM,
) -> complex:
    """``int d_haar(g) U_{m m'}(g) conj(U_{n n'}(g))`` over ``g = p(z) h(theta)``.

    ``grid`` is a :class:`~adq.grid.DiskGrid`; theta runs over ``[0, 4 pi)``
    with ``n_theta`` uniform nodes and the Haar measure is
    ``scale * dmu(z) dtheta``.
    """
    m, mp, n, np_ = indices
    N = max(indices) + 1
    rows = radial_rows(eta, grid.r, N, N)
    phi = grid.phi
    first = rows[m, mp][:, None] * np.exp(1j * (mp - m) * phi)[None, :]
    second = rows[n, np_][:, None] * np.exp(1j * (np_ - n) * phi)[None, :]
    z_part = grid.integrate(first * np.conj(second))
    theta = 4 * np.pi * np.arange(n_theta) / n_theta
    th_part = np.mean(np.exp(-1j * (mp - np_) * theta)) * 4 * np.pi
    return complex(scale * z_part * th_part)
