"""The unit disk as an SU(1,1) phase space.

Group elements are stored as the pair ``(alpha, beta)`` of the matrix
``[[alpha, beta], [conj(beta), conj(alpha)]]``.  Disk points are plain complex
numbers (or arrays of them) validated by :func:`check_disk`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "DISK_EDGE",
    "check_disk",
    "GroupElement",
    "IDENTITY",
    "compose",
    "inverse",
    "p_matrix",
    "h_matrix",
    "s_matrix",
    "l_matrix",
    "cartan_decompose",
    "mobius_act",
    "pz_composition",
    "ClassicalObservables",
    "observables",
    "hyperboloid_to_disk",
    "coadjoint_transform",
    "poisson_bracket",
    "ads_coords",
    "measure_density",
]

DISK_EDGE = 1.0 - 1e-14
_FOUR_PI = 4.0 * math.pi


def check_disk(z):
    """Return ``z`` as complex (scalar or array) after checking ``|z| < 1``."""
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("disk point must be finite")
    if np.any(np.abs(arr) >= DISK_EDGE):
        raise DomainError(f"point outside the open unit disk: max |z| = {np.max(np.abs(arr))!r}")
    return complex(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True)
class GroupElement:
    """SU(1,1) element ``[[alpha, beta], [conj(beta), conj(alpha)]]``."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        det = abs(a) ** 2 - abs(b) ** 2
        scale = abs(a) ** 2 + abs(b) ** 2
        if not math.isfinite(scale) or abs(det - 1.0) > 1e-12 * scale:
            raise DomainError(f"|alpha|^2 - |beta|^2 = {det!r}, expected 1")

    @property
    def matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[a, b], [b.conjugate(), a.conjugate()]])

    @classmethod
    def from_matrix(cls, m) -> "GroupElement":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1])

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def act(self, z):
        return mobius_act(self, z)


IDENTITY = GroupElement(1.0, 0.0)


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """Matrix product ``g1 g2``, renormalised onto the group."""
    a = g1.alpha * g2.alpha + g1.beta * g2.beta.conjugate()
    b = g1.alpha * g2.beta + g1.beta * g2.alpha.conjugate()
    det = abs(a) ** 2 - abs(b) ** 2
    scale = abs(a) ** 2 + abs(b) ** 2
    drift = abs(det - 1.0) / scale
    if drift > 1e-10:
        warnings.warn(f"determinant drift {drift:.2e} in compose; renormalising", RuntimeWarning)
    if det <= 0:
        raise ConvergenceError("product left the group: determinant is not positive")
    r = 1.0 / math.sqrt(det)
    return GroupElement(a * r, b * r)


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(g.alpha.conjugate(), -g.beta)


def p_matrix(z) -> GroupElement:
    """Boost factor ``p(z) = delta [[1, z], [conj z, 1]]`` with ``delta = (1-|z|^2)^(-1/2)``."""
    z = check_disk(complex(z))
    delta = 1.0 / math.sqrt(1.0 - abs(z) ** 2)
    return GroupElement(delta, delta * z)


def h_matrix(theta: float) -> GroupElement:
    """Rotation factor ``diag(exp(i theta/2), exp(-i theta/2))``."""
    return GroupElement(np.exp(0.5j * theta), 0.0)


def s_matrix(u: float) -> GroupElement:
    """One-parameter hyperbolic subgroup generated by ``sigma_1 / 2``."""
    return GroupElement(math.cosh(u / 2), math.sinh(u / 2))


def l_matrix(v: float) -> GroupElement:
    """One-parameter hyperbolic subgroup generated by ``-sigma_2 / 2``."""
    return GroupElement(math.cosh(v / 2), 1j * math.sinh(v / 2))


def cartan_decompose(g: GroupElement) -> tuple[complex, float]:
    """Split ``g = p(z) h(theta)``; theta is returned in ``[0, 4 pi)``."""
    z = g.beta / g.alpha.conjugate()
    theta = (2.0 * np.angle(g.alpha)) % _FOUR_PI
    return complex(z), float(theta)


def mobius_act(g: GroupElement, z):
    """Homographic action ``(alpha z + beta) / (conj(beta) z + conj(alpha))``.

    Vectorised over ``z``.
    """
    z = np.asarray(z, dtype=complex)
    out = (g.alpha * z + g.beta) / (g.beta.conjugate() * z + g.alpha.conjugate())
    return complex(out) if out.ndim == 0 else out


def pz_composition(z, zp) -> tuple[complex, float]:
    """Factor ``p(-z) p(zp) = p(t) h(theta)`` and return ``(t, theta)``."""
    g = compose(p_matrix(-complex(z)), p_matrix(zp))
    t, theta = cartan_decompose(g)
    # t also equals p(-z).zp; the decomposition is the more stable route near the edge
    return t, theta


@dataclass(frozen=True)
class ClassicalObservables:
    """The hyperboloid coordinates ``k0, k1, k2`` together with ``k+-``.

    Fields may be scalars or equally shaped arrays.
    """

    k0: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    kplus: np.ndarray
    kminus: np.ndarray

    def shell_residual(self):
        return np.max(np.abs(self.k0**2 - self.k1**2 - self.k2**2 - 1.0))

    def as_tuple(self):
        return self.k0, self.k1, self.k2, self.kplus, self.kminus


def _k0(z):
    u = np.abs(z) ** 2
    return (1.0 + u) / (1.0 - u)


def _k1(z):
    return (2.0 * np.imag(z)) / (1.0 - np.abs(z) ** 2)


def _k2(z):
    return (2.0 * np.real(z)) / (1.0 - np.abs(z) ** 2)


def _kplus(z):
    return 2.0 * np.conj(z) / (1.0 - np.abs(z) ** 2)


def _kminus(z):
    return 2.0 * np.asarray(z) / (1.0 - np.abs(z) ** 2)


# individual observables as plain vectorised functions of z
k0, k1, k2, kplus, kminus = _k0, _k1, _k2, _kplus, _kminus
OBSERVABLE_FUNCTIONS: dict[str, Callable] = {
    "k0": _k0,
    "k1": _k1,
    "k2": _k2,
    "kplus": _kplus,
    "kminus": _kminus,
}


def observables(z) -> ClassicalObservables:
    z = check_disk(z)
    return ClassicalObservables(_k0(z), _k1(z), _k2(z), _kplus(z), _kminus(z))


def _from_k0_kplus(k0v, kp) -> ClassicalObservables:
    k2v = np.real(kp)
    k1v = -np.imag(kp)
    return ClassicalObservables(k0v, k1v, k2v, kp, np.conj(kp))


def hyperboloid_to_disk(k0v: float, k1v: float, k2v: float, tol: float = 1e-9) -> complex:
    """Stereographic projection of the upper sheet onto the disk."""
    if k0v <= 0:
        raise DomainError(f"k0 must be positive (upper sheet), got {k0v!r}")
    off = k0v**2 - k1v**2 - k2v**2 - 1.0
    if abs(off) > tol * max(1.0, k0v**2):
        raise DomainError(f"point is off the hyperboloid by {off!r}")
    return complex(k2v, k1v) / (1.0 + k0v)


def coadjoint_transform(g: GroupElement, obs: ClassicalObservables) -> ClassicalObservables:
    """Values of the observables at ``g^{-1} z`` expressed through their values at ``z``."""
    a, b = g.alpha, g.beta
    k0v, kp, km = obs.k0, obs.kplus, obs.kminus
    new_k0 = (abs(a) ** 2 + abs(b) ** 2) * k0v - 2.0 * np.real(a * b * kp)
    new_kp = -2.0 * a * b.conjugate() * k0v + a**2 * kp + b.conjugate() ** 2 * km
    return _from_k0_kplus(np.real(new_k0), new_kp)


def poisson_bracket(f: Callable, g: Callable, z: complex, h_step: float | None = None) -> float:
    """``(1-|z|^2)^2/(2i) (df/dz dg/dzbar - df/dzbar dg/dz)`` by central differences."""
    z = check_disk(complex(z))
    h = 1e-5 * (1.0 - abs(z)) if h_step is None else h_step
    if h < 1e-12:
        raise ConvergenceError(f"finite-difference step {h!r} underflows near the boundary")

    def wirtinger(fun):
        dx = (fun(z + h) - fun(z - h)) / (2 * h)
        dy = (fun(z + 1j * h) - fun(z - 1j * h)) / (2 * h)
        return 0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy)

    fz, fzb = wirtinger(f)
    gz, gzb = wirtinger(g)
    val = (1 - abs(z) ** 2) ** 2 / 2j * (fz * gzb - fzb * gz)
    return complex(val).real if abs(complex(val).imag) < 1e-6 * max(1.0, abs(val)) else complex(val)


def ads_coords(theta: float, u: float, kappa: float = 1.0) -> tuple[float, float, float]:
    """Global coordinates ``(y2, y0, y1)`` on the one-sheeted hyperboloid of curvature ``kappa``."""
    if kappa <= 0:
        raise DomainError(f"curvature must be positive, got {kappa!r}")
    c = math.cosh(u) / kappa
    return c * math.cos(theta), c * math.sin(theta), math.sinh(u) / kappa


def measure_density(z):
    """Density ``(1-|z|^2)^(-2)`` of the invariant area measure."""
    z = np.asarray(z, dtype=complex)
    return 1.0 / (1.0 - np.abs(z) ** 2) ** 2
