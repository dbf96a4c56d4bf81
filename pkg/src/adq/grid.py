"""Product quadrature on the unit disk.

The radial direction uses ``v = 1 - 2|z|^2`` with a Gauss-Jacobi rule whose
``(1+v)`` exponent absorbs the algebraic vanishing of the integrand at the
boundary; the angular direction is a uniform periodic grid.  All change of
variables bookkeeping lives in :func:`radial_measure_weights`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .specfun import RadialQuadrature, gauss_jacobi

__all__ = ["DiskGrid", "disk_grid", "radial_measure_weights", "angular_count"]


def radial_measure_weights(quad: RadialQuadrature, density_power: float = 2.0) -> np.ndarray:
    """Weights ``W`` with ``int d^2z (1-|z|^2)^(-c) G = sum_r W_r int dphi G(r, phi)``.

    ``d^2z = dv dphi / 4`` and ``1 - |z|^2 = (1+v)/2``, so the density becomes
    ``2^(c-2) (1+v)^(-c)`` against ``dv dphi``; the Gauss-Jacobi weight
    ``(1+v)^beta`` has to be divided back out.
    """
    v = quad.nodes
    return quad.weights * 2.0 ** (density_power - 2.0) * (1.0 + v) ** (-density_power - quad.beta)


def angular_count(n: int, minimum: int = 8) -> int:
    """Smallest multiple of 8 that is at least ``max(n, minimum)``."""
    n = max(int(n), minimum)
    return 8 * math.ceil(n / 8)


@dataclass(frozen=True)
class DiskGrid:
    """Tensor grid ``z = r exp(i phi)`` with invariant-measure weights.

    ``integrate(G)`` approximates ``int d^2z (1-|z|^2)^(-density_power) G(z)``
    for ``G`` sampled on :attr:`points` (shape ``(radial, angular, ...)``).
    """

    quad: RadialQuadrature
    n_angles: int
    density_power: float = 2.0
    radial_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_angles < 1:
            raise DomainError("need at least one angular node")
        object.__setattr__(self, "radial_weights", radial_measure_weights(self.quad, self.density_power))

    @property
    def v(self) -> np.ndarray:
        return self.quad.nodes

    @property
    def u(self) -> np.ndarray:
        return 0.5 * (1.0 - self.quad.nodes)

    @property
    def r(self) -> np.ndarray:
        return np.sqrt(self.u)

    @property
    def phi(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_angles) / self.n_angles

    @property
    def points(self) -> np.ndarray:
        return self.r[:, None] * np.exp(1j * self.phi)[None, :]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.quad.nodes), self.n_angles

    def integrate(self, values):
        """Sum ``values`` (leading axes radial, angular) against the measure."""
        values = np.asarray(values)
        ang = values.sum(axis=1) * (2.0 * np.pi / self.n_angles)
        return np.tensordot(self.radial_weights, ang, axes=(0, 0))

    def integrate_radial(self, values):
        """Integrate an isotropic function sampled on the radial nodes only."""
        return 2.0 * np.pi * np.tensordot(self.radial_weights, np.asarray(values), axes=(0, 0))

    def refined(self) -> "DiskGrid":
        """Grid with doubled radial order and angular count (for self-checks)."""
        q = gauss_jacobi(2 * self.quad.order, self.quad.alpha, self.quad.beta)
        return DiskGrid(q, 2 * self.n_angles, self.density_power)


def disk_grid(
    eta: float | None = None,
    order: int = 64,
    n_angles: int = 256,
    *,
    beta: float | None = None,
    singular_order: float = 0.0,
    density_power: float = 2.0,
) -> DiskGrid:
    """Build a :class:`DiskGrid`.

    By default the radial rule carries the exponent ``2 eta - 2 - singular_order``
    which makes products of two representation matrix elements times the
    invariant density polynomial in ``v``; ``singular_order = q`` accounts for an
    integrand growing like ``(1-|z|^2)^(-q)``.  Pass ``beta`` to override.
    """
    if beta is None:
        if eta is None:
            raise DomainError("either eta or beta must be given")
        beta = 2.0 * eta - density_power - singular_order
    if beta <= -1:
        raise DomainError(
            f"radial exponent {beta!r} <= -1: integrand not integrable at the boundary"
        )
    if n_angles % 8:
        raise DomainError(f"angular count must be a multiple of 8, got {n_angles}")
    return DiskGrid(gauss_jacobi(order, 0.0, beta), n_angles, density_power)
