"""Lower symbols and phase-space portraits.

An observable is quantized with an analysis weight ``w1`` and read back as a
lower symbol with a reconstruction weight ``w2``.  After the change of
variables ``z' = p(z).t`` the portrait is an average of ``f`` against the
transition kernel ``T(t) = tr(M1(p(t)) M2)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError
from .geometry import k0 as k0_fn
from .geometry import mobius_act, p_matrix
from .grid import DiskGrid, angular_count, disk_grid
from .quantizer import QuantizerOperator, WeightSpec, displaced_m, gamma_constant, parse_weight, quantizer
from .repn import FockOperator, radial_rows, trace_u_p_closed
from .specfun import richardson_tail

__all__ = [
    "PortraitConfig",
    "lower_symbol",
    "transition_kernel",
    "kernel_decay",
    "tail_exponents",
    "portrait",
    "portrait_grid",
    "kappa_constant",
    "wigner_sweep",
]


@dataclass(frozen=True)
class PortraitConfig:
    """Analysis/reconstruction weight pair with the numerical resolution."""

    eta: float
    w1: WeightSpec
    w2: WeightSpec
    N: int = 40
    radial_order: int = 64
    angular_points: int = 64
    depth: int | None = None
    q1: QuantizerOperator = field(init=False, repr=False, compare=False)
    q2: QuantizerOperator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w1 = parse_weight(self.w1, self.eta) if isinstance(self.w1, str) else self.w1
        w2 = parse_weight(self.w2, self.eta) if isinstance(self.w2, str) else self.w2
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)
        object.__setattr__(self, "q1", quantizer(self.eta, w1, self.N))
        object.__setattr__(self, "q2", quantizer(self.eta, w2, self.N))
        if self.depth is None:
            object.__setattr__(self, "depth", 4 * self.N)


def lower_symbol(A: FockOperator, q2: QuantizerOperator, z: complex) -> complex:
    """``tr(A M2(p(z)))``."""
    if A.eta is not None and not math.isclose(A.eta, q2.eta):
        raise DomainError(f"lowest-weight mismatch: {A.eta} vs {q2.eta}")
    M = displaced_m(q2, z, A.dim)
    return complex(np.sum(A.matrix * M.matrix.T))


def _depth(q: QuantizerOperator) -> int:
    return q.support or q.k_max


def _half_diag(eta: float, r, K: int) -> np.ndarray:
    # diagonal profile of 2 U(p(z'')) P with |z''| = 2r/(1+r^2)
    rr = 2 * r / (1 + r * r)
    rows = radial_rows(eta, rr, K, K)
    idx = np.arange(K)
    return 2.0 * rows[idx, idx, :] * ((-1.0) ** idx)[:, None]


def _diag_profile(q: QuantizerOperator, r, K: int, Kq: int) -> np.ndarray:
    """``M(p(r))_kk`` for ``k < K`` from the first ``Kq`` diagonal entries, shape ``(K, len(r))``."""
    rows = radial_rows(q.eta, r, K, Kq)
    return np.einsum("kjr,j->kr", rows * rows, q.diagonal(Kq))


def transition_kernel(q1: QuantizerOperator, q2: QuantizerOperator, t) -> np.ndarray:
    """``tr(M1(p(t)) M2)``; depends on ``|t|`` only.  Vectorised over ``t``."""
    t = np.asarray(t, dtype=complex)
    return _kernel_partials(q1, q2, np.abs(t).ravel(), None)[-1].reshape(t.shape)


def _kernel_partials(q1: QuantizerOperator, q2: QuantizerOperator, r, cutoffs) -> np.ndarray:
    """Kernel with every infinite sum cut at each entry of ``cutoffs``.

    Returns shape ``(C, len(r))``; ``C = 1`` when ``cutoffs`` is None, in which
    case the quantizers' own depths are used.
    """
    if not math.isclose(q1.eta, q2.eta):
        raise DomainError("both quantizers must share eta")
    if np.any(r >= 1.0 - 1e-14):
        raise DomainError("points outside the open unit disk")
    eta = q1.eta
    if q1.alternating and q2.alternating:
        # 4 tr U(p(t'')), distributional; singular at t = 0
        rr = 2 * r / (1 + r * r)
        return np.array([[4.0 * trace_u_p_closed(eta, x) for x in rr]])
    if q1.alternating or q2.alternating:
        # the alternating factor is exact in the doubled-radius form; by
        # tr(M1(p(t)) M2) = tr(M1 M2(p(-t))) only the other diagonal is summed
        other = q2 if q1.alternating else q1
        K = _depth(other) if cutoffs is None or other.support else max(cutoffs)
        terms = other.diagonal(K)[:, None] * _half_diag(eta, r, K)
        return _cut(np.cumsum(terms, axis=0), cutoffs, other.support)
    if cutoffs is None:
        K1, K2 = _depth(q1), _depth(q2)
        terms = q2.diagonal(K2)[:, None] * _diag_profile(q1, r, K2, K1)
        return terms.sum(axis=0)[None, :]
    out = []
    for c in cutoffs:
        K1 = q1.support or c
        K2 = q2.support or c
        out.append(q2.diagonal(K2) @ _diag_profile(q1, r, K2, K1))
    return np.array(out)


def _cut(partial: np.ndarray, cutoffs, support) -> np.ndarray:
    if cutoffs is None or support:
        return partial[-1:]
    return partial[np.asarray(cutoffs) - 1]


def tail_exponents(q1: QuantizerOperator, q2: QuantizerOperator, singular_order: float) -> list[float]:
    """Leading truncation exponents of the portrait kernel sums (empty when exact)."""
    out = []
    for q in (q1, q2):
        p = q.tail_exponent(singular_order)
        if p is not None:
            out.append(p)
    if q1.alternating and q2.alternating:
        return []
    return out


def kernel_decay(q1: QuantizerOperator, q2: QuantizerOperator) -> float:
    """Exponent ``e`` with ``T(t) ~ (1-|t|^2)^e`` at the boundary (used to pick the radial rule)."""

    def single(q):
        if q.support is not None or q.alternating:
            return 2.0 * q.eta
        if q.weight.kind == "power":
            return min(2.0 * q.eta, 2.0 * q.weight.param - 1.0)
        return 2.0 * q.eta

    e1, e2 = single(q1), single(q2)
    finite = (q1.support is not None or q1.alternating) or (q2.support is not None or q2.alternating)
    return max(e1, e2) if finite else min(e1, e2)


def _portrait_grid(cfg: PortraitConfig, singular_order: float) -> DiskGrid:
    beta = kernel_decay(cfg.q1, cfg.q2) - 2.0 - singular_order
    if beta <= -1:
        raise ConvergenceError(
            f"portrait integral diverges: kernel decay {kernel_decay(cfg.q1, cfg.q2):g} "
            f"against observable growth order {singular_order:g}"
        )
    order = cfg.radial_order
    if tail_exponents(cfg.q1, cfg.q2, singular_order):
        # truncated kernels are polynomials of degree ~ 2 * depth in |t|^2
        order = max(order, cfg.depth)
    return disk_grid(order=order, n_angles=angular_count(cfg.angular_points), beta=beta)


def portrait(
    f: Callable,
    cfg: PortraitConfig,
    z,
    *,
    singular_order: float = 0.0,
    grid: DiskGrid | None = None,
    check_grid: bool = False,
    grid_tol: float = 1e-8,
    levels: int = 5,
):
    """Portrait ``(2eta-1)/pi int dmu(t) f(p(z).t) T(t)`` at one or many ``z``.

    When the reconstruction weight has an algebraic tail the kernel sum is
    evaluated at several cutoffs and extrapolated in the cutoff.
    """
    grid = grid or _portrait_grid(cfg, singular_order)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    p0 = tail_exponents(cfg.q1, cfg.q2, singular_order) or None
    if p0 is not None and min(p0) <= 0:
        raise ConvergenceError(f"portrait kernel series diverges for growth order {singular_order:g}")
    out = _portrait_on(f, cfg, zs, grid, p0, levels)
    if check_grid:
        fine = _portrait_on(f, cfg, zs, grid.refined(), p0, levels)
        diff = float(np.max(np.abs(fine - out)))
        if diff > grid_tol * max(1.0, float(np.max(np.abs(out)))):
            warnings.warn(f"portrait grid too coarse: refinement changed values by {diff:.2e}", RuntimeWarning)
    return complex(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def _portrait_on(f, cfg: PortraitConfig, zs, grid: DiskGrid, p0=None, levels=5) -> np.ndarray:
    cutoffs = None
    if p0 is not None:
        K = cfg.depth
        cutoffs = [K >> j for j in range(levels - 1, -1, -1)]
    kern = _kernel_partials(cfg.q1, cfg.q2, grid.r, cutoffs)
    pref = (2 * cfg.eta - 1) / math.pi
    pts = grid.points
    out = np.empty(len(zs), dtype=complex)
    for i, z in enumerate(zs):
        vals = np.asarray(f(mobius_act(p_matrix(z), pts)), dtype=complex)
        per_cut = pref * np.array([grid.integrate(vals * k[:, None]) for k in kern])
        if cutoffs is None:
            out[i] = per_cut[0]
        else:
            re, _ = richardson_tail(per_cut.real, cutoffs, p0)
            im, _ = richardson_tail(per_cut.imag, cutoffs, p0)
            out[i] = re + 1j * im
    return out


def portrait_grid(f: Callable, cfg: PortraitConfig, radii: Sequence[float], angles: int, **kwargs):
    """Portrait sampled on a polar grid; returns ``(z, values)`` flattened row-major."""
    radii = np.asarray(radii, dtype=float)
    phis = 2 * np.pi * np.arange(angles) / angles
    zs = (radii[:, None] * np.exp(1j * phis)[None, :]).ravel()
    return zs, portrait(f, cfg, zs, **kwargs)


def kappa_constant(
    cfg: PortraitConfig,
    samples: Sequence[complex] = (0.3, 0.5j, -0.4 + 0.2j),
    tol: float = 1e-5,
) -> float:
    """Ratio of the portrait of ``k0`` to ``k0``, measured at the origin.

    The ratio is re-measured at ``samples``; a relative spread above ``tol``
    raises ConvergenceError ("kappa not constant").
    """
    vals = portrait(k0_fn, cfg, np.array([0.0, *samples]), singular_order=1.0)
    ratios = np.real(vals) / k0_fn(np.array([0.0, *samples]))
    kappa = float(ratios[0])
    spread = float(np.max(np.abs(ratios - kappa))) / max(abs(kappa), 1e-300)
    if not np.isfinite(kappa) or spread > tol:
        raise ConvergenceError(f"kappa not constant: relative spread {spread:.2e} across samples")
    return kappa


def wigner_sweep(eta: float, weights1: Sequence[str], weights2: Sequence[str], N: int = 24) -> list[dict]:
    """Tabulate ``kappa - 1`` over pairs of weights (exploratory; asserts nothing)."""
    rows = []
    for a in weights1:
        for b in weights2:
            row = {"eta": eta, "w1": a, "w2": b}
            try:
                cfg = PortraitConfig(eta, a, b, N)
                row["gamma"] = gamma_constant(eta, cfg.q1) if eta > 1 else float("nan")
                row["kappa"] = kappa_constant(cfg)
                row["kappa_minus_1"] = row["kappa"] - 1.0
            except (ConvergenceError, DomainError) as exc:
                row["error"] = str(exc)
            rows.append(row)
    return rows
