"""Self-verification suites behind ``adq verify``.

Each check measures one identity numerically and compares it with a
tolerance.  Suites are plain lists of checks; reports are sorted by name so
the output does not depend on evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import ConvergenceError, DomainError
from .geometry import OBSERVABLE_FUNCTIONS, GroupElement, h_matrix, inverse, mobius_act, p_matrix
from .grid import angular_count, disk_grid
from .portrait import PortraitConfig, kappa_constant, lower_symbol, portrait, transition_kernel
from .quantizer import (
    displaced_m,
    gamma_constant,
    gamma_from_quantization,
    isotropic_integral,
    m_diagonal,
    m_power_closed_array,
    parity_integral_check,
    quantize,
    quantizer,
    radial_profile,
    s_series,
)
from .repn import (
    casimir,
    conjugated_generator,
    covariance_check,
    generators,
    parity,
    trace_parity_u_p_abel,
    trace_u_p_abel,
    trace_u_p_closed,
    u_element_p,
    u_element_p_hypergeometric,
    u_matrix,
    u_matrix_p,
)
from .specfun import abel_sum, gauss_jacobi, hyp2f1_terminating, hyp3f2_terminating, jacobi_all
from .specfun import richardson_tail

__all__ = ["CheckConfig", "CheckResult", "SUITES", "run_suite", "expected_s_power", "expected_gamma", "expected_kappa"]


@dataclass(frozen=True)
class CheckConfig:
    eta: float = 2.0
    N: int = 40
    weight: str = "perelomov"
    weight2: str = "perelomov"
    radial_order: int = 64
    angular_points: int = 256
    seed: int = 0


@dataclass
class CheckResult:
    name: str
    ref: str
    measured: float
    tolerance: float
    status: str
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass" or self.status.startswith("skipped")

    def as_dict(self) -> dict:
        return asdict(self)


class Skip(Exception):
    """Raised by a check whose preconditions do not hold for the configuration."""


@dataclass(frozen=True)
class _Check:
    suite: str
    name: str
    ref: str
    tolerance: float
    fn: Callable = field(repr=False)


_REGISTRY: list[_Check] = []


def _check(suite: str, name: str, ref: str, tolerance: float):
    def deco(fn):
        _REGISTRY.append(_Check(suite, f"{suite}.{name}", ref, tolerance, fn))
        return fn

    return deco


def _need_gamma(cfg: CheckConfig):
    if cfg.eta <= 1:
        raise Skip("eta <= 1")


# ---------------------------------------------------------------------------
# closed-form expectations used as references


def expected_s_power(eta: float, s: float) -> float:
    """``sum_k k M_kk`` for the power weight, from Gauss's summation of the ratio series."""
    if s <= 1.5:
        raise DomainError("the series needs s > 3/2")
    return (eta - s + 1) / (2 * s - 3)


def expected_gamma(eta: float, kind: str, param: float | None = None) -> float:
    if kind == "half":
        return (2 * eta - 1) / (2 * eta * (eta - 1))
    if kind == "basis_projector":
        return (eta + param) / (eta * (eta - 1))
    if kind == "power":
        return (1 + expected_s_power(eta, param) / eta) / (eta - 1)
    raise DomainError(f"no closed form for {kind!r}")


def expected_kappa(eta: float, s1: float, s2: float) -> float:
    """Portrait constant from the two moment sums ``S``: ``(eta+S1)(eta+S2)/(eta(eta-1))``."""
    return (eta + s1) * (eta + s2) / (eta * (eta - 1))


def _rel(a, b, floor: float = 1e-300) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), floor)))


def _jacobi_norm(n, a, b):
    return math.exp(
        (a + b + 1) * math.log(2) - math.log(a + b + 2 * n + 1)
        + gammaln(a + n + 1) + gammaln(b + n + 1) - gammaln(n + 1) - gammaln(a + b + n + 1)
    )


# ---------------------------------------------------------------------------
# appendix: special-function identities


@_check("appendix", "jacobi_orthogonality", "jacobi-orthogonality", 1e-10)
def _(cfg):
    worst = 0.0
    for a, b in ((0.0, 1.0), (1.0, 2.0), (2.0, 0.5)):
        q = gauss_jacobi(16, a, b)
        P = jacobi_all(10, a, b, q.nodes)
        gram = (P * q.weights) @ P.T
        norms = np.array([_jacobi_norm(n, a, b) for n in range(11)])
        worst = max(worst, float(np.max(np.abs(gram - np.diag(norms)) / np.sqrt(np.outer(norms, norms)))))
    return worst


@_check("appendix", "jacobi_square_shift1", "jacobi-square-integral-beta-minus-1", 1e-9)
def _(cfg):
    worst = 0.0
    for a in (0.0, 1.0, 2.0):
        for b in (0.5, 1.0, 3.0):
            q = gauss_jacobi(16, a, b - 1)
            P = jacobi_all(8, a, b, q.nodes)
            for n in range(9):
                num = q.weights @ P[n] ** 2
                ref = 2 ** (a + b) / b * math.exp(gammaln(a + n + 1) + gammaln(b + n + 1) - gammaln(n + 1) - gammaln(a + b + n + 1))
                worst = max(worst, _rel(num, ref))
    return worst


@_check("appendix", "jacobi_square_shift2", "jacobi-square-integral-beta-minus-2", 1e-9)
def _(cfg):
    worst = 0.0
    for a in (0.0, 1.0, 2.0):
        for b in (1.5, 3.0):
            q = gauss_jacobi(16, a, b - 2)
            P = jacobi_all(8, a, b, q.nodes)
            for n in range(9):
                num = q.weights @ P[n] ** 2
                pref = 2 ** (a + b - 1) / (b * (b + 1) * (b - 1))
                g = math.exp(gammaln(a + n + 1) + gammaln(b + n + 1) - gammaln(n + 1) - gammaln(a + b + n + 1))
                ref = pref * g * ((b + 1) * (a + b) + 2 * (a + b + n + 1) * n)
                worst = max(worst, _rel(num, ref))
    return worst


@_check("appendix", "jacobi_moment_3f2", "jacobi-moment-hypergeometric", 1e-9)
def _(cfg):
    worst = 0.0
    for rho in (0.5, 1.0, 2.0):
        for sig in (0.5, 1.0, 2.0):
            q = gauss_jacobi(20, rho, sig)
            for mu in (0.0, 1.0, 2.0):
                for nu in (0.0, 1.0, 2.0):
                    P = jacobi_all(6, mu, nu, q.nodes)
                    for n in range(7):
                        num = q.weights @ P[n]
                        scale = q.weights @ np.abs(P[n])
                        ref = 2 ** (rho + sig + 1) * math.exp(
                            gammaln(rho + 1) + gammaln(sig + 1) + gammaln(n + 1 + mu)
                            - gammaln(n + 1) - gammaln(rho + sig + 2) - gammaln(mu + 1)
                        ) * hyp3f2_terminating(n, mu + nu + n + 1, rho + 1, mu + 1, rho + sig + 2)
                        worst = max(worst, abs(num - ref) / max(abs(ref), scale))
    return worst


@_check("appendix", "hypergeometric_alternating_integral", "alternating-hypergeometric-integral", 1e-8)
def _(cfg):
    worst = 0.0
    for eta in (1.5, 2.0, 3.0):
        # u = (1 + x)/2 so (1 - u)^(2 eta - 2) is the Jacobi weight (1 - x)^(2 eta - 2)
        q = gauss_jacobi(80, 2 * eta - 2, 0.0)
        u = (1 + q.nodes) / 2
        for n in range(11):
            F = hyp2f1_terminating(n, n + 2 * eta, 1.0, 4 * u / (1 + u) ** 2)
            val = 2 * (2 * eta - 1) * 2.0 ** (1 - 2 * eta) * (q.weights @ ((1 + u) ** (-2 * eta) * F))
            worst = max(worst, abs(val - (-1) ** n))
    return worst


@_check("appendix", "beta_integral_forms", "beta-function-integrals", 1e-10)
def _(cfg):
    worst = 0.0
    for x in (0.5, 1.5, 3.0):
        for y in (0.5, 1.5, 3.0):
            ref = math.exp(gammaln(x) + gammaln(y) - gammaln(x + y))
            one, _ = integrate.quad(lambda t: 1.0, 0, 1, weight="alg", wvar=(x - 1, y - 1), epsabs=0, epsrel=1e-13)
            two, _ = integrate.quad(lambda t: 1.0, -1, 1, weight="alg", wvar=(y - 1, x - 1), epsabs=0, epsrel=1e-13)
            worst = max(worst, _rel(one, ref), _rel(2 ** (1 - x - y) * two, ref))
    return worst


def _jacobi_moments(a: float, b: float, kmax: int) -> list[float]:
    # integrating d/dv[(1-v)^(a+1) (1+v)^(b+1) v^k] gives
    # (a+b+k+2) m_{k+1} = (b-a) m_k + k m_{k-1}
    m = [2 ** (a + b + 1) * math.exp(gammaln(a + 1) + gammaln(b + 1) - gammaln(a + b + 2))]
    m.append((b - a) * m[0] / (a + b + 2))
    for k in range(1, kmax):
        m.append(((b - a) * m[k] + k * m[k - 1]) / (a + b + k + 2))
    return m


@_check("appendix", "gauss_jacobi_exactness", "quadrature-degree", 1e-12)
def _(cfg):
    worst = 0.0
    for a, b in ((0.0, 0.0), (1.0, 2.0), (0.5, -0.5), (2.0, 3.0)):
        q = gauss_jacobi(8, a, b)
        mom = _jacobi_moments(a, b, 16)
        for k in range(16):
            worst = max(worst, abs(q.weights @ q.nodes**k - mom[k]) / max(abs(mom[k]), mom[0] * 1e-3))
    return worst


@_check("appendix", "abel_alternating_ones", "abel-parity-trace", 1e-10)
def _(cfg):
    return abs(abel_sum(lambda n: (-1.0) ** n).value - 0.5)


@_check("appendix", "abel_alternating_linear", "abel-moment-sum", 1e-6)
def _(cfg):
    return abs(abel_sum(lambda n: 2.0 * n * (-1.0) ** n).value + 0.5)


@_check("appendix", "abel_geometric", "abel-convergent", 1e-8)
def _(cfg):
    res = abel_sum(lambda n: 0.5**n)
    return abs(res.value - 2.0)


# ---------------------------------------------------------------------------
# representation


@_check("repn", "commutator_k0_kplus", "ladder-commutators", 1e-12)
def _(cfg):
    G = generators(cfg.eta, cfg.N)
    b = cfg.N - 2
    return max(
        (G.K0 @ G.Kplus - G.Kplus @ G.K0).deviation(G.Kplus, b),
        (G.K0 @ G.Kminus - G.Kminus @ G.K0).deviation(-1 * G.Kminus, b),
    )


@_check("repn", "commutator_kplus_kminus", "ladder-commutators", 1e-12)
def _(cfg):
    G = generators(cfg.eta, cfg.N)
    return (G.Kplus @ G.Kminus - G.Kminus @ G.Kplus).deviation(-2 * G.K0, cfg.N - 2)


@_check("repn", "casimir_value", "casimir-fixed", 1e-12)
def _(cfg):
    C = casimir(cfg.eta, cfg.N).matrix
    b = cfg.N - 2
    return float(np.max(np.abs(C[:b, :b] + cfg.eta * (cfg.eta - 1) * np.eye(b))))


@_check("repn", "matrix_element_forms", "jacobi-vs-hypergeometric", 1e-12)
def _(cfg):
    worst = 0.0
    for z in (0.3 + 0.1j, -0.5j, 0.7):
        for n in range(6):
            for m in range(6):
                a = u_element_p(cfg.eta, n, m, z)
                b = u_element_p_hypergeometric(cfg.eta, n, m, z)
                worst = max(worst, abs(a - b))
    return worst


@_check("repn", "inverse_is_adjoint", "unitarity", 1e-12)
def _(cfg):
    z = 0.4 - 0.3j
    return u_matrix_p(cfg.eta, z, cfg.N).dagger().deviation(u_matrix_p(cfg.eta, -z, cfg.N))


@_check("repn", "parity_flips_boost", "parity-conjugation", 1e-12)
def _(cfg):
    z = 0.4 - 0.3j
    P = parity(cfg.N, cfg.eta)
    return (P @ u_matrix_p(cfg.eta, z, cfg.N) @ P).deviation(u_matrix_p(cfg.eta, -z, cfg.N))


@_check("repn", "homomorphism", "representation-property", 1e-10)
def _(cfg):
    g1 = p_matrix(0.3 + 0.2j) @ h_matrix(0.7)
    g2 = p_matrix(-0.25j) @ h_matrix(-1.1)
    D = 4 * cfg.N
    lhs = u_matrix(cfg.eta, g1, D) @ u_matrix(cfg.eta, g2, D)
    return lhs.deviation(u_matrix(cfg.eta, g1 @ g2, D), cfg.N // 2)


@_check("repn", "generator_covariance", "generator-conjugation", 1e-8)
def _(cfg):
    worst = 0.0
    g = p_matrix(0.2 - 0.1j) @ h_matrix(0.4)
    for which in ("K0", "Kplus", "Kminus", "K1", "K2"):
        # twice the dimension keeps the truncation leak out of the compared block
        worst = max(worst, covariance_check(cfg.eta, g, which, 2 * cfg.N, margin=3 * cfg.N // 2))
    return worst


@_check("repn", "trace_closed_vs_abel", "boost-trace", 1e-4)
def _(cfg):
    return max(abs(trace_u_p_abel(cfg.eta, r).value - trace_u_p_closed(cfg.eta, r)) for r in (0.3, 0.5, 0.7))


@_check("repn", "trace_parity_boost", "parity-boost-trace", 1e-4)
def _(cfg):
    return max(abs(trace_parity_u_p_abel(cfg.eta, r).value - 0.5) for r in (0.3, 0.5, 0.7))


@_check("repn", "trace_spot_value", "boost-trace-spot", 1e-12)
def _(cfg):
    return abs(trace_u_p_closed(2.0, 0.5) - 1.0 / 6.0)


# ---------------------------------------------------------------------------
# quantizer


def _q(cfg, which: str = "weight", N: int | None = None):
    return quantizer(cfg.eta, getattr(cfg, which), N or cfg.N)


@_check("quantizer", "unit_trace", "unit-trace", 1e-8)
def _(cfg):
    return abs(_q(cfg).trace() - 1.0)


@_check("quantizer", "diagonal_quadrature_vs_closed", "diagonal-elements", 1e-10)
def _(cfg):
    q = _q(cfg)
    if q.weight.kind not in ("power", "basis_projector"):
        raise Skip(f"no closed form for {q.weight.kind}")
    n = min(cfg.N, 24)
    return float(np.max(np.abs(m_diagonal(cfg.eta, q.weight, n, order=96) - q.diagonal(n))))


@_check("quantizer", "resolution_of_identity", "resolution-of-identity", 1e-8)
def _(cfg):
    q = quantizer(cfg.eta, cfg.weight, cfg.N, k_max=16 * cfg.N)
    res = quantize(q, lambda z: np.ones_like(z), cfg.N, levels=5)
    return res.operator.deviation(np.eye(cfg.N), cfg.N // 2)


@_check("quantizer", "ground_state_constant", "normalisation-constant", 1e-7)
def _(cfg):
    q = quantizer(cfg.eta, cfg.weight, cfg.N, k_max=1024)
    grid = disk_grid(cfg.eta, order=max(cfg.radial_order, 520), n_angles=8)
    p0 = q.tail_exponent(0.0)
    K = q.support or q.k_max
    cut = [K >> j for j in range(4, -1, -1)] if p0 is not None else [K]
    prof = radial_profile(q, grid.r, 1, cut)[:, 0, 0, :]
    vals = np.array([grid.integrate_radial(p) for p in prof])
    val = richardson_tail(vals, cut, p0)[0] if p0 is not None else vals[-1]
    return _rel(val, math.pi / (2 * cfg.eta - 1))


@_check("quantizer", "isotropic_closed_form", "inverse-radial-integral", 1e-9)
def _(cfg):
    _need_gamma(cfg)
    eta = cfg.eta
    worst = 0.0
    for k in range(9):
        for n in range(9):
            num = isotropic_integral(eta, k, n, lambda u: 1 / (1 - u), singular_order=1.0)
            ref = math.pi / (2 * eta - 1) / (2 * eta * (eta - 1)) * ((k + eta) * (eta + n) + eta * (eta - 1))
            worst = max(worst, _rel(num, ref))
    return worst


@_check("quantizer", "gamma_closed_form", "gamma-from-moment-sum", 1e-6)
def _(cfg):
    _need_gamma(cfg)
    q = _q(cfg)
    w = q.weight
    try:
        ref = expected_gamma(cfg.eta, w.kind, w.param)
    except DomainError as exc:
        raise Skip(str(exc))
    return abs(gamma_constant(cfg.eta, q) - ref)


@_check("quantizer", "gamma_quadrature_route", "gamma-lowest-element", 1e-5)
def _(cfg):
    _need_gamma(cfg)
    q = quantizer(cfg.eta, cfg.weight, 8, k_max=640)
    return abs(gamma_from_quantization(q, levels=5) - gamma_constant(cfg.eta, q))


def _linear_observables(cfg, N: int = 12):
    q = quantizer(cfg.eta, cfg.weight, N, k_max=640)
    gam = gamma_constant(cfg.eta, q)
    G = generators(cfg.eta, N)
    # k- quantizes to the raising operator and k+ to the lowering one; k1 flips sign
    targets = {"k0": G.K0, "kminus": G.Kplus, "kplus": G.Kminus, "k1": -1 * G.K1, "k2": G.K2}
    worst = 0.0
    for name, K in targets.items():
        A = quantize(q, OBSERVABLE_FUNCTIONS[name], N, singular_order=1.0, levels=5).operator
        worst = max(worst, A.deviation(gam * K, N // 2))
    return worst


@_check("quantizer", "linear_observables", "generators-from-linear-observables", 1e-7)
def _(cfg):
    _need_gamma(cfg)
    return _linear_observables(cfg)


def _smooth_field(z):
    z = np.asarray(z)
    return np.real(z) * (1 - np.abs(z) ** 2) ** 2 + 0.3 * np.imag(z) ** 2


@_check("quantizer", "covariance", "quantization-covariance", 1e-5)
def _(cfg):
    N = min(cfg.N, 16)
    D = 3 * N
    q = quantizer(cfg.eta, cfg.weight, D)
    worst = 0.0
    for g in (h_matrix(0.9), p_matrix(0.2 + 0.1j)):
        A = quantize(q, _smooth_field, D).operator
        U = u_matrix(cfg.eta, g, D)
        lhs = U @ A @ U.dagger()
        gi = inverse(g)
        rhs = quantize(q, lambda z: _smooth_field(mobius_act(gi, z)), D).operator
        worst = max(worst, lhs.deviation(rhs, N))
    return worst


@_check("quantizer", "adjoint_of_conjugate", "adjoint-symmetry", 1e-12)
def _(cfg):
    q = _q(cfg, N=10)
    f = lambda z: (np.asarray(z) + 0.5j * np.abs(z) ** 2) * (1 - np.abs(z) ** 2)
    A = quantize(q, f, 10).operator
    B = quantize(q, lambda z: np.conj(f(z)), 10).operator
    return A.dagger().deviation(B)


@_check("quantizer", "parity_integral", "parity-as-integral", 1e-8)
def _(cfg):
    return parity_integral_check(cfg.eta, min(cfg.N, 20))


# ---------------------------------------------------------------------------
# portrait


def _cfg(cfg, N: int | None = None):
    return PortraitConfig(cfg.eta, cfg.weight, cfg.weight2, N or min(cfg.N, 30), cfg.radial_order, 64)


@_check("portrait", "kernel_normalization", "kernel-normalisation", 1e-6)
def _(cfg):
    pc = _cfg(cfg)
    return abs(portrait(lambda z: np.ones_like(z), pc, 0.0).real - 1.0)


@_check("portrait", "kernel_symmetry", "kernel-exchange", 1e-10)
def _(cfg):
    pc = _cfg(cfg)
    if pc.q1.alternating or pc.q2.alternating:
        raise Skip("exchange needs both diagonals summable")
    D = 4 * pc.N
    worst = 0.0
    for t in (0.2 + 0.1j, -0.35j):
        direct = transition_kernel(pc.q1, pc.q2, t)
        M2 = displaced_m(pc.q2, -t, D).matrix
        other = float(np.real(np.trace(np.diag(pc.q1.diagonal(D)) @ M2)))
        worst = max(worst, abs(direct - other) / max(abs(direct), 1e-300))
    return worst


@_check("portrait", "lower_symbol_k0", "coherent-state-expectation", 1e-10)
def _(cfg):
    q2 = quantizer(cfg.eta, "perelomov", 60)
    G = generators(cfg.eta, 60)
    worst = 0.0
    for z in (0.0, 0.3 + 0.2j, -0.4j):
        ref = cfg.eta * OBSERVABLE_FUNCTIONS["k0"](z)
        worst = max(worst, abs(lower_symbol(G.K0, q2, z) - ref) / ref)
    return worst


@_check("portrait", "kappa_factorization", "portrait-constant", 1e-5)
def _(cfg):
    _need_gamma(cfg)
    pc = _cfg(cfg)
    kappa = kappa_constant(pc)
    ref = expected_kappa(cfg.eta, s_series(pc.q1)[0], s_series(pc.q2)[0])
    return abs(kappa - ref) / abs(ref)


@_check("portrait", "linear_observables", "portrait-proportionality", 1e-5)
def _(cfg):
    _need_gamma(cfg)
    pc = _cfg(cfg)
    kappa = kappa_constant(pc)
    xs = np.linspace(-0.6, 0.6, 5)
    zs = (xs[:, None] + 1j * xs[None, :]).ravel()
    worst = 0.0
    for name in ("k0", "k1", "k2", "kplus", "kminus"):
        f = OBSERVABLE_FUNCTIONS[name]
        vals = portrait(f, pc, zs, singular_order=1.0)
        ref = kappa * f(zs)
        worst = max(worst, float(np.max(np.abs(vals - ref))) / float(np.max(np.abs(ref))))
    return worst


@_check("portrait", "covariance", "portrait-covariance", 1e-5)
def _(cfg):
    pc = _cfg(cfg)
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(4):
        z0 = 0.5 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        g = p_matrix(z0) @ h_matrix(rng.uniform(0, 4 * np.pi))
        gi = inverse(g)
        z = 0.5 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        moved = portrait(lambda w: _smooth_field(mobius_act(gi, w)), pc, z)
        direct = portrait(_smooth_field, pc, complex(mobius_act(gi, z)))
        worst = max(worst, abs(moved - direct))
    return worst


@_check("portrait", "real_field_real_portrait", "portrait-reality", 1e-10)
def _(cfg):
    pc = _cfg(cfg)
    vals = portrait(_smooth_field, pc, np.array([0.1, 0.3j, -0.5 + 0.2j]))
    return float(np.max(np.abs(vals.imag)))


# ---------------------------------------------------------------------------
# runner

SUITES = ("appendix", "repn", "quantizer", "portrait")


def run_suite(suite: str, cfg: CheckConfig) -> list[CheckResult]:
    """Run one suite (or ``all``); results sorted by check name."""
    if suite not in SUITES + ("all",):
        raise DomainError(f"unknown suite {suite!r}; expected one of {SUITES + ('all',)}")
    out = []
    for chk in _REGISTRY:
        if suite != "all" and chk.suite != suite:
            continue
        try:
            measured = float(chk.fn(cfg))
            ok = bool(np.isfinite(measured)) and measured <= chk.tolerance
            out.append(CheckResult(chk.name, chk.ref, measured, chk.tolerance, "pass" if ok else "fail"))
        except Skip as exc:
            out.append(CheckResult(chk.name, chk.ref, float("nan"), chk.tolerance, f"skipped: {exc}"))
        except ConvergenceError as exc:
            out.append(CheckResult(chk.name, chk.ref, float("nan"), chk.tolerance, "error", str(exc)))
        except DomainError as exc:
            out.append(CheckResult(chk.name, chk.ref, float("nan"), chk.tolerance, f"skipped: {exc}"))
    return sorted(out, key=lambda r: r.name)
