"""Calculus of generalized minors over the manifold of rank-k tripotents.

The objective is ``f(e) = |Delta_e(z)|^2`` for a fixed ``z``. Its directional
derivative comes from the derivative of the pair determinant,

    d_(u,v) Delta(x, y) = -(1/p) Delta(x, y) (tau(u, y^x) + tau(x^y, v)),

applied along ``(u, theta(u))`` at ``(x, y) = (e - z, theta(e))``. The
Riemannian gradient is assembled over an orthonormal basis of the tangent
space ``B(e) + V_1(e)``, and projected ascent retracts with the truncated SVD.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ContractViolation, DegenerateSpectrumWarning, NotQuasiInvertible, RankDeficiency
from .pairs import (
    PairElement,
    Side,
    involution,
    pair_determinant,
    quadratic_map,
    quasi_inverse,
    real_inner,
    structure_constant,
    trace_form,
)
from .spectral import (
    Frame,
    nearest_tripotent,
    partial_sum,
    random_frame,
    random_tripotent,
    singular_values,
    standard_frame,
    svd_frame,
)
from .tripotents import Tripotent, generalized_minor, peirce

log = logging.getLogger(__name__)

ARMIJO = 1e-4
MIN_STEP = 1e-14
# relative rounding noise of f tolerated by the sufficient-increase test
F_NOISE = 1e-13
TIE_RTOL = 1e-10


def pair_det_derivative(x: PairElement, y: PairElement, u: PairElement, v: PairElement):
    """Derivative of ``Delta`` at ``(x, y)`` along ``(u, v)``, via quasi-inverses."""
    p = structure_constant(x.descriptor)
    delta = pair_determinant(x, y)
    xy = quasi_inverse(x, y)
    yx = quasi_inverse(y, x)
    return -delta * (trace_form(u, yx) + trace_form(xy, v)) / p


def sharp(e: Tripotent, x: PairElement) -> PairElement:
    """``x^# = Q_e theta(x)``, an involution of ``V_2(e)``."""
    return quadratic_map(e.e, involution(x))


@dataclass(frozen=True, eq=False)
class TangentVector:
    at: Tripotent
    b_part: PairElement
    v1_part: PairElement
    degenerate: bool = False

    @property
    def vector(self) -> PairElement:
        return self.b_part + self.v1_part

    def norm(self) -> float:
        return math.sqrt(max(real_inner(self.vector, self.vector), 0.0))


def tangent_project(e: Tripotent, w: PairElement, decomposition=None) -> TangentVector:
    """Orthogonal projection of ``w`` onto ``T_e S_k = B(e) + V_1(e)``."""
    dec = peirce(e) if decomposition is None else decomposition
    w2 = dec.p2(w)
    b = 0.5 * (w2 - sharp(e, w2))
    return TangentVector(e, b, dec.p1(w))


def tangent_basis(e: Tripotent, decomposition=None) -> np.ndarray:
    """Stacked payloads of a basis of ``T_e S_k`` orthonormal for ``Re tau(u, theta(v))``."""
    d = e.descriptor
    dec = peirce(e) if decomposition is None else decomposition
    n, nr = d.dim, d.real_dim
    real = np.eye(nr)
    cplx = real[:, :n] + 1j * real[:, n:] if d.is_complex else real
    w2 = cplx @ dec.p2.matrix.T
    w1 = cplx @ dec.p1.matrix.T
    m2 = d.from_coords(w2)
    ep = e.payload
    sharp2 = ep @ np.conj(np.swapaxes(m2, -1, -2)) @ ep
    t = 0.5 * (w2 - d.coords(sharp2)) + w1
    treal = np.hstack([t.real, t.imag]) if d.is_complex else t.real
    proj = 0.5 * (treal + treal.T)
    evals, evecs = np.linalg.eigh(proj)
    cols = evecs[:, evals > 0.5]
    vecs = cols[:n].T + 1j * cols[n:].T if d.is_complex else cols.T
    return d.from_coords(vecs) / math.sqrt(structure_constant(d))


def objective(e: Tripotent, z: PairElement) -> float:
    """``f(e) = |Delta_e(z)|^2``."""
    return float(abs(generalized_minor(e, z)) ** 2)


def minor_derivative(e: Tripotent, z: PairElement, u: PairElement) -> float:
    """``d_u f(e)`` through :func:`pair_det_derivative`."""
    x, y = e.e - z, involution(e.e)
    g = pair_determinant(x, y)
    if g == 0:
        return 0.0
    return float(2.0 * np.real(np.conj(g) * pair_det_derivative(x, y, u, involution(u))))


def _gradient(e: Tripotent, z: PairElement, dec):
    """Gradient payload (as a tangent vector), ``f`` and degeneracy flag."""
    d = e.descriptor
    p = structure_constant(d)
    x, y = e.e - z, involution(e.e)
    g = pair_determinant(x, y)
    f = float(abs(g) ** 2)
    zero = PairElement.zeros(d)
    try:
        if f == 0.0:
            raise NotQuasiInvertible("f vanishes")
        xy = quasi_inverse(x, y).payload
        yx = quasi_inverse(y, x).payload
    except NotQuasiInvertible:
        return TangentVector(e, zero, zero, degenerate=True), f
    basis = tangent_basis(e, dec)
    # tau(u, yx) + tau(xy, theta(u)) for every basis vector u
    tau_sum = p * (
        np.einsum("kij,ji->k", basis, yx) + np.einsum("ij,kij->k", xy, np.conj(basis))
    )
    dg = -g * tau_sum / p
    slopes = 2.0 * np.real(np.conj(g) * dg)
    grad = np.tensordot(slopes, basis, axes=1)
    if d.is_symmetric:
        grad = 0.5 * (grad + grad.T)
    return tangent_project(e, PairElement(d, Side.PLUS, grad, check=False), dec), f


def minor_gradient(e: Tripotent, z: PairElement) -> TangentVector:
    """Riemannian gradient of ``f`` on ``S_k``; zero with ``degenerate=True`` where ``f = 0``."""
    if z.descriptor != e.descriptor or z.side is not Side.PLUS:
        raise ContractViolation("z must be an element of the tripotent's V^+")
    grad, _ = _gradient(e, z, peirce(e))
    return grad


@dataclass(frozen=True)
class AscentConfig:
    step0: float = 0.5
    backtrack: float = 0.5
    grad_tol: float = 1e-8
    max_iters: int = 500
    restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.step0 <= 0 or self.grad_tol <= 0:
            raise ContractViolation("step0 and grad_tol must be positive")
        if not 0 < self.backtrack < 1:
            raise ContractViolation("backtrack must lie in (0, 1)")
        if self.max_iters < 1 or self.restarts < 1:
            raise ContractViolation("max_iters and restarts must be at least 1")


@dataclass(frozen=True, eq=False)
class RestartResult:
    index: int
    tripotent: Tripotent
    value: float
    grad_norm: float
    p1_residual: float
    iterations: int
    converged: bool
    trace: tuple  # (iteration, f, grad_norm, p1_residual)


@dataclass(frozen=True, eq=False)
class AscentReport:
    best_tripotent: Tripotent
    best_value: float
    bound: float
    critical_residual: float
    converged: bool
    restarts: tuple = field(default=())
    bound_violations: int = 0

    @property
    def ratio(self):
        return self.best_value / self.bound if self.bound > 0 else (1.0 if self.best_value == 0 else math.inf)

    @property
    def iterates(self):
        return [r.trace for r in self.restarts]

    def to_json(self, include_trace=False):
        out = {
            "best_value": self.best_value,
            "bound": self.bound,
            "ratio": self.ratio,
            "critical_residual": self.critical_residual,
            "converged": self.converged,
            "bound_violations": self.bound_violations,
            "best_tripotent": self.best_tripotent.to_json(),
            "restarts": [
                {
                    "index": r.index,
                    "value": r.value,
                    "grad_norm": r.grad_norm,
                    "p1_residual": r.p1_residual,
                    "iterations": r.iterations,
                    "converged": r.converged,
                }
                for r in self.restarts
            ],
        }
        if include_trace:
            out["iterates"] = [[list(row) for row in r.trace] for r in self.restarts]
        return out

    def trace_rows(self):
        """CSV rows ``restart, iter, f, grad_norm, p1_residual``."""
        for r in self.restarts:
            for it, f, gn, res in r.trace:
                yield (r.index, it, f, gn, res)


def restart_rng(seed: int, index: int):
    """Independent RNG stream per restart, stable under any scheduling."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def _run_restart(z, k, cfg, index, bound_sq):
    rng = restart_rng(cfg.seed, index)
    d = z.descriptor
    znorm = z.norm()
    e = random_tripotent(d, k, rng)
    dec = peirce(e)
    grad, f = _gradient(e, z, dec)
    trace = []
    violations = 0
    prev = None
    converged = False
    it = 0
    for it in range(cfg.max_iters):
        gn = grad.norm()
        res = dec.p1(z).norm()
        trace.append((it, f, gn, res))
        if f > bound_sq * (1 + 1e-12) + 1e-9:
            violations += 1
        if grad.degenerate:
            # f = 0 plateau: draw a fresh starting point
            e = random_tripotent(d, k, rng)
            dec = peirce(e)
            grad, f = _gradient(e, z, dec)
            continue
        if gn <= cfg.grad_tol * max(1.0, f) or (res <= 1e-14 * max(znorm, 1e-300)):
            converged = True
            break
        # ascent on f along grad / f: scale-free steps, Armijo on f
        direction = grad.vector / f
        slope = gn * gn / f
        # Barzilai-Borwein initial step, capped so a step moves at most step0
        t_cap = cfg.step0 * f / gn
        t = t_cap
        if prev is not None:
            s_vec = e.e - prev[0]
            y_vec = grad.vector - prev[1]
            sy = abs(real_inner(s_vec, y_vec))
            if sy > 0:
                t = min(real_inner(s_vec, s_vec) / sy * f, t_cap)
        prev = (e.e, grad.vector)
        accepted = False
        while t >= MIN_STEP:
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    cand = nearest_tripotent(e.e + t * direction, k)
            except RankDeficiency:
                t *= cfg.backtrack
                continue
            fc = objective(cand, z)
            if fc >= f + ARMIJO * t * slope:
                accepted = True
            elif fc >= f - F_NOISE * f:
                # f differences are at rounding level: require the gradient to shrink instead
                cand_dec = peirce(cand)
                cand_grad, _ = _gradient(cand, z, cand_dec)
                accepted = cand_grad.norm() < gn
            if accepted:
                break
            t *= cfg.backtrack
        if not accepted:
            break
        e = cand
        dec = peirce(e)
        grad, f = _gradient(e, z, dec)
    else:
        gn = grad.norm()
        res = dec.p1(z).norm()
        trace.append((cfg.max_iters, f, gn, res))
        converged = gn <= cfg.grad_tol * max(1.0, f)
    gn, res = trace[-1][2], trace[-1][3]
    return (
        RestartResult(index, e, math.sqrt(f), gn, res, it, converged, tuple(trace)),
        violations,
    )


def ascend(z: PairElement, k: int, cfg: AscentConfig = AscentConfig()) -> AscentReport:
    """Maximize ``|Delta_e(z)|`` over rank-``k`` tripotents by projected gradient ascent."""
    d = z.descriptor
    if not 1 <= k <= d.rank:
        raise ContractViolation(f"k must lie in 1..{d.rank}, got {k}")
    sigma = singular_values(z)
    bound = float(np.prod(sigma[:k]))
    if sigma[k - 1] <= 1e-12 * max(1.0, sigma[0]):
        e = partial_sum(standard_frame(d), k)
        return AscentReport(
            e, float(abs(generalized_minor(e, z))), bound, peirce(e).p1(z).norm(), True
        )
    results = []
    violations = 0
    for i in range(cfg.restarts):
        res, v = _run_restart(z, k, cfg, i, bound * bound)
        results.append(res)
        violations += v
        log.debug("restart %d: value %.12g converged=%s after %d iterations", i, res.value, res.converged, res.iterations)
    best = max(results, key=lambda r: (r.value, -r.index))
    return AscentReport(
        best.tripotent,
        best.value,
        bound,
        best.p1_residual,
        best.converged,
        tuple(results),
        violations,
    )


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    ok: bool


def verify_inequality(z: PairElement, e: Tripotent, sigma=None) -> InequalityCheck:
    """``|Delta_e(z)| <= sigma_1 ... sigma_k`` with ``k = rank(e)``."""
    sigma = singular_values(z) if sigma is None else np.asarray(sigma)
    lhs = float(abs(generalized_minor(e, z)))
    rhs = float(np.prod(sigma[: e.rank]))
    return InequalityCheck(lhs, rhs, lhs <= rhs + 1e-9 * max(1.0, rhs))


def critical_values(z_or_sigma, k: int):
    """Sorted subset products ``prod_{i in S} sigma_i`` over ``|S| = k``."""
    if isinstance(z_or_sigma, PairElement):
        sigma = singular_values(z_or_sigma)
    else:
        sigma = np.asarray(z_or_sigma, dtype=float)
    if not 0 <= k <= len(sigma):
        raise ContractViolation(f"k must lie in 0..{len(sigma)}, got {k}")
    gaps = np.abs(np.diff(sigma))
    if np.any(gaps <= TIE_RTOL * max(1.0, float(np.max(sigma, initial=0.0)))):
        warnings.warn("tied singular values: critical set is degenerate", DegenerateSpectrumWarning, stacklevel=2)
    return sorted({float(np.prod(sigma[list(s)])) for s in combinations(range(len(sigma)), k)})


def nearest_critical_value(value, sigma, k):
    """Relative distance from ``value`` to the closest subset product."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrumWarning)
        crit = critical_values(sigma, k)
    best = min(crit, key=lambda c: abs(c - value))
    return best, abs(best - value) / max(abs(best), 1e-300)


@dataclass(frozen=True)
class Signature:
    m: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        if any(v < 0 for v in m) or any(a < b for a, b in zip(m, m[1:])):
            raise ContractViolation(f"signature must be nonincreasing and nonnegative, got {m}")
        object.__setattr__(self, "m", m)

    @classmethod
    def parse(cls, text: str):
        return cls(tuple(int(v) for v in text.replace(" ", "").split(",") if v))

    def __len__(self):
        return len(self.m)


def growth_poly(frame: Frame, m: Signature, z: PairElement):
    """``prod_k Delta_{eps_k}(z)^(m_k - m_{k+1})`` over the partial sums of ``frame``."""
    if len(m) != len(frame):
        raise ContractViolation(f"signature length {len(m)} differs from rank {len(frame)}")
    ms = list(m.m) + [0]
    value = np.ones((), dtype=z.descriptor.dtype)[()]
    for k in range(1, len(frame) + 1):
        power = ms[k - 1] - ms[k]
        if power:
            value = value * generalized_minor(partial_sum(frame, k), z) ** power
    return value


def growth_bound(sigma, m: Signature) -> float:
    return float(np.prod([s**mi for s, mi in zip(sigma, m.m)]))


@dataclass(frozen=True)
class GrowthReport:
    bound: float
    max_value: float
    max_ratio: float
    aligned_value: float
    aligned_ratio: float
    samples: int
    ok: bool

    def to_json(self):
        return dict(self.__dict__)


def _ratio(value, bound):
    if bound > 0:
        return value / bound
    return 0.0 if value <= 1e-9 else math.inf


def growth_check(z: PairElement, m: Signature, samples: int, seed: int = 0) -> GrowthReport:
    """Check ``|p_m(z)| <= prod sigma_i^{m_i}`` over random frames and z's own frame."""
    dec = svd_frame(z)
    bound = growth_bound(dec.sigma, m)
    rng = np.random.default_rng(seed)
    values = [float(abs(growth_poly(random_frame(z.descriptor, rng), m, z))) for _ in range(samples)]
    aligned = float(abs(growth_poly(dec.frame, m, z)))
    max_value = max(values + [aligned])
    ok = max_value <= bound + 1e-9
    return GrowthReport(
        bound,
        max(values) if values else 0.0,
        max((_ratio(v, bound) for v in values), default=0.0),
        aligned,
        _ratio(aligned, bound),
        samples,
        ok,
    )
