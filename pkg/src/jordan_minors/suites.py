"""Randomized verification suites shared by the CLI and the test-suite.

Every suite draws each sample from its own RNG stream keyed by
``(seed, suite name, sample index)``, so a failing sample can be replayed
alone and reports are reproducible byte for byte.
"""

from __future__ import annotations

import contextlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg, pairs
from .extremal import (
    AscentConfig,
    Signature,
    ascend,
    growth_bound,
    growth_poly,
    nearest_critical_value,
    pair_det_derivative,
    sharp,
    verify_inequality,
)
from .pairs import (
    PairDescriptor,
    PairElement,
    Side,
    bergman,
    d_operator,
    inner,
    involution,
    pair_determinant,
    q_operator,
    quadratic_map,
    quasi_inverse,
    real_inner,
    structure_constant,
    trace_form,
    trace_form_operator,
    triple_product,
)
from .sampling import (
    random_element,
    random_quasi_invertible,
    random_rank,
    random_block_idempotent,
    random_signature,
    random_tripotent_pair,
    random_z,
    random_z_distinct,
    sample_rng,
)
from .spectral import compose, random_frame, random_tripotent, singular_values, svd_frame
from .tripotents import (
    all_index_pairs,
    classical_minor,
    generalized_minor,
    make_minor_tripotent,
    minor_by_projection,
    peirce,
)

FAULTS = ("pair-determinant-sign",)


@contextlib.contextmanager
def injected_fault(name):
    """Test mode: deliberately corrupt one primitive inside the block."""
    if name is None:
        yield
        return
    if name not in FAULTS:
        raise ValueError(f"unknown fault {name!r}; choose from {FAULTS}")
    pairs._FAULTS.add(name)
    try:
        yield
    finally:
        pairs._FAULTS.discard(name)


def _rel(a, b):
    return float(abs(a - b) / max(1.0, abs(a), abs(b)))


def _mat_rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b)))


@dataclass(frozen=True)
class Suite:
    name: str
    group: str
    tolerance: float
    check: Callable
    applies: Callable = lambda d: True
    # negative suites pass when the residual exceeds the tolerance somewhere
    negative: bool = False
    description: str = ""


@dataclass
class SuiteResult:
    name: str
    group: str
    descriptor: dict
    samples: int
    tolerance: float
    max_residual: float
    passed: bool
    negative: bool = False
    failure: dict | None = None

    def to_json(self):
        out = {
            "name": self.name,
            "group": self.group,
            "descriptor": self.descriptor,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "max_residual": self.max_residual,
            "passed": self.passed,
            "negative": self.negative,
        }
        if self.failure is not None:
            out["failure"] = self.failure
        return out


def serialize(value):
    if isinstance(value, PairElement):
        return value.to_json()
    if hasattr(value, "to_json"):
        return value.to_json()
    if isinstance(value, np.ndarray):
        return linalg.to_json(value)
    if isinstance(value, (list, tuple)):
        return [serialize(v) for v in value]
    if isinstance(value, dict):
        return {k: serialize(v) for k, v in value.items()}
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.complexfloating):
        return {"re": float(value.real), "im": float(value.imag)}
    return value


def run_sample(suite: Suite, d: PairDescriptor, seed: int, index: int, params=None):
    """Evaluate one sample; returns ``(residual, inputs)``."""
    return suite.check(d, sample_rng(seed, suite.name, index), params or {})


def run_suite(suite: Suite, d: PairDescriptor, seed: int, samples: int, tolerance=None, params=None) -> SuiteResult:
    tol = suite.tolerance if tolerance is None else float(tolerance)
    worst = -math.inf
    failure = None
    for i in range(samples):
        residual, inputs = run_sample(suite, d, seed, i, params)
        worst = max(worst, residual)
        if not suite.negative and failure is None and not residual <= tol:
            failure = {
                "suite": suite.name,
                "descriptor": d.to_json(),
                "seed": seed,
                "sample": i,
                "residual": residual,
                "inputs": serialize(inputs),
            }
    passed = worst > tol if suite.negative else failure is None
    return SuiteResult(suite.name, suite.group, d.to_json(), samples, tol, worst, passed, suite.negative, failure)


# -- jordan-core identities ----------------------------------------------------


def _polarization(d, rng, params):
    x = random_element(d, rng)
    z = random_element(d, rng)
    y = random_element(d, rng, Side.MINUS)
    lhs = triple_product(x, y, z).payload
    rhs = x.payload @ y.payload @ z.payload + z.payload @ y.payload @ x.payload
    return _mat_rel(lhs, rhs), {"x": x, "y": y, "z": z}


def _fundamental_formula(d, rng, params):
    x = random_element(d, rng)
    y = random_element(d, rng, Side.MINUS)
    lhs = q_operator(quadratic_map(x, y))
    rhs = q_operator(x) @ q_operator(y) @ q_operator(x)
    return _mat_rel(lhs, rhs), {"x": x, "y": y}


def _bergman_closed_form(d, rng, params):
    x = random_element(d, rng)
    y = random_element(d, rng, Side.MINUS)
    z = random_element(d, rng)
    lhs = bergman(x, y)(z).payload
    a = np.eye(d.r) - x.payload @ y.payload
    b = np.eye(d.s) - y.payload @ x.payload
    return _mat_rel(lhs, a @ z.payload @ b), {"x": x, "y": y, "z": z}


def _det_bergman_power(d, rng, params):
    x, y = random_quasi_invertible(d, rng)
    p = structure_constant(d)
    lhs = bergman(x, y).det()
    rhs = pair_determinant(x, y) ** p
    return float(abs(lhs - rhs) / abs(rhs)), {"x": x, "y": y, "p": p}


def _delta_conjugate_symmetry(d, rng, params):
    u = random_element(d, rng)
    v = random_element(d, rng)
    lhs = pair_determinant(u, involution(v))
    rhs = np.conj(pair_determinant(v, involution(u)))
    return _rel(lhs, rhs), {"u": u, "v": v}


def _delta_q_shift(d, rng, params):
    u = random_element(d, rng)
    w = random_element(d, rng)
    v = random_element(d, rng, Side.MINUS)
    lhs = pair_determinant(u, quadratic_map(v, w))
    rhs = pair_determinant(w, quadratic_map(v, u))
    return _rel(lhs, rhs), {"u": u, "v": v, "w": w}


def _addition_formula(d, rng, params):
    x, y = random_quasi_invertible(d, rng)
    v = random_element(d, rng, Side.MINUS, scale=0.5 / np.sqrt(d.s))
    lhs = pair_determinant(x, y + v)
    rhs = pair_determinant(x, y) * pair_determinant(quasi_inverse(x, y), v)
    return _rel(lhs, rhs), {"x": x, "y": y, "v": v}


def _quasi_inverse_closed_form(d, rng, params):
    x, y = random_quasi_invertible(d, rng)
    rhs = np.linalg.solve(np.eye(d.r) - x.payload @ y.payload, x.payload)
    return _mat_rel(quasi_inverse(x, y).payload, rhs), {"x": x, "y": y}


def _quasi_inverse_symmetry(d, rng, params):
    x, y = random_quasi_invertible(d, rng)
    lhs = quasi_inverse(x, y)
    rhs = x + quadratic_map(x, quasi_inverse(y, x))
    return _mat_rel(lhs.payload, rhs.payload), {"x": x, "y": y}


def _quasi_inverse_shifting(d, rng, params):
    x, y = random_quasi_invertible(d, rng)
    while True:
        v = random_element(d, rng, Side.MINUS, scale=0.5 / np.sqrt(d.s))
        if abs(pair_determinant(x, y + v)) >= 0.05:
            break
    lhs = quasi_inverse(quasi_inverse(x, y), v)
    rhs = quasi_inverse(x, y + v)
    return _mat_rel(lhs.payload, rhs.payload), {"x": x, "y": y, "v": v}


def _trace_symmetry(d, rng, params):
    x = random_element(d, rng)
    y = random_element(d, rng, Side.MINUS)
    return _rel(trace_form_operator(x, y), trace_form_operator(y, x)), {"x": x, "y": y}


def _trace_closed_form(d, rng, params):
    x = random_element(d, rng)
    y = random_element(d, rng, Side.MINUS)
    return _rel(trace_form(x, y), trace_form_operator(x, y)), {"x": x, "y": y}


def _inner_positive(d, rng, params):
    basis = d.basis()
    n = d.dim
    elems = [PairElement(d, Side.PLUS, b) for b in basis]
    if d.is_complex:
        elems += [PairElement(d, Side.PLUS, 1j * b) for b in basis]
    gram = np.array([[real_inner(a, b) for b in elems] for a in elems])
    sym = _mat_rel(gram, gram.T)
    herm = abs(inner(elems[0], elems[-1]) - np.conj(inner(elems[-1], elems[0])))
    lam_min = float(np.linalg.eigvalsh(0.5 * (gram + gram.T)).min())
    # residual is the defect from positivity plus asymmetry
    return max(sym, float(herm), 0.0 if lam_min > 0 else 1.0 - lam_min), {"dim": n, "min_eigenvalue": lam_min}


# -- tripotent identities ------------------------------------------------------


def _minor_vs_submatrix(d, rng, params):
    z = random_element(d, rng)
    worst = 0.0
    for rows, cols in all_index_pairs(d.r, d.s):
        if d.is_symmetric and rows != cols:
            continue
        e = make_minor_tripotent(d, rows, cols)
        worst = max(worst, _rel(generalized_minor(e, z), classical_minor(z.payload, rows, cols)))
    return worst, {"z": z}


def _minor_projection_crosscheck(d, rng, params):
    e = random_tripotent(d, random_rank(d, rng), rng)
    z = random_element(d, rng)
    return _rel(generalized_minor(e, z), minor_by_projection(e, z)), {"e": e, "z": z}


def _peirce_algebra(d, rng, params):
    k = random_rank(d, rng)
    if not d.is_symmetric and k < d.rank and rng.random() < 0.5:
        base, _ = random_block_idempotent(d, max(k, 1), rng)
    else:
        base = random_tripotent(d, k, rng)
    side = Side.PLUS if rng.random() < 0.5 else Side.MINUS
    dec = peirce(base, side)
    eye = np.eye(d.dim)
    ps = {2: dec.p2.matrix, 1: dec.p1.matrix, 0: dec.p0.matrix}
    res = [_mat_rel(ps[2] + ps[1] + ps[0], eye)]
    for i, pi in ps.items():
        res.append(_mat_rel(pi @ pi, pi))
        res.append(_mat_rel(dec.d.matrix @ pi, i * pi))
        for j, pj in ps.items():
            if i != j:
                res.append(float(np.linalg.norm(pi @ pj)))
    inputs = {"plus": getattr(base, "plus", getattr(base, "e", None)), "side": side.value}
    if hasattr(base, "minus"):
        inputs["minus"] = base.minus
    return max(res), inputs


def _prop_pairs(d, rng, params):
    """Idempotents e, c with equal plus-side principal inner ideals."""
    family = params.get("block_family")
    if family is None:
        family = not d.is_symmetric and rng.random() < 0.5
    if family:
        k = int(rng.integers(1, d.rank)) if d.rank > 1 else 1
        e, _ = random_block_idempotent(d, k, rng)
        c, _ = random_block_idempotent(d, k, rng)
        return e, c, k
    k = random_rank(d, rng, low=1)
    e, c = random_tripotent_pair(d, k, rng)
    return e.idempotent, c.idempotent, k


def _ideal_element(e, rng):
    d = e.descriptor
    return peirce(e).p2(random_element(d, rng))


def _relation_on_ideal(d, rng, params):
    e, c, _ = _prop_pairs(d, rng, params)
    x = _ideal_element(e, rng)
    lhs = generalized_minor(e, x)
    rhs = generalized_minor(e, c.plus) * generalized_minor(c, x)
    return _rel(lhs, rhs), {"e_plus": e.plus, "e_minus": e.minus, "c_plus": c.plus, "c_minus": c.minus, "x": x}


def _relation_minus_side(d, rng, params):
    e, c, _ = _prop_pairs(d, rng, params)
    y = random_element(d, rng, Side.MINUS)
    lhs = generalized_minor(e, y, Side.MINUS)
    rhs = generalized_minor(e, c.minus, Side.MINUS) * generalized_minor(c, y, Side.MINUS)
    return _rel(lhs, rhs), {"e_plus": e.plus, "e_minus": e.minus, "c_plus": c.plus, "c_minus": c.minus, "y": y}


def _relation_reciprocal(d, rng, params):
    e, c, _ = _prop_pairs(d, rng, params)
    value = generalized_minor(c, e.plus) * generalized_minor(c, e.minus, Side.MINUS)
    return _rel(value, 1.0), {"e_plus": e.plus, "e_minus": e.minus, "c_plus": c.plus, "c_minus": c.minus}


def _idempotent_quasi_inverse(d, rng, params):
    e, c, _ = _prop_pairs(d, rng, params)
    q = quasi_inverse(e.plus, e.minus - c.minus)
    return _mat_rel(q.payload, c.plus.payload), {"e_plus": e.plus, "e_minus": e.minus, "c_plus": c.plus, "c_minus": c.minus}


def _relation_off_ideal(d, rng, params):
    # first family member has B != 0; c is the block identity with B = C = 0
    k = int(rng.integers(1, d.rank)) if d.rank > 1 else 1
    e, _ = random_block_idempotent(d, k, rng)
    c, _ = random_block_idempotent(d, k, rng, b_zero=True, c_zero=True)
    x = random_element(d, rng)
    lhs = generalized_minor(e, x)
    rhs = generalized_minor(e, c.plus) * generalized_minor(c, x)
    return _rel(lhs, rhs), {"e_plus": e.plus, "e_minus": e.minus, "c_plus": c.plus, "c_minus": c.minus, "x": x}


def _block_minus_minor(d, rng, params):
    k = int(rng.integers(1, d.rank)) if d.rank > 1 else 1
    e, (a, _, _) = random_block_idempotent(d, k, rng)
    y = random_element(d, rng, Side.MINUS)
    lhs = generalized_minor(e, y, Side.MINUS)
    rhs = linalg.det(a) * linalg.det(y.payload[:k, :k])
    return _rel(lhs, rhs), {"e_plus": e.plus, "e_minus": e.minus, "y": y}


def _sharp_involution(d, rng, params):
    e = random_tripotent(d, random_rank(d, rng, low=1), rng)
    dec = peirce(e)
    w = random_element(d, rng)
    w2, w1, w0 = dec.components(w)
    s2 = sharp(e, w2)
    a_part = 0.5 * (w2 + s2)
    b_part = 0.5 * (w2 - s2)
    parts = (a_part, b_part, w1, w0)
    res = [_mat_rel(sharp(e, s2).payload, w2.payload), _mat_rel((a_part + b_part + w1 + w0).payload, w.payload)]
    for i in range(4):
        for j in range(i + 1, 4):
            res.append(abs(real_inner(parts[i], parts[j])) / max(1.0, parts[i].norm() * parts[j].norm()))
    return max(res), {"e": e, "w": w}


def _unimodularity(d, rng, params):
    k = random_rank(d, rng, low=1)
    e, c = random_tripotent_pair(d, k, rng)
    return abs(abs(generalized_minor(c, e.e)) - 1.0), {"e": e, "c": c}


def _frame_validity(d, rng, params):
    z = random_z(d, rng)
    dec = svd_frame(z)
    return _mat_rel(compose(dec).payload, z.payload) / max(1.0, 1.0 / max(z.norm(), 1e-300)), {"z": z}


# -- analytic suites -----------------------------------------------------------


def _derivative_fd(d, rng, params):
    h = params.get("step", 1e-5)
    x, y = random_quasi_invertible(d, rng)
    u = random_element(d, rng)
    v = random_element(d, rng, Side.MINUS)
    scalars = (1.0, 1j) if d.is_complex else (1.0,)
    worst = 0.0
    for c in scalars:
        uc, vc = c * u, c * v
        analytic = pair_det_derivative(x, y, uc, vc)
        fd = (pair_determinant(x + h * uc, y + h * vc) - pair_determinant(x - h * uc, y - h * vc)) / (2 * h)
        delta = pair_determinant(x, y)
        worst = max(worst, float(abs(analytic - fd) / (1.0 + abs(delta))))
    return worst, {"x": x, "y": y, "u": u, "v": v}


def _bound_sweep(d, rng, params):
    per_k = params.get("tripotents", 50)
    z = random_z(d, rng)
    sigma = singular_values(z)
    worst = -math.inf
    witness = None
    for k in range(1, d.rank + 1):
        for _ in range(per_k):
            e = random_tripotent(d, k, rng)
            chk = verify_inequality(z, e, sigma)
            excess = (chk.lhs - chk.rhs) / max(1.0, chk.rhs)
            if excess > worst:
                worst, witness = excess, e
    return worst, {"z": z, "e": witness}


def _growth(d, rng, params):
    z = random_z(d, rng)
    frame = random_frame(d, rng)
    m = Signature(random_signature(d.rank, rng, params.get("max_part", 3)))
    value = abs(growth_poly(frame, m, z))
    bound = growth_bound(singular_values(z), m)
    return float((value - bound) / max(1.0, bound)), {"z": z, "frame": frame, "m": list(m.m)}


def _growth_aligned(d, rng, params):
    # diagonal z with its own frame attains the bound
    sigma = np.sort(rng.uniform(0.2, 2.0, size=d.rank))[::-1]
    m = Signature(random_signature(d.rank, rng, params.get("max_part", 3)))
    payload = np.zeros(d.shape(Side.PLUS), dtype=d.dtype)
    payload[np.arange(d.rank), np.arange(d.rank)] = sigma
    z = PairElement(d, Side.PLUS, payload)
    dec = svd_frame(z)
    bound = growth_bound(dec.sigma, m)
    ratio = abs(growth_poly(dec.frame, m, z)) / bound
    return float(abs(ratio - 1.0)), {"z": z, "m": list(m.m)}


def _tightness(d, rng, params):
    cfg = params.get("config", AscentConfig())
    z = random_z_distinct(d, rng)
    sigma = singular_values(z)
    worst = 0.0
    zn = z.norm()
    for k in range(1, d.rank + 1):
        rep = ascend(z, k, AscentConfig(cfg.step0, cfg.backtrack, cfg.grad_tol, cfg.max_iters, cfg.restarts, int(rng.integers(2**32))))
        worst = max(worst, 1.0 - rep.best_value / rep.bound)
        for r in rep.restarts:
            if r.converged:
                worst = max(worst, r.p1_residual / zn, nearest_critical_value(r.value, sigma, k)[1])
            elif params.get("require_convergence", True):
                worst = max(worst, math.inf)
    return worst, {"z": z}


def _rect_only(d):
    return not d.is_symmetric


SUITES = [
    Suite("polarization", "identities", 1e-11, _polarization),
    Suite("fundamental-formula", "identities", 1e-10, _fundamental_formula),
    Suite("bergman-closed-form", "identities", 1e-11, _bergman_closed_form),
    Suite("det-bergman-power", "identities", 1e-8, _det_bergman_power),
    Suite("delta-conjugate-symmetry", "identities", 1e-10, _delta_conjugate_symmetry),
    Suite("delta-q-shift", "identities", 1e-10, _delta_q_shift),
    Suite("addition-formula", "identities", 1e-9, _addition_formula),
    Suite("quasi-inverse-closed-form", "identities", 1e-9, _quasi_inverse_closed_form),
    Suite("quasi-inverse-symmetry", "identities", 1e-9, _quasi_inverse_symmetry),
    Suite("quasi-inverse-shifting", "identities", 1e-9, _quasi_inverse_shifting),
    Suite("trace-symmetry", "identities", 1e-10, _trace_symmetry),
    Suite("trace-closed-form", "identities", 1e-10, _trace_closed_form),
    Suite("inner-product-positive", "identities", 1e-10, _inner_positive),
    Suite("minor-vs-submatrix", "identities", 1e-9, _minor_vs_submatrix),
    Suite("minor-projection-crosscheck", "identities", 1e-9, _minor_projection_crosscheck),
    Suite("peirce-projector-algebra", "identities", 1e-9, _peirce_algebra),
    Suite("relation-on-ideal", "identities", 1e-9, _relation_on_ideal),
    Suite("relation-minus-side", "identities", 1e-9, _relation_minus_side),
    Suite("relation-reciprocal", "identities", 1e-9, _relation_reciprocal),
    Suite("idempotent-quasi-inverse", "identities", 1e-9, _idempotent_quasi_inverse),
    Suite("relation-fails-off-ideal", "identities", 1e-3, _relation_off_ideal, _rect_only, negative=True),
    Suite("block-family-minus-minor", "identities", 1e-9, _block_minus_minor, _rect_only),
    Suite("sharp-involution-orthogonality", "identities", 1e-9, _sharp_involution),
    Suite("unimodularity", "identities", 1e-9, _unimodularity),
    Suite("frame-reconstruction", "identities", 1e-9, _frame_validity),
    Suite("derivative-vs-finite-differences", "derivative", 1e-6, _derivative_fd),
    Suite("singular-value-bound", "bound", 1e-9, _bound_sweep),
    Suite("growth-bound", "growth", 1e-9, _growth),
    Suite("growth-equality-aligned", "growth", 1e-9, _growth_aligned),
    Suite("ascent-tightness", "tightness", 1e-6, _tightness),
]

SUITES_BY_NAME = {s.name: s for s in SUITES}


def suites_in(group):
    return [s for s in SUITES if s.group == group]


@dataclass
class Report:
    command: str
    config: dict
    results: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.results) and self.extra.get("passed", True)

    def to_json(self):
        out = {"command": self.command, "config": self.config, "passed": self.passed}
        if self.results:
            out["suites"] = [r.to_json() for r in self.results]
        out.update({k: serialize(v) for k, v in self.extra.items() if k != "passed"})
        return out

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def run_group(group, d: PairDescriptor, seed, samples, tolerances=None, params=None, only=None):
    tolerances = tolerances or {}
    results = []
    for suite in suites_in(group):
        if only and suite.name not in only:
            continue
        if not suite.applies(d):
            continue
        results.append(run_suite(suite, d, seed, samples, tolerances.get(suite.name), params))
    return results
