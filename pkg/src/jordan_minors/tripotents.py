"""Idempotents, tripotents, Peirce decompositions and generalized minors."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import linalg
from .errors import ContractViolation, InvalidIdempotent, QuasiSingularError
from .pairs import (
    EndoOp,
    Kind,
    PairDescriptor,
    PairElement,
    Side,
    d_operator,
    involution,
    pair_determinant,
    quadratic_map,
    triple_product,
)

IDEMPOTENT_TOL = 1e-10
SPECTRUM_TOL = 1e-6
RANK_THRESHOLD = 0.5
ORTHOGONALITY_TOL = 1e-8
IDEAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class IdempotentPair:
    """``(e+, e-)`` with ``e+ = Q_{e+} e-`` and ``e- = Q_{e-} e+``.

    The defining identities are checked at construction; the tolerance scales
    with the size of the entries so that ill-conditioned families still pass.
    """

    plus: PairElement
    minus: PairElement

    def __post_init__(self):
        if self.plus.side is not Side.PLUS or self.minus.side is not Side.MINUS:
            raise ContractViolation("idempotent needs (plus, minus) elements")
        if self.plus.descriptor != self.minus.descriptor:
            raise ContractViolation("idempotent components belong to different pairs")
        for a, b in ((self.plus, self.minus), (self.minus, self.plus)):
            res = (quadratic_map(a, b) - a).norm()
            scale = max(1.0, a.norm() * b.norm() * a.norm())
            if res > IDEMPOTENT_TOL * scale:
                raise InvalidIdempotent(f"idempotent identity violated (residual {res:.3e})")

    @property
    def descriptor(self) -> PairDescriptor:
        return self.plus.descriptor

    def component(self, side) -> PairElement:
        return self.plus if Side(side) is Side.PLUS else self.minus

    def oriented(self, side):
        """``(e_sigma, e_{-sigma})`` for ``sigma = side``."""
        side = Side(side)
        return (self.plus, self.minus) if side is Side.PLUS else (self.minus, self.plus)


class Tripotent:
    """An element ``e`` of ``V`` whose pair ``(e, theta(e))`` is idempotent."""

    __slots__ = ("e", "rank", "_idempotent")

    def __init__(self, e: PairElement):
        if e.side is not Side.PLUS:
            raise ContractViolation("tripotents live on the plus side")
        m = e.payload
        res = np.linalg.norm(m @ m.conj().T @ m - m)
        if res > IDEMPOTENT_TOL * max(1.0, e.norm()):
            raise InvalidIdempotent(f"not a tripotent: |e e* e - e| = {res:.3e}")
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "rank", int(np.sum(linalg.singular_values(m) > RANK_THRESHOLD)))
        object.__setattr__(self, "_idempotent", None)

    def __setattr__(self, name, value):
        raise AttributeError("Tripotent is immutable")

    @property
    def descriptor(self) -> PairDescriptor:
        return self.e.descriptor

    @property
    def idempotent(self) -> IdempotentPair:
        if self._idempotent is None:
            object.__setattr__(self, "_idempotent", IdempotentPair(self.e, involution(self.e)))
        return self._idempotent

    @property
    def payload(self):
        return self.e.payload

    def __repr__(self):
        return f"Tripotent(rank={self.rank}, {self.e.payload.tolist()!r})"

    def to_json(self):
        out = self.e.to_json()
        out["rank"] = self.rank
        return out

    @classmethod
    def from_json(cls, obj):
        t = cls(PairElement.from_json(obj))
        if "rank" in obj and int(obj["rank"]) != t.rank:
            raise ContractViolation(f"declared rank {obj['rank']} differs from numerical rank {t.rank}")
        return t


def as_idempotent(e) -> IdempotentPair:
    if isinstance(e, Tripotent):
        return e.idempotent
    if isinstance(e, IdempotentPair):
        return e
    raise ContractViolation(f"expected a tripotent or idempotent pair, got {type(e).__name__}")


@dataclass(frozen=True, eq=False)
class PeirceDecomposition:
    """Projectors onto the Peirce spaces ``V_2, V_1, V_0`` of one side."""

    base: IdempotentPair
    side: Side
    d: EndoOp
    p2: EndoOp
    p1: EndoOp
    p0: EndoOp

    def projector(self, nu) -> EndoOp:
        return {2: self.p2, 1: self.p1, 0: self.p0}[nu]

    def components(self, z: PairElement):
        """``(z2, z1, z0)``."""
        return self.p2(z), self.p1(z), self.p0(z)


def peirce(e, side=Side.PLUS) -> PeirceDecomposition:
    """Peirce projectors of ``D = D_{e_sigma, e_{-sigma}}`` by Lagrange interpolation on {0, 1, 2}."""
    base = as_idempotent(e)
    side = Side(side)
    a, b = base.oriented(side)
    d = d_operator(a, b)
    eig = d.eigenvalues()
    dist = np.min(np.abs(eig[:, None] - np.array([0.0, 1.0, 2.0])[None, :]), axis=1)
    if dist.size and dist.max() > SPECTRUM_TOL:
        raise InvalidIdempotent(f"spectrum of D deviates from {{0,1,2}} by {dist.max():.3e}")
    dm = d.matrix
    eye = np.eye(dm.shape[0], dtype=dm.dtype)
    mk = lambda m: EndoOp(d.descriptor, side, m)  # noqa: E731
    p2 = mk(0.5 * dm @ (dm - eye))
    p1 = mk(dm @ (2 * eye - dm))
    p0 = mk(0.5 * (dm - eye) @ (dm - 2 * eye))
    return PeirceDecomposition(base, side, d, p2, p1, p0)


@dataclass(frozen=True, eq=False)
class PrincipalIdeal:
    """``[e_sigma] = Q_{e_sigma} V^{-sigma}``, a unital Jordan algebra with unit ``e_sigma``."""

    base: IdempotentPair
    side: Side
    basis: np.ndarray  # orthonormal columns in coordinates
    decomposition: PeirceDecomposition = field(repr=False)

    @property
    def unit(self) -> PairElement:
        return self.base.component(self.side)

    @property
    def dim(self):
        return self.basis.shape[1]

    def residual(self, x: PairElement) -> float:
        return (x - self.decomposition.p2(x)).norm()

    def contains(self, x: PairElement, tol=IDEAL_TOL) -> bool:
        return self.residual(x) <= tol * max(1.0, x.norm())

    def project(self, x: PairElement) -> PairElement:
        return self.decomposition.p2(x)


def principal_ideal(e, side=Side.PLUS) -> PrincipalIdeal:
    base = as_idempotent(e)
    side = Side(side)
    dec = peirce(base, side)
    u, s, _ = np.linalg.svd(dec.p2.matrix)
    k = int(np.sum(s > 0.5))
    return PrincipalIdeal(base, side, u[:, :k], dec)


def jordan_product(ideal: PrincipalIdeal, x: PairElement, y: PairElement) -> PairElement:
    """``x o y = 1/2 {x e_{-sigma} y}`` inside ``[e_sigma]``."""
    for v in (x, y):
        if v.side is not ideal.side:
            raise ContractViolation("jordan_product arguments must live on the ideal's side")
        if not ideal.contains(v):
            raise ContractViolation(f"element outside the principal inner ideal (residual {ideal.residual(v):.3e})")
    _, other = ideal.base.oriented(ideal.side)
    return 0.5 * triple_product(x, other, y)


def generalized_minor(e, z: PairElement, side=Side.PLUS):
    """``Delta_e^+(z) = Delta(e+ - z, e-)`` or ``Delta_e^-(z) = Delta(e+, e- - z)``."""
    base = as_idempotent(e)
    side = Side(side)
    if z.side is not side:
        raise ContractViolation(f"z lives on side {z.side.value}, minor requested on {side.value}")
    if side is Side.PLUS:
        return pair_determinant(base.plus - z, base.minus)
    return pair_determinant(base.plus, base.minus - z)


def minor_by_projection(e: Tripotent, z: PairElement):
    """Cross-check path: project ``z`` onto ``[e]`` and take the determinant there.

    For ``e = U_k W_k`` (orthonormal columns / rows) the map ``x -> U_k^* x W_k^*``
    identifies ``[e]`` with ``k x k`` matrices under the symmetrized product, with
    ``e`` sent to the identity.
    """
    if e.rank == 0:
        return np.ones((), dtype=e.descriptor.dtype)[()]
    z2 = peirce(e).p2(z)
    u, _, w = linalg.svd(e.payload)
    uk, wk = u[:, : e.rank], w[: e.rank, :]
    return linalg.det(uk.conj().T @ z2.payload @ wk.conj().T)[()]


def make_minor_tripotent(d: PairDescriptor, rows, cols) -> Tripotent:
    """0/1 tripotent selecting entries ``(rows[l], cols[l])``; indices are 0-based.

    On the symmetric pair only principal selections (``rows == cols``) are
    symmetric, so others are rejected.
    """
    rows, cols = tuple(int(i) for i in rows), tuple(int(j) for j in cols)
    if len(rows) != len(cols):
        raise ContractViolation("row and column tuples must have equal length")
    if len(rows) > d.rank:
        raise ContractViolation(f"minor size {len(rows)} exceeds rank {d.rank}")
    for idx, bound, name in ((rows, d.r, "row"), (cols, d.s, "column")):
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ContractViolation(f"{name} indices must be strictly increasing: {idx}")
        if idx and (idx[0] < 0 or idx[-1] >= bound):
            raise ContractViolation(f"{name} index out of range 0..{bound - 1}: {idx}")
    if d.is_symmetric and rows != cols:
        raise ContractViolation("the symmetric pair only has principal minor tripotents")
    m = np.zeros((d.r, d.s))
    for i, j in zip(rows, cols):
        m[i, j] = 1.0
    return Tripotent(PairElement(d, Side.PLUS, m))


def classical_minor(z, rows, cols):
    """Determinant of the submatrix ``z[rows, cols]`` (1 for the empty selection)."""
    z = np.asarray(z)
    return linalg.det(z[np.ix_(list(rows), list(cols))])[()]


def all_index_pairs(r, s):
    """Every ``(I, J)`` of equal length ``0..r`` with strictly increasing entries."""
    for k in range(r + 1):
        for rows in combinations(range(r), k):
            for cols in combinations(range(s), k):
                yield rows, cols


def block_idempotent(a, b, c) -> IdempotentPair:
    """Block idempotent ``e+ = [[A, 0], [0, 0]]``, ``e- = [[A^-1, B], [C, C A B]]``.

    ``A`` is ``k x k`` invertible, ``B`` is ``k x (r-k)`` and ``C`` is
    ``(s-k) x k`` so that ``e-`` is ``s x r``. Every member has the principal
    inner ideal of top-left ``k x k`` blocks.
    """
    a = np.atleast_2d(np.asarray(a))
    b = np.asarray(b).reshape(a.shape[0], -1)
    c = np.asarray(c).reshape(-1, a.shape[0])
    k = a.shape[0]
    if a.shape != (k, k):
        raise ContractViolation("A must be square")
    r, s = k + b.shape[1], k + c.shape[0]
    if r > s:
        raise ContractViolation(f"block shapes give r={r} > s={s}")
    try:
        a_inv = linalg.solve(a, np.eye(k))
    except QuasiSingularError as exc:
        raise ContractViolation(f"A must be invertible: {exc}") from exc
    cplx = any(np.iscomplexobj(m) for m in (a, b, c))
    d = PairDescriptor(Kind.RECT_COMPLEX if cplx else Kind.RECT_REAL, r, s)
    ep = np.zeros((r, s), dtype=d.dtype)
    ep[:k, :k] = a
    em = np.zeros((s, r), dtype=d.dtype)
    em[:k, :k] = a_inv
    em[:k, k:] = b
    em[k:, :k] = c
    em[k:, k:] = c @ a @ b
    return IdempotentPair(PairElement(d, Side.PLUS, ep), PairElement(d, Side.MINUS, em))


def rank_of(e: Tripotent) -> int:
    return e.rank


def strongly_orthogonal(e: Tripotent, c: Tripotent) -> bool:
    """``e`` lies in the Peirce 0-space of ``c``."""
    if e.descriptor != c.descriptor:
        raise ContractViolation("tripotents of different pairs")
    res = (e.e - peirce(c).p0(e.e)).norm()
    return res <= ORTHOGONALITY_TOL * max(e.e.norm(), 1e-300)
