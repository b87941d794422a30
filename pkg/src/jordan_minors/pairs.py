"""Concrete simple Jordan pairs and their operator calculus.

Two families are shipped, both realized by matrices with ``Q_x y = x y x``:

* rectangular pairs ``(K^{r x s}, K^{s x r})`` over the reals or complexes,
* the complex symmetric pair ``(Sym_n(C), Sym_n(C))``.

Elements are immutable :class:`PairElement` values. Linear operators on
``V^+`` or ``V^-`` (``D_{x,y}``, ``Q_x Q_y``, Bergman operators, ...) are
materialized as :class:`EndoOp` matrices in an orthonormal coordinate system
of the payload space, so determinants and traces are taken over the field of
the pair.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .errors import ContractViolation, NotQuasiInvertible, QuasiSingularError

SYMMETRY_TOL = 1e-12

# Test-mode fault switches (see ``jordan_minors.suites.injected_fault``).
_FAULTS: set[str] = set()


class Kind(str, enum.Enum):
    RECT_REAL = "rect-real"
    RECT_COMPLEX = "rect-complex"
    SYM_COMPLEX = "sym-complex"


class Side(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def opposite(self) -> "Side":
        return Side.MINUS if self is Side.PLUS else Side.PLUS


@dataclass(frozen=True)
class PairDescriptor:
    """Which concrete pair: kind plus shape. For ``sym-complex`` ``r == s == n``."""

    kind: Kind
    r: int
    s: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.r < 1 or self.s < 1:
            raise ContractViolation(f"shape must be positive, got ({self.r}, {self.s})")
        if self.kind is Kind.SYM_COMPLEX and self.r != self.s:
            raise ContractViolation("symmetric pair needs r == s == n")
        if self.r > self.s:
            raise ContractViolation(f"rectangular pairs are stored with r <= s, got ({self.r}, {self.s})")

    @classmethod
    def rect_real(cls, r, s):
        return cls(Kind.RECT_REAL, r, s)

    @classmethod
    def rect_complex(cls, r, s):
        return cls(Kind.RECT_COMPLEX, r, s)

    @classmethod
    def sym_complex(cls, n):
        return cls(Kind.SYM_COMPLEX, n, n)

    @property
    def n(self):
        return self.r

    @property
    def rank(self):
        return self.r

    @property
    def p(self):
        return structure_constant(self)

    @property
    def is_complex(self):
        return self.kind is not Kind.RECT_REAL

    @property
    def is_symmetric(self):
        return self.kind is Kind.SYM_COMPLEX

    @property
    def dtype(self):
        return np.complex128 if self.is_complex else np.float64

    @property
    def dim(self):
        """Dimension of ``V^+`` over the field of the pair."""
        if self.is_symmetric:
            return self.n * (self.n + 1) // 2
        return self.r * self.s

    @property
    def real_dim(self):
        return 2 * self.dim if self.is_complex else self.dim

    def shape(self, side):
        side = Side(side)
        if side is Side.PLUS or self.is_symmetric:
            return (self.r, self.s)
        return (self.s, self.r)

    # -- coordinates -------------------------------------------------------
    # Orthonormal for the Frobenius inner product Re tr(u v*): rectangular
    # pairs use entries; the symmetric pair uses z_ii and sqrt(2) z_ij (i<j).

    @cached_property
    def _triu(self):
        return np.triu_indices(self.n)

    @cached_property
    def _coord_weights(self):
        i, j = self._triu
        return np.where(i == j, 1.0, np.sqrt(2.0))

    def coords(self, payload):
        payload = np.asarray(payload)
        if self.is_symmetric:
            i, j = self._triu
            return payload[..., i, j] * self._coord_weights
        return payload.reshape(payload.shape[:-2] + (-1,))

    def from_coords(self, vec, side=Side.PLUS):
        vec = np.asarray(vec)
        if self.is_symmetric:
            i, j = self._triu
            vals = vec / self._coord_weights
            out = np.zeros(vec.shape[:-1] + (self.n, self.n), dtype=vec.dtype)
            out[..., i, j] = vals
            out[..., j, i] = vals
            return out
        return vec.reshape(vec.shape[:-1] + self.shape(side))

    def basis(self, side=Side.PLUS):
        """Stacked payloads of the orthonormal coordinate basis over the field."""
        return self.from_coords(np.eye(self.dim, dtype=self.dtype), side)

    def to_json(self):
        if self.is_symmetric:
            return {"kind": self.kind.value, "n": self.n}
        return {"kind": self.kind.value, "r": self.r, "s": self.s}

    @classmethod
    def from_json(cls, obj):
        try:
            kind = Kind(obj["kind"])
            if kind is Kind.SYM_COMPLEX:
                return cls.sym_complex(int(obj["n"]))
            return cls(kind, int(obj["r"]), int(obj["s"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise ContractViolation(f"malformed descriptor JSON: {exc}") from exc


class PairElement:
    """A point of ``V^+`` or ``V^-``; immutable dense payload with a side tag."""

    __slots__ = ("descriptor", "side", "payload")

    def __init__(self, descriptor: PairDescriptor, side, payload, check=True):
        side = Side(side)
        payload = np.array(payload, dtype=descriptor.dtype)
        if check:
            if payload.shape != descriptor.shape(side):
                raise ContractViolation(
                    f"payload shape {payload.shape} does not match {descriptor.shape(side)} on side {side.value}"
                )
            if descriptor.is_symmetric:
                asym = np.linalg.norm(payload - payload.T)
                if asym > SYMMETRY_TOL * max(1.0, np.linalg.norm(payload)):
                    raise ContractViolation(f"symmetric pair payload is not symmetric (residual {asym:.2e})")
                payload = 0.5 * (payload + payload.T)
        payload.setflags(write=False)
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "side", side)
        object.__setattr__(self, "payload", payload)

    def __setattr__(self, name, value):
        raise AttributeError("PairElement is immutable")

    @classmethod
    def zeros(cls, descriptor, side=Side.PLUS):
        return cls(descriptor, side, np.zeros(descriptor.shape(side)), check=False)

    def _like(self, payload):
        return PairElement(self.descriptor, self.side, payload, check=False)

    def _check_same(self, other):
        if not isinstance(other, PairElement):
            return NotImplemented
        if other.descriptor != self.descriptor or other.side is not self.side:
            raise ContractViolation("elements live in different spaces")
        return None

    def __add__(self, other):
        if self._check_same(other) is NotImplemented:
            return NotImplemented
        return self._like(self.payload + other.payload)

    def __sub__(self, other):
        if self._check_same(other) is NotImplemented:
            return NotImplemented
        return self._like(self.payload - other.payload)

    def __neg__(self):
        return self._like(-self.payload)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        if np.iscomplexobj(scalar) and not self.descriptor.is_complex:
            raise ContractViolation("complex scalar on a real pair")
        return self._like(self.payload * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def norm(self):
        """Frobenius norm of the payload."""
        return float(np.linalg.norm(self.payload))

    def coords(self):
        return self.descriptor.coords(self.payload)

    def allclose(self, other, atol=1e-10):
        return self.descriptor == other.descriptor and self.side is other.side and (
            np.linalg.norm(self.payload - other.payload) <= atol
        )

    def __repr__(self):
        return f"PairElement({self.descriptor.kind.value}, {self.side.value}, {self.payload.tolist()!r})"

    def to_json(self):
        return {
            "descriptor": self.descriptor.to_json(),
            "side": self.side.value,
            "matrix": linalg.to_json(self.payload),
        }

    @classmethod
    def from_json(cls, obj):
        try:
            desc = PairDescriptor.from_json(obj["descriptor"])
            return cls(desc, obj.get("side", "plus"), linalg.from_json(obj["matrix"]))
        except KeyError as exc:
            raise ContractViolation(f"malformed element JSON: missing {exc}") from exc


def element(descriptor, payload, side=Side.PLUS):
    return PairElement(descriptor, side, payload)


@dataclass(frozen=True, eq=False)
class EndoOp:
    """A field-linear operator on ``V^side`` as a matrix in orthonormal coordinates."""

    descriptor: PairDescriptor
    side: Side
    matrix: np.ndarray

    def __call__(self, z: PairElement) -> PairElement:
        if z.descriptor != self.descriptor or z.side is not self.side:
            raise ContractViolation("operator applied to an element of another space")
        vec = self.matrix @ z.coords()
        return PairElement(self.descriptor, self.side, self.descriptor.from_coords(vec, self.side), check=False)

    def __matmul__(self, other: "EndoOp") -> "EndoOp":
        if other.descriptor != self.descriptor or other.side is not self.side:
            raise ContractViolation("composing operators on different spaces")
        return EndoOp(self.descriptor, self.side, self.matrix @ other.matrix)

    def __add__(self, other):
        return EndoOp(self.descriptor, self.side, self.matrix + other.matrix)

    def __sub__(self, other):
        return EndoOp(self.descriptor, self.side, self.matrix - other.matrix)

    def __rmul__(self, scalar):
        return EndoOp(self.descriptor, self.side, scalar * self.matrix)

    def det(self):
        return linalg.det(self.matrix)[()]

    def trace(self):
        return np.trace(self.matrix)[()]

    def eigenvalues(self):
        return np.linalg.eigvals(self.matrix)

    @classmethod
    def identity(cls, descriptor, side=Side.PLUS):
        return cls(descriptor, Side(side), np.eye(descriptor.dim, dtype=descriptor.dtype))


def materialize(descriptor, side, fn) -> np.ndarray:
    """Matrix of a linear map given as a function on stacked payloads of ``V^side``."""
    images = fn(descriptor.basis(Side(side)))
    return np.ascontiguousarray(descriptor.coords(images).T, dtype=descriptor.dtype)


# -- primitive payload maps ---------------------------------------------------


def _q(x, y):
    return x @ y @ x


def _require_opposite(x, y):
    if x.descriptor != y.descriptor:
        raise ContractViolation("elements belong to different pairs")
    if x.side is y.side:
        raise ContractViolation(f"expected opposite sides, both are {x.side.value}")


def _require_same(x, z):
    if x.descriptor != z.descriptor:
        raise ContractViolation("elements belong to different pairs")
    if x.side is not z.side:
        raise ContractViolation("expected elements on the same side")


# -- operations ---------------------------------------------------------------


def quadratic_map(x: PairElement, y: PairElement) -> PairElement:
    """``Q_x y = x y x``."""
    _require_opposite(x, y)
    return x._like(_q(x.payload, y.payload))


def _triple(x, y, z):
    # polarization Q_{x+z} y - Q_x y - Q_z y, valid on stacked z
    return _q(x + z, y) - _q(x, y) - _q(z, y)


def triple_product(x: PairElement, y: PairElement, z: PairElement) -> PairElement:
    """``{x y z} = Q_{x+z} y - Q_x y - Q_z y``."""
    _require_opposite(x, y)
    _require_same(x, z)
    return x._like(_triple(x.payload, y.payload, z.payload))


def d_operator(x: PairElement, y: PairElement) -> EndoOp:
    """``D_{x,y} : z -> {x y z}`` on ``V^{x.side}``."""
    _require_opposite(x, y)
    mat = materialize(x.descriptor, x.side, lambda z: _triple(x.payload, y.payload, z))
    return EndoOp(x.descriptor, x.side, mat)


def q_operator(x: PairElement) -> np.ndarray:
    """Matrix of ``Q_x : V^{-side} -> V^{side}`` in orthonormal coordinates."""
    return materialize(x.descriptor, x.side.opposite, lambda y: _q(x.payload, y))


def bergman(x: PairElement, y: PairElement) -> EndoOp:
    """``B(x,y) = Id - D_{x,y} + Q_x Q_y`` on ``V^{x.side}``."""
    _require_opposite(x, y)
    xp, yp = x.payload, y.payload
    mat = materialize(x.descriptor, x.side, lambda z: z - _triple(xp, yp, z) + _q(xp, _q(yp, z)))
    return EndoOp(x.descriptor, x.side, mat)


def quasi_inverse(x: PairElement, y: PairElement) -> PairElement:
    """``x^y = B(x,y)^{-1} (x - Q_x y)``; raises :class:`NotQuasiInvertible`."""
    b = bergman(x, y)
    rhs = (x - quadratic_map(x, y)).coords()
    try:
        sol = linalg.solve(b.matrix, rhs)
    except QuasiSingularError as exc:
        raise NotQuasiInvertible(f"(x, y) is not quasi-invertible: {exc}", pivot=exc.pivot) from exc
    return x._like(x.descriptor.from_coords(sol, x.side))


def pair_determinant(x: PairElement, y: PairElement):
    """Generic norm ``Delta(x, y) = det(1 - x y)``, normalized to ``Delta(0, 0) = 1``."""
    _require_opposite(x, y)
    m = x.payload.shape[0]
    value = linalg.det(np.eye(m) - x.payload @ y.payload)[()]
    if "pair-determinant-sign" in _FAULTS:
        value = -value
    return value


def structure_constant(descriptor: PairDescriptor) -> int:
    """Exponent ``p`` in ``Det B(x,y) = Delta(x,y)^p``: ``r + s`` or ``n + 1``."""
    if descriptor.is_symmetric:
        return descriptor.n + 1
    return descriptor.r + descriptor.s


def trace_form(x: PairElement, y: PairElement):
    """``tau(x, y) = Tr D_{x,y}``, evaluated through the closed form ``p tr(x y)``.

    :func:`trace_form_operator` computes the same quantity by materializing
    ``D_{x,y}``; the two agree for every shipped pair.
    """
    _require_opposite(x, y)
    return structure_constant(x.descriptor) * np.trace(x.payload @ y.payload)[()]


def trace_form_operator(x: PairElement, y: PairElement):
    return d_operator(x, y).trace()


def involution(z: PairElement) -> PairElement:
    """Positive involution: conjugate transpose, landing on the opposite side."""
    return PairElement(z.descriptor, z.side.opposite, z.payload.conj().T, check=False)


def inner(u: PairElement, v: PairElement):
    """Hermitian inner product ``tau(u, theta(v))``."""
    return trace_form(u, involution(v))


def real_inner(u: PairElement, v: PairElement) -> float:
    """Real part of :func:`inner`; the metric used on tripotent manifolds."""
    return float(np.real(inner(u, v)))
