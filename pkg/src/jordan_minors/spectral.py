"""Singular value decomposition over frames of tripotents."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import AmbiguousRetractionWarning, ContractViolation, RankDeficiency
from .pairs import PairDescriptor, PairElement, Side
from .tripotents import Tripotent, strongly_orthogonal

RANK_TOL = 1e-8
TIE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Frame:
    """Maximal ordered system of pairwise strongly orthogonal primitive tripotents."""

    elements: tuple

    def __post_init__(self):
        elems = tuple(self.elements)
        object.__setattr__(self, "elements", elems)
        if not elems:
            raise ContractViolation("a frame has at least one element")
        d = elems[0].descriptor
        if len(elems) != d.rank:
            raise ContractViolation(f"frame has {len(elems)} elements, rank is {d.rank}")
        for i, e in enumerate(elems):
            if e.descriptor != d:
                raise ContractViolation("frame elements belong to different pairs")
            if e.rank != 1:
                raise ContractViolation(f"frame element {i} has rank {e.rank}, expected a primitive tripotent")
        for i in range(len(elems)):
            for j in range(i + 1, len(elems)):
                if not strongly_orthogonal(elems[i], elems[j]):
                    raise ContractViolation(f"frame elements {i} and {j} are not strongly orthogonal")

    @property
    def descriptor(self) -> PairDescriptor:
        return self.elements[0].descriptor

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def to_json(self):
        return [e.to_json() for e in self.elements]


@dataclass(frozen=True, eq=False)
class SingularDecomposition:
    frame: Frame
    sigma: np.ndarray

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.shape != (len(self.frame),):
            raise ContractViolation("one singular value per frame element")
        if np.any(sigma < 0) or np.any(np.diff(sigma) > 0):
            raise ContractViolation("singular values must be nonnegative and nonincreasing")
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)

    def to_json(self):
        return {"sigma": self.sigma.tolist(), "frame": self.frame.to_json()}


def _unitaries(z: PairElement):
    """``(U, sigma, W)`` with ``z = U diag(sigma) W``; ``W = U^T`` on the symmetric pair."""
    d = z.descriptor
    if d.is_symmetric:
        u, sigma = linalg.symmetric_factor(z.payload)
        return u, sigma, u.T
    return linalg.svd(z.payload)


def _frame_from_unitaries(d: PairDescriptor, u, w) -> Frame:
    elems = []
    for i in range(d.rank):
        m = np.outer(u[:, i], w[i, :])
        elems.append(Tripotent(PairElement(d, Side.PLUS, m)))
    return Frame(tuple(elems))


def _sym_payload(m):
    return 0.5 * (m + m.T)


def singular_values(z: PairElement) -> np.ndarray:
    """Nonincreasing singular values of ``z`` (length ``rank``)."""
    return linalg.singular_values(z.payload)[: z.descriptor.rank]


def svd_frame(z: PairElement) -> SingularDecomposition:
    """``z = sigma_1 e_1 + ... + sigma_r e_r`` over a frame."""
    if z.side is not Side.PLUS:
        raise ContractViolation("svd_frame expects an element of V^+")
    d = z.descriptor
    u, sigma, w = _unitaries(z)
    frame = _frame_from_unitaries(d, u, w)
    return SingularDecomposition(frame, np.maximum(sigma[: d.rank], 0.0))


def compose(dec: SingularDecomposition) -> PairElement:
    d = dec.frame.descriptor
    total = np.zeros(d.shape(Side.PLUS), dtype=d.dtype)
    for s, e in zip(dec.sigma, dec.frame):
        total = total + s * e.payload
    return PairElement(d, Side.PLUS, total)


def standard_frame(d: PairDescriptor) -> Frame:
    eye_r = np.eye(d.r)
    eye_s = np.eye(d.s)
    return _frame_from_unitaries(d, eye_r, eye_s)


def random_frame(d: PairDescriptor, rng) -> Frame:
    """Uniformly rotated standard frame: ``U E_ii W`` (``u E_ii u^T`` when symmetric)."""
    u = linalg.random_unitary(d.r, rng, d.is_complex)
    if d.is_symmetric:
        return _frame_from_unitaries(d, u, u.T)
    w = linalg.random_unitary(d.s, rng, d.is_complex)
    return _frame_from_unitaries(d, u, w)


def partial_sum(frame: Frame, k: int) -> Tripotent:
    """``eps_k = e_1 + ... + e_k``."""
    if not 0 <= k <= len(frame):
        raise ContractViolation(f"k must lie in 0..{len(frame)}, got {k}")
    d = frame.descriptor
    total = np.zeros(d.shape(Side.PLUS), dtype=d.dtype)
    for e in frame.elements[:k]:
        total = total + e.payload
    t = Tripotent(PairElement(d, Side.PLUS, total))
    if t.rank != k:
        raise ContractViolation(f"partial sum has rank {t.rank}, expected {k}")
    return t


def truncation_tripotent(d: PairDescriptor, u, w, k) -> Tripotent:
    m = u[:, :k] @ w[:k, :]
    if d.is_symmetric:
        m = _sym_payload(m)
    return Tripotent(PairElement(d, Side.PLUS, m, check=False))


def random_tripotent(d: PairDescriptor, k: int, rng) -> Tripotent:
    """Random rank-``k`` tripotent: a random unitary image of ``eps_k``."""
    if not 0 <= k <= d.rank:
        raise ContractViolation(f"k must lie in 0..{d.rank}, got {k}")
    u = linalg.random_unitary(d.r, rng, d.is_complex)
    w = u.T if d.is_symmetric else linalg.random_unitary(d.s, rng, d.is_complex)
    return truncation_tripotent(d, u, w, k)


def nearest_tripotent(v: PairElement, k: int) -> Tripotent:
    """Closest rank-``k`` tripotent to ``v``: keep the top ``k`` singular directions."""
    d = v.descriptor
    if not 0 <= k <= d.rank:
        raise ContractViolation(f"k must lie in 0..{d.rank}, got {k}")
    u, sigma, w = _unitaries(v)
    if k > 0 and sigma[k - 1] <= RANK_TOL:
        raise RankDeficiency(f"sigma_{k} = {sigma[k - 1]:.3e} is below the rank threshold")
    if 0 < k < d.rank and sigma[k - 1] - sigma[k] <= TIE_TOL:
        warnings.warn(
            f"sigma_{k} and sigma_{k + 1} tie; retraction keeps the SVD order",
            AmbiguousRetractionWarning,
            stacklevel=2,
        )
    return truncation_tripotent(d, u, w, k)
