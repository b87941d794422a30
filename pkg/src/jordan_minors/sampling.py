"""Random test data for the concrete pairs."""

from __future__ import annotations

import zlib

import numpy as np

from . import linalg
from .pairs import PairDescriptor, PairElement, Side, pair_determinant
from .spectral import random_tripotent, singular_values, truncation_tripotent
from .tripotents import Tripotent, block_idempotent


def sample_rng(seed: int, name: str, index: int):
    """RNG for sample ``index`` of the named suite; replayable in isolation."""
    key = zlib.crc32(name.encode())
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(key, int(index))))


def random_payload(d: PairDescriptor, side, rng, scale=1.0):
    shape = d.shape(side)
    g = rng.standard_normal(shape)
    if d.is_complex:
        g = (g + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    if d.is_symmetric:
        g = (g + g.T) / np.sqrt(2.0)
    return scale * g


def random_element(d: PairDescriptor, rng, side=Side.PLUS, scale=1.0) -> PairElement:
    return PairElement(d, side, random_payload(d, side, rng, scale))


def random_z(d: PairDescriptor, rng) -> PairElement:
    """Standard normal entries rescaled by ``1/sqrt(s)`` so singular values are O(1)."""
    return random_element(d, rng, scale=1.0 / np.sqrt(d.s))


def random_z_distinct(d: PairDescriptor, rng, gap=1e-3) -> PairElement:
    """Like :func:`random_z`, resampled until consecutive singular values differ by ``gap``."""
    while True:
        z = random_z(d, rng)
        sigma = singular_values(z)
        if np.all(-np.diff(sigma) > gap * max(1.0, sigma[0])) and sigma[-1] > gap:
            return z


def random_quasi_invertible(d: PairDescriptor, rng, min_delta=0.05):
    """``(x, y)`` on opposite sides with ``|Delta(x, y)| >= min_delta``."""
    scale = 1.0 / np.sqrt(d.s)
    while True:
        x = random_element(d, rng, Side.PLUS, scale)
        y = random_element(d, rng, Side.MINUS, scale)
        if abs(pair_determinant(x, y)) >= min_delta:
            return x, y


def random_invertible(k, rng, complex_field):
    """Well-conditioned ``k x k`` matrix: unitary times singular values in [0.5, 2]."""
    u = linalg.random_unitary(k, rng, complex_field)
    w = linalg.random_unitary(k, rng, complex_field)
    return u @ np.diag(rng.uniform(0.5, 2.0, size=k)) @ w


def random_block_idempotent(d: PairDescriptor, k, rng, b_zero=False, c_zero=False):
    """Random block idempotent with top-left ``k x k`` principal inner ideal."""
    cplx = d.is_complex

    def block(rows, cols):
        g = rng.standard_normal((rows, cols))
        if cplx:
            g = g + 1j * rng.standard_normal((rows, cols))
        return 0.5 * g

    a = random_invertible(k, rng, cplx)
    b = np.zeros((k, d.r - k)) if b_zero else block(k, d.r - k)
    c = np.zeros((d.s - k, k)) if c_zero else block(d.s - k, k)
    if cplx:
        a, b, c = (np.asarray(m, dtype=complex) for m in (a, b, c))
    return block_idempotent(a, b, c), (a, b, c)


def random_rank(d: PairDescriptor, rng, low=0):
    return int(rng.integers(low, d.rank + 1))


def random_tripotent_pair(d: PairDescriptor, k, rng):
    """Tripotents ``e`` and ``c`` with the same principal inner ideal.

    ``c = U_k Phi W_k`` for ``e = U_k W_k`` and a random unitary ``Phi``;
    on the symmetric pair ``Phi`` is a symmetric unitary ``O D O^T``.
    """
    u = linalg.random_unitary(d.r, rng, d.is_complex)
    w = u.T if d.is_symmetric else linalg.random_unitary(d.s, rng, d.is_complex)
    e = truncation_tripotent(d, u, w, k)
    if d.is_symmetric:
        o = linalg.random_unitary(k, rng, complex_field=False)
        phi = o @ np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, size=k))) @ o.T
    else:
        phi = linalg.random_unitary(k, rng, d.is_complex)
    m = u[:, :k] @ phi @ w[:k, :]
    if d.is_symmetric:
        m = 0.5 * (m + m.T)
    return e, Tripotent(PairElement(d, Side.PLUS, m))


def random_signature(r, rng, max_part=3):
    parts = sorted(rng.integers(0, max_part + 1, size=r).tolist(), reverse=True)
    return tuple(int(v) for v in parts)


__all__ = [
    "random_element",
    "random_invertible",
    "random_payload",
    "random_quasi_invertible",
    "random_rank",
    "random_block_idempotent",
    "random_signature",
    "random_tripotent",
    "random_tripotent_pair",
    "random_z",
    "random_z_distinct",
    "sample_rng",
]
