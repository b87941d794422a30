"""Dense real/complex matrix kernels.

Thin, deterministic wrappers around LAPACK (through numpy/scipy) with the
error semantics the Jordan layer relies on, plus a Takagi factorization for
complex symmetric matrices and the JSON matrix encoding.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import ContractViolation, NumericalFailure, QuasiSingularError

#: smallest admissible LU pivot, relative to the matrix norm
PIVOT_TOL = 1e-12


def svd(a):
    """Full singular value decomposition ``a = u @ diag(sigma) @ w``.

    For an ``r x s`` input with ``r <= s`` returns ``u`` (``r x r``),
    ``sigma`` (length ``r``, nonincreasing) and ``w`` (``s x s``). Tall
    inputs are handled by transposition, in which case ``sigma`` has length
    ``s`` and ``diag(sigma)`` is ``r x s`` with the values on top.
    """
    a = np.asarray(a)
    if a.ndim != 2:
        raise ContractViolation(f"svd expects a matrix, got shape {a.shape}")
    try:
        u, sigma, w = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    return u, sigma, w


def singular_values(a):
    a = np.asarray(a)
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc


def det(a):
    """Determinant via pivoted LU; stacked inputs are supported."""
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ContractViolation(f"det expects square matrices, got shape {a.shape}")
    if a.shape[-1] == 0:
        return np.ones(a.shape[:-2], dtype=a.dtype)[()]
    if a.shape[-1] == 1:
        return a[..., 0, 0]
    return np.linalg.det(a)


def solve(a, b):
    """Solve ``a @ x = b``; raises :class:`QuasiSingularError` on a tiny pivot."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ContractViolation(f"solve expects a square matrix, got shape {a.shape}")
    if n == 0:
        return np.zeros_like(b)
    scale = np.linalg.norm(a, ord=np.inf)
    with warnings.catch_warnings():
        # singularity is reported through the pivot check below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    pivot = float(np.min(np.abs(np.diag(lu))))
    if scale == 0.0 or pivot < PIVOT_TOL * scale:
        raise QuasiSingularError(
            f"matrix is singular to tolerance (smallest pivot {pivot:.3e}, norm {scale:.3e})",
            pivot=pivot,
        )
    return scipy.linalg.lu_solve((lu, piv), b)


def symmetric_factor(a, tol=1e-12):
    """Takagi factorization ``a = u @ diag(sigma) @ u.T`` of a complex symmetric matrix.

    Uses the real symmetric embedding ``[[Re a, Im a], [Im a, -Re a]]``, whose
    eigenpairs ``(sigma, [x; y])`` give Takagi vectors ``x + i y``. Directions
    with vanishing sigma are completed to a unitary deterministically.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ContractViolation(f"symmetric_factor expects a square matrix, got {a.shape}")
    norm = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > tol * max(1.0, norm):
        raise ContractViolation("symmetric_factor requires a == a.T")
    if n == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros(0)
    x, y = a.real, a.imag
    embed = np.block([[x, y], [y, -x]])
    embed = 0.5 * (embed + embed.T)
    try:
        evals, evecs = np.linalg.eigh(embed)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Takagi eigensolver did not converge: {exc}") from exc
    order = np.argsort(-evals, kind="stable")
    evals, evecs = evals[order], evecs[:, order]

    cutoff = 1e-13 * max(norm, np.finfo(float).tiny)
    keep = [i for i in range(n) if evals[i] > cutoff]
    cols = evecs[:n, keep] + 1j * evecs[n:, keep]
    sigma = np.zeros(n)
    sigma[: len(keep)] = evals[keep]
    if len(keep) < n:
        cols = _complete_unitary(cols, n)
    return cols, sigma


def _complete_unitary(cols, n):
    if cols.shape[1] == 0:
        return np.eye(n, dtype=complex)
    # orthonormal complement of span(cols), ordered deterministically by SVD
    u, _, _ = np.linalg.svd(cols, full_matrices=True)
    return np.hstack([cols, u[:, cols.shape[1]:]])


def random_unitary(n, rng, complex_field=True):
    """Haar-distributed unitary (orthogonal when ``complex_field`` is false)."""
    g = rng.standard_normal((n, n))
    if complex_field:
        g = g + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    phase = d / np.where(np.abs(d) == 0, 1, np.abs(d))
    return q * phase


def to_json(a):
    """Encode a matrix as ``{"rows", "cols", "re", "im"}``; ``im`` omitted for real input."""
    a = np.atleast_2d(np.asarray(a))
    out = {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "re": a.real.tolist()}
    if np.iscomplexobj(a):
        out["im"] = a.imag.tolist()
    return out


def from_json(obj):
    """Inverse of :func:`to_json`; entries may be numbers or decimal strings."""
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.array(obj["re"], dtype=float).reshape(rows, cols)
        if "im" in obj and obj["im"] is not None:
            im = np.array(obj["im"], dtype=float).reshape(rows, cols)
            return re + 1j * im
        return re
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractViolation(f"malformed matrix JSON: {exc}") from exc
