"""Dense complex matrix helpers and the tolerance policy shared by every decision.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Nothing in the
package mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

CMatrix = np.ndarray


class StarDMPError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(StarDMPError, ValueError):
    pass


class Singular(StarDMPError, ArithmeticError):
    pass


class NumericalFailure(StarDMPError, ArithmeticError):
    """A computed inverse failed its own certificate."""


class MatrixFormatError(StarDMPError, ValueError):
    pass


@dataclass(frozen=True)
class Tolerance:
    """Thresholds used for every floating point decision.

    ``eq_tol`` scales entrywise comparisons. ``rank_rel`` is the singular value
    cutoff relative to the largest singular value, further multiplied by
    ``max(rows, cols)`` of the matrix being ranked.
    """

    eq_tol: float = 1e-9
    rank_rel: float = 1e-10

    def __post_init__(self):
        if not (self.eq_tol >= 0 and self.rank_rel >= 0):
            raise ValueError("tolerances must be nonnegative")


DEFAULT_TOL = Tolerance()


def as_cmatrix(x: Any) -> CMatrix:
    """Convert ``x`` to a finite 2-D complex array, rejecting anything else."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"expected a nonempty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def _square(a: CMatrix) -> CMatrix:
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"square matrix required, got {a.shape}")
    return a


def identity(n: int) -> CMatrix:
    return np.eye(n, dtype=np.complex128)


def zeros(n: int, m: int | None = None) -> CMatrix:
    return np.zeros((n, n if m is None else m), dtype=np.complex128)


def norm(a: CMatrix) -> float:
    """Maximum absolute entry."""
    return float(np.max(np.abs(a))) if a.size else 0.0


def adjoint(a: CMatrix) -> CMatrix:
    return as_cmatrix(a).conj().T


def mat_pow(a: CMatrix, k: int) -> CMatrix:
    a = _square(a)
    if k < 0:
        raise ValueError("power must be nonnegative")
    return np.linalg.matrix_power(a, k)


def rank(a: CMatrix, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> int:
    """Numerical rank.

    Singular values are counted when they exceed ``rank_rel * max(rows, cols)``
    times the largest singular value. ``scale`` raises that reference when the
    matrix is a computed product whose roundoff is set by its factors (a power
    ``a**k`` of a matrix with a nilpotent part, for instance); it never lowers it.
    """
    a = as_cmatrix(a)
    s = np.linalg.svd(a, compute_uv=False)
    ref = max(float(s[0]), 0.0 if scale is None else float(scale))
    if ref == 0.0:
        return 0
    cutoff = tol.rank_rel * max(a.shape) * ref
    return int(np.count_nonzero(s > cutoff))


def inverse(a: CMatrix, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    a = _square(a)
    n = a.shape[0]
    if rank(a, tol) < n:
        raise Singular("matrix is singular at the rank tolerance")
    return np.linalg.inv(a)


def approx_eq(a: CMatrix, b: CMatrix, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    return norm(a - b) <= tol.eq_tol * (1.0 + max(norm(a), norm(b)))


def vanishes(a: CMatrix, scale: float, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True when ``max|a| <= eq_tol * (1 + scale)``.

    ``scale`` should bound the size of the factors that produced ``a`` so
    that cancellation to zero is judged against the roundoff it carries.
    """
    return norm(a) <= tol.eq_tol * (1.0 + scale)


def is_hermitian(a: CMatrix, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = _square(a)
    return approx_eq(a, a.conj().T, tol)


def is_idempotent(a: CMatrix, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = _square(a)
    return approx_eq(a @ a, a, tol)


def is_nilpotent(a: CMatrix, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = _square(a)
    p = np.linalg.matrix_power(a, a.shape[0])
    return approx_eq(p, np.zeros_like(p), tol)


# -- JSON encoding -----------------------------------------------------------


def to_json(a: CMatrix) -> dict:
    a = as_cmatrix(a)
    rows, cols = a.shape
    flat = a.reshape(-1)
    return {
        "rows": rows,
        "cols": cols,
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def from_json(obj: Any) -> CMatrix:
    """Decode ``{"rows", "cols", "data": [[re, im], ...]}`` (row-major)."""
    if not isinstance(obj, dict):
        raise MatrixFormatError("matrix must be a JSON object")
    try:
        rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    except KeyError as exc:
        raise MatrixFormatError(f"missing key {exc}") from None
    for name, v in (("rows", rows), ("cols", cols)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise MatrixFormatError(f"{name} must be a positive integer")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise MatrixFormatError(f"data must hold rows*cols = {rows * cols} entries")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, z in enumerate(data):
        if (
            not isinstance(z, list)
            or len(z) != 2
            or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in z)
        ):
            raise MatrixFormatError(f"entry {i} must be a [re, im] pair of numbers")
        out[i] = complex(z[0], z[1])
    if not np.all(np.isfinite(out)):
        raise MatrixFormatError("entries must be finite")
    return out.reshape(rows, cols)
