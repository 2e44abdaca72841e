"""Bring raw abundance data onto the strictly positive simplex.

Raw rows are either sequencing counts (integral entries, so the row sum is
the library size) or proportions (library size unknown, a configurable
default is used).  Zero replacement adds the pseudo-count 1/L to every part
and renormalizes, which keeps log-based operations well defined downstream.

The pseudo-count 1/L is assumed smaller than the nonzero parts; this is not
enforced, only documented.
"""

from __future__ import annotations

import numpy as np

from .errors import AllZeroError
from .geometry import Composition, close

__all__ = [
    "DEFAULT_LIBRARY_SIZE",
    "infer_library_size",
    "zero_replace",
    "zero_replace_matrix",
    "ensure_positive",
    "normalize_rows",
]

DEFAULT_LIBRARY_SIZE = 10_000

# Tolerance for recognizing count data after text-format round-tripping.
_INTEGRALITY_TOL = 1e-9


def infer_library_size(raw_row, default: int = DEFAULT_LIBRARY_SIZE) -> int:
    """Library size of a raw row: the sum for count rows, else ``default``."""
    row = np.asarray(raw_row, dtype=np.float64)
    if not np.any(row > 0):
        raise AllZeroError("cannot infer a library size from an all-zero row")
    if np.all(np.abs(row - np.round(row)) <= _INTEGRALITY_TOL):
        return int(round(float(row.sum())))
    return int(default)


def zero_replace(x: Composition, library_size: int) -> Composition:
    """Add the pseudo-count 1/L to every part and re-close.

    Output part j equals (x_j + 1/L) / (1 + p/L): strictly positive, ordering
    of parts preserved, and converging to x as L grows.
    """
    if library_size < 1:
        raise ValueError("library size must be >= 1")
    return close(x.parts + 1.0 / library_size)


def zero_replace_matrix(mat: np.ndarray, library_sizes) -> np.ndarray:
    """Row-wise zero replacement of an (n, p) simplex matrix.

    ``library_sizes`` is a scalar or a length-n vector.
    """
    mat = np.asarray(mat, dtype=np.float64)
    raw = mat + 1.0 / np.reshape(np.asarray(library_sizes, dtype=np.float64), (-1, 1))
    return raw / raw.sum(axis=1, keepdims=True)


def ensure_positive(x: Composition, library_size: int) -> Composition:
    """Return ``x`` unchanged when already strictly positive, else its
    zero-replaced version.  Keeps positive data exact in pipelines that only
    need positivity."""
    if x.strictly_positive:
        return x
    return zero_replace(x, library_size)


def normalize_rows(
    raw_matrix, default_library_size: int = DEFAULT_LIBRARY_SIZE
) -> tuple[list[Composition], list[int]]:
    """Close each row of an (n, p) nonnegative matrix onto the simplex.

    Returns the compositions plus the per-row inferred library sizes.  Raises
    :class:`AllZeroError` naming the offending row index when a row has no
    positive entry.
    """
    mat = np.asarray(raw_matrix, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError("normalize_rows expects an (n, p) matrix")
    compositions: list[Composition] = []
    sizes: list[int] = []
    for i in range(mat.shape[0]):
        row = mat[i]
        if not np.any(row > 0):
            raise AllZeroError(f"row {i} is all zero")
        compositions.append(close(row))
        sizes.append(infer_library_size(row, default=default_library_size))
    return compositions, sizes
