"""Aitchison geometry of the simplex.

The simplex of p parts carries a vector-space structure where perturbation
plays the role of addition, powering the role of scalar multiplication, and
the log-ratio inner product induces distances.  The centered-log-ratio (clr)
transform maps this geometry isometrically onto the zero-sum hyperplane of
Euclidean space, which is how the O(p) implementations below compute the
inner product and distance.

All operations are pure functions on immutable values and are safe to call
concurrently.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import (
    AllZeroError,
    DimensionMismatchError,
    DimensionTooSmallError,
    NegativeEntryError,
    NonFiniteError,
    ZeroPartError,
)

__all__ = [
    "Composition",
    "ClrVector",
    "close",
    "perturb",
    "power",
    "inner_product",
    "distance",
    "clr",
    "clr_inv",
    "clr_matrix",
    "closure_matrix",
]

SIMPLEX_SUM_TOL = 1e-9
CLR_SUM_TOL = 1e-9

# A float sum this close to 1 is treated as already normalized.  The window
# exceeds the pairwise-summation rounding of one normalization pass, so
# re-closing an already-closed composition returns it bit for bit (exact
# unit sum is not always reachable by adjusting parts: the residual can
# oscillate by one ulp of 1.0 forever).
_UNIT_SUM_WINDOW = 64 * np.finfo(np.float64).eps


def _close_exact(arr: np.ndarray) -> np.ndarray:
    """Normalize ``arr`` to unit sum within ``_UNIT_SUM_WINDOW``.

    Already-normalized input is returned unchanged, which makes closure
    bitwise idempotent; otherwise divide by the sum and nudge the largest
    part once toward an exact unit sum.
    """
    s = arr.sum()
    if abs(s - 1.0) <= _UNIT_SUM_WINDOW:
        return arr
    out = arr / s
    residual = 1.0 - out.sum()
    if residual != 0.0:
        out[np.argmax(out)] += residual
    return out


class Composition:
    """A point on the simplex: p nonnegative parts whose float sum is 1 to
    within a few ulp (re-closed internally on construction).

    Construct directly only from data already on the simplex (sum within
    ``SIMPLEX_SUM_TOL`` of 1); use :func:`close` for arbitrary nonnegative
    vectors.
    """

    __slots__ = ("_parts",)

    def __init__(self, parts, _normalized: bool = False):
        arr = np.array(parts, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("composition parts must be a 1-D sequence")
        if arr.shape[0] < 2:
            raise DimensionTooSmallError("a composition needs at least 2 parts")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("composition parts must be finite")
        if np.any(arr < 0):
            raise NegativeEntryError("composition parts must be nonnegative")
        if not _normalized:
            if abs(arr.sum() - 1.0) > SIMPLEX_SUM_TOL:
                raise ValueError(
                    f"parts sum to {arr.sum()!r}, not 1 within {SIMPLEX_SUM_TOL}"
                )
            arr = _close_exact(arr)
        arr.flags.writeable = False
        self._parts = arr

    @property
    def parts(self) -> np.ndarray:
        """Read-only float64 view of the parts."""
        return self._parts

    @property
    def p(self) -> int:
        return self._parts.shape[0]

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self._parts > 0.0))

    def __len__(self) -> int:
        return self.p

    def __eq__(self, other) -> bool:
        if not isinstance(other, Composition):
            return NotImplemented
        return np.array_equal(self._parts, other._parts)

    def __hash__(self):
        return hash(self._parts.tobytes())

    def __repr__(self) -> str:
        return f"Composition({self._parts.tolist()!r})"


class ClrVector:
    """Image of a composition under the centered-log-ratio transform.

    Coordinates sum to zero (within ``CLR_SUM_TOL``).
    """

    __slots__ = ("_coords",)

    def __init__(self, coords):
        arr = np.array(coords, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("clr coordinates must be a 1-D sequence")
        if arr.shape[0] < 2:
            raise DimensionTooSmallError("a clr vector needs at least 2 coordinates")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("clr coordinates must be finite")
        if abs(arr.sum()) > CLR_SUM_TOL:
            raise ValueError(f"clr coordinates sum to {arr.sum()!r}, not 0")
        arr.flags.writeable = False
        self._coords = arr

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def p(self) -> int:
        return self._coords.shape[0]

    def __len__(self) -> int:
        return self.p

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClrVector):
            return NotImplemented
        return np.array_equal(self._coords, other._coords)

    def __repr__(self) -> str:
        return f"ClrVector({self._coords.tolist()!r})"


def _as_array(raw) -> np.ndarray:
    if isinstance(raw, Composition):
        return raw.parts
    return np.asarray(raw, dtype=np.float64)


def close(raw: Sequence[float] | np.ndarray) -> Composition:
    """Project a nonnegative vector onto the simplex by dividing by its sum."""
    arr = _as_array(raw)
    if arr.ndim != 1:
        raise ValueError("close expects a 1-D sequence")
    if arr.shape[0] < 2:
        raise DimensionTooSmallError("need at least 2 parts to form a composition")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("close requires finite entries")
    if np.any(arr < 0):
        raise NegativeEntryError("close requires nonnegative entries")
    if not np.any(arr > 0):
        raise AllZeroError("cannot close an all-zero vector")
    return Composition(_close_exact(arr.copy()), _normalized=True)


def _require_positive(x: Composition, name: str) -> np.ndarray:
    if not x.strictly_positive:
        raise ZeroPartError(f"{name} must be strictly positive for log-ratio operations")
    return x.parts


def _require_same_p(v: Composition, x: Composition) -> None:
    if v.p != x.p:
        raise DimensionMismatchError(f"dimension mismatch: {v.p} vs {x.p}")


def perturb(v: Composition, x: Composition) -> Composition:
    """Aitchison addition: elementwise product followed by closure."""
    _require_same_p(v, x)
    a = _require_positive(v, "v")
    b = _require_positive(x, "x")
    return Composition(_close_exact(a * b), _normalized=True)


def power(lam: float, x: Composition) -> Composition:
    """Aitchison scalar multiplication: elementwise power followed by closure."""
    a = _require_positive(x, "x")
    if not np.isfinite(lam):
        raise NonFiniteError("exponent must be finite")
    return Composition(_close_exact(a**float(lam)), _normalized=True)


def clr(x: Composition) -> ClrVector:
    """Centered log-ratio: log parts minus their mean; coordinates sum to 0."""
    a = _require_positive(x, "x")
    logs = np.log(a)
    return ClrVector(logs - logs.mean())


def clr_inv(z) -> Composition:
    """Inverse clr (softmax followed by closure).

    Accepts a :class:`ClrVector` or any finite real vector; adding a constant
    to all coordinates does not change the result.
    """
    arr = z.coords if isinstance(z, ClrVector) else np.asarray(z, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("clr_inv expects a 1-D sequence")
    if arr.shape[0] < 2:
        raise DimensionTooSmallError("need at least 2 coordinates")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("clr_inv requires finite coordinates")
    # Shift by the max before exponentiating so large coordinates cannot
    # overflow; closure cancels the shift.
    shifted = np.exp(arr - arr.max())
    return Composition(_close_exact(shifted), _normalized=True)


def inner_product(v: Composition, x: Composition) -> float:
    """Aitchison inner product, computed as the Euclidean dot product of the
    clr images (equivalent to the O(p^2) double sum over log part ratios)."""
    _require_same_p(v, x)
    return float(clr(v).coords @ clr(x).coords)


def distance(v: Composition, x: Composition) -> float:
    """Aitchison distance: Euclidean norm of the difference of clr images."""
    _require_same_p(v, x)
    return float(np.linalg.norm(clr(v).coords - clr(x).coords))


def closure_matrix(mat: np.ndarray) -> np.ndarray:
    """Row-wise closure of an (n, p) nonnegative matrix (no exact-sum nudge)."""
    mat = np.asarray(mat, dtype=np.float64)
    sums = mat.sum(axis=1, keepdims=True)
    if np.any(sums <= 0):
        raise AllZeroError("every row needs a positive sum")
    return mat / sums


def clr_matrix(mat: np.ndarray) -> np.ndarray:
    """Row-wise clr of an (n, p) strictly positive matrix."""
    mat = np.asarray(mat, dtype=np.float64)
    if np.any(mat <= 0):
        raise ZeroPartError("clr requires strictly positive entries")
    logs = np.log(mat)
    return logs - logs.mean(axis=1, keepdims=True)
