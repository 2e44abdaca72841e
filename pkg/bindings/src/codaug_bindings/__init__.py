"""Array-in/array-out bindings over the codaug core.

One flat namespace for pipelines that live on dense numeric buffers: every
function takes numpy arrays (or anything exposing the buffer protocol),
delegates straight to the core package, and returns plain arrays.  No numeric
logic lives here, so results are bit-identical to the core and to the CLI for
the same seed; inputs are only copied when a buffer is non-contiguous.

Core validation errors propagate unchanged; they are ``ValueError``
subclasses whose ``code`` attribute names the failure (``AllZero``,
``EmptyTrainingSet``, ...).
"""

from __future__ import annotations

import numpy as np

import codaug
from codaug.augment import AugmentationConfig, Strategy
from codaug.augment import aitchison_mixup_core as _mixup_core
from codaug.augment import augment_dataset as _augment_dataset
from codaug.augment import compositional_cutmix_core as _cutmix_core
from codaug.augment import multinomial_resample_core as _multinomial_core
from codaug.augment import random_subcomposition_core as _subcomposition_core
from codaug.augment import sample_augmented as _sample_augmented
from codaug.data import Dataset
from codaug.geometry import Composition
from codaug.geometry import close as _close
from codaug.geometry import clr as _clr
from codaug.geometry import clr_inv as _clr_inv
from codaug.metrics import ece as _ece
from codaug.metrics import roc_auc as _roc_auc
from codaug.preprocess import DEFAULT_LIBRARY_SIZE
from codaug.preprocess import zero_replace as _zero_replace
from codaug.rng import derive_rng

__all__ = [
    "__version__",
    "close",
    "clr",
    "clr_inv",
    "zero_replace",
    "aitchison_mixup",
    "random_subcomposition",
    "compositional_cutmix",
    "multinomial_resample",
    "sample_augmented",
    "augment_dataset",
    "bound_augment",
    "roc_auc",
    "ece",
]

# The binding tracks the core version exactly; a mismatch means a stale install.
__version__ = codaug.__version__

_MULTINOMIAL_STREAM_TAG = 9


def _vector(buf) -> np.ndarray:
    return np.ascontiguousarray(buf, dtype=np.float64)


def _composition(buf) -> Composition:
    return _close(_vector(buf))


def close(vector) -> np.ndarray:
    """Project a nonnegative vector onto the simplex."""
    return _close(_vector(vector)).parts.copy()


def clr(vector) -> np.ndarray:
    """Centered log-ratio coordinates of a strictly positive composition."""
    return _clr(_composition(vector)).coords.copy()


def clr_inv(vector) -> np.ndarray:
    """Inverse clr (softmax plus closure) of a real vector."""
    return _clr_inv(_vector(vector)).parts.copy()


def zero_replace(vector, library_size: int = DEFAULT_LIBRARY_SIZE) -> np.ndarray:
    """Add the 1/library_size pseudo-count to every part and re-close."""
    return _zero_replace(_composition(vector), int(library_size)).parts.copy()


def aitchison_mixup(x1, x2, lam: float) -> np.ndarray:
    """Convex combination of two compositions along their Aitchison geodesic."""
    return _mixup_core(_composition(x1), _composition(x2), float(lam)).parts.copy()


def random_subcomposition(x, mask) -> np.ndarray:
    """Zero out the parts where ``mask`` is false and re-close."""
    return _subcomposition_core(_composition(x), np.asarray(mask, dtype=bool)).parts.copy()


def compositional_cutmix(x1, x2, mask) -> np.ndarray:
    """Per-coordinate selection between two compositions, then closure."""
    return _cutmix_core(
        _composition(x1), _composition(x2), np.asarray(mask, dtype=bool)
    ).parts.copy()


def multinomial_resample(x, library_size: int, seed: int = 0) -> np.ndarray:
    """Resample a composition as multinomial counts over ``library_size`` trials."""
    rng = derive_rng(int(seed), _MULTINOMIAL_STREAM_TAG)
    return _multinomial_core(_composition(x), int(library_size), rng).parts.copy()


def _dataset_from_buffers(matrix, labels) -> Dataset:
    mat = np.ascontiguousarray(matrix, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError("matrix must be 2-D")
    return Dataset.from_arrays(mat, list(labels))


def _samples_to_buffers(samples):
    matrix = np.stack([s.x.parts for s in samples])
    labels = np.asarray([s.y for s in samples])
    weights = np.asarray([s.weight for s in samples], dtype=np.float64)
    provenance = np.asarray([s.provenance for s in samples])
    return matrix, labels, weights, provenance


def sample_augmented(
    matrix,
    labels,
    strategy: str,
    count: int,
    weight: float | None = None,
    seed: int = 0,
    library_size: int = DEFAULT_LIBRARY_SIZE,
):
    """Draw ``count`` synthetic samples; returns (matrix, labels, weights,
    provenance) arrays."""
    ds = _dataset_from_buffers(matrix, labels)
    cfg = AugmentationConfig(
        strategy=Strategy(strategy),
        synthetic_weight=weight,
        seed=int(seed),
        default_library_size=int(library_size),
    )
    out = _sample_augmented(ds.samples, cfg, int(count), library_sizes=ds.library_sizes)
    return _samples_to_buffers(out)


def augment_dataset(
    matrix,
    labels,
    strategy: str,
    factor: int = 10,
    weight: float | None = None,
    seed: int = 0,
    library_size: int = DEFAULT_LIBRARY_SIZE,
):
    """Originals followed by factor * n synthetic samples, as flat arrays."""
    ds = _dataset_from_buffers(matrix, labels)
    cfg = AugmentationConfig(
        strategy=Strategy(strategy),
        factor=int(factor),
        synthetic_weight=weight,
        seed=int(seed),
        default_library_size=int(library_size),
    )
    out = _augment_dataset(ds.samples, cfg, library_sizes=ds.library_sizes)
    return _samples_to_buffers(out)


# Primary pipeline entry point; numerically identical to `codaug augment`.
bound_augment = augment_dataset


def roc_auc(scores, labels) -> float:
    """Rank-form AUC with the half-tie convention."""
    return _roc_auc(np.ascontiguousarray(scores, dtype=np.float64), np.asarray(labels))


def ece(probabilities, labels, n_bins: int = 10) -> float:
    """Expected calibration error over equal-width confidence bins."""
    report = _ece(
        np.ascontiguousarray(probabilities, dtype=np.float64),
        np.asarray(labels),
        n_bins=n_bins,
    )
    return report.ece
