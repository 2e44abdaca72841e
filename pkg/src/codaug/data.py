"""Dataset container, CSV I/O, and stratified train/test splitting.

CSV layout: UTF-8 with a header row; one column holds the class label
(name passed by the caller), an optional id column is skipped, and the
reserved names ``weight`` and ``provenance`` are per-sample metadata.  Every
remaining column is a numeric feature.  Rows are closed onto the simplex on
load; written files append ``label,weight,provenance`` after the features and
render floats with 17 significant digits so loading them back is bit-exact.
"""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .augment import PROVENANCE_ORIGINAL, LabeledSample
from .errors import (
    ClassTooSmallError,
    EmptyDatasetError,
    MissingLabelColumnError,
    NonNumericFeatureError,
    RaggedRowError,
)
from .geometry import close
from .preprocess import DEFAULT_LIBRARY_SIZE, infer_library_size
from .rng import TAG_SPLIT, derive_rng

__all__ = ["Dataset", "SplitSpec", "load_csv", "write_csv", "split", "class_prior"]

WEIGHT_COLUMN = "weight"
PROVENANCE_COLUMN = "provenance"

_FLOAT_FORMAT = "{:.17g}"


@dataclass(frozen=True)
class Dataset:
    """Samples plus the feature/class catalogues they are indexed against."""

    samples: tuple[LabeledSample, ...]
    feature_names: tuple[str, ...]
    class_names: tuple[Hashable, ...]
    library_sizes: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if self.library_sizes is not None:
            object.__setattr__(self, "library_sizes", tuple(self.library_sizes))
        if len(self.feature_names) < 2:
            raise ValueError("a dataset needs at least 2 feature columns")
        p = len(self.feature_names)
        catalogue = set(self.class_names)
        if len(catalogue) != len(self.class_names):
            raise ValueError("class_names contains duplicates")
        for sample in self.samples:
            if sample.x.p != p:
                raise ValueError("all samples must share the feature dimension")
            if sample.y not in catalogue:
                raise ValueError(f"label {sample.y!r} missing from class_names")
        if self.library_sizes is not None and len(self.library_sizes) != len(self.samples):
            raise ValueError("library_sizes must align with samples")

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def p(self) -> int:
        return len(self.feature_names)

    def matrix(self) -> np.ndarray:
        """(n, p) array of composition parts."""
        if self.n == 0:
            return np.empty((0, self.p))
        return np.stack([s.x.parts for s in self.samples])

    def label_indices(self) -> np.ndarray:
        """Per-sample index into ``class_names``."""
        lut = {y: i for i, y in enumerate(self.class_names)}
        return np.asarray([lut[s.y] for s in self.samples], dtype=np.int64)

    def weights(self) -> np.ndarray:
        return np.asarray([s.weight for s in self.samples], dtype=np.float64)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        """New dataset with the selected samples; catalogues are retained."""
        idx = list(indices)
        sizes = None
        if self.library_sizes is not None:
            sizes = tuple(self.library_sizes[i] for i in idx)
        return Dataset(
            samples=tuple(self.samples[i] for i in idx),
            feature_names=self.feature_names,
            class_names=self.class_names,
            library_sizes=sizes,
        )

    def replace_samples(self, samples: Sequence[LabeledSample]) -> "Dataset":
        """New dataset with ``samples`` (e.g. after augmentation); library
        sizes are dropped since they no longer align."""
        return Dataset(
            samples=tuple(samples),
            feature_names=self.feature_names,
            class_names=self.class_names,
            library_sizes=None,
        )

    @staticmethod
    def from_arrays(
        matrix,
        labels: Sequence[Hashable],
        feature_names: Sequence[str] | None = None,
        weights: Sequence[float] | None = None,
        provenance: Sequence[str] | None = None,
        default_library_size: int = DEFAULT_LIBRARY_SIZE,
    ) -> "Dataset":
        """Build a dataset from an (n, p) nonnegative matrix and labels.

        Rows are closed onto the simplex; library sizes are inferred per row.
        The class catalogue follows first appearance order.
        """
        mat = np.asarray(matrix, dtype=np.float64)
        if mat.ndim != 2:
            raise ValueError("matrix must be 2-D")
        n = mat.shape[0]
        if len(labels) != n:
            raise ValueError("labels must align with matrix rows")
        if feature_names is None:
            feature_names = tuple(f"f{j}" for j in range(mat.shape[1]))
        w = [1.0] * n if weights is None else [float(v) for v in weights]
        prov = [PROVENANCE_ORIGINAL] * n if provenance is None else list(provenance)
        class_names: list[Hashable] = []
        seen = set()
        for y in labels:
            if y not in seen:
                seen.add(y)
                class_names.append(y)
        samples = []
        sizes = []
        for i in range(n):
            samples.append(
                LabeledSample(x=close(mat[i]), y=labels[i], weight=w[i], provenance=prov[i])
            )
            sizes.append(infer_library_size(mat[i], default=default_library_size))
        return Dataset(
            samples=tuple(samples),
            feature_names=tuple(feature_names),
            class_names=tuple(class_names),
            library_sizes=tuple(sizes),
        )


@dataclass(frozen=True)
class SplitSpec:
    """Replicated train/test split protocol (default: 20 splits of 80/20)."""

    test_fraction: float = 0.2
    replicates: int = 20
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError("test_fraction must lie strictly between 0 and 1")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def _parse_float(cell: str, row: int, column: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise NonNumericFeatureError(
            f"row {row}, column {column!r}: cannot parse {cell!r} as a number",
            row=row,
            column=column,
        ) from None


def load_csv(
    path,
    label_column: str,
    id_column: str | None = None,
    delimiter: str = ",",
    default_library_size: int = DEFAULT_LIBRARY_SIZE,
) -> Dataset:
    """Load a delimited feature table into a :class:`Dataset`.

    Rows are closed onto the simplex and library sizes inferred (count rows
    sum to their read total, proportion rows get the default).  Labels are
    catalogued in first-appearance order.  Weight/provenance columns are
    honored when present, otherwise weights start at 1.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path}: file is empty") from None
        if label_column not in header:
            raise MissingLabelColumnError(
                f"{path}: label column {label_column!r} not in header"
            )
        skip = {label_column}
        if id_column is not None:
            if id_column not in header:
                raise MissingLabelColumnError(
                    f"{path}: id column {id_column!r} not in header"
                )
            skip.add(id_column)
        skip.update({WEIGHT_COLUMN, PROVENANCE_COLUMN})
        feature_names = [name for name in header if name not in skip]
        if len(feature_names) < 2:
            raise ValueError(f"{path}: need at least 2 feature columns")
        col_index = {name: i for i, name in enumerate(header)}

        raw_rows: list[np.ndarray] = []
        labels: list[str] = []
        weights: list[float] = []
        provenances: list[str] = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise RaggedRowError(
                    f"{path}: line {line_no} has {len(row)} cells, expected {len(header)}",
                    row=line_no,
                )
            features = np.asarray(
                [
                    _parse_float(row[col_index[name]], line_no, name)
                    for name in feature_names
                ]
            )
            raw_rows.append(features)
            labels.append(row[col_index[label_column]])
            if WEIGHT_COLUMN in col_index:
                weights.append(
                    _parse_float(row[col_index[WEIGHT_COLUMN]], line_no, WEIGHT_COLUMN)
                )
            else:
                weights.append(1.0)
            if PROVENANCE_COLUMN in col_index:
                provenances.append(row[col_index[PROVENANCE_COLUMN]])
            else:
                provenances.append(PROVENANCE_ORIGINAL)

    if not raw_rows:
        raise EmptyDatasetError(f"{path}: no data rows")
    return Dataset.from_arrays(
        np.stack(raw_rows),
        labels,
        feature_names=feature_names,
        weights=weights,
        provenance=provenances,
        default_library_size=default_library_size,
    )


def write_csv(ds: Dataset, path) -> None:
    """Write ``ds`` with label/weight/provenance columns after the features.

    The file is written to a temporary sibling and atomically renamed, so a
    failure never leaves a partial file behind.
    """
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(ds.feature_names) + ["label", WEIGHT_COLUMN, PROVENANCE_COLUMN])
            for sample in ds.samples:
                writer.writerow(
                    [_FLOAT_FORMAT.format(v) for v in sample.x.parts]
                    + [sample.y, _FLOAT_FORMAT.format(sample.weight), sample.provenance]
                )
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def class_prior(ds: Dataset) -> np.ndarray:
    """Empirical class frequencies (unweighted), aligned with class_names."""
    if ds.n == 0:
        raise EmptyDatasetError("class prior of an empty dataset is undefined")
    counts = np.bincount(ds.label_indices(), minlength=len(ds.class_names))
    return counts / ds.n


def _split_counts(sizes: list[int], fraction: float) -> list[int]:
    """Test-side count per group: round(size * fraction) clamped so both
    sides stay nonempty."""
    return [min(max(round(size * fraction), 1), size - 1) for size in sizes]


def split(ds: Dataset, spec: SplitSpec) -> list[tuple[Dataset, Dataset]]:
    """Replicated disjoint train/test splits of ``ds``.

    Stratified splits draw the test rows class by class so test label
    proportions track the dataset within one sample per class.  Replicate r
    depends only on (seed, r).
    """
    if ds.n == 0:
        raise EmptyDatasetError("cannot split an empty dataset")
    label_idx = ds.label_indices()
    groups: list[np.ndarray]
    if spec.stratified:
        groups = []
        for c in range(len(ds.class_names)):
            members = np.flatnonzero(label_idx == c)
            if members.size == 0:
                continue
            if members.size < 2:
                raise ClassTooSmallError(
                    f"class {ds.class_names[c]!r} has {members.size} sample(s); "
                    "stratified splitting needs at least 2"
                )
            groups.append(members)
    else:
        if ds.n < 2:
            raise ClassTooSmallError("need at least 2 samples to split")
        groups = [np.arange(ds.n)]
    test_counts = _split_counts([g.size for g in groups], spec.test_fraction)

    replicates = []
    for r in range(spec.replicates):
        rng = derive_rng(spec.seed, TAG_SPLIT, r)
        test_idx: list[int] = []
        train_idx: list[int] = []
        for members, n_test in zip(groups, test_counts):
            perm = rng.permutation(members)
            test_idx.extend(perm[:n_test].tolist())
            train_idx.extend(perm[n_test:].tolist())
        replicates.append((ds.subset(sorted(train_idx)), ds.subset(sorted(test_idx))))
    return replicates
