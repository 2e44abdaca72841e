"""Augmentation strategies for simplex-valued training data.

Four strategies, each split into a deterministic core (all random draws are
arguments) and a seeded sampling path:

* Aitchison mixup: convex combination of two same-class points under the
  simplex vector-space operations.
* Random subcompositions: zero out a Bernoulli(lambda) subset of parts and
  re-close.
* Compositional cutmix: per-coordinate selection between two same-class
  points via Bernoulli(lambda) indicators, then closure.
* Multinomial resampling: redraw a point as multinomial counts with the
  library size as the trial count, then close.

Synthetic samples are a pure function of (train, config, count): sample k is
generated from its own random stream derived from (seed, strategy, k), so
results do not depend on generation order or thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptySubcompositionError,
    EmptyTrainingSetError,
    LambdaOutOfRangeError,
)
from .geometry import Composition, close, perturb, power
from .preprocess import DEFAULT_LIBRARY_SIZE, ensure_positive
from .rng import TAG_AUGMENT, derive_rng

__all__ = [
    "Strategy",
    "AugmentationConfig",
    "LabeledSample",
    "PROVENANCE_ORIGINAL",
    "synthetic_provenance",
    "aitchison_mixup_core",
    "random_subcomposition_core",
    "compositional_cutmix_core",
    "multinomial_resample_core",
    "sample_augmented",
    "augment_dataset",
]

PROVENANCE_ORIGINAL = "original"

# Attempts of plain mask rejection before switching to the exact conditional
# construction (subcompositions) or giving up (cutmix with disjoint supports).
_MASK_ATTEMPTS = 1000


class Strategy(str, Enum):
    """Augmentation strategy identifiers (values double as CLI names)."""

    AITCHISON_MIXUP = "aitchison-mixup"
    RANDOM_SUBCOMPOSITIONS = "random-subcompositions"
    COMPOSITIONAL_CUTMIX = "compositional-cutmix"
    MULTINOMIAL_RESAMPLING = "multinomial-resampling"


_STRATEGY_CODE = {
    Strategy.AITCHISON_MIXUP: 0,
    Strategy.RANDOM_SUBCOMPOSITIONS: 1,
    Strategy.COMPOSITIONAL_CUTMIX: 2,
    Strategy.MULTINOMIAL_RESAMPLING: 3,
}


def synthetic_provenance(strategy: Strategy) -> str:
    return f"synthetic:{strategy.value}"


@dataclass(frozen=True)
class LabeledSample:
    """A composition with its class label, loss weight, and provenance."""

    x: Composition
    y: Hashable
    weight: float = 1.0
    provenance: str = PROVENANCE_ORIGINAL

    def __post_init__(self):
        if not self.weight > 0:
            raise ValueError("sample weight must be positive")


@dataclass(frozen=True)
class AugmentationConfig:
    """How many synthetic samples to draw and how to weight them.

    ``synthetic_weight`` defaults to 1/factor so that the synthetic samples
    carry the same total weight as the originals.  The mixing parameter is
    always drawn from U(0, 1); it is not configurable.
    """

    strategy: Strategy
    factor: int = 10
    synthetic_weight: float | None = None
    seed: int = 0
    default_library_size: int = DEFAULT_LIBRARY_SIZE

    def __post_init__(self):
        if self.factor < 1:
            raise ValueError("factor must be >= 1")
        if self.synthetic_weight is None:
            object.__setattr__(self, "synthetic_weight", 1.0 / self.factor)
        if not self.synthetic_weight > 0:
            raise ValueError("synthetic_weight must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.default_library_size < 1:
            raise ValueError("default_library_size must be >= 1")


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if math.isnan(lam) or lam < 0.0 or lam > 1.0:
        raise LambdaOutOfRangeError(f"lambda must lie in [0, 1], got {lam!r}")
    return lam


def _check_mask(mask, p: int) -> np.ndarray:
    arr = np.asarray(mask, dtype=bool)
    if arr.shape != (p,):
        raise DimensionMismatchError(f"mask length {arr.shape} does not match p={p}")
    return arr


def aitchison_mixup_core(x1: Composition, x2: Composition, lam: float) -> Composition:
    """Convex combination of two strictly positive compositions along their
    Aitchison geodesic: lambda powers x1, (1 - lambda) powers x2, perturb."""
    lam = _check_lambda(lam)
    if x1.p != x2.p:
        raise DimensionMismatchError(f"dimension mismatch: {x1.p} vs {x2.p}")
    return perturb(power(lam, x1), power(1.0 - lam, x2))


def random_subcomposition_core(x: Composition, mask) -> Composition:
    """Zero out the parts where ``mask`` is False and re-close the survivors.

    The dimension is retained: dropped parts become exact zeros.
    """
    flags = _check_mask(mask, x.p)
    kept = np.where(flags, x.parts, 0.0)
    if not np.any(kept > 0):
        raise EmptySubcompositionError("mask keeps no positive part")
    return close(kept)


def compositional_cutmix_core(x1: Composition, x2: Composition, mask) -> Composition:
    """Select part j from x2 where ``mask`` is True, from x1 where False,
    then close the result."""
    if x1.p != x2.p:
        raise DimensionMismatchError(f"dimension mismatch: {x1.p} vs {x2.p}")
    flags = _check_mask(mask, x1.p)
    selected = np.where(flags, x2.parts, x1.parts)
    if not np.any(selected > 0):
        raise EmptySubcompositionError("selected parts are all zero")
    return close(selected)


def multinomial_resample_core(
    x: Composition, library_size: int, rng: np.random.Generator
) -> Composition:
    """Redraw ``x`` as library_size multinomial trials and close the counts.

    The output is k/L for a count vector k, so its support is contained in
    the support of ``x`` and larger L means less noise.
    """
    if library_size < 1:
        raise ValueError("library size must be >= 1")
    probs = x.parts / x.parts.sum()
    counts = rng.multinomial(int(library_size), probs)
    return close(counts.astype(np.float64))


def _bernoulli_mask(rng: np.random.Generator, lam: float, p: int) -> np.ndarray:
    return rng.random(p) < lam


def _valid_mask_for_support(
    rng: np.random.Generator, lam: float, x: Composition
) -> np.ndarray:
    """Draw a Bernoulli(lam) mask conditioned on keeping at least one
    positive part of ``x``.

    Fast path: plain rejection.  When lambda is so small that rejection
    stalls, fall back to an exact draw of the conditioned vector: the first
    kept positive slot follows a geometric law truncated to the positive
    slots, later slots stay iid Bernoulli(lam).  Both paths realize the same
    conditional distribution.
    """
    positive = np.flatnonzero(x.parts > 0)
    for _ in range(_MASK_ATTEMPTS):
        flags = _bernoulli_mask(rng, lam, x.p)
        if flags[positive].any():
            return flags
    flags = _bernoulli_mask(rng, lam, x.p)
    flags[positive] = False
    m = positive.size
    if lam <= 0.0:
        # Limit law of the conditioned vector: exactly one kept slot.
        w = int(rng.integers(m))
    else:
        u = rng.random()
        scale = -math.expm1(m * math.log1p(-lam))  # 1 - (1 - lam)^m
        w = math.ceil(math.log1p(-u * scale) / math.log1p(-lam)) - 1
        w = min(max(w, 0), m - 1)
        if w + 1 < m:
            flags[positive[w + 1 :]] = _bernoulli_mask(rng, lam, m - w - 1)
    flags[positive[w]] = True
    return flags


def _class_members(train: Sequence[LabeledSample]) -> dict[Hashable, np.ndarray]:
    members: dict[Hashable, list[int]] = {}
    for i, sample in enumerate(train):
        members.setdefault(sample.y, []).append(i)
    return {y: np.asarray(idx) for y, idx in members.items()}


def _resolve_library_sizes(
    train: Sequence[LabeledSample],
    library_sizes: Sequence[int] | None,
    default: int,
) -> np.ndarray:
    if library_sizes is None:
        return np.full(len(train), default, dtype=np.int64)
    sizes = np.asarray(library_sizes, dtype=np.int64)
    if sizes.shape != (len(train),):
        raise DimensionMismatchError("library_sizes must align with the training set")
    if np.any(sizes < 1):
        raise ValueError("library sizes must be >= 1")
    return sizes


def sample_augmented(
    train: Sequence[LabeledSample],
    cfg: AugmentationConfig,
    count: int,
    library_sizes: Sequence[int] | None = None,
) -> list[LabeledSample]:
    """Draw ``count`` synthetic samples from ``train`` under ``cfg``.

    The class for mixup/cutmix is drawn from the empirical class prior and
    both source points come from that class (with replacement).  Labels are
    inherited from the sources, weights are ``cfg.synthetic_weight``.
    ``library_sizes`` optionally aligns per-sample sequencing depths with
    ``train``; otherwise ``cfg.default_library_size`` applies.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if len(train) == 0:
        raise EmptyTrainingSetError("cannot augment an empty training set")
    sizes = _resolve_library_sizes(train, library_sizes, cfg.default_library_size)

    strategy = Strategy(cfg.strategy)
    code = _STRATEGY_CODE[strategy]
    provenance = synthetic_provenance(strategy)
    n = len(train)

    if strategy is Strategy.AITCHISON_MIXUP:
        # Log-based operations need strict positivity; replace zeros (with
        # the per-sample pseudo-count) only where present so positive data
        # stays exact.
        sources = [
            ensure_positive(s.x, int(sizes[i])) for i, s in enumerate(train)
        ]
    else:
        sources = [s.x for s in train]
    members = _class_members(train)

    out: list[LabeledSample] = []
    for k in range(count):
        rng = derive_rng(cfg.seed, TAG_AUGMENT, code, k)
        if strategy is Strategy.AITCHISON_MIXUP:
            y = train[int(rng.integers(n))].y  # uniform index realizes the class prior
            lam = rng.random()
            pool = members[y]
            i1 = int(pool[rng.integers(pool.size)])
            i2 = int(pool[rng.integers(pool.size)])
            x_aug = aitchison_mixup_core(sources[i1], sources[i2], lam)
        elif strategy is Strategy.RANDOM_SUBCOMPOSITIONS:
            lam = rng.random()
            i = int(rng.integers(n))
            mask = _valid_mask_for_support(rng, lam, sources[i])
            x_aug = random_subcomposition_core(sources[i], mask)
            y = train[i].y
        elif strategy is Strategy.COMPOSITIONAL_CUTMIX:
            y = train[int(rng.integers(n))].y
            lam = rng.random()
            pool = members[y]
            i1 = int(pool[rng.integers(pool.size)])
            i2 = int(pool[rng.integers(pool.size)])
            x_aug = _cutmix_with_valid_mask(rng, lam, sources[i1], sources[i2])
        else:
            i = int(rng.integers(n))
            x_aug = multinomial_resample_core(sources[i], int(sizes[i]), rng)
            y = train[i].y
        out.append(
            LabeledSample(x=x_aug, y=y, weight=cfg.synthetic_weight, provenance=provenance)
        )
    return out


def _cutmix_with_valid_mask(
    rng: np.random.Generator, lam: float, x1: Composition, x2: Composition
) -> Composition:
    """Cutmix with mask rejection; an all-zero selection is only possible
    when the two sources have disjoint supports."""
    for _ in range(_MASK_ATTEMPTS):
        mask = _bernoulli_mask(rng, lam, x1.p)
        selected = np.where(mask, x2.parts, x1.parts)
        if np.any(selected > 0):
            return close(selected)
    raise EmptySubcompositionError(
        "could not draw a valid cutmix mask (disjoint supports and extreme lambda)"
    )


def augment_dataset(
    train: Sequence[LabeledSample],
    cfg: AugmentationConfig,
    library_sizes: Sequence[int] | None = None,
) -> list[LabeledSample]:
    """Return the originals followed by factor * n synthetic samples.

    With the defaults (factor 10, weight 1/10) the synthetic samples carry
    the same total weight as the originals, so each side contributes half of
    the training loss.
    """
    if len(train) == 0:
        raise EmptyTrainingSetError("cannot augment an empty training set")
    for sample in train:
        if sample.weight != 1.0:
            raise ValueError("augment_dataset expects original weights of exactly 1")
    synthetic = sample_augmented(
        train, cfg, count=cfg.factor * len(train), library_sizes=library_sizes
    )
    return list(train) + synthetic
