"""Contrastive representation learning on compositional data.

An MLP encoder (p -> 256 -> 128 -> 64, ReLU on the hidden layers) feeds a
projection head (64 -> 32 -> 16) whose output is L2-normalized and scored
with the normalized temperature-scaled cross-entropy loss.  Positive pairs
are two random augmentations of the same origin (a training example, or a
random example pair for the mixup/cutmix schemes); everything else in the
batch is a negative.  The batch is the whole training set and one Adam step
is taken per epoch.

Gradients are computed analytically (plain reverse-mode through the affine /
ReLU / normalization chain); the test suite checks every parameter against
central finite differences.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .augment import Strategy, _cutmix_with_valid_mask, _valid_mask_for_support
from .augment import aitchison_mixup_core, random_subcomposition_core
from .data import Dataset
from .errors import (
    CheckpointFormatError,
    DegenerateBatchError,
    EmptyTrainingSetError,
    NonFiniteError,
    SingleClassTrainError,
)
from .geometry import Composition, clr
from .metrics import roc_auc
from .preprocess import DEFAULT_LIBRARY_SIZE, ensure_positive
from .rng import TAG_ENCODER_INIT, TAG_EPOCH, derive_rng

__all__ = [
    "ENCODER_WIDTHS",
    "HEAD_WIDTHS",
    "EncoderState",
    "ContrastiveConfig",
    "EmbeddingBatch",
    "PretrainResult",
    "init_encoder_state",
    "consecutive_partner",
    "sample_views_subcomposition",
    "sample_views_paired",
    "encode_inputs",
    "forward",
    "nt_xent_loss",
    "pretrain",
    "linear_eval",
    "finetune",
    "save_checkpoint",
    "load_checkpoint",
]

ENCODER_WIDTHS = (256, 128, 64)
HEAD_WIDTHS = (32, 16)

NORM_GUARD = 1e-12

VIEW_STRATEGIES = (
    Strategy.RANDOM_SUBCOMPOSITIONS,
    Strategy.AITCHISON_MIXUP,
    Strategy.COMPOSITIONAL_CUTMIX,
)

_CHECKPOINT_MAGIC = b"codaug-checkpoint\n"
_CHECKPOINT_VERSION = 1


@dataclass
class EncoderState:
    """Weights and biases of the encoder MLP and its projection head."""

    encoder_weights: list[np.ndarray]
    encoder_biases: list[np.ndarray]
    head_weights: list[np.ndarray]
    head_biases: list[np.ndarray]

    def __post_init__(self):
        for w, b in zip(
            self.encoder_weights + self.head_weights,
            self.encoder_biases + self.head_biases,
        ):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ValueError("weight/bias shapes are inconsistent")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise NonFiniteError("encoder parameters must be finite")
        chain = self.encoder_weights + self.head_weights
        for prev, nxt in zip(chain, chain[1:]):
            if prev.shape[1] != nxt.shape[0]:
                raise ValueError("layer shapes do not chain")

    @property
    def input_dim(self) -> int:
        return self.encoder_weights[0].shape[0]

    @property
    def representation_dim(self) -> int:
        return self.encoder_weights[-1].shape[1]

    @property
    def layer_sizes(self) -> dict:
        return {
            "encoder": [self.input_dim] + [w.shape[1] for w in self.encoder_weights],
            "head": [w.shape[1] for w in self.head_weights],
        }

    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.encoder_weights, self.encoder_biases):
            out.extend((w, b))
        for w, b in zip(self.head_weights, self.head_biases):
            out.extend((w, b))
        return out

    def copy(self) -> "EncoderState":
        return EncoderState(
            encoder_weights=[w.copy() for w in self.encoder_weights],
            encoder_biases=[b.copy() for b in self.encoder_biases],
            head_weights=[w.copy() for w in self.head_weights],
            head_biases=[b.copy() for b in self.head_biases],
        )

    def equals(self, other: "EncoderState") -> bool:
        mine, theirs = self.parameters(), other.parameters()
        return len(mine) == len(theirs) and all(
            np.array_equal(a, b) for a, b in zip(mine, theirs)
        )


@dataclass(frozen=True)
class ContrastiveConfig:
    """Pretraining hyperparameters.

    The temperature default of 0.5 is a package choice, exposed because it
    materially changes the loss scale.  ``input_mode`` selects what the
    encoder sees: clr coordinates of the zero-replaced composition (default)
    or the raw proportions.
    """

    strategy: Strategy = Strategy.RANDOM_SUBCOMPOSITIONS
    temperature: float = 0.5
    epochs: int = 2000
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0
    input_mode: str = "clr"
    library_size: int = DEFAULT_LIBRARY_SIZE
    encoder_widths: tuple[int, ...] = ENCODER_WIDTHS
    head_widths: tuple[int, ...] = HEAD_WIDTHS

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if Strategy(self.strategy) not in VIEW_STRATEGIES:
            raise ValueError(f"unsupported view strategy {self.strategy!r}")
        if self.input_mode not in ("clr", "raw"):
            raise ValueError("input_mode must be 'clr' or 'raw'")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def to_dict(self) -> dict:
        return {
            "strategy": Strategy(self.strategy).value,
            "temperature": self.temperature,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "adam_epsilon": self.adam_epsilon,
            "seed": self.seed,
            "input_mode": self.input_mode,
            "library_size": self.library_size,
            "encoder_widths": list(self.encoder_widths),
            "head_widths": list(self.head_widths),
        }

    @staticmethod
    def from_dict(d: dict) -> "ContrastiveConfig":
        return ContrastiveConfig(
            strategy=Strategy(d["strategy"]),
            temperature=d["temperature"],
            epochs=d["epochs"],
            learning_rate=d["learning_rate"],
            beta1=d["beta1"],
            beta2=d["beta2"],
            adam_epsilon=d["adam_epsilon"],
            seed=d["seed"],
            input_mode=d["input_mode"],
            library_size=d["library_size"],
            encoder_widths=tuple(d["encoder_widths"]),
            head_widths=tuple(d["head_widths"]),
        )


@dataclass(frozen=True)
class EmbeddingBatch:
    """Unit-norm projections with their positive-partner matching.

    An all-zero projection (a fully dead ReLU row; the normalization guard
    maps it to the zero vector) is admitted as a degenerate row: it carries
    zero similarity with every view and keeps the loss finite.
    """

    projections: np.ndarray
    partner: np.ndarray
    origin: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.projections, dtype=np.float64)
        if z.ndim != 2 or z.shape[0] == 0:
            raise DegenerateBatchError("batch must contain at least one pair of views")
        m = z.shape[0]
        partner = np.asarray(self.partner, dtype=np.int64)
        origin = np.asarray(self.origin, dtype=np.int64)
        if partner.shape != (m,) or origin.shape != (m,):
            raise ValueError("partner/origin must align with the projections")
        ar = np.arange(m)
        if np.any(partner == ar) or not np.array_equal(partner[partner], ar):
            raise ValueError("partner must be a perfect matching")
        norms = np.linalg.norm(z, axis=1)
        if np.any((np.abs(norms - 1.0) > 1e-9) & (norms != 0.0)):
            raise ValueError("projections must be unit-norm")
        object.__setattr__(self, "projections", z)
        object.__setattr__(self, "partner", partner)
        object.__setattr__(self, "origin", origin)

    @property
    def size(self) -> int:
        return self.projections.shape[0]


@dataclass(frozen=True)
class PretrainResult:
    state: EncoderState
    losses: list[float]


def init_encoder_state(
    p: int,
    seed: int,
    encoder_widths: Sequence[int] = ENCODER_WIDTHS,
    head_widths: Sequence[int] = HEAD_WIDTHS,
) -> EncoderState:
    """Scaled-uniform fan-in initialization (bound sqrt(6/fan_in)), zero biases."""
    sizes = [p, *encoder_widths, *head_widths]
    weights, biases = [], []
    for layer, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
        rng = derive_rng(seed, TAG_ENCODER_INIT, layer)
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    k = len(encoder_widths)
    return EncoderState(
        encoder_weights=weights[:k],
        encoder_biases=biases[:k],
        head_weights=weights[k:],
        head_biases=biases[k:],
    )


# --------------------------------------------------------------------------
# forward / backward
# --------------------------------------------------------------------------


def _relu_flags(state: EncoderState) -> list[bool]:
    """ReLU after every layer except the encoder output and the head output."""
    n_enc = len(state.encoder_weights)
    n_head = len(state.head_weights)
    flags = [True] * (n_enc + n_head)
    flags[n_enc - 1] = False
    flags[-1] = False
    return flags


def _chain_forward(x: np.ndarray, weights, biases, relu_flags):
    """Forward through affine(+ReLU) layers; returns per-layer activations
    (activations[0] is the input) and pre-activations."""
    activations = [x]
    pres = []
    h = x
    for w, b, relu in zip(weights, biases, relu_flags):
        z = h @ w + b
        pres.append(z)
        h = np.maximum(z, 0.0) if relu else z
        activations.append(h)
    return activations, pres


def _chain_backward(weights, relu_flags, activations, pres, d_out):
    """Gradients of all layer parameters plus the input, given d(output)."""
    d_ws = [None] * len(weights)
    d_bs = [None] * len(weights)
    grad = d_out
    for i in range(len(weights) - 1, -1, -1):
        if relu_flags[i]:
            grad = grad * (pres[i] > 0.0)
        d_ws[i] = activations[i].T @ grad
        d_bs[i] = grad.sum(axis=0)
        grad = grad @ weights[i].T
    return d_ws, d_bs, grad


def _normalize_rows(p_mat: np.ndarray):
    norms = np.linalg.norm(p_mat, axis=1, keepdims=True)
    guarded = np.where(norms < NORM_GUARD, norms + NORM_GUARD, norms)
    return p_mat / guarded, guarded


def _normalize_backward(z: np.ndarray, guarded: np.ndarray, d_z: np.ndarray):
    return (d_z - z * (z * d_z).sum(axis=1, keepdims=True)) / guarded


def _forward_cached(state: EncoderState, x: np.ndarray):
    weights = state.encoder_weights + state.head_weights
    biases = state.encoder_biases + state.head_biases
    flags = _relu_flags(state)
    activations, pres = _chain_forward(x, weights, biases, flags)
    z, guarded = _normalize_rows(activations[-1])
    rep = activations[len(state.encoder_weights)]
    return rep, z, guarded, activations, pres


def encode_inputs(
    comps: Sequence[Composition],
    input_mode: str = "clr",
    library_size: int = DEFAULT_LIBRARY_SIZE,
) -> np.ndarray:
    """Stack compositions into the encoder's input matrix.

    ``clr`` mode zero-replaces any composition containing zeros, then takes
    clr coordinates; ``raw`` feeds the proportions unchanged.
    """
    if input_mode == "raw":
        return np.stack([c.parts for c in comps])
    return np.stack(
        [clr(ensure_positive(c, library_size)).coords for c in comps]
    )


def forward(
    state: EncoderState,
    comps: Sequence[Composition],
    input_mode: str = "clr",
    library_size: int = DEFAULT_LIBRARY_SIZE,
):
    """Representations (encoder output) and unit-norm projections."""
    x = encode_inputs(comps, input_mode, library_size)
    rep, z, _, _, _ = _forward_cached(state, x)
    if not (np.all(np.isfinite(rep)) and np.all(np.isfinite(z))):
        raise NonFiniteError("forward pass produced non-finite values")
    return rep, z


# --------------------------------------------------------------------------
# loss
# --------------------------------------------------------------------------


def nt_xent_loss(batch: EmbeddingBatch, tau: float):
    """Normalized temperature-scaled cross-entropy over cosine similarities.

    Each view is an anchor; its positive is ``batch.partner``; the softmax
    denominator runs over every other view.  Returns the mean anchor loss and
    its gradient with respect to the projections.
    """
    if not tau > 0:
        raise ValueError("temperature must be positive")
    z = batch.projections
    partner = batch.partner
    m = batch.size
    sims = (z @ z.T) / tau
    np.fill_diagonal(sims, -np.inf)

    row_max = sims.max(axis=1, keepdims=True)
    expd = np.exp(sims - row_max)
    denom = expd.sum(axis=1, keepdims=True)
    log_denom = np.log(denom) + row_max
    pos = sims[np.arange(m), partner]
    loss = float(np.mean(log_denom.ravel() - pos))

    softmax = expd / denom
    grad_sims = softmax
    grad_sims[np.arange(m), partner] -= 1.0
    grad_sims /= m
    d_z = (grad_sims + grad_sims.T) @ z / tau
    return loss, d_z


def consecutive_partner(m: int) -> np.ndarray:
    """Matching where views (0,1), (2,3), ... are the positive pairs."""
    partner = np.arange(m)
    partner[0::2] += 1
    partner[1::2] -= 1
    return partner


# --------------------------------------------------------------------------
# view samplers
# --------------------------------------------------------------------------


def sample_views_subcomposition(
    comps: Sequence[Composition], rng: np.random.Generator
) -> tuple[list[Composition], np.ndarray]:
    """Two random subcompositions per example; views 2i and 2i+1 share
    origin i and form the positive pair."""
    if len(comps) == 0:
        raise EmptyTrainingSetError("no training compositions")
    views: list[Composition] = []
    for x in comps:
        for _ in range(2):
            lam = rng.random()
            mask = _valid_mask_for_support(rng, lam, x)
            views.append(random_subcomposition_core(x, mask))
    return views, np.repeat(np.arange(len(comps)), 2)


def sample_views_paired(
    comps: Sequence[Composition],
    strategy: Strategy,
    rng: np.random.Generator,
) -> tuple[list[Composition], np.ndarray]:
    """Positive pairs from a fresh random partition of the examples.

    The examples are partitioned into disjoint pairs each call (an odd
    leftover is paired with itself); each partition pair yields two
    independent random combinations, mixup or cutmix, and those two views are
    the positives.  Class labels play no role here.
    """
    n = len(comps)
    if n == 0:
        raise EmptyTrainingSetError("no training compositions")
    strategy = Strategy(strategy)
    if strategy not in (Strategy.AITCHISON_MIXUP, Strategy.COMPOSITIONAL_CUTMIX):
        raise ValueError("paired views require the mixup or cutmix strategy")
    perm = rng.permutation(n)
    pairs = [(int(perm[2 * u]), int(perm[2 * u + 1])) for u in range(n // 2)]
    if n % 2:
        pairs.append((int(perm[-1]), int(perm[-1])))
    views: list[Composition] = []
    for a, b in pairs:
        for _ in range(2):
            lam = rng.random()
            if strategy is Strategy.AITCHISON_MIXUP:
                views.append(aitchison_mixup_core(comps[a], comps[b], lam))
            else:
                views.append(_cutmix_with_valid_mask(rng, lam, comps[a], comps[b]))
    return views, np.repeat(np.arange(len(pairs)), 2)


# --------------------------------------------------------------------------
# optimization
# --------------------------------------------------------------------------


class _Adam:
    def __init__(self, params: list[np.ndarray], lr, beta1, beta2, eps):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        correct1 = 1.0 - self.beta1**self.t
        correct2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / correct1) / (np.sqrt(v / correct2) + self.eps)


def _pretrain_views(comps, cfg: ContrastiveConfig, epoch: int):
    rng = derive_rng(cfg.seed, TAG_EPOCH, epoch)
    if Strategy(cfg.strategy) is Strategy.RANDOM_SUBCOMPOSITIONS:
        return sample_views_subcomposition(comps, rng)
    return sample_views_paired(comps, Strategy(cfg.strategy), rng)


def _positive_training_comps(train: Dataset, library_size: int) -> list[Composition]:
    sizes = train.library_sizes or (library_size,) * train.n
    return [
        ensure_positive(s.x, int(sizes[i])) for i, s in enumerate(train.samples)
    ]


def pretrain(train: Dataset, cfg: ContrastiveConfig) -> PretrainResult:
    """Contrastive pretraining on ``train``; one full-batch Adam step per epoch.

    Deterministic given ``cfg.seed``; returns the final state and the
    per-epoch loss trace.
    """
    if train.n == 0:
        raise EmptyTrainingSetError("cannot pretrain on an empty dataset")
    if train.n < 2:
        raise ValueError("pretraining needs at least 2 examples")
    comps = _positive_training_comps(train, cfg.library_size)
    state = init_encoder_state(
        train.p, cfg.seed, cfg.encoder_widths, cfg.head_widths
    )
    params = state.parameters()
    adam = _Adam(params, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_epsilon)
    losses: list[float] = []
    for epoch in range(cfg.epochs):
        views, origin = _pretrain_views(comps, cfg, epoch)
        x = encode_inputs(views, cfg.input_mode, cfg.library_size)
        _, z, guarded, activations, pres = _forward_cached(state, x)
        batch = EmbeddingBatch(z, consecutive_partner(len(views)), origin)
        loss, d_z = nt_xent_loss(batch, cfg.temperature)
        if not np.isfinite(loss):
            raise NonFiniteError(f"non-finite contrastive loss at epoch {epoch}")
        d_p = _normalize_backward(z, guarded, d_z)
        weights = state.encoder_weights + state.head_weights
        d_ws, d_bs, _ = _chain_backward(
            weights, _relu_flags(state), activations, pres, d_p
        )
        grads = []
        for i in range(len(weights)):
            grads.extend((d_ws[i], d_bs[i]))
        adam.step(params, grads)
        losses.append(loss)
    return PretrainResult(state=state, losses=losses)


# --------------------------------------------------------------------------
# supervised evaluation protocols
# --------------------------------------------------------------------------


def _binary_targets(ds: Dataset) -> np.ndarray:
    if len(ds.class_names) != 2:
        raise ValueError("evaluation protocols support binary labels only")
    return ds.label_indices().astype(np.float64)


def _check_train_has_both_classes(y: np.ndarray) -> None:
    if np.unique(y).size < 2:
        raise SingleClassTrainError("training set must contain both classes")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _head_gradient(rep, y, weights, w, b):
    """Weighted-mean cross-entropy gradient of a linear head."""
    probs = _sigmoid(rep @ w + b)
    residual = weights * (probs - y) / weights.sum()
    return rep.T @ residual, float(residual.sum())


def linear_eval(
    state: EncoderState,
    train: Dataset,
    test: Dataset,
    epochs: int = 2000,
    learning_rate: float = 1e-3,
    input_mode: str = "clr",
    library_size: int = DEFAULT_LIBRARY_SIZE,
) -> float:
    """Freeze the encoder, fit a linear head on its representations with
    full-batch Adam cross-entropy, and report the test AUC."""
    y_train = _binary_targets(train)
    y_test = _binary_targets(test)
    _check_train_has_both_classes(y_train)
    rep_train, _ = forward(state, [s.x for s in train.samples], input_mode, library_size)
    rep_test, _ = forward(state, [s.x for s in test.samples], input_mode, library_size)
    sample_weights = train.weights()

    w = np.zeros(rep_train.shape[1])
    b_arr = np.zeros(1)
    adam = _Adam([w, b_arr], learning_rate, 0.9, 0.999, 1e-8)
    for _ in range(epochs):
        d_w, d_b = _head_gradient(rep_train, y_train, sample_weights, w, b_arr[0])
        adam.step([w, b_arr], [d_w, np.asarray([d_b])])
    scores = rep_test @ w + b_arr[0]
    return roc_auc(scores, y_test.astype(np.int64))


def finetune(
    state: EncoderState,
    train: Dataset,
    test: Dataset,
    epochs: int = 2000,
    learning_rate: float = 1e-3,
    input_mode: str = "clr",
    library_size: int = DEFAULT_LIBRARY_SIZE,
) -> float:
    """Train a linear head jointly with the encoder on the supervised
    cross-entropy and report the test AUC.  ``state`` is not modified."""
    y_train = _binary_targets(train)
    y_test = _binary_targets(test)
    _check_train_has_both_classes(y_train)
    work = state.copy()
    x_train = encode_inputs([s.x for s in train.samples], input_mode, library_size)
    x_test = encode_inputs([s.x for s in test.samples], input_mode, library_size)
    sample_weights = train.weights()

    enc_weights = work.encoder_weights
    enc_biases = work.encoder_biases
    n_enc = len(enc_weights)
    enc_flags = [True] * (n_enc - 1) + [False]
    w = np.zeros(work.representation_dim)
    b_arr = np.zeros(1)
    params: list[np.ndarray] = []
    for wt, bs in zip(enc_weights, enc_biases):
        params.extend((wt, bs))
    params.extend((w, b_arr))
    adam = _Adam(params, learning_rate, 0.9, 0.999, 1e-8)
    for _ in range(epochs):
        activations, pres = _chain_forward(x_train, enc_weights, enc_biases, enc_flags)
        rep = activations[-1]
        d_w, d_b = _head_gradient(rep, y_train, sample_weights, w, b_arr[0])
        probs = _sigmoid(rep @ w + b_arr[0])
        residual = sample_weights * (probs - y_train) / sample_weights.sum()
        d_rep = np.outer(residual, w)
        d_ws, d_bs, _ = _chain_backward(enc_weights, enc_flags, activations, pres, d_rep)
        grads: list[np.ndarray] = []
        for i in range(n_enc):
            grads.extend((d_ws[i], d_bs[i]))
        grads.extend((d_w, np.asarray([d_b])))
        adam.step(params, grads)
    activations, _ = _chain_forward(x_test, enc_weights, enc_biases, enc_flags)
    scores = activations[-1] @ w + b_arr[0]
    return roc_auc(scores, y_test.astype(np.int64))


# --------------------------------------------------------------------------
# checkpoints
# --------------------------------------------------------------------------


def _array_entries(state: EncoderState):
    for i, (w, b) in enumerate(zip(state.encoder_weights, state.encoder_biases)):
        yield f"encoder_w_{i}", w
        yield f"encoder_b_{i}", b
    for i, (w, b) in enumerate(zip(state.head_weights, state.head_biases)):
        yield f"head_w_{i}", w
        yield f"head_b_{i}", b


def save_checkpoint(path, state: EncoderState, cfg: ContrastiveConfig) -> None:
    """Write a deterministic, bit-exact container: JSON header describing
    layer shapes and config, then raw little-endian float64 parameters."""
    arrays = list(_array_entries(state))
    header = {
        "version": _CHECKPOINT_VERSION,
        "config": cfg.to_dict(),
        "layer_sizes": state.layer_sizes,
        "arrays": [{"name": name, "shape": list(arr.shape)} for name, arr in arrays],
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(_CHECKPOINT_MAGIC)
            fh.write(len(header_bytes).to_bytes(8, "little"))
            fh.write(header_bytes)
            for _, arr in arrays:
                fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def load_checkpoint(path) -> tuple[EncoderState, ContrastiveConfig]:
    """Inverse of :func:`save_checkpoint`; raises
    :class:`CheckpointFormatError` on any malformed container."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise CheckpointFormatError(f"cannot read checkpoint: {exc}") from exc
    if not blob.startswith(_CHECKPOINT_MAGIC):
        raise CheckpointFormatError("not a checkpoint file (bad magic)")
    offset = len(_CHECKPOINT_MAGIC)
    if len(blob) < offset + 8:
        raise CheckpointFormatError("truncated checkpoint header")
    header_len = int.from_bytes(blob[offset : offset + 8], "little")
    offset += 8
    try:
        header = json.loads(blob[offset : offset + header_len])
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointFormatError("corrupt checkpoint header") from exc
    if header.get("version") != _CHECKPOINT_VERSION:
        raise CheckpointFormatError(
            f"unsupported checkpoint version {header.get('version')!r}"
        )
    offset += header_len
    arrays = {}
    try:
        for entry in header["arrays"]:
            shape = tuple(entry["shape"])
            nbytes = int(np.prod(shape)) * 8
            chunk = blob[offset : offset + nbytes]
            if len(chunk) != nbytes:
                raise CheckpointFormatError("truncated checkpoint payload")
            arrays[entry["name"]] = np.frombuffer(chunk, dtype="<f8").reshape(shape).copy()
            offset += nbytes
        cfg = ContrastiveConfig.from_dict(header["config"])
        n_enc = len(header["layer_sizes"]["encoder"]) - 1
        n_head = len(header["layer_sizes"]["head"])
        state = EncoderState(
            encoder_weights=[arrays[f"encoder_w_{i}"] for i in range(n_enc)],
            encoder_biases=[arrays[f"encoder_b_{i}"] for i in range(n_enc)],
            head_weights=[arrays[f"head_w_{i}"] for i in range(n_head)],
            head_biases=[arrays[f"head_b_{i}"] for i in range(n_head)],
        )
    except CheckpointFormatError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise CheckpointFormatError(f"malformed checkpoint: {exc}") from exc
    if offset != len(blob):
        raise CheckpointFormatError("trailing bytes after checkpoint payload")
    return state, cfg
