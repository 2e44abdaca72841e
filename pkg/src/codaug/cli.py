"""Command-line entry point.

Subcommands wire the library into reproducible file-to-file workflows:
``augment`` expands a CSV training table, ``pretrain`` fits the contrastive
encoder and writes a checkpoint, ``linear-eval``/``finetune`` score a
checkpoint (or a randomly initialized control) on a train/test pair, and
``bench`` runs the synthetic augmentation benchmark from a JSON config.

Standard output carries machine-readable ``key=value`` lines (the evaluation
commands end with ``auc=<value>``); diagnostics go to standard error.  Exit
codes: 0 success, 2 usage error, 3 data error, 4 checkpoint-format error.
All outputs are written to a temporary file and atomically renamed, and are
byte-identical for a fixed seed regardless of ``--threads``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .augment import AugmentationConfig, Strategy, augment_dataset
from .benchmark import SynthBenchConfig, render_report, synth_benchmark
from .contrastive import (
    ContrastiveConfig,
    EncoderState,
    finetune,
    init_encoder_state,
    linear_eval,
    load_checkpoint,
    pretrain,
    save_checkpoint,
)
from .data import Dataset, load_csv, write_csv
from .errors import CheckpointFormatError, CodaugError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_FORMAT = 4


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker-thread bound; affects wall time only, never output bytes",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codaug", description="Compositional-data augmentation toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_aug = sub.add_parser("augment", help="expand a CSV with synthetic samples")
    p_aug.add_argument("--input", required=True)
    p_aug.add_argument("--label-col", required=True)
    p_aug.add_argument("--id-col", default=None)
    p_aug.add_argument(
        "--strategy",
        required=True,
        choices=[s.value for s in Strategy],
    )
    p_aug.add_argument("--factor", type=int, default=10)
    p_aug.add_argument(
        "--weight", type=float, default=None, help="synthetic weight (default 1/factor)"
    )
    p_aug.add_argument("--library-size", type=int, default=10_000)
    p_aug.add_argument("--output", required=True)
    _common_flags(p_aug)
    p_aug.set_defaults(func=cmd_augment)

    p_pre = sub.add_parser("pretrain", help="contrastive pretraining -> checkpoint")
    p_pre.add_argument("--input", required=True)
    p_pre.add_argument("--label-col", required=True)
    p_pre.add_argument("--id-col", default=None)
    p_pre.add_argument(
        "--strategy",
        default=Strategy.RANDOM_SUBCOMPOSITIONS.value,
        choices=[
            Strategy.RANDOM_SUBCOMPOSITIONS.value,
            Strategy.AITCHISON_MIXUP.value,
            Strategy.COMPOSITIONAL_CUTMIX.value,
        ],
    )
    p_pre.add_argument("--epochs", type=int, default=2000)
    p_pre.add_argument("--temperature", type=float, default=0.5)
    p_pre.add_argument("--input-mode", default="clr", choices=["clr", "raw"])
    p_pre.add_argument("--library-size", type=int, default=10_000)
    p_pre.add_argument("--output", required=True)
    _common_flags(p_pre)
    p_pre.set_defaults(func=cmd_pretrain)

    for name, func in (("linear-eval", cmd_linear_eval), ("finetune", cmd_finetune)):
        p_eval = sub.add_parser(name, help=f"{name} of a checkpointed encoder")
        p_eval.add_argument("--train", required=True)
        p_eval.add_argument("--test", required=True)
        p_eval.add_argument("--label-col", required=True)
        p_eval.add_argument("--id-col", default=None)
        group = p_eval.add_mutually_exclusive_group(required=True)
        group.add_argument("--checkpoint", default=None)
        group.add_argument(
            "--random-init",
            action="store_true",
            help="use a randomly initialized encoder (no-pretraining control)",
        )
        p_eval.add_argument("--epochs", type=int, default=2000)
        p_eval.add_argument("--input-mode", default="clr", choices=["clr", "raw"])
        p_eval.add_argument("--library-size", type=int, default=10_000)
        _common_flags(p_eval)
        p_eval.set_defaults(func=func)

    p_bench = sub.add_parser("bench", help="synthetic augmentation benchmark")
    p_bench.add_argument("--config", required=True, help="JSON benchmark config")
    p_bench.add_argument("--output", required=True, help="TSV report path")
    _common_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def _print(key: str, value) -> None:
    sys.stdout.write(f"{key}={value}\n")


def _validate_threads(args) -> None:
    if args.threads < 1:
        raise CodaugError("--threads must be >= 1")


def cmd_augment(args) -> int:
    _validate_threads(args)
    ds = load_csv(args.input, label_column=args.label_col, id_column=args.id_col)
    cfg = AugmentationConfig(
        strategy=Strategy(args.strategy),
        factor=args.factor,
        synthetic_weight=args.weight,
        seed=args.seed,
        default_library_size=args.library_size,
    )
    augmented = augment_dataset(ds.samples, cfg, library_sizes=ds.library_sizes)
    write_csv(ds.replace_samples(augmented), args.output)
    _print("n", ds.n)
    _print("p", ds.p)
    counts = {name: 0 for name in ds.class_names}
    for sample in ds.samples:
        counts[sample.y] += 1
    for name in ds.class_names:
        _print(f"class_count[{name}]", counts[name])
    _print("synthetic", len(augmented) - ds.n)
    _print("output", args.output)
    return EXIT_OK


def cmd_pretrain(args) -> int:
    _validate_threads(args)
    ds = load_csv(args.input, label_column=args.label_col, id_column=args.id_col)
    cfg = ContrastiveConfig(
        strategy=Strategy(args.strategy),
        temperature=args.temperature,
        epochs=args.epochs,
        seed=args.seed,
        input_mode=args.input_mode,
        library_size=args.library_size,
    )
    result = pretrain(ds, cfg)
    save_checkpoint(args.output, result.state, cfg)
    _print("n", ds.n)
    _print("p", ds.p)
    _print("epochs", len(result.losses))
    if result.losses:
        _print("final_loss", f"{result.losses[-1]:.17g}")
    _print("output", args.output)
    return EXIT_OK


def _load_eval_pair(args) -> tuple[Dataset, Dataset]:
    train = load_csv(args.train, label_column=args.label_col, id_column=args.id_col)
    test = load_csv(args.test, label_column=args.label_col, id_column=args.id_col)
    if train.feature_names != test.feature_names:
        raise CodaugError("train and test files must share feature columns")
    extra = set(test.class_names) - set(train.class_names)
    if extra:
        raise CodaugError(f"test labels not present in train: {sorted(extra)}")
    # Re-catalogue the test set against the training classes so the binary
    # label mapping is shared.
    test = Dataset(
        samples=test.samples,
        feature_names=test.feature_names,
        class_names=train.class_names,
        library_sizes=test.library_sizes,
    )
    return train, test


def _resolve_state(args, train: Dataset) -> tuple[EncoderState, str, int]:
    if args.checkpoint is not None:
        state, cfg = load_checkpoint(args.checkpoint)
        if state.input_dim != train.p:
            raise CheckpointFormatError(
                f"checkpoint expects p={state.input_dim}, data has p={train.p}"
            )
        return state, cfg.input_mode, cfg.library_size
    state = init_encoder_state(train.p, args.seed)
    return state, args.input_mode, args.library_size


def cmd_linear_eval(args) -> int:
    _validate_threads(args)
    train, test = _load_eval_pair(args)
    state, input_mode, library_size = _resolve_state(args, train)
    auc = linear_eval(
        state, train, test,
        epochs=args.epochs, input_mode=input_mode, library_size=library_size,
    )
    _print("auc", f"{auc:.17g}")
    return EXIT_OK


def cmd_finetune(args) -> int:
    _validate_threads(args)
    train, test = _load_eval_pair(args)
    state, input_mode, library_size = _resolve_state(args, train)
    auc = finetune(
        state, train, test,
        epochs=args.epochs, input_mode=input_mode, library_size=library_size,
    )
    _print("auc", f"{auc:.17g}")
    return EXIT_OK


def cmd_bench(args) -> int:
    _validate_threads(args)
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CodaugError(f"invalid benchmark config JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise CodaugError("benchmark config must be a JSON object")
    raw.setdefault("seed", args.seed)
    try:
        cfg = SynthBenchConfig.from_dict(raw)
    except (TypeError, ValueError) as exc:
        raise CodaugError(f"invalid benchmark config: {exc}") from exc
    report = synth_benchmark(cfg)
    text = render_report(report)
    directory = os.path.dirname(os.path.abspath(args.output)) or "."
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp_path, args.output)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    _print("rows", len(report.rows))
    _print("output", args.output)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except CheckpointFormatError as exc:
        sys.stderr.write(f"error [{exc.code}]: {exc}\n")
        return EXIT_FORMAT
    except CodaugError as exc:
        sys.stderr.write(f"error [{exc.code}]: {exc}\n")
        return EXIT_DATA
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
