"""Binding layer: pure delegation, CLI parity, and error-name propagation."""

import csv

import numpy as np
import pytest

import codaug
import codaug_bindings as cb
from codaug.cli import main as cli_main


def test_version_matches_core():
    assert cb.__version__ == codaug.__version__


class TestDelegation:
    def test_close(self):
        np.testing.assert_allclose(cb.close([2, 1, 1]), [0.5, 0.25, 0.25])

    def test_clr_roundtrip(self):
        x = cb.close([0.5, 0.3, 0.2])
        np.testing.assert_allclose(cb.clr_inv(cb.clr(x)), x, atol=1e-12)

    def test_zero_replace(self):
        np.testing.assert_allclose(
            cb.zero_replace([0.5, 0.5, 0.0], 2), [0.4, 0.4, 0.2], atol=1e-15
        )

    def test_mixup_endpoint(self):
        x1 = cb.close([0.5, 0.25, 0.25])
        x2 = cb.close([0.25, 0.25, 0.5])
        np.testing.assert_allclose(cb.aitchison_mixup(x1, x2, 1.0), x1, atol=1e-12)

    def test_subcomposition(self):
        out = cb.random_subcomposition([0.5, 0.3, 0.2], [True, False, True])
        np.testing.assert_allclose(out, [5 / 7, 0.0, 2 / 7], atol=1e-12)

    def test_cutmix(self):
        out = cb.compositional_cutmix(
            [0.5, 0.25, 0.25], [0.1, 0.8, 0.1], [False, True, False]
        )
        np.testing.assert_allclose(out, np.asarray([0.5, 0.8, 0.25]) / 1.55, atol=1e-12)

    def test_multinomial_deterministic(self):
        a = cb.multinomial_resample([0.5, 0.3, 0.2], 100, seed=4)
        b = cb.multinomial_resample([0.5, 0.3, 0.2], 100, seed=4)
        assert np.array_equal(a, b)
        assert abs(a.sum() - 1.0) <= 1e-12

    def test_metrics(self):
        assert cb.roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75
        assert cb.ece([0.9, 0.9], [1, 0]) == pytest.approx(0.4, abs=1e-12)

    def test_factor_ten_row_count(self):
        rng = np.random.default_rng(0)
        matrix = rng.integers(1, 30, size=(7, 4)).astype(float)
        labels = ["a", "b", "a", "b", "a", "b", "a"]
        out_matrix, out_labels, out_weights, out_prov = cb.bound_augment(
            matrix, labels, "aitchison-mixup", factor=10, seed=3
        )
        assert out_matrix.shape == (77, 4)
        assert out_labels.shape == (77,)
        assert np.all(out_weights[7:] == 0.1)
        assert set(out_prov[7:]) == {"synthetic:aitchison-mixup"}

    def test_noncontiguous_input_accepted(self):
        rng = np.random.default_rng(1)
        wide = rng.integers(1, 30, size=(6, 8)).astype(float)
        view = wide[:, ::2]  # non-contiguous view
        assert not view.flags["C_CONTIGUOUS"]
        out, labels, weights, prov = cb.bound_augment(
            view, ["a", "a", "b", "b", "a", "b"], "compositional-cutmix", factor=2, seed=9
        )
        assert out.shape == (18, 4)


class TestErrorNames:
    def test_all_zero(self):
        with pytest.raises(ValueError) as err:
            cb.close([0.0, 0.0, 0.0])
        assert err.value.code == "AllZero"

    def test_empty_training_set(self):
        with pytest.raises(ValueError) as err:
            cb.bound_augment(np.empty((0, 3)), [], "aitchison-mixup", seed=0)
        assert err.value.code == "EmptyTrainingSet"

    def test_factor_zero_rejected(self):
        with pytest.raises(ValueError):
            cb.bound_augment([[1.0, 2.0]], ["a"], "aitchison-mixup", factor=0)

    def test_empty_subcomposition(self):
        with pytest.raises(ValueError) as err:
            cb.random_subcomposition([0.5, 0.5], [False, False])
        assert err.value.code == "EmptySubcomposition"

    def test_zero_part(self):
        with pytest.raises(ValueError) as err:
            cb.clr([0.5, 0.5, 0.0])
        assert err.value.code == "ZeroPart"


def _write_input_csv(path, matrix, labels):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(matrix.shape[1])] + ["label"])
        for row, label in zip(matrix, labels):
            writer.writerow([repr(float(v)) for v in row] + [label])


def _read_output_csv(path, p):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    assert header[p:] == ["label", "weight", "provenance"]
    matrix = np.asarray([[float(v) for v in row[:p]] for row in rows])
    labels = np.asarray([row[p] for row in rows])
    weights = np.asarray([float(row[p + 1]) for row in rows])
    provenance = np.asarray([row[p + 2] for row in rows])
    return matrix, labels, weights, provenance


class TestCliParity:
    def test_twenty_random_triples_bit_for_bit(self, tmp_path):
        rng = np.random.default_rng(42)
        strategies = [
            "aitchison-mixup",
            "random-subcompositions",
            "compositional-cutmix",
            "multinomial-resampling",
        ]
        for trial in range(20):
            n = int(rng.integers(3, 9))
            p = int(rng.integers(3, 8))
            if trial % 2 == 0:
                matrix = rng.integers(0, 40, size=(n, p)).astype(float)
                matrix[matrix.sum(axis=1) == 0, 0] = 1.0
            else:
                matrix = rng.uniform(0.01, 1.0, size=(n, p))
            labels = [("a", "b")[int(v)] for v in rng.integers(0, 2, size=n)]
            strategy = strategies[trial % len(strategies)]
            seed = int(rng.integers(0, 2**32))

            bound = cb.bound_augment(matrix, labels, strategy, factor=3, seed=seed)

            in_csv = tmp_path / f"in_{trial}.csv"
            out_csv = tmp_path / f"out_{trial}.csv"
            _write_input_csv(in_csv, matrix, labels)
            code = cli_main([
                "augment", "--input", str(in_csv), "--label-col", "label",
                "--strategy", strategy, "--factor", "3", "--seed", str(seed),
                "--output", str(out_csv),
            ])
            assert code == 0
            cli = _read_output_csv(out_csv, p)

            assert np.array_equal(bound[0], cli[0]), f"trial {trial}: matrices differ"
            assert np.array_equal(bound[1].astype(str), cli[1])
            assert np.array_equal(bound[2], cli[2])
            assert np.array_equal(bound[3], cli[3])
