"""Zero replacement and library-size handling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codaug.errors import AllZeroError
from codaug.geometry import Composition, close
from codaug.preprocess import (
    DEFAULT_LIBRARY_SIZE,
    ensure_positive,
    infer_library_size,
    normalize_rows,
    zero_replace,
    zero_replace_matrix,
)


class TestInferLibrarySize:
    def test_count_row_sums_to_total(self):
        assert infer_library_size([120, 30, 50]) == 200

    def test_proportions_get_default(self):
        assert infer_library_size([0.5, 0.3, 0.2]) == DEFAULT_LIBRARY_SIZE
        assert infer_library_size([0.5, 0.3, 0.2], default=500) == 500

    def test_all_zero_rejected(self):
        with pytest.raises(AllZeroError):
            infer_library_size([0, 0])

    def test_tolerates_text_roundtrip_jitter(self):
        assert infer_library_size([119.9999999999, 30.0000000001, 50.0]) == 200


class TestZeroReplace:
    def test_hand_example(self):
        out = zero_replace(Composition([0.5, 0.5, 0.0]), 2)
        np.testing.assert_allclose(out.parts, [0.4, 0.4, 0.2], atol=1e-15)

    def test_vanishing_pseudocount(self):
        x = close([0.5, 0.3, 0.2])
        out = zero_replace(x, 10**12)
        np.testing.assert_allclose(out.parts, x.parts, atol=1e-11)

    def test_uniform_fixed_point(self):
        u = close([1, 1, 1, 1])
        np.testing.assert_allclose(zero_replace(u, 7).parts, u.parts, atol=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=2, max_size=30).filter(
            lambda parts: sum(parts) > 0
        ),
        st.integers(min_value=1, max_value=10**6),
    )
    def test_strictly_positive_unit_sum(self, raw, library_size):
        x = close(raw)
        out = zero_replace(x, library_size)
        assert out.strictly_positive
        assert abs(out.parts.sum() - 1.0) < 1e-12

    def test_monotone(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            raw = rng.uniform(0, 1, size=int(rng.integers(2, 20)))
            raw[rng.integers(raw.size)] = 0.0
            x = close(raw)
            out = zero_replace(x, int(rng.integers(1, 1000)))
            order = np.argsort(x.parts, kind="stable")
            assert np.all(np.diff(out.parts[order]) >= -1e-15)

    def test_perturbation_bound(self):
        # for strictly positive x the change per part is at most (1 + p) / L
        rng = np.random.default_rng(4)
        for _ in range(50):
            p = int(rng.integers(2, 20))
            x = close(rng.uniform(0.05, 1.0, size=p))
            library_size = int(rng.integers(1, 10**5))
            out = zero_replace(x, library_size)
            bound = (1 + p) / library_size
            assert np.max(np.abs(out.parts - x.parts)) <= bound + 1e-15


class TestEnsurePositive:
    def test_positive_input_untouched(self):
        x = close([0.5, 0.3, 0.2])
        assert ensure_positive(x, 100) is x

    def test_zero_input_replaced(self):
        x = Composition([0.5, 0.5, 0.0])
        out = ensure_positive(x, 2)
        assert out.strictly_positive


class TestZeroReplaceMatrix:
    def test_matches_rowwise_zero_replace(self):
        rng = np.random.default_rng(5)
        mat = rng.uniform(0, 1, size=(6, 8))
        mat[2, 3] = 0.0
        mat = mat / mat.sum(axis=1, keepdims=True)
        out = zero_replace_matrix(mat, 50)
        for i in range(mat.shape[0]):
            expected = zero_replace(Composition(mat[i]), 50)
            np.testing.assert_allclose(out[i], expected.parts, atol=1e-12)

    def test_per_row_sizes(self):
        mat = np.asarray([[0.9, 0.1], [0.25, 0.75]])
        out = zero_replace_matrix(mat, [10, 1000])
        np.testing.assert_allclose(out.sum(axis=1), 1.0, atol=1e-12)
        assert abs(out[1, 0] - 0.25) < abs(out[0, 0] - 0.9)


class TestNormalizeRows:
    def test_closure_and_sizes(self):
        comps, sizes = normalize_rows([[2, 2], [1, 3]])
        np.testing.assert_allclose(comps[0].parts, [0.5, 0.5])
        np.testing.assert_allclose(comps[1].parts, [0.25, 0.75])
        assert sizes == [4, 4]

    def test_all_zero_row_names_index(self):
        with pytest.raises(AllZeroError, match="row 0"):
            normalize_rows([[0, 0]])

    def test_normalized_rows_pass_through(self):
        comps, sizes = normalize_rows([[0.5, 0.5], [0.25, 0.75]])
        np.testing.assert_allclose(comps[0].parts, [0.5, 0.5])
        assert sizes == [DEFAULT_LIBRARY_SIZE, DEFAULT_LIBRARY_SIZE]
