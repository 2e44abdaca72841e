"""Simplex geometry: worked examples, algebraic laws, and the clr isometry."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codaug.errors import (
    AllZeroError,
    DimensionMismatchError,
    DimensionTooSmallError,
    NegativeEntryError,
    NonFiniteError,
    ZeroPartError,
)
from codaug.geometry import (
    ClrVector,
    Composition,
    close,
    clr,
    clr_inv,
    distance,
    inner_product,
    perturb,
    power,
)


def inner_product_double_sum(v: Composition, x: Composition) -> float:
    """O(p^2) oracle: (1/2p) sum_jk log(v_j/v_k) log(x_j/x_k)."""
    a, b = v.parts, x.parts
    p = len(a)
    total = 0.0
    for j in range(p):
        for k in range(p):
            total += math.log(a[j] / a[k]) * math.log(b[j] / b[k])
    return total / (2 * p)


def random_positive_composition(rng, p):
    return close(rng.uniform(0.05, 1.0, size=p))


positive_compositions = st.integers(min_value=2, max_value=50).flatmap(
    lambda p: st.lists(
        st.floats(min_value=0.05, max_value=1.0, allow_nan=False),
        min_size=p,
        max_size=p,
    )
).map(close)


class TestClose:
    def test_proportional_scaling(self):
        np.testing.assert_allclose(close([2, 1, 1]).parts, [0.5, 0.25, 0.25])

    def test_all_zero_rejected(self):
        with pytest.raises(AllZeroError):
            close([0, 0, 0])

    def test_identity_on_simplex_points(self):
        np.testing.assert_allclose(close([0.5, 0.3, 0.2]).parts, [0.5, 0.3, 0.2])

    def test_negative_entry_rejected(self):
        with pytest.raises(NegativeEntryError):
            close([0.5, -0.1, 0.6])

    def test_dimension_too_small(self):
        with pytest.raises(DimensionTooSmallError):
            close([1.0])

    def test_idempotent_bitwise(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            c = random_positive_composition(rng, int(rng.integers(2, 30)))
            again = close(c.parts)
            assert np.array_equal(c.parts, again.parts)

    def test_unit_sum_within_ulps(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            raw = rng.uniform(0, 5, size=int(rng.integers(2, 40)))
            raw[int(rng.integers(raw.size))] = 0.0
            assert abs(close(raw).parts.sum() - 1.0) <= 1.5e-14


class TestCompositionType:
    def test_sum_tolerance_enforced(self):
        with pytest.raises(ValueError):
            Composition([0.5, 0.3, 0.1])

    def test_construction_recloses(self):
        c = Composition([0.5, 0.3, 0.2 + 5e-10])
        assert c.parts.sum() == 1.0

    def test_parts_read_only(self):
        c = close([1, 2, 3])
        with pytest.raises(ValueError):
            c.parts[0] = 0.9

    def test_strictly_positive_flag(self):
        assert close([1, 2, 3]).strictly_positive
        assert not Composition([0.5, 0.5, 0.0]).strictly_positive


class TestPerturb:
    def test_uniform_is_identity(self):
        x = close([0.5, 0.3, 0.2])
        u = close([1, 1, 1])
        np.testing.assert_allclose(perturb(u, x).parts, x.parts, atol=1e-15)

    def test_hand_example(self):
        out = perturb(close([0.5, 0.25, 0.25]), close([0.25, 0.25, 0.5]))
        np.testing.assert_allclose(out.parts, [0.4, 0.2, 0.4], atol=1e-15)

    def test_inverse_gives_uniform(self):
        x = close([0.6, 0.3, 0.1])
        out = perturb(x, power(-1.0, x))
        np.testing.assert_allclose(out.parts, [1 / 3] * 3, atol=1e-15)

    def test_zero_part_rejected(self):
        with pytest.raises(ZeroPartError):
            perturb(Composition([0.5, 0.5, 0.0]), close([1, 1, 1]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            perturb(close([1, 1]), close([1, 1, 1]))


class TestPower:
    def test_scalar_identity(self):
        x = close([0.5, 0.3, 0.2])
        np.testing.assert_allclose(power(1.0, x).parts, x.parts, atol=1e-15)

    def test_zero_gives_uniform(self):
        x = close([0.7, 0.2, 0.1])
        np.testing.assert_allclose(power(0.0, x).parts, [1 / 3] * 3, atol=1e-15)

    def test_hand_example(self):
        out = power(2.0, close([0.5, 0.25, 0.25]))
        np.testing.assert_allclose(out.parts, [2 / 3, 1 / 6, 1 / 6], atol=1e-15)

    def test_non_finite_exponent(self):
        with pytest.raises(NonFiniteError):
            power(float("nan"), close([1, 1]))


class TestInnerProduct:
    def test_uniform_gives_zero(self):
        u = close([1, 1, 1, 1])
        assert inner_product(u, close([0.4, 0.3, 0.2, 0.1])) == pytest.approx(0.0, abs=1e-12)

    def test_two_part_half(self):
        e = math.e
        x = close([e / (1 + e), 1 / (1 + e)])
        assert inner_product(x, x) == pytest.approx(0.5, abs=1e-12)

    def test_hand_example(self):
        x = close([0.5, 0.3, 0.2])
        assert inner_product(x, x) == pytest.approx(0.4216444923691845, abs=1e-12)

    def test_matches_double_sum_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            p = int(rng.integers(2, 12))
            v = random_positive_composition(rng, p)
            x = random_positive_composition(rng, p)
            assert inner_product(v, x) == pytest.approx(
                inner_product_double_sum(v, x), rel=1e-9, abs=1e-9
            )

    def test_symmetric(self):
        rng = np.random.default_rng(8)
        v = random_positive_composition(rng, 6)
        x = random_positive_composition(rng, 6)
        assert inner_product(v, x) == pytest.approx(inner_product(x, v), abs=1e-12)


class TestDistance:
    def test_self_distance_zero(self):
        x = close([0.5, 0.3, 0.2])
        assert distance(x, x) == 0.0

    def test_hand_example(self):
        d = distance(close([0.5, 0.25, 0.25]), close([0.25, 0.25, 0.5]))
        assert d == pytest.approx(0.9802581434685472, abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            p = int(rng.integers(2, 20))
            v = random_positive_composition(rng, p)
            x = random_positive_composition(rng, p)
            assert distance(v, x) == pytest.approx(distance(x, v), abs=1e-12)

    def test_equals_norm_of_perturbation_difference(self):
        # d(v, x) = sqrt(<v (-) x, v (-) x>) with (-) built from perturb/power
        rng = np.random.default_rng(10)
        for _ in range(20):
            p = int(rng.integers(2, 20))
            v = random_positive_composition(rng, p)
            x = random_positive_composition(rng, p)
            diff = perturb(v, power(-1.0, x))
            assert distance(v, x) == pytest.approx(
                math.sqrt(inner_product(diff, diff)), rel=1e-9, abs=1e-9
            )


class TestClr:
    def test_uniform_maps_to_zero(self):
        np.testing.assert_allclose(clr(close([1, 1, 1])).coords, 0.0, atol=1e-15)

    def test_hand_example(self):
        np.testing.assert_allclose(
            clr(close([0.5, 0.3, 0.2])).coords,
            [0.47570544464245915, -0.03512017219355038, -0.4405852724489087],
            atol=1e-12,
        )

    def test_coords_sum_to_zero(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            x = random_positive_composition(rng, int(rng.integers(2, 50)))
            assert abs(clr(x).coords.sum()) < 1e-12

    def test_zero_part_rejected(self):
        with pytest.raises(ZeroPartError):
            clr(Composition([0.5, 0.5, 0.0]))


class TestClrInv:
    def test_zero_vector_gives_uniform(self):
        np.testing.assert_allclose(clr_inv([0.0, 0.0, 0.0]).parts, [1 / 3] * 3)

    def test_round_trip(self):
        x = close([0.5, 0.3, 0.2])
        np.testing.assert_allclose(clr_inv(clr(x)).parts, x.parts, atol=1e-12)

    def test_hand_example(self):
        np.testing.assert_allclose(
            clr_inv([1.0, 0.0, -1.0]).parts,
            [0.6652409557748219, 0.24472847105479767, 0.09003057317038046],
            atol=1e-12,
        )

    def test_shift_invariance(self):
        rng = np.random.default_rng(12)
        z = rng.normal(size=8)
        shifted = clr_inv(z + 123.456)
        np.testing.assert_allclose(shifted.parts, clr_inv(z).parts, atol=1e-12)

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteError):
            clr_inv([0.0, float("inf")])
        with pytest.raises(NonFiniteError):
            clr_inv([0.0, float("nan")])

    def test_overflow_protected(self):
        out = clr_inv([1000.0, 0.0, -1000.0])
        assert np.all(np.isfinite(out.parts))


class TestVectorSpaceAxioms:
    """Perturbation/powering satisfy the vector-space laws."""

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_axioms(self, data):
        p = data.draw(st.integers(min_value=2, max_value=50))
        draw_parts = st.lists(
            st.floats(min_value=0.05, max_value=1.0), min_size=p, max_size=p
        )
        v = close(data.draw(draw_parts))
        x = close(data.draw(draw_parts))
        lam = data.draw(st.floats(min_value=-3, max_value=3))
        mu = data.draw(st.floats(min_value=-3, max_value=3))

        np.testing.assert_allclose(
            perturb(v, x).parts, perturb(x, v).parts, rtol=1e-9
        )
        np.testing.assert_allclose(
            power(lam, perturb(v, x)).parts,
            perturb(power(lam, v), power(lam, x)).parts,
            rtol=1e-9,
        )
        np.testing.assert_allclose(
            power(lam + mu, x).parts,
            perturb(power(lam, x), power(mu, x)).parts,
            rtol=1e-9,
        )

    def test_associativity(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            p = int(rng.integers(2, 50))
            a, b, c = (random_positive_composition(rng, p) for _ in range(3))
            np.testing.assert_allclose(
                perturb(perturb(a, b), c).parts,
                perturb(a, perturb(b, c)).parts,
                rtol=1e-9,
            )


class TestIsometry:
    def test_inner_product_is_clr_dot(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            p = int(rng.integers(2, 50))
            v = random_positive_composition(rng, p)
            x = random_positive_composition(rng, p)
            assert inner_product(v, x) == pytest.approx(
                float(clr(v).coords @ clr(x).coords), rel=1e-9, abs=1e-12
            )

    def test_distance_is_clr_euclidean(self):
        rng = np.random.default_rng(15)
        for _ in range(100):
            p = int(rng.integers(2, 50))
            v = random_positive_composition(rng, p)
            x = random_positive_composition(rng, p)
            assert distance(v, x) == pytest.approx(
                float(np.linalg.norm(clr(v).coords - clr(x).coords)),
                rel=1e-9,
                abs=1e-12,
            )


class TestClrVectorType:
    def test_sum_must_vanish(self):
        with pytest.raises(ValueError):
            ClrVector([1.0, 1.0])

    def test_valid_construction(self):
        z = ClrVector([1.0, -1.0])
        assert z.p == 2
