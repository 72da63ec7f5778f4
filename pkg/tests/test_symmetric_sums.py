import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.exceptions import CapExceeded
from src.linalg import VectorFamily, wedge_volume
from src.symmetric_sums import (
    PowerExponent, enumerate_subsets, mean_from_raw, s_k_2_eigen, s_k_p, subset_chunks,
)


class TestPowerExponent:

    def test_parse_tags(self):
        assert PowerExponent.parse('0').is_zero
        assert PowerExponent.parse('inf').is_infinite
        assert PowerExponent.parse('infinity').is_infinite
        assert PowerExponent.parse('1.5').p == 1.5

    def test_negative_requires_probe(self):
        with pytest.raises(ValueError):
            PowerExponent.parse('-1')
        probe = PowerExponent.parse('-1', allow_negative=True)
        assert probe.probe
        assert probe.p == -1.0

    def test_garbage(self):
        with pytest.raises(ValueError):
            PowerExponent.parse('two')

    def test_str_round_trips_through_parse(self):
        for text in ('0', 'inf', '2.0', '-0.5'):
            p = PowerExponent.parse(text, allow_negative=True)
            assert PowerExponent.parse(str(p), allow_negative=True) == p


class TestSubsetEnumeration:

    def test_lexicographic_order(self):
        subsets = [s.indices for s in enumerate_subsets(4, 2)]
        assert subsets == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]

    def test_cap_is_checked_before_enumeration(self):
        with pytest.raises(CapExceeded) as info:
            enumerate_subsets(30, 15, cap=1000)
        assert info.value.binomial == math.comb(30, 15)

    def test_chunks_cover_all_subsets(self):
        chunks = list(subset_chunks(7, 3, chunk_size=4))
        assert [len(chunk) for chunk in chunks] == [4] * 8 + [3]
        stacked = np.vstack(chunks)
        assert len({tuple(row) for row in stacked}) == math.comb(7, 3)


class TestSymmetricSums:

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(2024)

    @pytest.fixture
    def diagonal(self):
        return VectorFamily(np.diag([1.0, 2.0, 3.0]))

    def test_diagonal_p1_means(self, diagonal):
        p = PowerExponent.finite(1.0)
        assert s_k_p(diagonal, 1, p).mean == pytest.approx(2.0)
        assert s_k_p(diagonal, 2, p).mean == pytest.approx(1.914854, abs=1e-6)
        assert s_k_p(diagonal, 3, p).mean == pytest.approx(1.817121, abs=1e-6)

    def test_orthonormal_means_are_one(self):
        family = VectorFamily.orthonormal(4)
        for p in (PowerExponent.zero(), PowerExponent.finite(1.0), PowerExponent.finite(2.0),
                  PowerExponent.infinity()):
            for k in range(1, 5):
                assert s_k_p(family, k, p).mean == pytest.approx(1.0, abs=1e-12)

    def test_raw_sum_matches_direct_enumeration(self, rng):
        family = VectorFamily(rng.standard_normal((6, 4)))
        direct = math.fsum(wedge_volume(family, s) for s in enumerate_subsets(6, 3))
        assert s_k_p(family, 3, PowerExponent.finite(1.0)).raw_sum == pytest.approx(direct, rel=1e-12)

    def test_eigen_path_matches_enumeration(self, rng):
        family = VectorFamily(rng.standard_normal((7, 5)))
        for k in range(1, 6):
            enumerated = s_k_p(family, k, PowerExponent.finite(2.0)).raw_sum
            assert s_k_2_eigen(family, k) == pytest.approx(enumerated, rel=1e-9)

    def test_above_dimension_is_flagged(self, rng):
        family = VectorFamily(rng.standard_normal((5, 2)))
        value = s_k_p(family, 3, PowerExponent.finite(1.0))
        assert value.above_dimension
        assert value.raw_sum == 0.0
        assert value.mean == 0.0

    def test_geometric_mean_with_zero_volume(self):
        family = VectorFamily([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
        value = s_k_p(family, 1, PowerExponent.zero())
        assert value.raw_sum == -math.inf
        assert value.mean == 0.0
        assert value.zero_count >= 1

    def test_max_form(self):
        family = VectorFamily([[1.0, 0.0], [0.0, 3.0], [1.0, 1.0]])
        value = s_k_p(family, 1, PowerExponent.infinity())
        assert value.raw_sum == 3.0
        assert value.mean == 3.0

    @pytest.mark.parametrize('tag', ['0', '1', '2', 'inf'])
    def test_homogeneity_for_every_tag(self, rng, tag):
        p = PowerExponent.parse(tag)
        for _ in range(50):
            family = VectorFamily(rng.standard_normal((5, 4)))
            for c in (2.0, 0.25):
                scaled = family.scaled(c)
                for k in range(1, 5):
                    assert s_k_p(scaled, k, p).mean == pytest.approx(c * s_k_p(family, k, p).mean, rel=1e-12)

    def test_large_exponent_approaches_max_form(self, rng):
        p64, top = PowerExponent.finite(64.0), PowerExponent.infinity()
        for _ in range(50):
            family = VectorFamily(rng.standard_normal((6, 4)))
            for k in range(1, 5):
                limit = s_k_p(family, k, top).mean
                assert abs(s_k_p(family, k, p64).mean - limit) / limit <= 0.1

    def test_means_increase_with_exponent(self, rng):
        exponents = [PowerExponent.parse(tag) for tag in ('0', '0.5', '1', '2', '4', 'inf')]
        for _ in range(50):
            family = VectorFamily(rng.standard_normal((6, 4)))
            for k in range(1, 5):
                means = [s_k_p(family, k, p).mean for p in exponents]
                for lower, upper in zip(means, means[1:]):
                    assert lower <= upper * (1 + 1e-12)

    def test_mean_from_raw_agrees(self, rng):
        family = VectorFamily(rng.standard_normal((5, 3)))
        for p in (PowerExponent.zero(), PowerExponent.finite(0.5), PowerExponent.infinity()):
            value = s_k_p(family, 2, p)
            assert mean_from_raw(value.raw_sum, value.count, 2, p) == value.mean

    def test_thread_count_does_not_change_result(self, rng):
        family = VectorFamily(rng.standard_normal((12, 5)))
        p = PowerExponent.finite(1.0)
        single = s_k_p(family, 4, p, threads=1, chunk_size=16)
        pooled = s_k_p(family, 4, p, threads=4, chunk_size=16)
        assert single.raw_sum == pooled.raw_sum
        assert single.mean == pooled.mean

    def test_cap_exceeded(self, rng):
        family = VectorFamily(rng.standard_normal((20, 10)))
        with pytest.raises(CapExceeded):
            s_k_p(family, 10, PowerExponent.finite(1.0), cap=1000)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=2, max_value=5))
    def test_homogeneity(self, seed, d):
        family = VectorFamily(np.random.default_rng(seed).standard_normal((d + 1, d)))
        p = PowerExponent.finite(1.0)
        for k in range(1, d + 1):
            base = s_k_p(family, k, p).mean
            scaled = s_k_p(family.scaled(3.0), k, p).mean
            assert scaled == pytest.approx(3.0 * base, rel=1e-9)
