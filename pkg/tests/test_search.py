import math

import numpy as np
import pytest

from src.exceptions import BadShape, InfeasibleInterval, InfeasibleTarget, SandwichViolation
from src.inequalities import check_vector_maclaurin
from src.linalg import VectorFamily, gram, spectrum
from src.search import (
    SearchConfig, SearchTarget, ViolationSearcher, construct_orthogonal_replacement, monotone_orthogonalize,
    normalize_family, random_family, target_margin, violation_search,
)
from src.symmetric_sums import PowerExponent, s_k_p


class TestRandomFamily:

    def test_same_seed_same_family(self):
        assert random_family(5, 3, seed=7) == random_family(5, 3, seed=7)
        assert random_family(5, 3, seed=7) != random_family(5, 3, seed=8)

    def test_near_orthonormal_zero_epsilon(self):
        family = random_family(4, 4, 'near_orthonormal', seed=1, epsilon=0.0)
        np.testing.assert_array_equal(family.vectors, np.eye(4))
        report = check_vector_maclaurin(family, '1')
        assert all(margin == 0.0 for margin in report.margins)

    def test_near_orthonormal_needs_square_shape(self):
        with pytest.raises(BadShape):
            random_family(5, 4, 'near-orthonormal', seed=1)

    def test_bad_shape(self):
        with pytest.raises(BadShape):
            random_family(2, 3, seed=1)

    def test_gaussian_full_rank(self):
        family = random_family(8, 5, 'gaussian', seed=3)
        assert spectrum(gram(family)).rank() == 5

    def test_uniform_cube_bounds(self):
        family = random_family(6, 3, 'uniform-cube', seed=3)
        assert np.all(np.abs(family.vectors) <= 1.0)

    def test_unknown_distribution(self):
        with pytest.raises(ValueError):
            random_family(3, 3, 'cauchy', seed=0)


class TestSearchTarget:

    def test_maclaurin_needs_p(self):
        with pytest.raises(ValueError):
            SearchTarget('maclaurin', 2)

    def test_from_dict_parses_negative_p(self):
        target = SearchTarget.from_dict({'kind': 'maclaurin', 'k': 2, 'p': -1})
        assert target.p == PowerExponent.finite(-1.0, probe=True)
        assert str(target) == 'maclaurin(k=2, p=-1.0)'

    @pytest.mark.parametrize('kind, k, shape', [
        ('maclaurin', 4, (3, 3)),
        ('newton', 3, (3, 3)),
        ('reduction', 2, (4, 3)),
        ('projection_sharp', 3, (2, 3)),
    ])
    def test_infeasible_shapes(self, kind, k, shape):
        target = SearchTarget(kind, k, '1' if kind == 'maclaurin' else None)
        with pytest.raises(InfeasibleTarget):
            target.check_shape(*shape)


class TestTargetMargin:

    def test_maclaurin_margin_is_mean_difference(self):
        family = VectorFamily(np.diag([1.0, 2.0, 3.0]))
        target = SearchTarget('maclaurin', 2, '1')
        assert target_margin(family, target) == pytest.approx(2.0 - math.sqrt(11.0 / 3.0))

    def test_negative_p_with_zero_volume_is_rejected(self):
        family = VectorFamily([[1.0, 0.0], [0.0, 0.0]])
        target = SearchTarget('maclaurin', 2, '-1')
        assert target_margin(family, target) == math.inf

    def test_domain_error_is_rejected(self):
        family = VectorFamily([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        assert target_margin(family, SearchTarget('reduction', 2)) == math.inf

    def test_normalize_family(self):
        family = normalize_family(VectorFamily([[3.0, 0.0], [0.0, 4.0]]))
        assert float(np.sum(family.vectors ** 2)) == pytest.approx(2.0)
        assert normalize_family(VectorFamily(np.zeros((2, 2)))) is None


class TestViolationSearch:

    @pytest.fixture
    def small_config(self):
        return SearchConfig(dims=[(3, 3)], restarts=4, steps=150, seed=123, distribution='near_orthonormal')

    def test_negative_p_violation_found(self, small_config):
        result = violation_search(small_config, SearchTarget('maclaurin', 2, '-1'))
        assert result.best_margin < -1e-6
        assert result.violated
        assert target_margin(result.witness, result.target) == result.best_margin

    def test_p2_target_never_violated(self):
        config = SearchConfig(dims=[(4, 4)], restarts=3, steps=40, seed=5)
        result = violation_search(config, SearchTarget('maclaurin', 3, '2'))
        assert result.best_margin >= -1e-10

    def test_trace_has_one_record_per_restart(self, small_config):
        result = violation_search(small_config, SearchTarget('maclaurin', 2, '1'))
        assert len(result.trace) == small_config.restarts
        assert [record.restart for record in result.trace] == list(range(small_config.restarts))
        assert result.evaluations == sum(record.evaluations for record in result.trace)
        assert all(record.best_margin <= record.start_margin for record in result.trace)
        assert list(result.trace_frame().columns)[:3] == ['m', 'd', 'restart']

    def test_deterministic_and_thread_independent(self, small_config):
        target = SearchTarget('maclaurin', 2, '-1')
        first = violation_search(small_config, target)
        threaded = SearchConfig(dims=[(3, 3)], restarts=4, steps=150, seed=123,
                                distribution='near_orthonormal', threads=3)
        second = ViolationSearcher(threaded).run(target)
        assert first.best_margin == second.best_margin
        assert first.witness == second.witness
        assert [r.best_margin for r in first.trace] == [r.best_margin for r in second.trace]

    def test_infeasible_target(self, small_config):
        with pytest.raises(InfeasibleTarget):
            violation_search(small_config, SearchTarget('newton', 3))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SearchConfig(restarts=0)
        with pytest.raises(ValueError):
            SearchConfig(perturbation_scale=0.0)

    def test_config_from_dict_overrides(self):
        config = SearchConfig.from_dict({'dims': [[4, 4]], 'restarts': 7, 'targets': []}, seed=99, threads=2)
        assert config.dims == [(4, 4)]
        assert config.restarts == 7
        assert config.seed == 99
        assert config.threads == 2

    def test_restart_failures_do_not_abort(self, small_config, mocker):
        mocker.patch('src.search.target_margin', return_value=math.inf)
        result = violation_search(small_config, SearchTarget('maclaurin', 2, '1'))
        assert result.best_margin == math.inf
        assert result.witness is None


class TestOrthogonalReplacement:

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(77)

    def test_plane_example(self):
        family = VectorFamily([[1.0, 0.0], [1.0, 1.0]])
        replaced, (lo, hi) = construct_orthogonal_replacement(family, 0, 2)
        assert lo == pytest.approx(1.0 / math.sqrt(2.0))
        assert hi == 1.0
        new = replaced.vectors[0]
        assert np.dot(new, family.vectors[1]) == pytest.approx(0.0, abs=1e-15)
        assert np.linalg.norm(new) == pytest.approx((lo + hi) / 2.0)
        p_one = PowerExponent.finite(1.0)
        assert s_k_p(replaced, 2, p_one).raw_sum >= s_k_p(family, 2, p_one).raw_sum
        assert s_k_p(replaced, 1, p_one).raw_sum <= s_k_p(family, 1, p_one).raw_sum

    def test_orthogonal_family_is_fixed(self):
        family = VectorFamily(np.diag([2.0, 3.0, 5.0]))
        replaced, (lo, hi) = construct_orthogonal_replacement(family, 1, 2)
        assert lo == pytest.approx(3.0)
        assert hi == pytest.approx(3.0)
        np.testing.assert_allclose(replaced.vectors, family.vectors, atol=1e-12)

    def test_random_k3(self, rng):
        for _ in range(10):
            family = VectorFamily(rng.standard_normal((4, 4)))
            replaced, (lo, hi) = construct_orthogonal_replacement(family, 1, 3)
            assert lo <= hi + 1e-10 * max(1.0, hi)
            others = np.delete(replaced.vectors, 1, axis=0)
            np.testing.assert_allclose(others @ replaced.vectors[1], 0.0, atol=1e-9)

    def test_infeasible_interval(self, mocker):
        mocker.patch('src.search.ratio_R', side_effect=[2.0, 1.0])
        with pytest.raises(InfeasibleInterval):
            construct_orthogonal_replacement(VectorFamily.orthonormal(3), 0, 2)

    def test_sandwich_is_verified(self, mocker):
        mocker.patch('src.search.ratio_R', side_effect=[0.25, 0.25])
        with pytest.raises(SandwichViolation):
            construct_orthogonal_replacement(VectorFamily.orthonormal(3), 0, 2)


class TestMonotoneOrthogonalize:

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(88)

    def test_orthonormal_fixed_point(self):
        family = VectorFamily.orthonormal(4)
        np.testing.assert_allclose(monotone_orthogonalize(family, 3).vectors, family.vectors, atol=1e-12)

    def test_scaled_orthogonal_fixed_point(self):
        family = VectorFamily(np.diag([1.0, 4.0, 2.0]))
        np.testing.assert_allclose(monotone_orthogonalize(family, 2).vectors, family.vectors, atol=1e-12)

    @pytest.mark.parametrize('k', [2, 3, 4])
    def test_random_output_orthogonal_and_monotone(self, rng, k):
        p_one = PowerExponent.finite(1.0)
        for _ in range(5):
            family = VectorFamily(rng.standard_normal((4, 4)))
            result = monotone_orthogonalize(family, k)
            matrix = gram(result).entries
            norms = result.norms()
            off_diagonal = matrix - np.diag(np.diag(matrix))
            assert np.all(np.abs(off_diagonal) <= 1e-9 * np.outer(norms, norms))
            assert s_k_p(result, k, p_one).mean >= s_k_p(family, k, p_one).mean * (1 - 1e-9)
            assert s_k_p(result, k - 1, p_one).mean <= s_k_p(family, k - 1, p_one).mean * (1 + 1e-9)

    def test_step_index_reported(self, mocker):
        mocker.patch('src.search.construct_orthogonal_replacement', side_effect=InfeasibleInterval(2.0, 1.0))
        with pytest.raises(InfeasibleInterval) as info:
            monotone_orthogonalize(VectorFamily.orthonormal(5), 4)
        assert info.value.step == 0
