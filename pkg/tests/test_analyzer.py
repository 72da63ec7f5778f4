import math
import warnings

import numpy as np
import pandas as pd
import pytest
from unittest.mock import patch

from src.analyzer import FamilyAnalyzer
from src.exceptions import ZeroDenominator
from src.inequalities import EQUALITY, HOLDS, InequalityResult, VIOLATED
from src.linalg import VectorFamily


class TestFamilyAnalyzer:

    @pytest.fixture
    def analyzer(self):
        return FamilyAnalyzer()

    @pytest.fixture
    def orthonormal(self):
        return VectorFamily.orthonormal(3)

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(606)

    def test_get_checks_orthonormal(self, analyzer, orthonormal):
        rows = analyzer.get_checks(orthonormal)
        counts = pd.Series([row['check'] for row in rows]).value_counts()
        assert counts['maclaurin'] == 8
        assert counts['szasz'] == 2
        assert counts['reduction'] == 2
        assert counts['claim'] == 1
        assert counts['variant'] == 1
        assert counts['nonsharp'] == 1
        assert counts['newton'] == 1
        assert all(row['verdict'] != VIOLATED for row in rows)

    def test_orthonormal_maclaurin_rows_are_equalities(self, analyzer, orthonormal):
        rows = analyzer.get_checks(orthonormal, ['maclaurin'])
        assert {row['verdict'] for row in rows} == {EQUALITY}
        assert {row['p'] for row in rows} == {'0', '1.0', '2.0', 'inf'}

    def test_theorem_flag_for_p1(self, analyzer, rng):
        family = VectorFamily(rng.standard_normal((5, 5)))
        rows = analyzer.get_checks(family, ['maclaurin'])
        p1 = {row['k']: row['theorem'] for row in rows if row['p'] == '1.0'}
        assert p1 == {2: True, 3: True, 4: False, 5: True}
        assert all(row['theorem'] for row in rows if row['p'] != '1.0')

    def test_non_square_family_skips_square_checks(self, analyzer, rng):
        family = VectorFamily(rng.standard_normal((5, 3)))
        rows = analyzer.get_checks(family, ['maclaurin', 'reduction', 'claim'])
        assert {row['check'] for row in rows} == {'maclaurin'}

    def test_results_are_cached(self, analyzer, orthonormal):
        result = InequalityResult('claim', 1.0, 0.0, 1.0)
        with patch('src.analyzer.check_claim', return_value=result) as mock_claim:
            first = analyzer.get_checks(orthonormal, ['claim'])
            second = analyzer.get_checks(VectorFamily.orthonormal(3), ['claim'])
        assert mock_claim.call_count == 1
        assert first == second
        assert first[0]['verdict'] == HOLDS

    @patch('src.analyzer.check_claim')
    def test_domain_error_becomes_error_row(self, mock_claim, analyzer, orthonormal):
        mock_claim.side_effect = ZeroDenominator("all wedges vanish")
        frame = analyzer.analyze_families([orthonormal], ['claim', 'variant'])
        assert len(frame) == 2
        error_row = frame[frame['check'] == 'claim'].iloc[0]
        assert 'all wedges vanish' in error_row['error']
        assert pd.isna(error_row['margin'])
        assert frame[frame['check'] == 'variant'].iloc[0]['verdict'] == EQUALITY

    def test_unknown_check(self, analyzer, orthonormal):
        with pytest.raises(ValueError):
            analyzer.get_checks(orthonormal, ['hadamard'])

    def test_analyze_families_columns(self, analyzer, rng):
        families = [VectorFamily(rng.standard_normal((3, 3))) for _ in range(2)]
        frame = analyzer.analyze_families(families, ['claim', 'variant'])
        assert list(frame.columns) == ['family', 'm', 'd', 'check', 'k', 'p', 'margin', 'verdict', 'theorem', 'error']
        assert list(frame['family']) == [0, 0, 1, 1]
        assert set(frame['m']) == {3}

    def test_analyze_families_empty(self, analyzer):
        frame = analyzer.analyze_families([])
        assert frame.empty
        assert 'margin' in frame.columns


class TestTheoremSweep:

    @pytest.fixture
    def analyzer(self):
        return FamilyAnalyzer()

    def test_sweep_is_seeded(self, analyzer):
        checks = ('maclaurin', 'reduction', 'claim')
        first, _ = analyzer.theorem_sweep([(3, 3), (4, 4)], 3, seed=11, checks=checks)
        second, _ = FamilyAnalyzer().theorem_sweep([(3, 3), (4, 4)], 3, seed=11, checks=checks)
        pd.testing.assert_frame_equal(first, second)

    def test_no_theorem_violations(self, analyzer):
        detail, summary = analyzer.theorem_sweep([(3, 3), (4, 4)], 5, seed=2, checks=('maclaurin', 'szasz', 'claim'))
        assert FamilyAnalyzer.violations(detail).empty
        assert set(summary['check']) == {'maclaurin', 'szasz', 'claim'}
        assert (summary['min_margin'] >= -1e-10).all()
        claim = summary[(summary['check'] == 'claim') & (summary['d'] == 4)].iloc[0]
        assert claim['evaluations'] == 5


class TestFrameHelpers:

    @pytest.fixture
    def frame(self):
        return pd.DataFrame([
            {'check': 'maclaurin', 'margin': 0.2, 'verdict': HOLDS, 'theorem': True},
            {'check': 'newton', 'margin': -0.1, 'verdict': VIOLATED, 'theorem': False},
            {'check': 'szasz', 'margin': -0.3, 'verdict': VIOLATED, 'theorem': True},
            {'check': 'claim', 'margin': float('nan'), 'verdict': None, 'theorem': None},
        ])

    def test_violations_theorem_only(self, frame):
        assert list(FamilyAnalyzer.violations(frame)['check']) == ['szasz']

    def test_object_theorem_column_does_not_warn(self, frame):
        with warnings.catch_warnings():
            warnings.simplefilter('error', FutureWarning)
            violations = FamilyAnalyzer.violations(frame)
        assert list(violations['check']) == ['szasz']

    def test_violations_all(self, frame):
        assert list(FamilyAnalyzer.violations(frame, theorem_only=False)['check']) == ['newton', 'szasz']

    def test_min_margin(self, frame):
        assert FamilyAnalyzer.min_margin(frame) == -0.3
        assert FamilyAnalyzer.min_margin(pd.DataFrame()) == math.inf
