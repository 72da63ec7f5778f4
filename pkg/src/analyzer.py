import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .exceptions import VectorMaclaurinError
from .inequalities import (
    DEFAULT_TOLERANCE, VIOLATED, check_claim, check_nonsharp, check_reduction, check_szasz,
    check_variant, check_vector_maclaurin, check_vector_newton, verdict_for,
)
from .linalg import VectorFamily, gram
from .search import GAUSSIAN, random_family
from .symmetric_sums import DEFAULT_CAP, PowerExponent
from .utils import digest_rows, summarize_margins

logger = logging.getLogger(__name__)

THEOREM_EXPONENTS = ('0', '1', '2', 'inf')
DEFAULT_CHECKS = ('maclaurin', 'szasz', 'reduction', 'claim', 'variant', 'nonsharp', 'newton')


class FamilyAnalyzer:
    def __init__(self, tolerance: float = DEFAULT_TOLERANCE, cap: int = DEFAULT_CAP, threads: int = 1):
        """
        Initialize the FamilyAnalyzer.

        Args:
            tolerance (float): verdict tolerance shared by every check
            cap (int): subset enumeration cap
            threads (int): worker threads for symmetric sums
        """
        self.tolerance = tolerance
        self.cap = cap
        self.threads = threads
        self.results_cache: Dict[Tuple[str, str], List[Dict[str, Any]]] = {}
        self.checks = {
            'maclaurin': self._maclaurin_rows,
            'szasz': self._szasz_rows,
            'reduction': self._reduction_rows,
            'claim': self._claim_rows,
            'variant': self._variant_rows,
            'nonsharp': self._nonsharp_rows,
            'newton': self._newton_rows,
        }

    def _row(self, check: str, margin: float, theorem: bool, k: Optional[int] = None,
             p: Optional[str] = None) -> Dict[str, Any]:
        return {
            'check': check,
            'k': k,
            'p': p,
            'margin': margin,
            'verdict': verdict_for(margin, self.tolerance),
            'theorem': theorem,
        }

    def _maclaurin_rows(self, family: VectorFamily) -> List[Dict[str, Any]]:
        d, m = family.dim, family.count
        if m < d:
            return []
        rows = []
        for text in THEOREM_EXPONENTS:
            p = PowerExponent.parse(text)
            report = check_vector_maclaurin(family, p, tolerance=self.tolerance, cap=self.cap, threads=self.threads)
            for offset, margin in enumerate(report.margins):
                k = offset + 2
                proven = text != '1' or (m == d and k in (2, 3, d))
                rows.append(self._row('maclaurin', margin, proven, k=k, p=str(p)))
        return rows

    def _szasz_rows(self, family: VectorFamily) -> List[Dict[str, Any]]:
        matrix = gram(family)
        rows = []
        for k in range(2, matrix.order + 1):
            result = check_szasz(matrix, k, self.tolerance)
            rows.append(self._row('szasz', result.margin, True, k=k))
        return rows

    def _reduction_rows(self, family: VectorFamily) -> List[Dict[str, Any]]:
        d = family.dim
        if family.count != d or d < 2:
            return []
        rows = []
        for k in range(2, d + 1):
            pair = check_reduction(family, k, tolerance=self.tolerance)
            rows.append(self._row('reduction', pair.margin, k in (2, 3, d), k=k))
        return rows

    def _claim_rows(self, family: VectorFamily) -> List[Dict[str, Any]]:
        if family.count != family.dim or family.dim < 2:
            return []
        return [self._row('claim', check_claim(family, self.tolerance).margin, True)]

    def _variant_rows(self, family: VectorFamily) -> List[Dict[str, Any]]:
        if family.count != family.dim or family.dim < 3:
            return []
        return [self._row('variant', check_variant(family, tolerance=self.tolerance).margin, True)]

    def _nonsharp_rows(self, family: VectorFamily) -> List[Dict[str, Any]]:
        d = family.dim
        if family.count != d:
            return []
        return [self._row('nonsharp', check_nonsharp(family, k, self.tolerance, self.cap).margin, True, k=k)
                for k in range(3, d + 1)]

    def _newton_rows(self, family: VectorFamily) -> List[Dict[str, Any]]:
        d = family.dim
        if family.count < d:
            return []
        return [self._row('newton', check_vector_newton(family, k, self.tolerance, self.cap).margin, False, k=k)
                for k in range(2, d)]

    def get_checks(self, family: VectorFamily, checks: Sequence[str] = DEFAULT_CHECKS) -> List[Dict[str, Any]]:
        """
        Run the requested checks on one family.

        Args:
            family (VectorFamily): the family to verify
            checks: names among maclaurin, szasz, reduction, claim, variant, nonsharp, newton

        Returns:
            List of row dicts (check, k, p, margin, verdict, theorem); empty on a domain error
        """
        digest = digest_rows(family.vectors)
        rows: List[Dict[str, Any]] = []
        for name in checks:
            if name not in self.checks:
                raise ValueError(f"Unknown check '{name}', expected one of {sorted(self.checks)}")
            key = (digest, name)
            if key not in self.results_cache:
                try:
                    self.results_cache[key] = self.checks[name](family)
                except VectorMaclaurinError as e:
                    logger.warning("Check %s failed on family %s: %s", name, digest[:12], e)
                    self.results_cache[key] = [{'check': name, 'error': str(e)}]
            rows.extend(dict(row) for row in self.results_cache[key])
        return rows

    def analyze_families(self, families: Sequence[VectorFamily],
                         checks: Sequence[str] = DEFAULT_CHECKS) -> pd.DataFrame:
        """
        Analyze multiple families and return one row per family and check.

        Args:
            families: vector families
            checks: check names, see get_checks

        Returns:
            DataFrame with family index, shape, check, k, p, margin, verdict, theorem
        """
        results = []
        for index, family in enumerate(families):
            for row in self.get_checks(family, checks):
                row.update({'family': index, 'm': family.count, 'd': family.dim})
                results.append(row)
        columns = ['family', 'm', 'd', 'check', 'k', 'p', 'margin', 'verdict', 'theorem', 'error']
        return pd.DataFrame(results, columns=columns)

    def theorem_sweep(self, shapes: Sequence[Tuple[int, int]], families: int, seed: int,
                      distribution: str = GAUSSIAN,
                      checks: Sequence[str] = DEFAULT_CHECKS) -> Tuple[pd.DataFrame, pd.DataFrame]:
        """
        Run the checks on seeded random families of every shape.

        Args:
            shapes: (m, d) pairs
            families (int): families drawn per shape
            seed (int): root seed, one substream per shape
            distribution (str): family distribution

        Returns:
            (detail DataFrame, summary of theorem-backed margins per check and shape)
        """
        streams = np.random.SeedSequence(seed).spawn(len(shapes))
        frames = []
        for (m, d), stream in zip(shapes, streams):
            rng = np.random.default_rng(stream)
            drawn = [random_family(m, d, distribution, rng) for _ in range(families)]
            logger.info("Sweeping %d families with m=%d, d=%d", families, m, d)
            frames.append(self.analyze_families(drawn, checks))
        detail = pd.concat(frames, ignore_index=True) if frames else self.analyze_families([], checks)
        proven = detail[detail['theorem'].eq(True)]
        summary = summarize_margins(proven, ['check', 'm', 'd'])
        return detail, summary

    @staticmethod
    def violations(frame: pd.DataFrame, theorem_only: bool = True) -> pd.DataFrame:
        """Rows whose verdict is violated, optionally restricted to theorem-backed checks."""
        if frame.empty:
            return frame
        mask = frame['verdict'] == VIOLATED
        if theorem_only:
            mask &= frame['theorem'].eq(True)
        return frame[mask]

    @staticmethod
    def min_margin(frame: pd.DataFrame) -> float:
        margins = frame['margin'].dropna() if 'margin' in frame else []
        return float(margins.min()) if len(margins) else math.inf
