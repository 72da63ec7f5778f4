"""
Margin-reporting checks for Maclaurin-type inequalities.

Every check returns the two sides it compares together with a margin whose
sign says whether the inequality holds (margin >= -tolerance). Checks backed
by a theorem are asserted by the test suite; the others (vector Newton,
general p = 1 chains, reduction at 3 < k < d) are probes whose failures are
logged as research events.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
import scipy.linalg

from .exceptions import DegenerateSimplex, NonPositiveInput, ZeroDenominator
from .linalg import (
    GramMatrix, SubsetLike, VectorFamily, as_subset, elementary_symmetric_all, gram,
    principal_minors, spectrum, wedge_volume, wedge_volumes,
)
from .symmetric_sums import (
    DEFAULT_CAP, FINITE, PowerExponent, mean_from_raw, s_k_2_eigen, s_k_p, subset_chunks,
)

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
EQUALITY_TOLERANCE = 1e-12

HOLDS = 'holds'
VIOLATED = 'violated'
EQUALITY = 'equality'

P_ONE = PowerExponent.finite(1.0)


def verdict_for(margin: float, tolerance: float = DEFAULT_TOLERANCE,
                equality_tolerance: float = EQUALITY_TOLERANCE) -> str:
    if margin < -tolerance:
        return VIOLATED
    if abs(margin) <= equality_tolerance:
        return EQUALITY
    return HOLDS


def overall_verdict(verdicts: Sequence[str]) -> str:
    if any(v == VIOLATED for v in verdicts):
        return VIOLATED
    if verdicts and all(v == EQUALITY for v in verdicts):
        return EQUALITY
    return HOLDS


@dataclass
class MaclaurinReport:
    """
    Chain of means M_1 >= M_2 >= ... with per-pair margins M_{k-1} - M_k.
    """
    p: PowerExponent
    means: List[float]
    margins: List[float]
    verdicts: List[str]
    tolerance: float = DEFAULT_TOLERANCE
    source: str = 'vector'
    flags: Dict[str, object] = field(default_factory=dict)

    @property
    def k_max(self) -> int:
        return len(self.means)

    @property
    def verdict(self) -> str:
        return overall_verdict(self.verdicts)

    @property
    def min_margin(self) -> float:
        return min(self.margins) if self.margins else 0.0

    def to_frame(self) -> pd.DataFrame:
        """One row per k with its mean and the margin to the previous mean."""
        return pd.DataFrame({
            'k': list(range(1, self.k_max + 1)),
            'mean': self.means,
            'margin': [np.nan] + list(self.margins),
            'verdict': [None] + list(self.verdicts),
        })

    def to_dict(self) -> Dict[str, object]:
        return {
            'p': str(self.p),
            'source': self.source,
            'means': list(self.means),
            'margins': list(self.margins),
            'verdicts': list(self.verdicts),
            'verdict': self.verdict,
            'tolerance': self.tolerance,
            'flags': dict(self.flags),
        }


@dataclass
class InequalityResult:
    """
    Outcome of a single inequality lhs <= rhs.

    margin is rhs - lhs unless the check documents another normalization.
    """
    name: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float = DEFAULT_TOLERANCE
    flags: Dict[str, object] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.margin >= -self.tolerance

    @property
    def verdict(self) -> str:
        return verdict_for(self.margin, self.tolerance)

    def to_dict(self) -> Dict[str, object]:
        payload = asdict(self)
        payload['verdict'] = self.verdict
        return payload


@dataclass
class RatioPair:
    """Two reduction ratios R_{j_hi} <= R_{j_lo} for a fixed pivot vector."""
    pivot: int
    j_hi: int
    j_lo: int
    r_hi: float
    r_lo: float
    feasible: bool
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def margin(self) -> float:
        return self.r_lo - self.r_hi

    def to_dict(self) -> Dict[str, object]:
        payload = asdict(self)
        payload['margin'] = self.margin
        return payload


def _require_square(family: VectorFamily, what: str) -> None:
    if family.count != family.dim:
        raise ValueError(f"{what} needs m = d, got m={family.count}, d={family.dim}")


def check_classical_maclaurin(xs: Sequence[float], tolerance: float = DEFAULT_TOLERANCE) -> MaclaurinReport:
    """
    Classical Maclaurin chain for positive numbers.

    Args:
        xs: positive reals x_1..x_m
        tolerance (float): verdict tolerance

    Returns:
        MaclaurinReport with means (e_k / C(m,k))^(1/k), k = 1..m
    """
    values = np.asarray(xs, dtype=float).ravel()
    if values.size == 0:
        raise NonPositiveInput("Need at least one number")
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise NonPositiveInput(f"All inputs must be finite and positive, got {values.tolist()}")

    m = values.size
    coeffs = elementary_symmetric_all(values)
    means = [float((coeffs[k] / math.comb(m, k)) ** (1.0 / k)) for k in range(1, m + 1)]
    margins = [means[i - 1] - means[i] for i in range(1, m)]
    verdicts = [verdict_for(margin, tolerance) for margin in margins]
    report = MaclaurinReport(P_ONE, means, margins, verdicts, tolerance, source='classical')
    if report.verdict == VIOLATED:
        logger.error("Classical Maclaurin chain violated for %s (min margin %.3e)", values.tolist(), report.min_margin)
    return report


def vector_means(family: VectorFamily, p: Union[PowerExponent, str, float], k_max: int,
                 cap: int = DEFAULT_CAP, threads: int = 1) -> List[float]:
    """Power means M_{k,p} for k = 1..k_max; p = 2 uses the Gram spectrum."""
    p = PowerExponent.parse(p, allow_negative=True)
    means = []
    for k in range(1, k_max + 1):
        if p.tag == FINITE and p.p == 2.0:
            raw = s_k_2_eigen(family, k)
            means.append(mean_from_raw(raw, math.comb(family.count, k), k, p))
        else:
            means.append(s_k_p(family, k, p, cap=cap, threads=threads).mean)
    return means


def check_vector_maclaurin(family: VectorFamily, p: Union[PowerExponent, str, float],
                           k_max: Optional[int] = None, tolerance: float = DEFAULT_TOLERANCE,
                           cap: int = DEFAULT_CAP, threads: int = 1) -> MaclaurinReport:
    """
    Vector-valued Maclaurin chain M_{1,p} >= ... >= M_{k_max,p}.

    Args:
        family (VectorFamily): m vectors in R^d with d <= m
        p: exponent (PowerExponent or "0", "inf", decimal; negatives are probes)
        k_max (int): last k of the chain, defaults to d
        tolerance (float): verdict tolerance on the normalized means

    Returns:
        MaclaurinReport
    """
    p = PowerExponent.parse(p, allow_negative=True)
    d, m = family.dim, family.count
    k_max = d if k_max is None else int(k_max)
    if not 1 <= k_max <= d <= m:
        raise ValueError(f"Need 1 <= k_max <= d <= m, got k_max={k_max}, d={d}, m={m}")

    means = vector_means(family, p, k_max, cap=cap, threads=threads)
    margins = [means[i - 1] - means[i] for i in range(1, k_max)]
    verdicts = [verdict_for(margin, tolerance) for margin in margins]
    report = MaclaurinReport(p, means, margins, verdicts, tolerance, source='vector')
    if p.tag == FINITE and p.p < 0:
        report.flags['negative_p_probe'] = True
    if report.verdict == VIOLATED:
        logger.warning("Vector Maclaurin chain violated at p=%s (m=%d, d=%d, min margin %.3e)",
                       p, m, d, report.min_margin)
    return report


def _normalized_s(family: VectorFamily, k: int, cap: int, threads: int) -> float:
    value = s_k_p(family, k, P_ONE, cap=cap, threads=threads)
    return value.raw_sum / value.count


def check_vector_newton(family: VectorFamily, k: int, tolerance: float = DEFAULT_TOLERANCE,
                        cap: int = DEFAULT_CAP, threads: int = 1) -> InequalityResult:
    """
    Probe of the vector Newton inequality (S_k/C(m,k))^2 >= (S_{k-1}/C(m,k-1)) (S_{k+1}/C(m,k+1)).

    Returns:
        InequalityResult with lhs = product of neighbours, rhs = square, margin = rhs - lhs
    """
    d, m = family.dim, family.count
    if not 2 <= k <= d - 1 or m < d:
        raise ValueError(f"Need 2 <= k <= d-1 and m >= d, got k={k}, d={d}, m={m}")
    below = _normalized_s(family, k - 1, cap, threads)
    middle = _normalized_s(family, k, cap, threads)
    above = _normalized_s(family, k + 1, cap, threads)
    result = InequalityResult('vector_newton', below * above, middle ** 2, middle ** 2 - below * above,
                              tolerance, flags={'k': k, 'probe': True})
    if not result.holds:
        logger.warning("Vector Newton probe negative: k=%d, m=%d, d=%d, margin %.3e", k, m, d, result.margin)
    return result


def _minors_of_size(matrix: GramMatrix, k: int, clamp_tol: float) -> np.ndarray:
    chunks = [principal_minors(matrix, rows, clamp_tol) for rows in subset_chunks(matrix.order, k)]
    return np.concatenate(chunks)


def check_szasz(matrix: Union[GramMatrix, np.ndarray], k: int, tolerance: float = DEFAULT_TOLERANCE,
                clamp_tol: float = 1e-9) -> InequalityResult:
    """
    Szasz inequality between geometric means of principal k- and (k-1)-minors.

    (prod_{|A|=k} det M_A)^(1/C(n-1,k-1)) <= (prod_{|B|=k-1} det M_B)^(1/C(n-1,k-2))

    Args:
        matrix: PSD matrix of order n
        k (int): 1 < k <= n

    Returns:
        InequalityResult; a vanishing minor sets flags['zero_minor'] and margin 0
    """
    if not isinstance(matrix, GramMatrix):
        matrix = GramMatrix(matrix)
    n = matrix.order
    if not 1 < k <= n:
        raise ValueError(f"Need 1 < k <= n = {n}, got k={k}")
    spectrum(matrix, clamp_tol)

    upper = _minors_of_size(matrix, k, clamp_tol)
    lower = _minors_of_size(matrix, k - 1, clamp_tol)
    if np.any(upper == 0.0) or np.any(lower == 0.0):
        logger.debug("Szasz check at k=%d hit a zero principal minor", k)
        return InequalityResult('szasz', 0.0, 0.0, 0.0, tolerance, flags={'zero_minor': True, 'k': k})

    log_lhs = math.fsum(np.log(upper)) / math.comb(n - 1, k - 1)
    log_rhs = math.fsum(np.log(lower)) / math.comb(n - 1, k - 2)
    lhs, rhs = math.exp(log_lhs), math.exp(log_rhs)
    return InequalityResult('szasz', lhs, rhs, rhs - lhs, tolerance, flags={'zero_minor': False, 'k': k})


def ratio_R(family: VectorFamily, pivot: int, j: int) -> float:
    """
    Reduction ratio for a pivot vector.

    R(pivot, j) = sum_S |v_pivot ^ v_S| / sum_S |v_S| over j-subsets S of the
    other vectors; R(pivot, 0) = ||v_pivot||.

    Raises:
        ZeroDenominator: if every j-wedge of the other vectors vanishes
    """
    _require_square(family, "ratio_R")
    d = family.dim
    if not 0 <= pivot < d:
        raise IndexError(f"Pivot {pivot} out of range for {d} vectors")
    if not 0 <= j <= d - 1:
        raise ValueError(f"Need 0 <= j <= d-1 = {d - 1}, got j={j}")
    if j == 0:
        return float(family.norms()[pivot])

    matrix = gram(family)
    others = np.array([i for i in range(d) if i != pivot])
    numerator_parts, denominator_parts = [], []
    for rows in subset_chunks(d - 1, j):
        subsets = others[rows]
        with_pivot = np.sort(np.hstack([subsets, np.full((subsets.shape[0], 1), pivot)]), axis=1)
        numerator_parts.append(math.fsum(wedge_volumes(matrix, with_pivot, d)))
        denominator_parts.append(math.fsum(wedge_volumes(matrix, subsets, d)))
    numerator = math.fsum(numerator_parts)
    denominator = math.fsum(denominator_parts)
    if denominator == 0.0:
        raise ZeroDenominator(f"All {j}-wedges of the vectors other than {pivot} vanish")
    return numerator / denominator


def check_reduction(family: VectorFamily, k: int, pivot: int = 0,
                    tolerance: float = DEFAULT_TOLERANCE) -> RatioPair:
    """
    Reduction inequality R(pivot, k-1) <= R(pivot, k-2).

    Proven for k in {2, 3, d}; at other k the outcome is recorded as a finding.
    """
    _require_square(family, "check_reduction")
    d = family.dim
    if not 2 <= k <= d:
        raise ValueError(f"Need 2 <= k <= d = {d}, got k={k}")
    r_hi = ratio_R(family, pivot, k - 1)
    r_lo = ratio_R(family, pivot, k - 2)
    feasible = r_hi - r_lo <= tolerance * max(1.0, r_lo)
    if not feasible:
        proven = k in (2, 3, d)
        logger.warning("Reduction infeasible at k=%d, d=%d, pivot=%d: R_hi=%r > R_lo=%r%s",
                       k, d, pivot, r_hi, r_lo, " (proven case)" if proven else " (open case)")
    return RatioPair(pivot, k - 1, k - 2, r_hi, r_lo, feasible, tolerance)


def check_variant(family: VectorFamily, pivot: int = 0, tolerance: float = DEFAULT_TOLERANCE) -> InequalityResult:
    """Variant reduction R(pivot, d-2) <= R(pivot, 1), valid in every dimension d >= 3."""
    _require_square(family, "check_variant")
    d = family.dim
    if d < 3:
        raise ValueError(f"Need d >= 3, got d={d}")
    lhs = ratio_R(family, pivot, d - 2)
    rhs = ratio_R(family, pivot, 1)
    return InequalityResult('reduction_variant', lhs, rhs, rhs - lhs, tolerance, flags={'pivot': pivot})


def check_claim(family: VectorFamily, tolerance: float = DEFAULT_TOLERANCE) -> InequalityResult:
    """
    sum_{j>=1} |u_0 ^ ... ^ (u_j omitted) ^ ... ^ u_{d-1}| ||u_j|| >= |u_1 ^ ... ^ u_{d-1}| ||u_0||.
    """
    _require_square(family, "check_claim")
    d = family.dim
    if d < 2:
        raise ValueError(f"Need d >= 2, got d={d}")
    matrix = gram(family)
    rows = np.array([[i for i in range(d) if i != j] for j in range(d)])
    omitted = wedge_volumes(matrix, rows, d)
    norms = family.norms()
    rhs = math.fsum(omitted[1:] * norms[1:])
    lhs = float(omitted[0] * norms[0])
    return InequalityResult('claim', lhs, rhs, rhs - lhs, tolerance)


def check_hadamard(family: VectorFamily, subset: SubsetLike) -> InequalityResult:
    """Hadamard bound |v_S| <= prod_{i in S} ||v_i||."""
    subset = as_subset(subset)
    volume = wedge_volume(family, subset)
    bound = float(np.prod(family.norms()[list(subset.indices)]))
    return InequalityResult('hadamard', volume, bound, bound - volume,
                            tolerance=1e-12 * max(bound, np.finfo(float).tiny))


def _simplex_edges(vertices: np.ndarray) -> VectorFamily:
    return VectorFamily(vertices[1:] - vertices[0])


def _validate_simplex(vertices, point):
    vertices = np.asarray(vertices, dtype=float)
    point = np.asarray(point, dtype=float).ravel()
    if vertices.ndim != 2 or vertices.shape[0] < 2 or vertices.shape[1] != vertices.shape[0] - 1:
        raise DegenerateSimplex(f"Need d vertices in R^(d-1), got shape {vertices.shape}")
    if point.shape != (vertices.shape[1],):
        raise ValueError(f"Point must have {vertices.shape[1]} coordinates")
    edges = _simplex_edges(vertices)
    volume = abs(float(np.linalg.det(edges.vectors)))
    scale = float(np.prod(edges.norms()))
    if volume <= 1e-12 * scale or volume == 0.0:
        raise DegenerateSimplex("Simplex vertices are affinely dependent")
    return vertices, point, volume


def barycentric_by_volumes(vertices: Sequence[Sequence[float]], point: Sequence[float]) -> np.ndarray:
    """
    Barycentric coordinates as ratios of sub-simplex volumes.

    beta_j = |wedge of (v_i - u), i != j| / |wedge of (v_i - v_0), i >= 1|; valid
    for points of the closed simplex. The d-1 vectors of each wedge span
    R^(d-1), so its volume is an absolute determinant.
    """
    vertices, point, volume = _validate_simplex(vertices, point)
    d = vertices.shape[0]
    rows = np.array([[i for i in range(d) if i != j] for j in range(d)])
    return np.abs(np.linalg.det((vertices - point)[rows])) / volume


def barycentric_coordinates(vertices: Sequence[Sequence[float]], point: Sequence[float],
                            cross_check: bool = True) -> np.ndarray:
    """
    Barycentric coordinates of a point with respect to a (d-1)-simplex.

    Args:
        vertices: d points in R^(d-1)
        point: point in R^(d-1)
        cross_check (bool): compare against the volume formula for interior points

    Returns:
        ndarray beta with sum(beta) = 1 and sum(beta_j v_j) = point

    Raises:
        DegenerateSimplex: if the vertices are affinely dependent
    """
    vertices, point, _ = _validate_simplex(vertices, point)
    d = vertices.shape[0]
    system = np.vstack([vertices.T, np.ones(d)])
    rhs = np.append(point, 1.0)
    beta = scipy.linalg.solve(system, rhs)

    if cross_check and np.all(beta >= 0.0):
        by_volumes = barycentric_by_volumes(vertices, point)
        if not np.allclose(beta, by_volumes, rtol=1e-8, atol=1e-10):
            logger.warning("Barycentric volume formula disagrees: %s vs %s", beta.tolist(), by_volumes.tolist())
    return beta


def nonsharp_constant(d: int, k: int) -> float:
    """
    Constant 2(d-k+1)/(d-k+2) of the non-sharp p = 1 inequality.

    Strictly between 1 and 2 for 3 <= k < d; exactly 1 at k = d.
    """
    return 2.0 * (d - k + 1) / (d - k + 2)


def check_nonsharp(family: VectorFamily, k: int, tolerance: float = DEFAULT_TOLERANCE,
                   cap: int = DEFAULT_CAP) -> InequalityResult:
    """
    Non-sharp p = 1 step M_{k,1} / M_{k-1,1} <= 2(d-k+1)/(d-k+2).

    At k = d the bound is 1 and the check is the proven p = 1 step
    M_{d,1} <= M_{d-1,1} of the Maclaurin chain.

    Returns:
        InequalityResult with lhs = ratio, rhs = bound, margin = bound - ratio
    """
    _require_square(family, "check_nonsharp")
    d = family.dim
    if not 2 < k <= d:
        raise ValueError(f"Need 2 < k <= d = {d}, got k={k}")
    upper = s_k_p(family, k, P_ONE, cap=cap).mean
    lower = s_k_p(family, k - 1, P_ONE, cap=cap).mean
    if lower == 0.0:
        raise ZeroDenominator(f"M_{{{k - 1},1}} vanishes")
    ratio = upper / lower
    bound = nonsharp_constant(d, k)
    return InequalityResult('nonsharp', ratio, bound, bound - ratio, tolerance, flags={'k': k})
