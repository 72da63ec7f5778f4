"""
Zonotopes generated by finite families of segments.

A zonotope Z = sum_i w_i [-v_i, v_i] has support function
h_Z(u) = sum_i w_i |<u, v_i>| and intrinsic volumes

    V_k(Z) = sum_{|S|=k} (prod_{i in S} 2 w_i) |v_S|

so with the default weights 1/2 the intrinsic volumes are the p = 1 symmetric
wedge sums of the generators.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .exceptions import NonUnitDirection, ZeroDenominator
from .inequalities import DEFAULT_TOLERANCE, InequalityResult, nonsharp_constant
from .linalg import VectorFamily, gram, wedge_volumes
from .symmetric_sums import DEFAULT_CAP, PowerExponent, s_k_p, subset_chunks

logger = logging.getLogger(__name__)

DEFAULT_WEIGHT = 0.5
UNIT_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class Zonotope:
    """
    Minkowski sum of the segments w_i [-v_i, v_i].

    Args:
        generators (VectorFamily): the segment directions v_i
        weights: positive per-generator weights, 1/2 each when omitted
    """
    generators: VectorFamily
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if not isinstance(self.generators, VectorFamily):
            object.__setattr__(self, 'generators', VectorFamily(self.generators))
        if self.weights is None:
            weights = np.full(self.generators.count, DEFAULT_WEIGHT)
        else:
            weights = np.array(self.weights, dtype=float).ravel()
        if weights.shape != (self.generators.count,):
            raise ValueError(f"Need {self.generators.count} weights, got {weights.size}")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise ValueError("Zonotope weights must be finite and positive")
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)

    @property
    def dim(self) -> int:
        return self.generators.dim

    @property
    def count(self) -> int:
        return self.generators.count

    def segment_family(self) -> VectorFamily:
        """Generators rescaled by 2 w_i, i.e. the full segment lengths."""
        return VectorFamily(self.generators.vectors * (2.0 * self.weights)[:, None])


@dataclass(frozen=True)
class IntrinsicVolumeVector:
    """Intrinsic volumes V_0..V_{k_max} of a zonotope, V_0 = 1."""
    values: tuple

    @property
    def k_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k: int) -> float:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'k': range(len(self.values)), 'intrinsic_volume': list(self.values)})


@dataclass
class McMullenResult:
    """Strong (conditional) and weak (proven) log-concavity checks at index j."""
    j: int
    strong: InequalityResult
    weak: InequalityResult
    flags: Dict[str, object] = field(default_factory=dict)


def _unit_direction(u: Sequence[float], dim: int) -> np.ndarray:
    u = np.asarray(u, dtype=float).ravel()
    if u.shape != (dim,):
        raise ValueError(f"Direction must have {dim} coordinates, got {u.size}")
    norm = float(np.linalg.norm(u))
    if not math.isfinite(norm) or abs(norm - 1.0) > UNIT_TOLERANCE:
        raise NonUnitDirection(f"Direction must be a unit vector, got norm {norm!r}")
    return u


def support_function(z: Zonotope, u: Sequence[float]) -> float:
    """
    Support function h_Z(u) = sum_i w_i |<u, v_i>|.

    Args:
        z (Zonotope): the zonotope
        u: direction in R^d (any length)

    Returns:
        float
    """
    u = np.asarray(u, dtype=float).ravel()
    if u.shape != (z.dim,):
        raise ValueError(f"Direction must have {z.dim} coordinates, got {u.size}")
    return math.fsum(z.weights * np.abs(z.generators.vectors @ u))


def intrinsic_volume(z: Zonotope, k: int, cap: int = DEFAULT_CAP, threads: int = 1) -> float:
    """
    k-th intrinsic volume of a zonotope.

    Args:
        z (Zonotope): the zonotope
        k (int): 0 <= k <= d
        cap (int): maximum number of generator subsets to enumerate

    Returns:
        V_k(Z); V_0 = 1
    """
    if not 0 <= k <= z.dim:
        raise ValueError(f"Need 0 <= k <= d = {z.dim}, got k={k}")
    if k == 0:
        return 1.0
    if k > z.count:
        return 0.0
    return s_k_p(z.segment_family(), k, PowerExponent.finite(1.0), cap=cap, threads=threads).raw_sum


def intrinsic_volumes(z: Zonotope, k_max: Optional[int] = None, cap: int = DEFAULT_CAP,
                      threads: int = 1) -> IntrinsicVolumeVector:
    """Intrinsic volumes V_0..V_{k_max}; k_max defaults to d."""
    k_max = z.dim if k_max is None else int(k_max)
    if not 0 <= k_max <= z.dim:
        raise ValueError(f"Need 0 <= k_max <= d = {z.dim}, got {k_max}")
    return IntrinsicVolumeVector(tuple(intrinsic_volume(z, k, cap, threads) for k in range(k_max + 1)))


def project_generators(z: Zonotope, u: Sequence[float]) -> Zonotope:
    """
    Orthogonal projection of a zonotope onto the hyperplane u^perp.

    The projected zonotope keeps the ambient dimension d and the weights.

    Raises:
        NonUnitDirection: if ||u|| differs from 1 by more than 1e-12
    """
    u = _unit_direction(u, z.dim)
    vectors = z.generators.vectors
    projected = vectors - np.outer(vectors @ u, u)
    return Zonotope(VectorFamily(projected), z.weights)


def projected_intrinsic_volume(z: Zonotope, u: Sequence[float], k: int, cap: int = DEFAULT_CAP) -> float:
    """
    V_k of the projection onto u^perp, computed as sum_S (prod 2 w) |v_S ^ u|.

    Args:
        z (Zonotope): the zonotope
        u: unit direction
        k (int): 0 <= k <= d-1

    Returns:
        float
    """
    u = _unit_direction(u, z.dim)
    if not 0 <= k <= z.dim - 1:
        raise ValueError(f"Need 0 <= k <= d-1 = {z.dim - 1}, got k={k}")
    if k == 0:
        return 1.0
    if k > z.count:
        return 0.0

    augmented = z.segment_family().append(u)
    matrix = gram(augmented)
    direction_index = z.count
    partials = []
    for rows in subset_chunks(z.count, k, cap=cap):
        with_u = np.hstack([rows, np.full((rows.shape[0], 1), direction_index)])
        partials.append(math.fsum(wedge_volumes(matrix, with_u, z.dim)))
    return math.fsum(partials)


def _projection_ratio(z: Zonotope, u: np.ndarray, j: int, cap: int) -> float:
    full = intrinsic_volume(z, j, cap)
    if full == 0.0:
        raise ZeroDenominator(f"V_{j}(Z) vanishes")
    return projected_intrinsic_volume(z, u, j, cap) / full


def check_projection_inequality(z: Zonotope, u: Sequence[float], k: int, sharp: bool = False,
                                tolerance: float = DEFAULT_TOLERANCE, cap: int = DEFAULT_CAP) -> InequalityResult:
    """
    Compare the projection ratios V_{k-1}(pi Z)/V_{k-1}(Z) and V_{k-2}(pi Z)/V_{k-2}(Z).

    The sharp form (factor 1) is a probe; the constant form with factor
    2(d-k+1)/(d-k+2) is a theorem for 3 <= k <= d.

    Returns:
        InequalityResult with lhs = upper ratio, rhs = factor * lower ratio
    """
    u = _unit_direction(u, z.dim)
    d = z.dim
    if sharp:
        if not 2 <= k <= d:
            raise ValueError(f"Sharp form needs 2 <= k <= d = {d}, got k={k}")
        factor = 1.0
    else:
        if not 3 <= k <= d:
            raise ValueError(f"Constant form needs 3 <= k <= d = {d}, got k={k}")
        factor = nonsharp_constant(d, k)

    upper = _projection_ratio(z, u, k - 1, cap)
    lower = _projection_ratio(z, u, k - 2, cap)
    rhs = factor * lower
    result = InequalityResult('projection_sharp' if sharp else 'projection', upper, rhs, rhs - upper,
                              tolerance, flags={'k': k, 'factor': factor, 'probe': sharp})
    if not result.holds:
        if sharp:
            logger.warning("Sharp projection probe failed: k=%d, d=%d, margin %.3e", k, d, result.margin)
        else:
            logger.error("Projection inequality with constant %.6g failed: k=%d, d=%d, margin %.3e",
                         factor, k, d, result.margin)
    return result


def mcmullen_factors(j: int, m: int) -> tuple:
    """Strong factor (j+1)(m-j+1)/(j(m-j)) and weak factor (j+1)/j."""
    return (j + 1) * (m - j + 1) / (j * (m - j)), (j + 1) / j


def check_mcmullen_zonotope(z: Zonotope, j: int, tolerance: float = DEFAULT_TOLERANCE,
                            cap: int = DEFAULT_CAP) -> McMullenResult:
    """
    Log-concavity of intrinsic volumes, V_j^2 >= factor V_{j+1} V_{j-1}.

    Margins are relative, 1 - factor V_{j+1} V_{j-1} / V_j^2, and 0 when V_j = 0.
    The strong factor depends on the number of generators and is conditional;
    the weak factor (j+1)/j always holds.
    """
    d, m = z.dim, z.count
    if not 1 <= j <= d - 1 or m <= j:
        raise ValueError(f"Need 1 <= j <= d-1 and m > j, got j={j}, d={d}, m={m}")
    lower = intrinsic_volume(z, j - 1, cap)
    middle = intrinsic_volume(z, j, cap)
    upper = intrinsic_volume(z, j + 1, cap)
    strong_factor, weak_factor = mcmullen_factors(j, m)

    results: List[InequalityResult] = []
    for name, factor in (('mcmullen_strong', strong_factor), ('mcmullen_weak', weak_factor)):
        product = factor * upper * lower
        square = middle ** 2
        margin = 0.0 if middle == 0.0 else 1.0 - product / square
        results.append(InequalityResult(name, product, square, margin, tolerance, flags={'j': j, 'factor': factor}))

    strong, weak = results
    if not strong.holds:
        logger.warning("Strong log-concavity probe failed: j=%d, m=%d, margin %.3e", j, m, strong.margin)
    if not weak.holds:
        logger.error("Weak log-concavity failed: j=%d, m=%d, margin %.3e", j, m, weak.margin)
    return McMullenResult(j, strong, weak)


def check_intrinsic_maclaurin(z: Zonotope, k: int, tolerance: float = DEFAULT_TOLERANCE,
                              cap: int = DEFAULT_CAP) -> InequalityResult:
    """
    Ratio form (V_k/C(m,k))^(1/k) <= (V_{k-1}/C(m,k-1))^(1/(k-1)).

    Proven for m = d and k in {2, 3, d}; other cases are probes.
    """
    d, m = z.dim, z.count
    if not 2 <= k <= min(d, m):
        raise ValueError(f"Need 2 <= k <= min(d, m), got k={k}, d={d}, m={m}")
    lhs = (intrinsic_volume(z, k, cap) / math.comb(m, k)) ** (1.0 / k)
    rhs = (intrinsic_volume(z, k - 1, cap) / math.comb(m, k - 1)) ** (1.0 / (k - 1))
    proven = m == d and k in (2, 3, d)
    result = InequalityResult('intrinsic_maclaurin', lhs, rhs, rhs - lhs, tolerance,
                              flags={'k': k, 'proven': proven})
    if not result.holds:
        logger.warning("Intrinsic-volume Maclaurin step failed: k=%d, d=%d, m=%d, margin %.3e",
                       k, d, m, result.margin)
    return result
