"""
Seeded random families, violation search and monotone orthogonalization.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .exceptions import (
    BadShape, InfeasibleInterval, InfeasibleTarget, SandwichViolation, VectorMaclaurinError,
)
from .inequalities import check_vector_newton, ratio_R
from .linalg import VectorFamily, orthogonal_complement_direction
from .symmetric_sums import FINITE, PowerExponent, s_k_p
from .zonotope import Zonotope, check_projection_inequality

logger = logging.getLogger(__name__)

GAUSSIAN = 'gaussian'
UNIFORM_CUBE = 'uniform_cube'
NEAR_ORTHONORMAL = 'near_orthonormal'
DISTRIBUTIONS = (GAUSSIAN, UNIFORM_CUBE, NEAR_ORTHONORMAL)

TARGET_KINDS = ('maclaurin', 'newton', 'reduction', 'projection_sharp')

SANDWICH_TOLERANCE = 1e-10
CHAIN_TOLERANCE = 1e-9

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]


def _normalize_distribution(name: str) -> str:
    key = str(name).strip().lower().replace('-', '_')
    if key not in DISTRIBUTIONS:
        raise ValueError(f"Unknown distribution '{name}', expected one of {DISTRIBUTIONS}")
    return key


@dataclass(frozen=True)
class SearchTarget:
    """
    Quantity whose margin the search tries to drive below zero.

    kind is one of maclaurin (needs p), newton, reduction or projection_sharp.
    """
    kind: str
    k: int
    p: Optional[PowerExponent] = None

    def __post_init__(self):
        if self.kind not in TARGET_KINDS:
            raise ValueError(f"Unknown target kind '{self.kind}', expected one of {TARGET_KINDS}")
        if self.kind == 'maclaurin':
            if self.p is None:
                raise ValueError("Maclaurin target needs an exponent p")
            object.__setattr__(self, 'p', PowerExponent.parse(self.p, allow_negative=True))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SearchTarget':
        return cls(str(data['kind']), int(data['k']), data.get('p'))

    def check_shape(self, m: int, d: int) -> None:
        """
        Raises:
            InfeasibleTarget: when (m, d, k) cannot satisfy the target's preconditions
        """
        k = self.k
        if self.kind == 'maclaurin':
            ok = 2 <= k <= d <= m
        elif self.kind == 'newton':
            ok = 2 <= k <= d - 1 and m >= d
        elif self.kind == 'reduction':
            ok = m == d and 2 <= k <= d
        else:
            ok = m >= k and 2 <= k <= d
        if not ok:
            raise InfeasibleTarget(f"Target {self} is infeasible for m={m}, d={d}")

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'k': self.k, 'p': None if self.p is None else str(self.p)}

    def __str__(self) -> str:
        if self.kind == 'maclaurin':
            return f"maclaurin(k={self.k}, p={self.p})"
        return f"{self.kind}(k={self.k})"


@dataclass
class SearchConfig:
    """
    Settings for violation_search.

    Args:
        dims: (m, d) shapes to search
        restarts (int): restarts per shape
        steps (int): perturbation steps per restart
        perturbation_scale (float): initial gaussian step size
        seed (int): root seed; restart substreams are spawned from it
        distribution (str): gaussian, uniform_cube or near_orthonormal
    """
    dims: List[Tuple[int, int]] = field(default_factory=lambda: [(3, 3)])
    restarts: int = 100
    steps: int = 400
    perturbation_scale: float = 0.25
    seed: int = 20240613
    distribution: str = GAUSSIAN
    epsilon: float = 0.1
    patience: int = 20
    min_step_ratio: float = 1e-8
    threads: int = 1

    def __post_init__(self):
        self.dims = [(int(m), int(d)) for m, d in self.dims]
        self.distribution = _normalize_distribution(self.distribution)
        if not self.dims:
            raise ValueError("Search needs at least one (m, d) shape")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if not self.perturbation_scale > 0:
            raise ValueError(f"perturbation_scale must be positive, got {self.perturbation_scale}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], seed: Optional[int] = None,
                  threads: Optional[int] = None) -> 'SearchConfig':
        """Build a config from the 'search' section of the YAML configuration."""
        known = {name: data[name] for name in cls.__dataclass_fields__ if name in data}
        if seed is not None:
            known['seed'] = seed
        if threads is not None:
            known['threads'] = threads
        return cls(**known)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dims': [list(shape) for shape in self.dims],
            'restarts': self.restarts,
            'steps': self.steps,
            'perturbation_scale': self.perturbation_scale,
            'seed': self.seed,
            'distribution': self.distribution,
            'epsilon': self.epsilon,
            'patience': self.patience,
            'min_step_ratio': self.min_step_ratio,
        }


@dataclass(frozen=True)
class RestartRecord:
    m: int
    d: int
    restart: int
    start_margin: float
    best_margin: float
    evaluations: int
    final_step: float


@dataclass
class SearchResult:
    """
    Outcome of a violation search; a negative best_margin is a violation.

    The witness is stored after normalization, so evaluating target_margin on
    it reproduces best_margin.
    """
    target: SearchTarget
    best_margin: float
    witness: Optional[VectorFamily]
    seed: int
    trace: List[RestartRecord]
    evaluations: int

    @property
    def violated(self) -> bool:
        return self.best_margin < 0

    def trace_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(record) for record in self.trace])


def random_family(m: int, d: int, distribution: str = GAUSSIAN, seed: SeedLike = None,
                  epsilon: float = 0.1) -> VectorFamily:
    """
    Draw a random family of m vectors in R^d.

    Args:
        m (int): number of vectors, m >= d
        d (int): dimension, d >= 1
        distribution (str): gaussian, uniform_cube or near_orthonormal (needs m = d)
        seed: integer seed, SeedSequence or Generator
        epsilon (float): perturbation size for near_orthonormal

    Returns:
        VectorFamily

    Raises:
        BadShape: if the shape is not supported
    """
    distribution = _normalize_distribution(distribution)
    if d < 1 or m < d:
        raise BadShape(f"Need m >= d >= 1, got m={m}, d={d}")
    rng = np.random.default_rng(seed)
    if distribution == GAUSSIAN:
        return VectorFamily(rng.standard_normal((m, d)))
    if distribution == UNIFORM_CUBE:
        return VectorFamily(rng.uniform(-1.0, 1.0, size=(m, d)))
    if m != d:
        raise BadShape(f"near_orthonormal needs m = d, got m={m}, d={d}")
    basis = np.eye(d)
    if epsilon == 0:
        return VectorFamily(basis)
    return VectorFamily(basis + epsilon * rng.standard_normal((d, d)))


def normalize_family(family: VectorFamily) -> Optional[VectorFamily]:
    """Rescale so that the squared norms sum to m; None for the zero family."""
    total = float(np.einsum('ij,ij->', family.vectors, family.vectors))
    if not math.isfinite(total) or total == 0.0:
        return None
    factor = math.sqrt(family.count / total)
    if factor == 1.0:
        return family
    return family.scaled(factor)


def target_margin(family: VectorFamily, target: SearchTarget) -> float:
    """
    Margin of the target on a family; +inf when the sample is infeasible.

    A sample is infeasible when a domain error is raised or, for negative p,
    when some wedge volume vanishes.
    """
    try:
        if target.kind == 'maclaurin':
            below = s_k_p(family, target.k - 1, target.p)
            above = s_k_p(family, target.k, target.p)
            if target.p.tag == FINITE and target.p.p < 0 and (below.zero_count or above.zero_count):
                return math.inf
            return below.mean - above.mean
        if target.kind == 'newton':
            return check_vector_newton(family, target.k).margin
        if target.kind == 'reduction':
            return ratio_R(family, 0, target.k - 2) - ratio_R(family, 0, target.k - 1)
        direction = family.vectors[-1]
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            return math.inf
        zonotope = Zonotope(family.without(family.count - 1))
        return check_projection_inequality(zonotope, direction / norm, target.k, sharp=True).margin
    except (VectorMaclaurinError, ValueError, FloatingPointError, OverflowError, ZeroDivisionError) as e:
        logger.debug("Rejected sample for %s: %s", target, e)
        return math.inf


class ViolationSearcher:
    """
    Randomized local search for families with a negative target margin.

    Each restart draws a family and repeatedly perturbs every coordinate with
    gaussian noise, keeping the candidate when the margin does not increase.
    The step is halved after `patience` consecutive rejections and the restart
    stops once the step falls below min_step_ratio * perturbation_scale.
    """

    def __init__(self, config: SearchConfig):
        self.config = config

    def _evaluate(self, family: VectorFamily, target: SearchTarget) -> Tuple[float, Optional[VectorFamily]]:
        normalized = normalize_family(family)
        if normalized is None:
            return math.inf, None
        return target_margin(normalized, target), normalized

    def _restart(self, target: SearchTarget, m: int, d: int, restart: int,
                 stream: np.random.SeedSequence) -> Tuple[RestartRecord, Optional[VectorFamily]]:
        cfg = self.config
        rng = np.random.default_rng(stream)
        start = random_family(m, d, cfg.distribution, rng, cfg.epsilon)
        best_margin, best_family = self._evaluate(start, target)
        start_margin = best_margin
        current = best_family.vectors if best_family is not None else start.vectors
        evaluations = 1
        step = cfg.perturbation_scale
        rejections = 0
        floor = cfg.min_step_ratio * cfg.perturbation_scale

        for _ in range(cfg.steps):
            candidate = VectorFamily(current + rng.normal(0.0, step, size=current.shape))
            margin, normalized = self._evaluate(candidate, target)
            evaluations += 1
            if normalized is not None and margin <= best_margin:
                best_margin, best_family = margin, normalized
                current = normalized.vectors
                rejections = 0
            else:
                rejections += 1
                if rejections >= cfg.patience:
                    step /= 2.0
                    rejections = 0
                    if step < floor:
                        break

        logger.debug("Restart %d on (m=%d, d=%d): margin %.6g -> %.6g in %d evaluations",
                     restart, m, d, start_margin, best_margin, evaluations)
        record = RestartRecord(m, d, restart, start_margin, best_margin, evaluations, step)
        return record, best_family

    def run(self, target: SearchTarget) -> SearchResult:
        """
        Search every configured shape for the smallest target margin.

        Raises:
            InfeasibleTarget: if the target does not fit some configured shape
        """
        cfg = self.config
        for m, d in cfg.dims:
            target.check_shape(m, d)

        jobs = [(m, d, restart) for m, d in cfg.dims for restart in range(cfg.restarts)]
        streams = np.random.SeedSequence(cfg.seed).spawn(len(jobs))
        logger.info("Searching %s over %d restarts (seed %d)", target, len(jobs), cfg.seed)

        def run_job(index: int):
            m, d, restart = jobs[index]
            return self._restart(target, m, d, restart, streams[index])

        if cfg.threads <= 1:
            outcomes = [run_job(i) for i in range(len(jobs))]
        else:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                outcomes = list(pool.map(run_job, range(len(jobs))))

        best_margin, witness = math.inf, None
        for record, family in outcomes:
            if family is not None and record.best_margin < best_margin:
                best_margin, witness = record.best_margin, family
        trace = [record for record, _ in outcomes]
        evaluations = sum(record.evaluations for record in trace)

        if best_margin < 0:
            logger.warning("Violation of %s found: margin %.6g", target, best_margin)
        else:
            logger.info("No violation of %s found: best margin %.6g", target, best_margin)
        return SearchResult(target, best_margin, witness, cfg.seed, trace, evaluations)


def violation_search(config: SearchConfig, target: SearchTarget) -> SearchResult:
    """Run a ViolationSearcher for a single target."""
    return ViolationSearcher(config).run(target)


def _sum_p1(family: VectorFamily, k: int) -> float:
    return s_k_p(family, k, PowerExponent.finite(1.0)).raw_sum


def construct_orthogonal_replacement(family: VectorFamily, pivot: int, k: int,
                                     tolerance: float = SANDWICH_TOLERANCE
                                     ) -> Tuple[VectorFamily, Tuple[float, float]]:
    """
    Replace family[pivot] by a vector orthogonal to the others.

    The new norm is the midpoint of [R(pivot, k-1), R(pivot, k-2)], which keeps
    S_k from decreasing and S_{k-1} from increasing.

    Args:
        family (VectorFamily): d vectors in R^d
        pivot (int): index of the vector to replace
        k (int): 2 <= k <= d
        tolerance (float): relative slack for the interval and sandwich checks

    Returns:
        (new_family, (lo, hi))

    Raises:
        InfeasibleInterval: when lo > hi beyond tolerance
        DegenerateSpan: when the other vectors are linearly dependent
        SandwichViolation: when the replacement breaks either inequality
    """
    d = family.dim
    if family.count != d:
        raise ValueError(f"Need m = d, got m={family.count}, d={d}")
    if not 2 <= k <= d:
        raise ValueError(f"Need 2 <= k <= d = {d}, got k={k}")
    direction = orthogonal_complement_direction(family.without(pivot))
    lo = ratio_R(family, pivot, k - 1)
    hi = ratio_R(family, pivot, k - 2)
    if lo > hi + tolerance * max(1.0, hi):
        raise InfeasibleInterval(lo, hi)

    replaced = family.replace(pivot, 0.5 * (lo + hi) * direction)

    upper_before, upper_after = _sum_p1(family, k), _sum_p1(replaced, k)
    lower_before, lower_after = _sum_p1(family, k - 1), _sum_p1(replaced, k - 1)
    if upper_after < upper_before - tolerance * max(1.0, upper_before):
        raise SandwichViolation(f"S_{k} decreased from {upper_before!r} to {upper_after!r} at pivot {pivot}")
    if lower_after > lower_before + tolerance * max(1.0, lower_before):
        raise SandwichViolation(f"S_{k - 1} increased from {lower_before!r} to {lower_after!r} at pivot {pivot}")
    return replaced, (lo, hi)


def monotone_orthogonalize(family: VectorFamily, k: int, tolerance: float = SANDWICH_TOLERANCE,
                           chain_tolerance: float = CHAIN_TOLERANCE) -> VectorFamily:
    """
    Orthogonalize a family one vector at a time without lowering M_{k,1}
    or raising M_{k-1,1}.

    Success is guaranteed for k in {2, 3, d}; an infeasible step at another k
    is logged as a finding and re-raised with its step index.

    Raises:
        InfeasibleInterval: with .step set to the failing pivot
        SandwichViolation: if the final family breaks the mean inequalities
    """
    d = family.dim
    current = family
    for pivot in range(d):
        try:
            current, (lo, hi) = construct_orthogonal_replacement(current, pivot, k, tolerance)
        except InfeasibleInterval as e:
            if k not in (2, 3, d):
                logger.warning("Orthogonalization infeasible at step %d for k=%d, d=%d: [%r, %r]",
                               pivot, k, d, e.lo, e.hi)
            raise InfeasibleInterval(e.lo, e.hi, step=pivot) from e
        logger.debug("Step %d: replacement norm in [%r, %r]", pivot, lo, hi)

    p_one = PowerExponent.finite(1.0)
    upper_before = s_k_p(family, k, p_one).mean
    upper_after = s_k_p(current, k, p_one).mean
    lower_before = s_k_p(family, k - 1, p_one).mean
    lower_after = s_k_p(current, k - 1, p_one).mean
    if upper_after < upper_before * (1.0 - chain_tolerance):
        raise SandwichViolation(f"M_{k},1 decreased from {upper_before!r} to {upper_after!r}")
    if lower_after > lower_before * (1.0 + chain_tolerance):
        raise SandwichViolation(f"M_{k - 1},1 increased from {lower_before!r} to {lower_after!r}")
    return current
