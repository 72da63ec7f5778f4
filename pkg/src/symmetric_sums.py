"""
Symmetric wedge sums S_k and the power means M_{k,p}.

For a family v_1..v_m and 1 <= k <= m,

    M_{k,p} = ( sum_{|S|=k} |v_S|^p / C(m,k) )^(1/(k p))

with the geometric-mean form at p = 0 and the max form at p = inf. Subsets are
visited in lexicographic order in fixed-size chunks; each chunk is reduced with
exactly rounded summation, then chunk partials are combined in chunk order, so
the result does not depend on how many threads evaluated the chunks.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional

import numpy as np

from .exceptions import CapExceeded
from .linalg import (
    EIGEN_CLAMP, SubsetIndex, VectorFamily, elementary_symmetric, gram, spectrum, wedge_volumes,
)

logger = logging.getLogger(__name__)

DEFAULT_CAP = 10 ** 8
DEFAULT_CHUNK_SIZE = 4096

ZERO = 'zero'
FINITE = 'finite'
INFINITY = 'infinity'


@dataclass(frozen=True)
class PowerExponent:
    """
    Exponent p of a power mean: zero, a finite positive real, or infinity.

    Negative finite exponents are only accepted with probe=True; they are used
    by the violation search to probe the range where the chain fails.
    """
    tag: str
    p: Optional[float] = None
    probe: bool = False

    def __post_init__(self):
        if self.tag not in (ZERO, FINITE, INFINITY):
            raise ValueError(f"Unknown exponent tag: {self.tag}")
        if self.tag == FINITE:
            if self.p is None or not math.isfinite(self.p) or self.p == 0:
                raise ValueError(f"Finite exponent needs a nonzero finite p, got {self.p}")
            if self.p < 0 and not self.probe:
                raise ValueError(f"Negative exponent p={self.p} is only allowed in probe mode")
            object.__setattr__(self, 'p', float(self.p))

    @classmethod
    def zero(cls) -> 'PowerExponent':
        return cls(ZERO)

    @classmethod
    def infinity(cls) -> 'PowerExponent':
        return cls(INFINITY)

    @classmethod
    def finite(cls, p: float, probe: bool = False) -> 'PowerExponent':
        return cls(FINITE, p, probe)

    @classmethod
    def parse(cls, text, allow_negative: bool = False) -> 'PowerExponent':
        """
        Parse "0", "inf"/"infinity" or a decimal.

        Args:
            text: string or number
            allow_negative (bool): accept negative decimals as probe exponents

        Returns:
            PowerExponent
        """
        if isinstance(text, PowerExponent):
            return text
        token = str(text).strip().lower()
        if token in ('inf', 'infinity', '+inf', 'oo'):
            return cls.infinity()
        try:
            value = float(token)
        except ValueError as e:
            raise ValueError(f"Cannot parse exponent '{text}'") from e
        if math.isinf(value) and value > 0:
            return cls.infinity()
        if value == 0.0:
            return cls.zero()
        if value < 0 and not allow_negative:
            raise ValueError(f"Negative exponent {value} requires probe mode")
        return cls.finite(value, probe=value < 0)

    @property
    def is_zero(self) -> bool:
        return self.tag == ZERO

    @property
    def is_infinite(self) -> bool:
        return self.tag == INFINITY

    def __str__(self) -> str:
        if self.tag == ZERO:
            return '0'
        if self.tag == INFINITY:
            return 'inf'
        return repr(self.p)


@dataclass(frozen=True)
class SymmetricSumValue:
    """
    Value of the k-th symmetric wedge sum under exponent p.

    raw_sum is sum |v_S|^p for finite p, sum log|v_S| for p = 0 (-inf when a
    volume vanishes) and max |v_S| for p = inf.
    """
    k: int
    p: PowerExponent
    raw_sum: float
    mean: float
    count: int
    zero_count: int = 0
    above_dimension: bool = False
    flags: dict = field(default_factory=dict)


def _check_cap(m: int, k: int, cap: int) -> int:
    if not 0 <= k <= m:
        raise ValueError(f"Need 0 <= k <= m, got k={k}, m={m}")
    binomial = math.comb(m, k)
    if binomial > cap:
        raise CapExceeded(binomial, cap)
    return binomial


def enumerate_subsets(m: int, k: int, cap: int = DEFAULT_CAP) -> Iterator[SubsetIndex]:
    """
    All k-subsets of range(m) in lexicographic order.

    Raises:
        CapExceeded: if C(m, k) > cap (raised before anything is yielded)
    """
    _check_cap(m, k, cap)
    return (SubsetIndex(combo) for combo in itertools.combinations(range(m), k))


def subset_chunks(m: int, k: int, chunk_size: int = DEFAULT_CHUNK_SIZE,
                  cap: int = DEFAULT_CAP) -> Iterator[np.ndarray]:
    """Lexicographic k-subsets of range(m) as (n, k) integer arrays of at most chunk_size rows."""
    _check_cap(m, k, cap)
    if k == 0:
        return iter([np.zeros((1, 0), dtype=int)])

    def generate():
        combos = itertools.combinations(range(m), k)
        while True:
            block = list(itertools.islice(combos, chunk_size))
            if not block:
                return
            yield np.array(block, dtype=int)

    return generate()


def map_wedge_chunks(family: VectorFamily, k: int, reducer: Callable[[np.ndarray], object],
                     cap: int = DEFAULT_CAP, chunk_size: int = DEFAULT_CHUNK_SIZE,
                     threads: int = 1, clamp_tol: float = EIGEN_CLAMP) -> List[object]:
    """
    Apply reducer to the wedge volumes of every chunk of k-subsets.

    Chunk boundaries depend only on chunk_size; results come back in chunk order.

    Args:
        family (VectorFamily): the vector family
        k (int): subset size
        reducer: maps a 1-D array of wedge volumes to a partial result
        threads (int): worker threads (1 evaluates inline)

    Returns:
        List of partial results, one per chunk
    """
    matrix = gram(family)
    chunks = subset_chunks(family.count, k, chunk_size, cap)

    def evaluate(rows: np.ndarray):
        return reducer(wedge_volumes(matrix, rows, family.dim, clamp_tol))

    if threads <= 1:
        return [evaluate(rows) for rows in chunks]

    partials = []
    window = threads * 4
    with ThreadPoolExecutor(max_workers=threads) as pool:
        while True:
            batch = list(itertools.islice(chunks, window))
            if not batch:
                break
            partials.extend(pool.map(evaluate, batch))
    return partials


def _finite_partial(p: float):
    def reduce(volumes: np.ndarray):
        with np.errstate(divide='ignore'):
            powered = np.power(volumes, p)
        return math.fsum(powered), int(np.sum(volumes == 0.0))
    return reduce


def _log_partial(volumes: np.ndarray):
    positive = volumes[volumes > 0.0]
    return math.fsum(np.log(positive)), int(volumes.size - positive.size)


def _max_partial(volumes: np.ndarray):
    return float(np.max(volumes)) if volumes.size else 0.0


def s_k_p(family: VectorFamily, k: int, p: PowerExponent, cap: int = DEFAULT_CAP,
          threads: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE) -> SymmetricSumValue:
    """
    Symmetric wedge sum of order k and its power mean M_{k,p}.

    Args:
        family (VectorFamily): m vectors in R^d
        k (int): subset size, 1 <= k <= m
        p (PowerExponent): exponent tag
        cap (int): maximum number of subsets to enumerate
        threads (int): worker threads for chunk evaluation
        chunk_size (int): subsets per chunk

    Returns:
        SymmetricSumValue with raw_sum and mean
    """
    m, d = family.count, family.dim
    if not 1 <= k <= m:
        raise ValueError(f"Need 1 <= k <= m = {m}, got k={k}")
    p = PowerExponent.parse(p, allow_negative=True)
    count = _check_cap(m, k, cap)

    if k > d:
        logger.debug("k=%d exceeds dimension %d; all wedge volumes vanish", k, d)
        if p.tag == ZERO:
            raw = -math.inf
        elif p.tag == FINITE and p.p < 0:
            raw = math.inf
        else:
            raw = 0.0
        return SymmetricSumValue(k, p, raw, 0.0, count, zero_count=count, above_dimension=True)

    options = dict(cap=cap, chunk_size=chunk_size, threads=threads)
    if p.tag == FINITE:
        partials = map_wedge_chunks(family, k, _finite_partial(p.p), **options)
        raw = math.fsum(part[0] for part in partials)
        zeros = sum(part[1] for part in partials)
        if math.isinf(raw):
            mean = 0.0
        else:
            mean = (raw / count) ** (1.0 / (k * p.p)) if raw > 0 else 0.0
    elif p.tag == ZERO:
        partials = map_wedge_chunks(family, k, _log_partial, **options)
        zeros = sum(part[1] for part in partials)
        if zeros:
            raw, mean = -math.inf, 0.0
        else:
            raw = math.fsum(part[0] for part in partials)
            mean = math.exp(raw / (count * k))
    else:
        partials = map_wedge_chunks(family, k, _max_partial, **options)
        raw = max(partials)
        zeros = 0
        mean = raw ** (1.0 / k)

    return SymmetricSumValue(k, p, raw, mean, count, zero_count=zeros)


def s_k_2_eigen(family: VectorFamily, k: int) -> float:
    """
    Sum of squared k-wedge volumes via the Gram spectrum.

    The sum of principal k-minors of the Gram matrix equals e_k of its
    eigenvalues, so no subsets are enumerated.
    """
    if not 1 <= k <= family.count:
        raise ValueError(f"Need 1 <= k <= m = {family.count}, got k={k}")
    return elementary_symmetric(spectrum(gram(family)).values, k)


def mean_from_raw(raw_sum: float, count: int, k: int, p: PowerExponent) -> float:
    """Turn a raw symmetric sum into the normalized mean M_{k,p}."""
    if p.tag == FINITE:
        if raw_sum <= 0:
            return 0.0
        return (raw_sum / count) ** (1.0 / (k * p.p))
    if p.tag == ZERO:
        return 0.0 if raw_sum == -math.inf else math.exp(raw_sum / (count * k))
    return raw_sum ** (1.0 / k)
