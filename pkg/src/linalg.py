"""
Floating-point primitives for wedge volumes.

Every wedge volume |v_{i_1} ^ ... ^ v_{i_k}| is the square root of a principal
minor of the Gram matrix of the family. Principal minors are evaluated from the
symmetric eigendecomposition of the submatrix, so that tiny negative
eigenvalues caused by rounding can be clamped to zero in a controlled way.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
import scipy.linalg

from .exceptions import DegenerateGram, DegenerateSpan, InvalidFamily

logger = logging.getLogger(__name__)

EIGEN_CLAMP = 1e-9
LOG_SPACE_THRESHOLD = 20
SYMMETRY_TOLERANCE = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


def vector_norms(vectors: np.ndarray) -> np.ndarray:
    """Euclidean norms of the rows of a 2-D array."""
    vectors = np.asarray(vectors, dtype=float)
    return np.sqrt(np.einsum('ij,ij->i', vectors, vectors))


@dataclass(frozen=True, eq=False)
class VectorFamily:
    """
    Ordered list of m vectors in R^d.

    Args:
        vectors: array-like of shape (m, d); copied and made read-only
    """
    vectors: np.ndarray

    def __post_init__(self):
        try:
            array = np.array(self.vectors, dtype=float)
        except (TypeError, ValueError) as e:
            raise InvalidFamily(f"Vectors are not a rectangular numeric array: {e}") from e
        if array.ndim == 1 and array.size > 0:
            array = array.reshape(1, -1)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise InvalidFamily(f"Expected an (m, d) array with m, d >= 1, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise InvalidFamily("All coordinates must be finite")
        object.__setattr__(self, 'vectors', _frozen(array))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[float]]) -> 'VectorFamily':
        rows = [list(row) for row in rows]
        if rows and len({len(row) for row in rows}) != 1:
            raise InvalidFamily("Every vector must have the same number of coordinates")
        return cls(np.array(rows, dtype=float))

    @classmethod
    def orthonormal(cls, d: int) -> 'VectorFamily':
        return cls(np.eye(d))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    def norms(self) -> np.ndarray:
        return vector_norms(self.vectors)

    def select(self, indices: Sequence[int]) -> 'VectorFamily':
        return VectorFamily(self.vectors[list(indices)])

    def without(self, index: int) -> 'VectorFamily':
        return VectorFamily(np.delete(self.vectors, index, axis=0))

    def replace(self, index: int, vector: Sequence[float]) -> 'VectorFamily':
        array = np.array(self.vectors)
        array[index] = np.asarray(vector, dtype=float)
        return VectorFamily(array)

    def append(self, vector: Sequence[float]) -> 'VectorFamily':
        return VectorFamily(np.vstack([self.vectors, np.asarray(vector, dtype=float)]))

    def scaled(self, factor: float) -> 'VectorFamily':
        return VectorFamily(self.vectors * factor)

    def transformed(self, matrix: np.ndarray) -> 'VectorFamily':
        """Apply the linear map x -> matrix @ x to every vector."""
        return VectorFamily(self.vectors @ np.asarray(matrix, dtype=float).T)

    def to_list(self) -> list:
        return self.vectors.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorFamily):
            return NotImplemented
        return np.array_equal(self.vectors, other.vectors)

    def __hash__(self):
        return hash(self.vectors.tobytes())

    def __len__(self) -> int:
        return self.count


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Symmetric matrix of inner products <v_i, v_j>."""
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise InvalidFamily(f"Gram matrix must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise InvalidFamily("Gram matrix entries must be finite")
        scale = max(float(np.max(np.abs(entries))), 1.0)
        if np.max(np.abs(entries - entries.T)) > SYMMETRY_TOLERANCE * scale:
            raise InvalidFamily("Gram matrix is not symmetric")
        object.__setattr__(self, 'entries', _frozen((entries + entries.T) / 2.0))

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def submatrix(self, subset: Sequence[int]) -> np.ndarray:
        idx = np.asarray(subset, dtype=int)
        return self.entries[np.ix_(idx, idx)]

    def permuted(self, permutation: Sequence[int]) -> 'GramMatrix':
        return GramMatrix(self.submatrix(permutation))


@dataclass(frozen=True)
class SubsetIndex:
    """Strictly increasing tuple of 0-based indices into a family."""
    indices: tuple

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in indices):
            raise ValueError(f"Subset indices must be non-negative: {indices}")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError(f"Subset indices must be strictly increasing: {indices}")
        object.__setattr__(self, 'indices', indices)

    @classmethod
    def of(cls, indices: Iterable[int]) -> 'SubsetIndex':
        """Build a subset from indices in any order."""
        return cls(tuple(sorted(int(i) for i in indices)))

    @property
    def size(self) -> int:
        return len(self.indices)

    def check_range(self, m: int) -> None:
        if self.indices and self.indices[-1] >= m:
            raise ValueError(f"Subset {self.indices} out of range for family of {m} vectors")

    def __iter__(self):
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class EigenSpectrum:
    """Eigenvalues of a Gram matrix, sorted descending, after PSD clamping."""
    values: np.ndarray
    clamp_applied: bool = False

    @property
    def largest(self) -> float:
        return float(self.values[0]) if self.values.size else 0.0

    def rank(self, rel_tol: float = 1e-10) -> int:
        return int(np.sum(self.values > rel_tol * max(self.largest, 0.0)))


SubsetLike = Union[SubsetIndex, Sequence[int]]


def as_subset(subset: SubsetLike) -> SubsetIndex:
    if isinstance(subset, SubsetIndex):
        return subset
    return SubsetIndex.of(subset)


def gram(family: VectorFamily) -> GramMatrix:
    """
    Gram matrix of a vector family.

    Args:
        family (VectorFamily): m vectors in R^d

    Returns:
        GramMatrix with entry (i, j) = <v_i, v_j>
    """
    a = family.vectors
    entries = a @ a.T
    entries = (entries + entries.T) / 2.0
    # diagonal matches vector_norms bit for bit
    np.fill_diagonal(entries, np.einsum('ij,ij->i', a, a))
    return GramMatrix(entries)


def _clamp(values: np.ndarray, clamp_tol: float):
    """Clamp ascending eigenvalues that dip slightly below zero."""
    threshold = clamp_tol * max(float(values[-1]), 0.0)
    if values[0] < -threshold:
        raise DegenerateGram(float(values[0]), threshold)
    negative = values < 0.0
    return np.where(negative, 0.0, values), bool(np.any(negative))


def spectrum(matrix: Union[GramMatrix, np.ndarray], clamp_tol: float = EIGEN_CLAMP) -> EigenSpectrum:
    """
    Eigenvalues of a Gram matrix with PSD clamping.

    Raises:
        DegenerateGram: if an eigenvalue is below -clamp_tol * lambda_max
    """
    entries = matrix.entries if isinstance(matrix, GramMatrix) else np.asarray(matrix, dtype=float)
    values = scipy.linalg.eigvalsh(entries)
    clamped, applied = _clamp(values, clamp_tol)
    if applied:
        logger.debug("Clamped %d negative eigenvalue(s) to zero", int(np.sum(values < 0.0)))
    return EigenSpectrum(_frozen(clamped[::-1]), applied)


def principal_minors(matrix: Union[GramMatrix, np.ndarray], index_rows: np.ndarray,
                     clamp_tol: float = EIGEN_CLAMP,
                     log_threshold: int = LOG_SPACE_THRESHOLD) -> np.ndarray:
    """
    Determinants of the principal submatrices selected by each row of index_rows.

    Args:
        matrix: Gram matrix (or a symmetric PSD array)
        index_rows (ndarray): shape (n, k) integer array, one subset per row
        clamp_tol (float): relative eigenvalue clamp threshold
        log_threshold (int): subset size from which products are taken in log space

    Returns:
        ndarray of n nonnegative determinants
    """
    entries = matrix.entries if isinstance(matrix, GramMatrix) else np.asarray(matrix, dtype=float)
    index_rows = np.asarray(index_rows, dtype=int)
    if index_rows.ndim != 2:
        raise ValueError("index_rows must be a 2-D array of subsets")
    n, k = index_rows.shape
    if k == 0:
        return np.ones(n)
    if n == 0:
        return np.zeros(0)
    if k == 1:
        return np.maximum(entries[index_rows[:, 0], index_rows[:, 0]], 0.0)

    stack = entries[index_rows[:, :, None], index_rows[:, None, :]]
    values = np.linalg.eigvalsh(stack)
    largest = np.maximum(values[:, -1], 0.0)
    threshold = clamp_tol * largest
    bad = values[:, 0] < -threshold
    if np.any(bad):
        row = int(np.flatnonzero(bad)[0])
        raise DegenerateGram(float(values[row, 0]), float(threshold[row]))
    # eigenvalues within rounding noise of zero mark dependent subsets
    noise = 4.0 * k * np.finfo(float).eps * largest[:, None]
    values = np.where(values <= noise, 0.0, values)

    if k >= log_threshold:
        vanished = np.any(values == 0.0, axis=1)
        with np.errstate(divide='ignore'):
            logs = np.sum(np.log(np.where(vanished[:, None], 1.0, values)), axis=1)
        return np.where(vanished, 0.0, np.exp(logs))
    return np.prod(values, axis=1)


def wedge_volumes(matrix: GramMatrix, index_rows: np.ndarray, dim: int,
                  clamp_tol: float = EIGEN_CLAMP,
                  log_threshold: int = LOG_SPACE_THRESHOLD) -> np.ndarray:
    """Batched wedge volumes for the subsets in index_rows of a family living in R^dim."""
    index_rows = np.asarray(index_rows, dtype=int)
    if index_rows.ndim == 2 and index_rows.shape[1] > dim:
        return np.zeros(index_rows.shape[0])
    return np.sqrt(principal_minors(matrix, index_rows, clamp_tol, log_threshold))


def wedge_volume(family: VectorFamily, subset: SubsetLike,
                 clamp_tol: float = EIGEN_CLAMP) -> float:
    """
    k-dimensional volume of the parallelotope spanned by family[subset].

    Args:
        family (VectorFamily): the vector family
        subset: SubsetIndex or any sequence of distinct indices

    Returns:
        Nonnegative volume; 1.0 for the empty subset, 0.0 when k > d
    """
    subset = as_subset(subset)
    subset.check_range(family.count)
    if subset.size == 0:
        return 1.0
    if subset.size == 1:
        return float(family.norms()[subset.indices[0]])
    if subset.size > family.dim:
        return 0.0
    rows = np.array([subset.indices])
    return float(wedge_volumes(gram(family), rows, family.dim, clamp_tol)[0])


def project_complement(family: VectorFamily, subset: SubsetLike,
                       target: Sequence[float]) -> np.ndarray:
    """
    Component of target orthogonal to span{family[subset]}.

    Raises:
        DegenerateSpan: if the selected vectors are linearly dependent
    """
    subset = as_subset(subset)
    subset.check_range(family.count)
    target = np.asarray(target, dtype=float)
    if target.shape != (family.dim,):
        raise InvalidFamily(f"Target must have {family.dim} coordinates, got shape {target.shape}")
    if subset.size == 0:
        return target.copy()
    if wedge_volume(family, subset) == 0.0:
        raise DegenerateSpan(f"Vectors {subset.indices} are linearly dependent")

    basis = family.vectors[list(subset.indices)].T
    q, r = scipy.linalg.qr(basis, mode='economic')
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-12 * max(diag.max(), np.finfo(float).tiny):
        raise DegenerateSpan(f"Vectors {subset.indices} are numerically dependent")
    residual = target - q @ (q.T @ target)
    # second pass restores orthogonality lost to cancellation
    return residual - q @ (q.T @ residual)


def orthogonal_complement_direction(family: VectorFamily) -> np.ndarray:
    """
    Unit normal to the hyperplane spanned by d-1 vectors in R^d.

    The sign is fixed so that the first nonzero coordinate is positive.
    """
    if family.count != family.dim - 1:
        raise DegenerateSpan(f"Need exactly d-1 = {family.dim - 1} vectors, got {family.count}")
    if family.count == 0:
        return np.array([1.0])
    null = scipy.linalg.null_space(family.vectors)
    if null.shape[1] != 1:
        raise DegenerateSpan(f"Complement has dimension {null.shape[1]}, expected 1")
    direction = null[:, 0]
    direction = direction / np.linalg.norm(direction)
    scale = np.max(np.abs(direction))
    leading = direction[np.flatnonzero(np.abs(direction) > 1e-12 * scale)[0]]
    return direction if leading > 0 else -direction


def elementary_symmetric_all(values: Sequence[float]) -> np.ndarray:
    """Coefficients e_0..e_n of prod (1 + x_i t), by the triangular recurrence."""
    values = np.asarray(values, dtype=float).ravel()
    coeffs = np.zeros(values.size + 1)
    coeffs[0] = 1.0
    for i, x in enumerate(values):
        top = i + 1
        coeffs[1:top + 1] = coeffs[1:top + 1] + x * coeffs[0:top]
    return coeffs


def elementary_symmetric(values: Sequence[float], k: int) -> float:
    """
    Elementary symmetric polynomial e_k of a list of numbers.

    Args:
        values: the numbers x_1..x_n
        k (int): degree, 0 <= k <= n

    Returns:
        Sum over all k-subsets of the product of their entries
    """
    values = np.asarray(values, dtype=float).ravel()
    if not 0 <= k <= values.size:
        raise ValueError(f"Need 0 <= k <= {values.size}, got k={k}")
    coeffs = np.zeros(k + 1)
    coeffs[0] = 1.0
    for i, x in enumerate(values):
        top = min(i + 1, k)
        coeffs[1:top + 1] = coeffs[1:top + 1] + x * coeffs[0:top]
    return float(coeffs[k])
