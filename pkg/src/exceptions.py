"""Error types raised by the vector-maclaurin library."""

from typing import Optional


class VectorMaclaurinError(Exception):
    """Base class for every domain error raised by the library."""


class InvalidFamily(VectorMaclaurinError, ValueError):
    """Vector family has non-finite coordinates or an inconsistent shape."""


class DegenerateGram(VectorMaclaurinError):
    """A Gram (sub)matrix has an eigenvalue below the PSD clamp threshold."""

    def __init__(self, eigenvalue: float, threshold: float):
        self.eigenvalue = eigenvalue
        self.threshold = threshold
        super().__init__(
            f"Gram matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e} "
            f"below clamp threshold {-threshold:.3e}"
        )


class DegenerateSpan(VectorMaclaurinError):
    """Vectors expected to be linearly independent span a smaller subspace."""


class DegenerateSimplex(VectorMaclaurinError):
    """Simplex vertices are affinely dependent."""


class CapExceeded(VectorMaclaurinError):
    """Number of k-subsets is above the configured enumeration cap."""

    def __init__(self, binomial: int, cap: int):
        self.binomial = binomial
        self.cap = cap
        super().__init__(f"C(m,k) = {binomial} exceeds subset cap {cap}")


class NonPositiveInput(VectorMaclaurinError, ValueError):
    """Classical Maclaurin check received a value that is not strictly positive."""


class ZeroDenominator(VectorMaclaurinError):
    """A ratio of wedge sums or intrinsic volumes has a vanishing denominator."""


class NonUnitDirection(VectorMaclaurinError, ValueError):
    """Projection direction is not a unit vector."""


class BadShape(VectorMaclaurinError, ValueError):
    """Requested (m, d) shape is not supported by the generator."""


class InfeasibleTarget(VectorMaclaurinError, ValueError):
    """Search target preconditions cannot be met for the configured shapes."""


class InfeasibleInterval(VectorMaclaurinError):
    """Orthogonal replacement interval [lo, hi] is empty."""

    def __init__(self, lo: float, hi: float, step: Optional[int] = None):
        self.lo = lo
        self.hi = hi
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"Empty replacement interval [{lo!r}, {hi!r}]{where}")


class SandwichViolation(VectorMaclaurinError):
    """Orthogonal replacement failed to keep S_k up and S_{k-1} down."""


class InputParseError(VectorMaclaurinError, ValueError):
    """Input document could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
