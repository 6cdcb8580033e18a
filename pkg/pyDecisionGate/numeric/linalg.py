import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from pyDecisionGate.errors import DomainError, FactorizationError

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-12


def _is_symmetric(values: np.ndarray) -> bool:
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        return False
    return bool(np.allclose(values, values.T, rtol=0.0, atol=SYMMETRY_TOLERANCE))


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    entries: np.ndarray

    def __post_init__(self):
        values = np.array(self.entries, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 1:
            raise DomainError(f"Correlation matrix must be square and non-empty, got shape {values.shape}")
        if not _is_symmetric(values):
            raise DomainError("Correlation matrix must be symmetric")
        if not np.allclose(np.diag(values), 1.0, rtol=0.0, atol=SYMMETRY_TOLERANCE):
            raise DomainError("Correlation matrix must have a unit diagonal")
        if np.any(np.abs(values) > 1.0 + SYMMETRY_TOLERANCE):
            raise DomainError("Correlations must lie in [-1, 1]")
        smallest = float(np.min(scipy.linalg.eigh(values, eigvals_only=True)))
        if smallest < -PSD_TOLERANCE:
            raise DomainError(f"Correlation matrix is not positive semidefinite (eigenvalue {smallest:.3e})")
        values.setflags(write=False)
        object.__setattr__(self, "entries", values)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CorrelationMatrix):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())

    @classmethod
    def identity(cls, dim: int) -> "CorrelationMatrix":
        return cls(np.eye(dim))

    @classmethod
    def equicorrelated(cls, dim: int, rho: float) -> "CorrelationMatrix":
        values = np.full((dim, dim), float(rho))
        np.fill_diagonal(values, 1.0)
        return cls(values)

    @classmethod
    def block_diagonal(cls, *blocks: "CorrelationMatrix") -> "CorrelationMatrix":
        if len(blocks) == 0:
            raise DomainError("At least one block is required")
        return cls(scipy.linalg.block_diag(*[block.entries for block in blocks]))

    def sub_matrix(self, indexes: list[int]) -> "CorrelationMatrix":
        return CorrelationMatrix(self.entries[np.ix_(indexes, indexes)])


def _as_array(matrix: CorrelationMatrix | np.ndarray) -> np.ndarray:
    if isinstance(matrix, CorrelationMatrix):
        return matrix.entries
    return np.asarray(matrix, dtype=float)


def cholesky_lower(matrix: CorrelationMatrix | np.ndarray) -> np.ndarray:
    """Lower Cholesky factor that tolerates positive semidefinite input.

    numpy.linalg.cholesky rejects singular matrices, so the perfectly correlated
    structures are factored here. Pivots in [-1e-10, 0] are clamped to zero and the
    corresponding column below the pivot is set to zero.
    """
    values = _as_array(matrix)
    if not _is_symmetric(values):
        raise DomainError("Cholesky factorization requires a symmetric matrix")
    dim = values.shape[0]
    lower = np.zeros_like(values)
    for col in range(dim):
        pivot = values[col, col] - np.dot(lower[col, :col], lower[col, :col])
        if pivot < -PSD_TOLERANCE:
            raise FactorizationError(f"Matrix is indefinite: pivot {pivot:.3e} at column {col}")
        if pivot <= PSD_TOLERANCE:
            logger.debug("Clamped semidefinite pivot %.3e at column %d", pivot, col)
            continue
        diagonal = np.sqrt(pivot)
        lower[col, col] = diagonal
        below = values[col + 1 :, col] - lower[col + 1 :, :col] @ lower[col, :col]
        lower[col + 1 :, col] = below / diagonal
    return lower


def symmetric_eigenvalues(matrix: CorrelationMatrix | np.ndarray) -> list[float]:
    """All eigenvalues in descending order."""
    values = _as_array(matrix)
    if not _is_symmetric(values):
        raise DomainError("Eigenvalues are only computed for symmetric matrices")
    eigenvalues = scipy.linalg.eigh(values, eigvals_only=True)
    return sorted((float(value) for value in eigenvalues), reverse=True)
