import numpy as np
import pytest

from pyDecisionGate.errors import DomainError, FactorizationError
from pyDecisionGate.numeric import CorrelationMatrix, cholesky_lower, symmetric_eigenvalues

INDEFINITE = np.array(
    [
        [1.0, 0.9, 0.9],
        [0.9, 1.0, -0.9],
        [0.9, -0.9, 1.0],
    ]
)


def _random_correlation(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    factor = rng.standard_normal((dim, dim + 2))
    covariance = factor @ factor.T
    scale = np.sqrt(np.diag(covariance))
    corr = covariance / np.outer(scale, scale)
    np.fill_diagonal(corr, 1.0)
    return (corr + corr.T) / 2.0


def test_identity():
    corr = CorrelationMatrix.identity(3)
    assert corr.dim == 3
    assert np.array_equal(corr.entries, np.eye(3))


def test_entries_are_read_only():
    corr = CorrelationMatrix.equicorrelated(2, 0.5)
    with pytest.raises(ValueError):
        corr.entries[0, 1] = 0.1


def test_equality_by_entries():
    assert CorrelationMatrix.equicorrelated(3, 0.2) == CorrelationMatrix.equicorrelated(3, 0.2)
    assert CorrelationMatrix.equicorrelated(3, 0.2) != CorrelationMatrix.identity(3)


@pytest.mark.parametrize(
    "entries",
    [
        [[1.0, 0.5], [0.4, 1.0]],
        [[2.0, 0.0], [0.0, 1.0]],
        [[1.0, 1.5], [1.5, 1.0]],
        INDEFINITE,
        [[1.0, 0.0, 0.0]],
    ],
)
def test_invalid_correlation_matrices(entries):
    with pytest.raises(DomainError):
        CorrelationMatrix(np.array(entries))


def test_block_diagonal():
    corr = CorrelationMatrix.block_diagonal(
        CorrelationMatrix.equicorrelated(2, 0.99),
        CorrelationMatrix.identity(3),
    )
    assert corr.dim == 5
    assert corr.entries[0, 1] == pytest.approx(0.99)
    assert corr.entries[1, 2] == 0.0
    assert corr.entries[3, 4] == 0.0


def test_sub_matrix():
    corr = CorrelationMatrix(_random_correlation(4, seed=3))
    sub = corr.sub_matrix([1, 3])
    assert sub.entries[0, 1] == pytest.approx(corr.entries[1, 3])


def test_cholesky_matches_numpy_for_definite_matrix():
    corr = _random_correlation(6, seed=11)
    assert np.allclose(cholesky_lower(corr), np.linalg.cholesky(corr), atol=1e-12)


def test_cholesky_reconstructs_semidefinite_matrix():
    corr = CorrelationMatrix.equicorrelated(4, 1.0)
    lower = cholesky_lower(corr)
    assert np.allclose(lower @ lower.T, corr.entries, atol=1e-12)
    assert np.allclose(np.triu(lower, k=1), 0.0)


def test_cholesky_rejects_indefinite_matrix():
    with pytest.raises(FactorizationError):
        cholesky_lower(INDEFINITE)


def test_cholesky_rejects_asymmetric_matrix():
    with pytest.raises(DomainError):
        cholesky_lower(np.array([[1.0, 0.2], [0.1, 1.0]]))


def test_eigenvalues_of_equicorrelation():
    values = symmetric_eigenvalues(CorrelationMatrix.equicorrelated(5, 0.99))
    assert values[0] == pytest.approx(4.96, abs=1e-10)
    assert values[1:] == pytest.approx([0.01] * 4, abs=1e-10)


def test_eigenvalues_sorted_descending_and_sum_to_trace():
    corr = _random_correlation(7, seed=5)
    values = symmetric_eigenvalues(corr)
    assert values == sorted(values, reverse=True)
    assert sum(values) == pytest.approx(7.0, abs=1e-10)


@pytest.mark.parametrize("dim", range(1, 21))
def test_cholesky_reconstructs_random_correlations(dim):
    corr = _random_correlation(dim, seed=100 + dim)
    lower = cholesky_lower(corr)
    assert np.allclose(lower @ lower.T, corr, atol=1e-10)
    assert np.allclose(np.triu(lower, k=1), 0.0)


@pytest.mark.parametrize("dim", range(1, 21))
def test_eigenvalues_of_random_correlations(dim):
    corr = _random_correlation(dim, seed=200 + dim)
    values = symmetric_eigenvalues(corr)
    assert values == sorted(values, reverse=True)
    assert sum(values) == pytest.approx(float(np.trace(corr)), abs=1e-8)
    assert min(values) >= -1e-10
    assert values == pytest.approx(sorted(np.linalg.eigvalsh(corr), reverse=True), abs=1e-8)
