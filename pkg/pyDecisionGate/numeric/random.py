from dataclasses import dataclass, field

import numpy as np

from pyDecisionGate.errors import DomainError

UINT64_MAX = 2**64 - 1


def _ensure_uint64(value: int, name: str) -> int:
    value = int(value)
    if not 0 <= value <= UINT64_MAX:
        raise DomainError(f"{name} must be a 64-bit unsigned integer, got {value}")
    return value


@dataclass
class RandomStream:
    """Seeded random source for one substream.

    The generator is PCG64 seeded from SeedSequence(entropy=seed, spawn_key=(substream_id,)),
    so every (seed, substream_id) pair yields its own reproducible, independent sequence.
    A stream may move between threads but must only be drawn from by one of them.
    """

    seed: int
    substream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.seed = _ensure_uint64(self.seed, "seed")
        self.substream_id = _ensure_uint64(self.substream_id, "substream_id")
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.substream_id,))
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def substream(self, substream_id: int) -> "RandomStream":
        return RandomStream(seed=self.seed, substream_id=substream_id)

    def standard_normal(self, size: int | tuple[int, ...]) -> np.ndarray:
        return self.generator.standard_normal(size)


def _check_dimensions(mean: np.ndarray, chol: np.ndarray) -> None:
    if mean.ndim != 1:
        raise DomainError("Mean must be a vector")
    if chol.ndim != 2 or chol.shape != (mean.shape[0], mean.shape[0]):
        raise DomainError(f"Cholesky factor shape {chol.shape} does not match mean of length {mean.shape[0]}")


def sample_mv_normal(stream: RandomStream, mean, chol) -> np.ndarray:
    mean = np.asarray(mean, dtype=float)
    chol = np.asarray(chol, dtype=float)
    _check_dimensions(mean, chol)
    return mean + chol @ stream.standard_normal(mean.shape[0])


def sample_mv_normal_batch(stream: RandomStream, mean, chol, size: int) -> np.ndarray:
    """`size` draws as rows of a (size, dim) array; row i equals mean + L z_i."""
    mean = np.asarray(mean, dtype=float)
    chol = np.asarray(chol, dtype=float)
    _check_dimensions(mean, chol)
    normals = stream.standard_normal((size, mean.shape[0]))
    return mean + normals @ chol.T
