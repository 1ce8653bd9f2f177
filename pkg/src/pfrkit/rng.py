"""Seeded, splittable randomness.

Every randomized routine in the package takes an explicit :class:`RngStream`.
Streams are derived deterministically from a root seed, and child streams are
labelled so that re-running a pipeline with the same seed reproduces every
random choice regardless of how much work other branches did.
"""

from __future__ import annotations

import numpy as np

__all__ = ["RngStream"]


def _label_to_int(label: object) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) & 0xFFFFFFFF
    # Stable across runs (unlike hash()) for string labels.
    acc = 2166136261
    for byte in str(label).encode("utf-8"):
        acc = ((acc ^ byte) * 16777619) & 0xFFFFFFFF
    return acc


class RngStream:
    """A labelled, splittable wrapper around ``numpy.random.Generator``.

    Args:
        seed: Root entropy (int) or an existing ``numpy.random.SeedSequence``.
    """

    __slots__ = ("_seq", "_gen")

    def __init__(self, seed: int | np.random.SeedSequence = 0):
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
        else:
            self._seq = np.random.SeedSequence(int(seed))
        self._gen: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            self._gen = np.random.Generator(np.random.PCG64(self._seq))
        return self._gen

    def child(self, *labels: object) -> "RngStream":
        """Derive an independent stream named by ``labels``.

        The same parent seed and label path always yields the same stream;
        distinct label paths yield statistically independent streams.
        """
        key = tuple(self._seq.spawn_key) + tuple(_label_to_int(x) for x in labels)
        return RngStream(np.random.SeedSequence(self._seq.entropy, spawn_key=key))

    # -- convenience draws -------------------------------------------------

    def integers(self, low: int, high: int | None = None, size=None):
        return self.generator.integers(low, high, size=size)

    def random(self, size=None):
        return self.generator.random(size)

    def uniform_points(self, n: int, size: int) -> np.ndarray:
        """Uniform points of F_2^n packed as uint64 (requires n <= 64)."""
        if n > 64:
            raise ValueError("packed uniform sampling supports n <= 64")
        if n == 64:
            return self.generator.integers(0, 2**63, size=size, dtype=np.uint64) ^ (
                self.generator.integers(0, 2, size=size, dtype=np.uint64) << np.uint64(63)
            )
        return self.generator.integers(0, 1 << n, size=size, dtype=np.uint64)

    def uniform_int(self, n: int) -> int:
        """One uniform element of F_2^n as a Python int (any n)."""
        nbytes = (n + 7) // 8
        raw = int.from_bytes(self.generator.bytes(nbytes), "little")
        return raw & ((1 << n) - 1)

    def signs(self, size=None):
        """Uniform +-1 values."""
        return 1 - 2 * self.generator.integers(0, 2, size=size)
