"""Immutable subsets of the point indices of a finite space."""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np


class PointSet:
    """A subset of ``{0, ..., n-1}`` backed by a read-only boolean mask."""

    __slots__ = ("_mask",)

    def __init__(self, mask: np.ndarray) -> None:
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 1:
            raise ValueError("PointSet mask must be one-dimensional")
        if mask.flags.writeable:
            mask = mask.copy()
            mask.flags.writeable = False
        self._mask = mask

    @classmethod
    def empty(cls, n: int) -> PointSet:
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def full(cls, n: int) -> PointSet:
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def of(cls, n: int, indices: Iterable[int]) -> PointSet:
        mask = np.zeros(n, dtype=bool)
        idx = list(indices)
        if idx:
            arr = np.asarray(idx, dtype=np.int64)
            if arr.min() < 0 or arr.max() >= n:
                raise IndexError(f"point index out of range for n={n}: {idx}")
            mask[arr] = True
        return cls(mask)

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def n(self) -> int:
        return self._mask.shape[0]

    def indices(self) -> list[int]:
        return np.flatnonzero(self._mask).tolist()

    def _check(self, other: PointSet) -> None:
        if not isinstance(other, PointSet):
            raise TypeError(f"expected PointSet, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"PointSets over different spaces ({self.n} vs {other.n})")

    def __or__(self, other: PointSet) -> PointSet:
        self._check(other)
        return PointSet(self._mask | other._mask)

    def __and__(self, other: PointSet) -> PointSet:
        self._check(other)
        return PointSet(self._mask & other._mask)

    def __sub__(self, other: PointSet) -> PointSet:
        self._check(other)
        return PointSet(self._mask & ~other._mask)

    def __le__(self, other: PointSet) -> bool:
        self._check(other)
        return not bool(np.any(self._mask & ~other._mask))

    def __ge__(self, other: PointSet) -> bool:
        return other <= self

    def isdisjoint(self, other: PointSet) -> bool:
        self._check(other)
        return not bool(np.any(self._mask & other._mask))

    def __contains__(self, i: object) -> bool:
        if not isinstance(i, (int, np.integer)) or not 0 <= i < self.n:
            return False
        return bool(self._mask[i])

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __len__(self) -> int:
        return int(np.count_nonzero(self._mask))

    def __bool__(self) -> bool:
        return bool(self._mask.any())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._mask, other._mask))

    def __hash__(self) -> int:
        return hash((self.n, np.packbits(self._mask).tobytes()))

    def __repr__(self) -> str:
        return f"PointSet({self.indices()})"
