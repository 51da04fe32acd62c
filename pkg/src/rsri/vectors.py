"""Sparse vector primitives shared by every other module.

A sparse vector is a dimension plus strictly index-sorted (index, value)
pairs with no stored zeros.  Dense vectors are plain 1-D float64 numpy
arrays; no wrapper type is needed for them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "SparseVector",
    "VectorNorms",
    "norms",
    "tail_sums",
    "combine",
    "dot",
    "coalesce",
]


class VectorNorms(NamedTuple):
    one: float
    two: float
    inf: float
    nnz: int


@dataclass(frozen=True)
class SparseVector:
    """Immutable sparse vector: ``dim`` plus sorted nonzero entries.

    Invariants enforced at construction: indices strictly increasing and
    inside ``[0, dim)``, values nonzero.  The backing arrays are marked
    read-only so instances can be shared across concurrent trials.
    """

    dim: int
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.ndim != 1 or val.ndim != 1 or idx.shape != val.shape:
            raise ValueError("indices and values must be 1-D arrays of equal length")
        if idx.size:
            if idx[0] < 0 or idx[-1] >= self.dim:
                raise ValueError("indices out of range")
            if np.any(np.diff(idx) <= 0):
                raise ValueError("indices must be strictly increasing")
            if np.any(val == 0.0):
                raise ValueError("stored zero values are forbidden")
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    @classmethod
    def _make(cls, dim: int, indices: np.ndarray, values: np.ndarray) -> "SparseVector":
        # trusted fast path: caller guarantees sortedness, range, no zeros
        self = object.__new__(cls)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)
        return self

    @classmethod
    def empty(cls, dim: int) -> "SparseVector":
        return cls(dim, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))

    @classmethod
    def basis(cls, dim: int, k: int, value: float = 1.0) -> "SparseVector":
        return cls(dim, np.array([k], dtype=np.int64), np.array([value], dtype=np.float64))

    @classmethod
    def from_pairs(cls, dim: int, pairs: Iterable[tuple[int, float]]) -> "SparseVector":
        items = sorted(pairs)
        idx = np.array([i for i, _ in items], dtype=np.int64)
        val = np.array([v for _, v in items], dtype=np.float64)
        keep = val != 0.0
        return cls(dim, idx[keep], val[keep])

    @classmethod
    def from_dense(cls, arr) -> "SparseVector":
        arr = np.asarray(arr, dtype=np.float64)
        idx = np.flatnonzero(arr)
        return cls(arr.size, idx.astype(np.int64), arr[idx])

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


def coalesce(dim: int, indices: np.ndarray, values: np.ndarray) -> SparseVector:
    """Sum duplicate indices, drop exact zeros, and return a SparseVector."""
    if len(indices) == 0:
        return SparseVector.empty(dim)
    indices = np.asarray(indices, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(indices, kind="stable")
    si = indices[order]
    sv = values[order]
    starts = np.flatnonzero(np.diff(si)) + 1
    starts = np.concatenate([np.zeros(1, dtype=np.int64), starts])
    sums = np.add.reduceat(sv, starts)
    keep = sums != 0.0
    return SparseVector._make(dim, si[starts[keep]], sums[keep])


def norms(v: SparseVector) -> VectorNorms:
    """One, two, and infinity norms plus the stored-entry count."""
    a = np.abs(v.values)
    return VectorNorms(
        one=float(np.sum(a)),
        two=float(np.sqrt(np.sum(a * a))),
        inf=float(a.max()) if a.size else 0.0,
        nnz=v.nnz,
    )


def tail_sums(v: SparseVector) -> np.ndarray:
    """Tails of the decreasing rearrangement of ``|v|``.

    Returns T of length nnz + 1 with T[i] the sum of all but the i
    largest magnitudes, so T[0] is the 1-norm and T[nnz] is zero.
    Magnitude ties are broken by lower original index, which makes the
    rearrangement (and everything derived from it) deterministic.
    """
    a = np.abs(v.values)
    order = np.lexsort((v.indices, -a))
    sorted_abs = a[order]
    tails = np.zeros(v.nnz + 1)
    # reverse cumulative sum: monotone nonincreasing by construction
    tails[:-1] = np.cumsum(sorted_abs[::-1])[::-1]
    return tails


def combine(alpha: float, u: SparseVector, beta: float, w: SparseVector) -> SparseVector:
    """alpha * u + beta * w with exact zero cancellations removed."""
    if u.dim != w.dim:
        raise ValueError(f"dimension mismatch: {u.dim} != {w.dim}")
    idx = np.concatenate([u.indices, w.indices])
    val = np.concatenate([alpha * u.values, beta * w.values])
    return coalesce(u.dim, idx, val)


def dot(f: np.ndarray, v: SparseVector) -> float:
    """Inner product of a dense functional with a sparse vector."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (v.dim,):
        raise ValueError(f"dimension mismatch: {f.shape} vs ({v.dim},)")
    return float(np.dot(f[v.indices], v.values))
