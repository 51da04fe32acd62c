"""Richardson iteration, its randomly sparsified variant, and bias oracles.

The sparsified solver never forms G = I - A.  Each iterate is computed as

    X = b + phi - sum_j phi_j * A(:, j)   over j in support(phi),

so an iteration touches at most m columns of A and costs O(m q) when the
columns hold at most q nonzeros.  Averaging the iterates from the burn-in
onward gives the returned estimate.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .operators import ColumnMatrix, CscMatrix, apply
from .sampling import RandomStream
from .sparsify import sparsify
from .vectors import SparseVector, coalesce, dot

__all__ = [
    "RsriConfig",
    "SolveReport",
    "LinearProblem",
    "NonConvergenceError",
    "richardson",
    "reference_solve",
    "rsri",
    "rsri_functionals",
    "expected_average",
]

DENSE_ACCUMULATOR_LIMIT = 10_000_000


@dataclass(frozen=True)
class RsriConfig:
    """Run parameters: sparsity m, iterations t, burn-in t_min, seed, trials."""

    m: int
    t: int
    t_min: int
    seed: int = 0
    trials: int = 10

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if not 0 <= self.t_min < self.t:
            raise ValueError("t_min must satisfy 0 <= t_min < t")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class SolveReport:
    estimate: SparseVector
    column_accesses: int
    wall_clock: float
    rng_kind: str
    functionals: Optional[list[float]] = None


@dataclass(frozen=True)
class LinearProblem:
    """A column oracle plus right-hand side, for harness consumption."""

    A: ColumnMatrix
    b: SparseVector


class NonConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def richardson(A: ColumnMatrix, b: SparseVector, t: int) -> np.ndarray:
    """t steps of x <- (I - A) x + b starting from x = b."""
    if b.dim != A.dim:
        raise ValueError("dimension mismatch between A and b")
    if t < 0:
        raise ValueError("t must be nonnegative")
    b_dense = b.to_dense()
    x = b_dense.copy()
    for _ in range(t):
        x = x - apply(A, x) + b_dense
    return x


def reference_solve(
    A: ColumnMatrix, b: SparseVector, tol: float = 1e-12, max_iter: int = 200_000
) -> np.ndarray:
    """Richardson until the 1-norm residual drops below tol (oracle solves)."""
    if b.dim != A.dim:
        raise ValueError("dimension mismatch between A and b")
    b_dense = b.to_dense()
    x = b_dense.copy()
    for _ in range(max_iter):
        residual = b_dense - apply(A, x)
        res_norm = float(np.abs(residual).sum())
        if res_norm <= tol:
            return x
        x = x + residual
    res_norm = float(np.abs(b_dense - apply(A, x)).sum())
    if res_norm <= tol:
        return x
    raise NonConvergenceError(
        f"no convergence within {max_iter} iterations (residual {res_norm:.3e})", res_norm
    )


def _next_iterate(A: ColumnMatrix, b: SparseVector, phi: SparseVector) -> SparseVector:
    # X = b + phi - sum_j phi_j A(:, j); duplicates merged, exact zeros dropped
    if isinstance(A, CscMatrix):
        rows, vals = A.gather(phi.indices, phi.values)
    else:
        parts_i, parts_v = [], []
        for j, w in zip(phi.indices, phi.values):
            col = A.column(int(j))
            parts_i.append(col.indices)
            parts_v.append(w * col.values)
        rows = np.concatenate(parts_i) if parts_i else np.empty(0, dtype=np.int64)
        vals = np.concatenate(parts_v) if parts_v else np.empty(0)
    idx = np.concatenate([b.indices, phi.indices, rows])
    val = np.concatenate([b.values, phi.values, -vals])
    return coalesce(b.dim, idx, val)


def _run_iterates(
    A: ColumnMatrix,
    b: SparseVector,
    cfg: RsriConfig,
    rng: RandomStream,
    consume: Callable[[SparseVector], None],
) -> int:
    """Drive the sparsified iteration, feeding averaged iterates to consume.

    Returns the exact number of column accesses.  rsri and
    rsri_functionals share this loop so identical streams see identical
    iterates.
    """
    if b.dim != A.dim:
        raise ValueError("dimension mismatch between A and b")
    accesses = 0
    x = b
    if cfg.t_min == 0:
        consume(x)
    for s in range(1, cfg.t):
        phi = sparsify(x, cfg.m, rng)
        accesses += phi.nnz
        x = _next_iterate(A, b, phi)
        if s >= cfg.t_min:
            consume(x)
    return accesses


class _Accumulator:
    """Running sum of sparse iterates; dense array below the dim limit,
    index-keyed sums above it (the regime where the solution itself is
    too large to store densely)."""

    def __init__(self, dim: int, dense_limit: int):
        self.dim = dim
        self.dense = np.zeros(dim) if dim <= dense_limit else None
        self.sums: dict[int, float] = {}

    def add(self, v: SparseVector):
        if self.dense is not None:
            np.add.at(self.dense, v.indices, v.values)
        else:
            sums = self.sums
            for i, val in zip(v.indices.tolist(), v.values.tolist()):
                sums[i] = sums.get(i, 0.0) + val

    def average(self, count: int) -> SparseVector:
        if self.dense is not None:
            return SparseVector.from_dense(self.dense / count)
        items = sorted(self.sums.items())
        idx = np.array([i for i, _ in items], dtype=np.int64)
        val = np.array([v / count for _, v in items])
        keep = val != 0.0
        return SparseVector(self.dim, idx[keep], val[keep])


def rsri(
    A: ColumnMatrix,
    b: SparseVector,
    cfg: RsriConfig,
    rng: RandomStream,
    dense_limit: int = DENSE_ACCUMULATOR_LIMIT,
) -> SolveReport:
    """Randomly sparsified Richardson iteration.

    Runs t iterations from X = b, sparsifying each iterate to at most m
    entries before the column multiply, and returns the average of the
    iterates s = t_min .. t - 1 along with the exact column-access count.
    """
    start = time.perf_counter()
    acc = _Accumulator(A.dim, dense_limit)
    accesses = _run_iterates(A, b, cfg, rng, acc.add)
    estimate = acc.average(cfg.t - cfg.t_min)
    return SolveReport(
        estimate=estimate,
        column_accesses=accesses,
        wall_clock=time.perf_counter() - start,
        rng_kind=rng.kind,
    )


def rsri_functionals(
    A: ColumnMatrix,
    b: SparseVector,
    cfg: RsriConfig,
    rng: RandomStream,
    fs: Sequence[np.ndarray],
) -> list[float]:
    """Streaming averages of f * X over the averaged iterates.

    Memory use is independent of the estimate: nothing is accumulated but
    one running sum per functional.  With the same stream this agrees
    with dotting the stored rsri estimate.
    """
    fs = [np.asarray(f, dtype=np.float64) for f in fs]
    for f in fs:
        if f.shape != (A.dim,):
            raise ValueError("functional dimension mismatch")
    totals = [0.0] * len(fs)

    def consume(x: SparseVector):
        for k, f in enumerate(fs):
            totals[k] += dot(f, x)

    _run_iterates(A, b, cfg, rng, consume)
    count = cfg.t - cfg.t_min
    return [t / count for t in totals]


def expected_average(
    A: ColumnMatrix, b: SparseVector, t: int, t_min: int, tol: float = 1e-12
) -> np.ndarray:
    """Closed-form mean of the sparsified solver's averaged estimate.

    The mean iterate at step s is x - G^(s+1) x regardless of m, so the
    averaged mean is x minus the average of G^(s+1) x over the window.
    Evaluated deterministically from a reference solve.
    """
    if not 0 <= t_min < t:
        raise ValueError("need 0 <= t_min < t")
    x = reference_solve(A, b, tol=tol)
    y = x.copy()
    for _ in range(t_min + 1):
        y = y - apply(A, y)
    total = y.copy()
    for _ in range(t_min + 2, t + 1):
        y = y - apply(A, y)
        total += y
    return x - total / (t - t_min)
