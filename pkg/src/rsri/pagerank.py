"""Build personalized PageRank systems from edge lists and synthetic graphs.

Transition columns are uniform over the deduplicated out-neighbors of the
source node; dangling columns are repaired to point back at the
personalization vertex, which makes the transition matrix depend on the
chosen source.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .operators import CscMatrix
from .vectors import SparseVector

__all__ = [
    "EdgeList",
    "PageRankProblem",
    "load_edge_list",
    "build_problem",
    "assemble",
    "synth_bounded_outdegree",
    "DEFAULT_ALPHA",
]

DEFAULT_ALPHA = 0.85
STOCHASTIC_TOL = 1e-9


@dataclass(frozen=True)
class EdgeList:
    """Directed edges over dense indices plus the original-label map."""

    node_count: int
    src: np.ndarray
    dst: np.ndarray
    id_map: dict[int, int]

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have equal length")
        if src.size and (src.min() < 0 or dst.min() < 0
                         or max(src.max(), dst.max()) >= self.node_count):
            raise ValueError("edge endpoints out of range")
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)

    @property
    def edge_count(self) -> int:
        return int(self.src.size)


@dataclass(frozen=True)
class PageRankProblem:
    """Column-stochastic P with teleportation, plus the induced linear system."""

    P: CscMatrix
    alpha: float
    source: int
    s: SparseVector
    A: CscMatrix
    b: SparseVector

    @property
    def dim(self) -> int:
        return self.P.dim


def load_edge_list(path) -> EdgeList:
    """Parse a whitespace edge list with '#' comment lines.

    Labels are remapped to 0..N-1 in first-appearance order; the map is
    retained so reports can name original nodes.
    """
    id_map: dict[int, int] = {}
    src, dst = [], []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) < 2:
            raise ValueError(f"line {line_no}: expected 'from to', got {line!r}")
        try:
            pair = (int(tokens[0]), int(tokens[1]))
        except ValueError as exc:
            raise ValueError(f"line {line_no}: non-integer node label in {line!r}") from exc
        for label in pair:
            if label not in id_map:
                id_map[label] = len(id_map)
        src.append(id_map[pair[0]])
        dst.append(id_map[pair[1]])
    if not id_map:
        raise ValueError("edge list contains no edges")
    return EdgeList(
        node_count=len(id_map),
        src=np.array(src, dtype=np.int64),
        dst=np.array(dst, dtype=np.int64),
        id_map=id_map,
    )


def _transition_matrix(edges: EdgeList, source: int) -> CscMatrix:
    n = edges.node_count
    pairs = np.unique(np.stack([edges.src, edges.dst], axis=1), axis=0)
    src, dst = pairs[:, 0], pairs[:, 1]
    out_deg = np.bincount(src, minlength=n)
    dangling = np.flatnonzero(out_deg == 0)
    cols = np.concatenate([src, dangling])
    rows = np.concatenate([dst, np.full(dangling.size, source, dtype=np.int64)])
    with np.errstate(divide="ignore"):
        weights = np.where(out_deg > 0, 1.0 / out_deg, 1.0)
    vals = np.concatenate([weights[src], np.ones(dangling.size)])
    P = CscMatrix.from_triplets(n, rows, cols, vals)
    sums = np.bincount(P.column_ids(), weights=P.data, minlength=n)
    if np.any(np.abs(sums - 1.0) > STOCHASTIC_TOL):
        raise ValueError("transition matrix failed the column-stochasticity check")
    return P


def assemble(P: CscMatrix, alpha: float, s: SparseVector) -> tuple[CscMatrix, SparseVector]:
    """System matrix I - alpha P and right-hand side (1 - alpha) s."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    n = P.dim
    rows = np.concatenate([np.arange(n, dtype=np.int64), P.indices])
    cols = np.concatenate([np.arange(n, dtype=np.int64), P.column_ids()])
    vals = np.concatenate([np.ones(n), -alpha * P.data])
    A = CscMatrix.from_triplets(n, rows, cols, vals)
    b = SparseVector(n, s.indices, (1.0 - alpha) * s.values)
    return A, b


def build_problem(edges: EdgeList, alpha: float, source: int) -> PageRankProblem:
    """Personalized problem: teleport to `source`, dangling repair to `source`."""
    if not 0 <= source < edges.node_count:
        raise ValueError(f"source {source} out of range")
    P = _transition_matrix(edges, source)
    s = SparseVector.basis(edges.node_count, source)
    A, b = assemble(P, alpha, s)
    return PageRankProblem(P=P, alpha=alpha, source=source, s=s, A=A, b=b)


def synth_bounded_outdegree(N: int, q: int, seed: int) -> EdgeList:
    """Random graph where every node keeps between 1 and q distinct out-edges.

    Deterministic in the seed; duplicate draws collapse, which is how the
    out-degree stays in [1, q].
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if q < 2:
        raise ValueError("q must be >= 2")
    rng = np.random.default_rng(seed)
    degrees = rng.integers(1, q + 1, size=N)
    src = np.repeat(np.arange(N, dtype=np.int64), degrees)
    dst = rng.integers(0, N, size=int(degrees.sum()), dtype=np.int64)
    pairs = np.unique(np.stack([src, dst], axis=1), axis=0)
    return EdgeList(
        node_count=N,
        src=pairs[:, 0],
        dst=pairs[:, 1],
        id_map={i: i for i in range(N)},
    )
