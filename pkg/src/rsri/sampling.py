"""Pivotal sampling and the seeded random-stream contract.

Pivotal sampling selects exactly m indices with prescribed inclusion
probabilities in a single pass, via sequential duels between the
accumulated fractional mass and the next nonzero entry.  Selections are
negatively correlated, which is what the sparsifier's variance analysis
relies on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "ProbabilityVector",
    "RandomStream",
    "spawn_stream",
    "pivotal_sample",
    "pivotal_sample_batch",
]

SUM_TOL = 1e-9


@dataclass(frozen=True)
class ProbabilityVector:
    """Inclusion probabilities in [0, 1) whose total is (nearly) an integer."""

    dim: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} probabilities, got shape {p.shape}")
        if p.size and (p.min() < 0.0 or p.max() >= 1.0):
            raise ValueError("probabilities must lie in [0, 1)")
        total = math.fsum(p.tolist())
        target = round(total)
        if target < 0 or abs(total - target) > SUM_TOL:
            raise ValueError(
                f"probabilities must sum to a nonnegative integer within {SUM_TOL}, got {total!r}"
            )
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "_target", int(target))

    @property
    def target_size(self) -> int:
        return self._target


@dataclass
class RandomStream:
    """Reproducible PCG64 stream addressed by (seed, spawn path).

    The derivation is numpy's SeedSequence with the path as spawn key, so
    a stream is a pure function of (seed, path) and replays identically
    across process restarts.  Streams are single-owner mutable: never
    share one between concurrent tasks, spawn children instead.
    """

    seed: int
    path: tuple[int, ...] = ()
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be a 64-bit nonnegative integer")
        seq = np.random.SeedSequence(entropy=int(self.seed), spawn_key=self.path)
        self._gen = np.random.Generator(np.random.PCG64(seq))

    kind = "pcg64"

    def random(self, size=None):
        return self._gen.random(size)


def spawn_stream(master: RandomStream, trial: int) -> RandomStream:
    """Derive the child stream for one trial; deterministic in (seed, trial)."""
    if trial < 0:
        raise ValueError("trial must be nonnegative")
    return RandomStream(master.seed, master.path + (int(trial),))


def _as_probs(p: Union[ProbabilityVector, np.ndarray]) -> ProbabilityVector:
    if isinstance(p, ProbabilityVector):
        return p
    arr = np.asarray(p, dtype=np.float64)
    return ProbabilityVector(arr.size, arr)


def pivotal_sample(p: Union[ProbabilityVector, np.ndarray], rng: RandomStream) -> np.ndarray:
    """Draw a random index set S with |S| = round(sum p) and P{i in S} = p_i.

    One pass over the nonzero probabilities; zero entries are skipped
    without consuming randomness, so zero padding never perturbs the draw
    sequence.  The running fractional mass is kept with compensated
    summation and the final duel forces |S| to exactly m even when the
    input sums to m only up to rounding.
    """
    pv = _as_probs(p)
    return _pivotal_core(pv.probs, pv.target_size, rng)


def _pivotal_core(probs_full: np.ndarray, m: int, rng: RandomStream) -> np.ndarray:
    nz = np.flatnonzero(probs_full)
    if nz.size == 0:
        return np.empty(0, dtype=np.int64)
    probs = probs_full[nz]
    uniforms = rng.random(nz.size - 1) if nz.size > 1 else np.empty(0)

    selected: list[int] = []
    carry_idx = int(nz[0])
    carry = float(probs[0])
    comp = 0.0  # Kahan compensation for carry

    def _add(delta: float):
        nonlocal carry, comp
        y = delta - comp
        t = carry + y
        comp = (t - carry) - y
        carry = t

    for k in range(1, nz.size):
        pi = float(probs[k])
        u = uniforms[k - 1]
        total = carry + pi
        if total < 1.0:
            # one unit survives with the combined mass, the other drops to zero
            if u * total >= carry:
                carry_idx = int(nz[k])
            _add(pi)
        else:
            # one unit is rounded up to 1, the other keeps total - 1
            if u * (2.0 - total) < 1.0 - pi:
                selected.append(carry_idx)
                carry_idx = int(nz[k])
            else:
                selected.append(int(nz[k]))
            _add(pi - 1.0)
            if carry < 0.0:
                carry, comp = 0.0, 0.0

    if len(selected) == m - 1:
        selected.append(carry_idx)  # residual mass ~ 1: forced completion
    elif len(selected) != m:
        raise RuntimeError(
            f"pivotal sampling produced {len(selected)} selections for target {m}"
        )
    out = np.array(sorted(selected), dtype=np.int64)
    return out


def pivotal_sample_batch(
    p: Union[ProbabilityVector, np.ndarray], rng: RandomStream, draws: int
) -> np.ndarray:
    """Vectorized pivotal sampling: a (draws, dim) boolean selection matrix.

    Same duel recursion as :func:`pivotal_sample` run across many draws at
    once; used by the calibration and variance estimators where millions
    of draws are needed.  The two paths consume randomness in different
    orders, so draws are not sample-for-sample identical across them.
    """
    pv = _as_probs(p)
    m = pv.target_size
    nz = np.flatnonzero(pv.probs)
    sel = np.zeros((draws, pv.dim), dtype=bool)
    if nz.size == 0 or draws == 0:
        return sel
    probs = pv.probs[nz]
    u = rng.random((draws, nz.size - 1)) if nz.size > 1 else np.empty((draws, 0))

    rows = np.arange(draws)
    carry_idx = np.full(draws, nz[0], dtype=np.int64)
    carry = np.full(draws, probs[0])
    for k in range(1, nz.size):
        pi = probs[k]
        uk = u[:, k - 1]
        total = carry + pi
        hi = total >= 1.0
        lo = ~hi
        switch = lo & (uk * total >= carry)
        carry_idx[switch] = nz[k]
        carry[lo] = total[lo]

        take_carry = hi & (uk * (2.0 - total) < 1.0 - pi)
        take_new = hi & ~take_carry
        sel[rows[take_carry], carry_idx[take_carry]] = True
        carry_idx[take_carry] = nz[k]
        sel[rows[take_new], nz[k]] = True
        carry[hi] = np.maximum(total[hi] - 1.0, 0.0)

    counts = sel.sum(axis=1)
    force = counts == m - 1
    sel[rows[force], carry_idx[force]] = True
    counts = sel.sum(axis=1)
    if not np.all(counts == m):
        raise RuntimeError("pivotal sampling batch produced off-target set sizes")
    return sel
