"""Walk through the sparsifier on a small vector.

Shows the exact-preservation split, a handful of random compressions, and
the unbiasedness + 1-norm preservation that make the solver work.
"""
import numpy as np

from rsri import (
    RandomStream,
    SparseVector,
    norms,
    preservation_split,
    sparsify,
    sparsify_l2_bound,
    tail_sums,
)

v = SparseVector.from_pairs(8, [(0, 4.0), (1, 2.0), (2, 1.0), (3, 1.0), (5, 0.5), (7, 0.25)])
m = 3

print("input vector  :", dict(zip(v.indices.tolist(), v.values.tolist())))
print("one norm      :", norms(v).one)
print("tail sums     :", tail_sums(v))

split = preservation_split(v, m)
print("\nexact set D   :", split.exact_indices.tolist())
print("residual index:", split.residual_indices.tolist())
print("residual probs:", np.round(split.residual_probs, 4).tolist())

rng = RandomStream(seed=7)
print("\nfive draws (index: value):")
for _ in range(5):
    out = sparsify(v, m, rng)
    print("  ", dict(zip(out.indices.tolist(), np.round(out.values, 3).tolist())),
          "| one norm", norms(out).one)

# unbiasedness: the empirical mean converges to v entry by entry
draws = 200_000
acc = np.zeros(v.dim)
rng = RandomStream(seed=8)
for _ in range(draws):
    out = sparsify(v, m, rng)
    acc[out.indices] += out.values
print("\nempirical mean:", np.round(acc / draws, 4))
print("exact vector  :", v.to_dense())
print("mse bound     :", sparsify_l2_bound(v, m))
