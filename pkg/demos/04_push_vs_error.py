"""The push baseline's residual falls while its true error stalls.

Runs greedy coordinate pushes on a mid-size graph and prints the widening
gap between the sup-norm residual and the Euclidean error, the behavior
that motivates solving with randomization instead.
"""
import numpy as np

from rsri import build_problem, push_cd, reference_solve, synth_bounded_outdegree

edges = synth_bounded_outdegree(5000, 3, seed=12)
problem = build_problem(edges, alpha=0.85, source=0)
oracle = reference_solve(problem.A, problem.b)

_, trace = push_cd(problem.P, problem.s, 0.85, steps=5000, oracle_x=oracle)

print(f"{'step':>6} {'residual_inf':>14} {'error_2':>12} {'ratio':>8}")
for step in (10, 100, 1000, 5000):
    k = int(np.searchsorted(trace.steps, step))
    r, e = trace.residual_inf[k], trace.error_2[k]
    print(f"{step:>6} {r:>14.3e} {e:>12.3e} {e / r:>8.1f}")
