"""Error-versus-sparsity sweep with CSV and SVG output.

Reproduces the qualitative scaling picture: the sparsified solver's error
falls faster than the square-root Monte Carlo rate as m grows.  Writes
sweep.csv and sweep.svg next to this script.
"""
from pathlib import Path

import numpy as np

from rsri import RsriConfig, build_problem, run_sweep, synth_bounded_outdegree

edges = synth_bounded_outdegree(800, 3, seed=3)
problem = build_problem(edges, alpha=0.85, source=0)

cfg = RsriConfig(m=8, t=400, t_min=200, seed=0, trials=5)
here = Path(__file__).resolve().parent
rows = run_sweep(
    problem,
    cfg,
    m_list=[4, 8, 16, 32, 64, 128],
    csv_path=here / "sweep.csv",
    svg_path=here / "sweep.svg",
)

ms = np.array([r.m for r in rows], dtype=float)
rmse = np.array([r.rmse for r in rows])
mc = np.array([r.mc_rmse for r in rows])
slope = np.polyfit(np.log(ms), np.log(rmse), 1)[0]
mc_slope = np.polyfit(np.log(ms), np.log(mc), 1)[0]
print(f"solver slope {slope:.3f} vs matched-cost Monte Carlo slope {mc_slope:.3f}")
print(f"wrote {here / 'sweep.csv'} and {here / 'sweep.svg'}")
