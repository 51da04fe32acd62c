"""Command-line driver for the solver, baselines, sweeps, and diagnostics.

Exit codes: 0 success, 1 input error (bad flags, unreadable or malformed
files), 2 numerical failure (reference solve did not converge).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .baselines import WalkCapError, mc_surfer, push_cd
from .harness import run_sweep, tail_report
from .operators import MatrixMarketError, diagnostics, load_matrix_market
from .pagerank import DEFAULT_ALPHA, build_problem, load_edge_list
from .sampling import RandomStream
from .solvers import NonConvergenceError, RsriConfig, reference_solve, rsri
from .vectors import SparseVector

__all__ = ["cli_main", "main"]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsri", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_source=False):
        p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
        p.add_argument("--m", default="32", help="sparsity level; comma list for sweep")
        p.add_argument("--t", type=int, default=1000)
        p.add_argument("--tmin", type=int, default=None, help="burn-in (default t/2)")
        p.add_argument("--trials", type=int, default=10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.add_argument("--oracle-tol", type=float, default=1e-12)
        if needs_source:
            p.add_argument("--source", type=int, default=0)

    p_solve = sub.add_parser("solve", help="solve A x = b from Matrix Market + b file")
    p_solve.add_argument("matrix")
    p_solve.add_argument("rhs", help="text file of 'index value' lines, 0-based")
    common(p_solve)

    p_pr = sub.add_parser("pagerank", help="personalized ranking from an edge list")
    p_pr.add_argument("edges")
    p_pr.add_argument("--topk", type=int, default=10)
    common(p_pr, needs_source=True)

    p_sweep = sub.add_parser("sweep", help="rmse vs sparsity level, CSV + SVG")
    p_sweep.add_argument("edges")
    common(p_sweep, needs_source=True)

    p_tail = sub.add_parser("tail", help="tail decay of the reference solution")
    p_tail.add_argument("edges")
    common(p_tail, needs_source=True)

    p_base = sub.add_parser("baseline", help="run a comparison algorithm")
    p_base.add_argument("kind", choices=["mc", "push"])
    p_base.add_argument("edges")
    common(p_base, needs_source=True)

    p_diag = sub.add_parser("diagnose", help="contraction diagnostics for a matrix")
    p_diag.add_argument("matrix")
    p_diag.add_argument("--out", default=None)

    return parser


def _load_rhs(path, dim: int) -> SparseVector:
    pairs = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) < 2:
            raise ValueError(f"rhs line {line_no}: expected 'index value'")
        pairs.append((int(tokens[0]), float(tokens[1])))
    return SparseVector.from_pairs(dim, pairs)


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _estimate_csv(estimate: SparseVector) -> str:
    lines = ["index,value"]
    lines.extend(f"{i},{_fmt(v)}" for i, v in zip(estimate.indices, estimate.values))
    return "\n".join(lines) + "\n"


def _config(args) -> RsriConfig:
    t_min = args.tmin if args.tmin is not None else args.t // 2
    m = int(str(args.m).split(",")[0])
    return RsriConfig(m=m, t=args.t, t_min=t_min, seed=args.seed, trials=args.trials)


def _cmd_solve(args) -> int:
    A = load_matrix_market(args.matrix)
    b = _load_rhs(args.rhs, A.dim)
    cfg = _config(args)
    report = rsri(A, b, cfg, RandomStream(cfg.seed))
    _emit(_estimate_csv(report.estimate), args.out)
    print(
        f"solved dim={A.dim} nnz_estimate={report.estimate.nnz} "
        f"column_accesses={report.column_accesses} rng={report.rng_kind} "
        f"wall={report.wall_clock:.2f}s",
        file=sys.stderr,
    )
    return 0


def _cmd_pagerank(args) -> int:
    edges = load_edge_list(args.edges)
    problem = build_problem(edges, args.alpha, args.source)
    cfg = _config(args)
    report = rsri(problem.A, problem.b, cfg, RandomStream(cfg.seed))
    est = report.estimate
    label_of = {dense: label for label, dense in edges.id_map.items()}
    order = np.argsort(-est.values)[: args.topk]
    print("rank,node,score")
    for rank, pos in enumerate(order, start=1):
        print(f"{rank},{label_of[int(est.indices[pos])]},{_fmt(est.values[pos])}")
    if args.out:
        _emit(_estimate_csv(est), args.out)
    return 0


def _cmd_sweep(args) -> int:
    edges = load_edge_list(args.edges)
    problem = build_problem(edges, args.alpha, args.source)
    cfg = _config(args)
    m_list = [int(tok) for tok in str(args.m).split(",") if tok]
    csv_path = args.out or "sweep.csv"
    svg_path = str(Path(csv_path).with_suffix(".svg"))
    oracle = reference_solve(problem.A, problem.b, tol=args.oracle_tol)
    run_sweep(problem, cfg, m_list, oracle, csv_path=csv_path, svg_path=svg_path)
    print(f"wrote {csv_path} and {svg_path}", file=sys.stderr)
    return 0


def _cmd_tail(args) -> int:
    edges = load_edge_list(args.edges)
    problem = build_problem(edges, args.alpha, args.source)
    oracle = reference_solve(problem.A, problem.b, tol=args.oracle_tol)
    _emit(tail_report(oracle), args.out)
    return 0


def _cmd_baseline(args) -> int:
    edges = load_edge_list(args.edges)
    problem = build_problem(edges, args.alpha, args.source)
    oracle = reference_solve(problem.A, problem.b, tol=args.oracle_tol)
    if args.kind == "mc":
        walks = int(str(args.m).split(",")[0])
        est = mc_surfer(problem.P, problem.s, args.alpha, walks, RandomStream(args.seed))
        err = float(np.linalg.norm(est.to_dense() - oracle))
        print(f"mc walks={walks} error_2={_fmt(err)}")
        if args.out:
            _emit(_estimate_csv(est), args.out)
    else:
        _, trace = push_cd(problem.P, problem.s, args.alpha, args.t, oracle_x=oracle)
        lines = ["step,residual_inf,error_2"]
        lines.extend(
            f"{s},{_fmt(r)},{_fmt(e)}"
            for s, r, e in zip(trace.steps, trace.residual_inf, trace.error_2)
        )
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_diagnose(args) -> int:
    A = load_matrix_market(args.matrix)
    diag = diagnostics(A)
    text = (
        f"g_norm1 = {_fmt(diag.g_norm1)}\n"
        f"m_g_simple = {_fmt(diag.m_g_simple)}\n"
        f"m_g_series = {_fmt(diag.m_g_series)}\n"
        f"is_contraction = {'true' if diag.is_contraction else 'false'}\n"
    )
    _emit(text, args.out)
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "pagerank": _cmd_pagerank,
    "sweep": _cmd_sweep,
    "tail": _cmd_tail,
    "baseline": _cmd_baseline,
    "diagnose": _cmd_diagnose,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return _COMMANDS[args.command](args)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MatrixMarketError, WalkCapError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
