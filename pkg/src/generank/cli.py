"""Command-line front end: generate, solve, bench, verify.

Exit codes: 0 success, 2 argument errors (argparse), 3 convergence
failure, 4 verification failure, 1 I/O or data errors. Every output
document embeds its provenance (seed, alpha, tol, method, versions), and
repeated runs with identical seeds produce identical iteration counts,
residual histories, and solution files; only timing fields vary.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

import generank
from generank import _backend
from generank.bench import ALPHA_GRID_DEFAULT, BenchSpec, run_bench
from generank.datagen import (
    AnnotationTable,
    RengaParams,
    build_adjacency_from_annotations,
    generate_renga,
    make_expression_vector,
)
from generank.model import GeneRankProblem, write_solution_csv
from generank.solvers import METHODS, SolverConfig, solve
from generank.sparse import read_matrix_market, write_matrix_market
from generank.spectral import check_spectral_claims, dense_spectrum, spectral_report
from generank.model import OperatorHandle

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3
EXIT_VERIFY_FAILED = 4

_METHOD_FLAGS = {m.replace("_", "-"): m for m in METHODS}


def _provenance(**kw):
    doc = {"package_version": generank.__version__, "backend": _backend.backend_name()}
    doc.update(kw)
    return doc


def _parse_matrix_source(source, seed):
    """A path to a Matrix Market file, or `renga:n=...,lambda=...,beta=...`."""
    if source.startswith("renga:"):
        params = {}
        for part in source[len("renga:"):].split(","):
            if not part:
                continue
            key, _, value = part.partition("=")
            params[key.strip()] = value.strip()
        try:
            renga = RengaParams(
                n=int(params.pop("n")),
                lam=float(params.pop("lambda")),
                beta=float(params.pop("beta", "1")),
                seed=int(params.pop("seed", str(seed))),
            )
        except KeyError as exc:
            raise ValueError(f"matrix source {source!r} is missing key {exc}")
        if params:
            raise ValueError(f"matrix source {source!r} has unknown keys {sorted(params)}")
        return generate_renga(renga), source
    W = read_matrix_market(source)
    W.validate_adjacency()
    return W, source


def _make_ex(args, n):
    return make_expression_vector(
        args.ex, n, seed=args.seed, path=getattr(args, "ex_file", None)
    )


def _alpha_list(text):
    alphas = tuple(float(a) for a in text.split(",") if a)
    if not alphas:
        raise argparse.ArgumentTypeError("empty alpha list")
    for a in alphas:
        if not 0.0 < a < 1.0:
            raise argparse.ArgumentTypeError(f"alpha must lie in the open interval (0, 1), got {a}")
    return alphas


def _alpha_value(text):
    a = float(text)
    if not 0.0 < a < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in the open interval (0, 1), got {a}")
    return a


def _out_dir(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- generate ---------------------------------------------------------------


def cmd_generate(args):
    out = _out_dir(args)
    if args.generator == "renga":
        params = RengaParams(n=args.n, lam=args.lam, beta=args.beta, seed=args.seed)
        W = generate_renga(params)
        stem = args.name or f"renga_n{args.n}_seed{args.seed}"
        mtx = out / f"{stem}.mtx"
        write_matrix_market(W, mtx)
        meta = {
            "generator": "renga",
            "n": params.n,
            "lambda": params.lam,
            "beta": params.beta,
            "seed": params.seed,
            "edges": W.nnz // 2,
            "provenance": _provenance(),
        }
        (out / f"{stem}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")
        print(f"wrote {mtx} ({W.n} nodes, {W.nnz // 2} edges)")
        return EXIT_OK
    # from-annotations
    table = AnnotationTable.from_tsv(args.annotations)
    W, gene_ids = build_adjacency_from_annotations(table)
    stem = args.name or Path(args.annotations).stem
    mtx = out / f"{stem}.mtx"
    write_matrix_market(W, mtx)
    map_path = out / f"{stem}.genes.csv"
    with open(map_path, "w", encoding="utf-8") as fh:
        fh.write("gene_id,row\n")
        for i, g in enumerate(gene_ids, start=1):
            fh.write(f"{g},{i}\n")
    meta = {
        "generator": "annotations",
        "source": str(args.annotations),
        "n": W.n,
        "edges": W.nnz // 2,
        "provenance": _provenance(),
    }
    (out / f"{stem}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"wrote {mtx} and {map_path} ({W.n} genes, {W.nnz // 2} links)")
    return EXIT_OK


# -- solve -------------------------------------------------------------------


def cmd_solve(args):
    out = _out_dir(args)
    W, source = _parse_matrix_source(args.matrix, args.seed)
    ex = _make_ex(args, W.n)
    problem = GeneRankProblem(W, args.alpha, ex)
    config = SolverConfig(
        method=_METHOD_FLAGS[args.method],
        tol=args.tol,
        max_iter=args.max_iter,
        recompute_every=args.recompute_every,
    )
    report = solve(problem, config)
    doc = report.to_dict()
    doc["provenance"] = _provenance(
        matrix=source, ex=args.ex, seed=args.seed, tol=args.tol,
        alpha=args.alpha, method=args.method,
    )
    (out / "report.json").write_text(json.dumps(doc, indent=2) + "\n")
    write_solution_csv(out / "ranking.csv", report.solution.x, gene_ids=None)
    status = "converged" if report.converged else "DID NOT CONVERGE"
    print(
        f"{args.method} alpha={args.alpha:g} n={W.n}: {report.iterations} iterations, "
        f"residual {report.final_residual:.3e}, {status} "
        f"({report.wall_time:.3f}s solve, {report.setup_time:.3f}s setup)"
    )
    if not report.converged:
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


# -- bench -------------------------------------------------------------------


def cmd_bench(args):
    out = _out_dir(args)
    W, source = _parse_matrix_source(args.matrix, args.seed)
    ex = _make_ex(args, W.n)
    methods = tuple(_METHOD_FLAGS[m] for m in args.methods.split(",")) if args.methods else METHODS
    spec = BenchSpec(
        matrix_source=source,
        ex_kind=args.ex,
        alphas=args.alphas,
        methods=methods,
        tol=args.tol,
        repetitions=args.reps,
        seed=args.seed,
        max_iter=args.max_iter,
    )
    result = run_bench(W, ex, spec, parallel=args.parallel)
    table = result.text_table()
    print(f"# n={W.n} matrix={source} ex={args.ex} tol={args.tol:g} reps={args.reps}")
    print(table)
    (out / "bench.csv").write_text("\n".join(result.csv_lines()) + "\n")
    doc = {
        "n": W.n,
        "table": table,
        "cells": [vars(c) for c in result.cells],
        "provenance": _provenance(
            matrix=source, ex=args.ex, seed=args.seed, tol=args.tol,
            alphas=list(args.alphas), methods=list(methods), reps=args.reps,
        ),
    }
    (out / "bench.json").write_text(json.dumps(doc, indent=2) + "\n")
    (out / "bench.txt").write_text(table + "\n")
    if not result.all_converged:
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


# -- verify ------------------------------------------------------------------


def cmd_verify(args):
    W, source = _parse_matrix_source(args.matrix, args.seed)
    ex = make_expression_vector("uniform", W.n)
    any_failed = False
    out = Path(args.out_dir) if args.out_dir else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    for alpha in args.alphas:
        problem = GeneRankProblem(W, alpha, ex)
        verdicts = check_spectral_claims(
            problem,
            dense_cap=args.dense_cap,
            lanczos_iters=args.lanczos_iters,
            seed=args.seed,
        )
        npass = sum(1 for v in verdicts if v.passed)
        nrun = sum(1 for v in verdicts if not v.skipped)
        print(f"alpha={alpha:g}: {npass}/{nrun} claims pass")
        for v in verdicts:
            if v.skipped:
                status = "SKIP"
            elif v.passed:
                status = "PASS"
            else:
                status = "FAIL"
                any_failed = True
            measured = " ".join(f"{k}={v.measured[k]}" for k in sorted(v.measured))
            line = f"  {status} {v.name}"
            if measured:
                line += f" [{measured}]"
            if v.detail:
                line += f" ({v.detail})"
            print(line)
        if out is not None and problem.n <= args.dense_cap:
            s_eigs = dense_spectrum(OperatorHandle(problem, "scaled_system"), cap=args.dense_cap)
            t_eigs = dense_spectrum(OperatorHandle(problem, "preconditioned_system"), cap=args.dense_cap)
            np.savetxt(out / f"spectrum_scaled_alpha{alpha:g}.csv", s_eigs, fmt="%.17g")
            np.savetxt(out / f"spectrum_preconditioned_alpha{alpha:g}.csv", t_eigs, fmt="%.17g")
        rep = spectral_report(
            problem, dense_cap=args.dense_cap, lanczos_iters=args.lanczos_iters, seed=args.seed
        )
        print(
            f"  extremes: scaled [{rep.lambda_min_s:.12g}, {rep.lambda_max_s:.12g}] "
            f"cond {rep.cond_s:.6g}; preconditioned [{rep.lambda_min_t:.12g}, "
            f"{rep.lambda_max_t:.12g}] cond {rep.cond_t:.6g} ({rep.method})"
        )
    return EXIT_VERIFY_FAILED if any_failed else EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="generank",
        description="Gene-network ranking solvers, spectral verification, and benchmarks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {generank.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="generate a network instance")
    gen_sub = p_gen.add_subparsers(dest="generator", required=True)
    p_renga = gen_sub.add_parser("renga", help="range-dependent random graph")
    p_renga.add_argument("--n", type=int, required=True)
    p_renga.add_argument("--lambda", dest="lam", type=float, required=True,
                         help="geometric decay of edge probability with index distance")
    p_renga.add_argument("--beta", type=float, default=1.0)
    p_renga.add_argument("--seed", type=int, default=0)
    p_renga.add_argument("--name", default=None, help="output file stem")
    p_renga.add_argument("--out-dir", default=".")
    p_renga.set_defaults(func=cmd_generate)
    p_ann = gen_sub.add_parser("from-annotations", help="link genes sharing an annotation")
    p_ann.add_argument("annotations", help="TSV file: gene_id<TAB>annotation_id")
    p_ann.add_argument("--name", default=None)
    p_ann.add_argument("--out-dir", default=".")
    p_ann.add_argument("--seed", type=int, default=0)
    p_ann.set_defaults(func=cmd_generate, generator="from-annotations")

    p_solve = sub.add_parser("solve", help="solve one instance with one method")
    p_solve.add_argument("--matrix", required=True,
                         help="Matrix Market path or renga:n=...,lambda=...,beta=...")
    p_solve.add_argument("--method", choices=sorted(_METHOD_FLAGS), default="cg-malpha")
    p_solve.add_argument("--alpha", type=_alpha_value, default=0.5)
    p_solve.add_argument("--tol", type=float, default=1e-10)
    p_solve.add_argument("--ex", choices=("uniform", "random", "file"), default="uniform")
    p_solve.add_argument("--ex-file", default=None)
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--max-iter", type=int, default=50_000)
    p_solve.add_argument("--recompute-every", type=int, default=1)
    p_solve.add_argument("--out-dir", default=".")
    p_solve.set_defaults(func=cmd_solve)

    p_bench = sub.add_parser("bench", help="run the (alpha, method) benchmark grid")
    p_bench.add_argument("--matrix", required=True)
    p_bench.add_argument("--alphas", type=_alpha_list, default=ALPHA_GRID_DEFAULT,
                         help="comma-separated damping factors")
    p_bench.add_argument("--methods", default=None,
                         help="comma-separated subset of: " + ",".join(sorted(_METHOD_FLAGS)))
    p_bench.add_argument("--tol", type=float, default=1e-10)
    p_bench.add_argument("--ex", choices=("uniform", "random", "file"), default="uniform")
    p_bench.add_argument("--ex-file", default=None)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--reps", type=int, default=1)
    p_bench.add_argument("--max-iter", type=int, default=50_000)
    p_bench.add_argument("--parallel", action="store_true",
                         help="run grid cells concurrently (timings not comparable)")
    p_bench.add_argument("--out-dir", default=".")
    p_bench.set_defaults(func=cmd_bench)

    p_verify = sub.add_parser("verify", help="check the documented spectral guarantees")
    p_verify.add_argument("--matrix", required=True)
    p_verify.add_argument("--alphas", type=_alpha_list, default=ALPHA_GRID_DEFAULT)
    p_verify.add_argument("--dense-cap", type=int, default=2000)
    p_verify.add_argument("--lanczos-iters", type=int, default=100)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out-dir", default=None,
                          help="export eigenvalue CSVs here (dense path only)")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
