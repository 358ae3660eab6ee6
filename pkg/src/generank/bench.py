"""Benchmark grid: (alpha, method) sweep with iteration counts and timings.

Mirrors the standard reporting layout for this problem family: one row
per method, one column per alpha, each cell `iterations(seconds)` with
the median solve wall time over the configured repetitions. Iteration
counts are deterministic for fixed seeds; timings are not.
"""
from __future__ import annotations

import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from generank.model import GeneRankProblem
from generank.solvers import METHOD_LABELS, METHODS, SolverConfig, solve

ALPHA_GRID_DEFAULT = (0.5, 0.75, 0.80, 0.99)


@dataclass(frozen=True)
class BenchSpec:
    """One benchmark run: matrix source, expression kind, grid, stopping."""

    matrix_source: str
    ex_kind: str = "uniform"
    alphas: tuple = ALPHA_GRID_DEFAULT
    methods: tuple = METHODS
    tol: float = 1e-10
    repetitions: int = 1
    seed: int = 0
    max_iter: int = 50_000

    def __post_init__(self):
        for a in self.alphas:
            if not 0.0 < a < 1.0:
                raise ValueError(f"alpha grid values must lie in (0, 1), got {a}")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")


@dataclass
class BenchCell:
    """One (alpha, method) grid cell."""

    method: str
    alpha: float
    iterations: int = 0
    converged: bool = False
    solve_seconds: float = 0.0
    setup_seconds: float = 0.0
    final_residual: float = float("nan")
    error: str = ""

    @property
    def label(self):
        if self.error or not self.converged:
            return "DNF"
        return f"{self.iterations}({self.solve_seconds:.3f})"


@dataclass
class BenchResult:
    spec: BenchSpec
    n: int
    cells: list = field(default_factory=list)

    @property
    def all_converged(self):
        return all(c.converged and not c.error for c in self.cells)

    def cell(self, method, alpha):
        for c in self.cells:
            if c.method == method and c.alpha == alpha:
                return c
        raise KeyError((method, alpha))

    def iterations_table(self):
        """{method: {alpha: iterations}} for converged cells."""
        out = {}
        for c in self.cells:
            out.setdefault(c.method, {})[c.alpha] = c.iterations if c.converged else None
        return out

    def text_table(self):
        """Aligned text table, one method per row, one alpha per column."""
        alphas = list(dict.fromkeys(c.alpha for c in self.cells))
        methods = list(dict.fromkeys(c.method for c in self.cells))
        width = 14
        head = "alpha".ljust(12) + "".join(f"{a:<{width}g}" for a in alphas)
        lines = [head]
        for m in methods:
            row = METHOD_LABELS[m].ljust(12)
            for a in alphas:
                row += self.cell(m, a).label.ljust(width)
            lines.append(row)
        return "\n".join(lines)

    def csv_lines(self):
        """CSV rows: method,alpha,iterations,converged,setup_s,solve_s,residual."""
        lines = ["method,alpha,iterations,converged,setup_seconds,solve_seconds,final_residual"]
        for c in self.cells:
            lines.append(
                f"{METHOD_LABELS[c.method]},{c.alpha:g},{c.iterations},{str(c.converged).lower()},"
                f"{c.setup_seconds:.6f},{c.solve_seconds:.6f},{c.final_residual:.6e}"
            )
        return lines


def _run_cell(W, ex, alpha, method, spec):
    cell = BenchCell(method=method, alpha=alpha)
    try:
        problem = GeneRankProblem(W, alpha, ex)
        config = SolverConfig(method=method, tol=spec.tol, max_iter=spec.max_iter)
        times = []
        report = None
        for _ in range(spec.repetitions):
            report = solve(problem, config)
            times.append(report.wall_time)
        cell.iterations = report.iterations
        cell.converged = report.converged
        cell.solve_seconds = statistics.median(times)
        cell.setup_seconds = report.setup_time
        cell.final_residual = report.final_residual
    except Exception as exc:  # recorded as DNF, surfaced via exit status
        cell.error = f"{type(exc).__name__}: {exc}"
    return cell


def run_bench(W, ex, spec, parallel=False):
    """Run the full (alpha, method) grid on one matrix.

    Sequential by default for clean timings; `parallel=True` runs cells
    in threads, which invalidates timing comparability.
    """
    grid = [(a, m) for a in spec.alphas for m in spec.methods]
    result = BenchResult(spec=spec, n=W.n)
    if parallel:
        with ThreadPoolExecutor() as pool:
            result.cells = list(
                pool.map(lambda cell: _run_cell(W, ex, cell[0], cell[1], spec), grid)
            )
    else:
        result.cells = [_run_cell(W, ex, a, m, spec) for a, m in grid]
    return result
