"""Iterative solvers sharing one stopping rule and one reporting format.

Four methods, all started from the zero vector and stopped on the 1-norm
of the residual of the system they iterate on:

- ``cg``          plain conjugate gradient on the spd form
                  (D - alpha*W) xhat = (1-alpha) ex
- ``pcg_jacobi``  conjugate gradient on the Jacobi-scaled form
                  (I - J) xbar = (1-alpha) Dh ex
- ``chebyshev``   Chebyshev semi-iteration accelerating the Jacobi
                  splitting of the spd form (iteration matrix
                  alpha * Dinv W, spectrum inside [-alpha, alpha])
- ``cg_malpha``   conjugate gradient on the scaled form with the
                  polynomial preconditioner I + J applied by
                  multiplication (one extra SpMV per iteration, no
                  linear solve and no setup)

Residual-history entries are recomputed from the true residual every
``recompute_every`` iterations (default: every iteration); a stop
triggered by the recursively updated residual is confirmed against the
true residual before the solver reports convergence.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from generank.model import (
    GeneRankProblem,
    Solution,
    apply_preconditioner,
    apply_scaled_system,
    apply_spd_system,
    assemble_scaled_rhs,
    assemble_spd_rhs,
    recover_solution,
)

METHODS = ("cg", "pcg_jacobi", "chebyshev", "cg_malpha")

METHOD_LABELS = {
    "cg": "CG",
    "pcg_jacobi": "PCG",
    "chebyshev": "Chebyshev",
    "cg_malpha": "CG-Malpha",
}

_BREAKDOWN_EPS = 1e-300


class SolverBreakdownError(RuntimeError):
    """Raised when an inner product or step length degenerates."""


@dataclass(frozen=True)
class SolverConfig:
    """Method selection plus the shared stopping rule.

    tol is an absolute threshold on the residual 1-norm. deterministic
    keeps the fixed kernel reduction order (the only mode implemented;
    the flag is part of the config contract). recompute_every controls
    how often the history entry is the recomputed true residual instead
    of the recursive one; 0 means never (final confirmation still runs).
    """

    method: str
    tol: float = 1e-10
    max_iter: int = 50_000
    deterministic: bool = True
    recompute_every: int = 1
    x0: np.ndarray | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.recompute_every < 0:
            raise ValueError(f"recompute_every must be >= 0, got {self.recompute_every}")


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one solve: counts, residual trace, timing, solution."""

    method: str
    alpha: float
    n: int
    tol: float
    iterations: int
    converged: bool
    residual_history: np.ndarray
    wall_time: float
    setup_time: float
    solution: Solution
    final_residual_spd: float
    backend: str = field(default="")

    @property
    def final_residual(self):
        return float(self.residual_history[-1])

    def to_dict(self, include_history=True):
        """JSON-safe document (solution vectors are exported separately)."""
        doc = {
            "method": self.method,
            "method_label": METHOD_LABELS[self.method],
            "alpha": self.alpha,
            "n": self.n,
            "tol": self.tol,
            "iterations": self.iterations,
            "converged": self.converged,
            "final_residual": self.final_residual,
            "final_residual_spd": self.final_residual_spd,
            "wall_time_seconds": self.wall_time,
            "setup_time_seconds": self.setup_time,
            "backend": self.backend,
        }
        if include_history:
            doc["residual_history"] = [float(r) for r in self.residual_history]
        return doc

    def csv_row(self):
        """`method,alpha,iterations,wall_time_seconds` table row."""
        return f"{METHOD_LABELS[self.method]},{self.alpha:g},{self.iterations},{self.wall_time:.6f}"


def _norm1(v):
    return float(np.abs(v).sum())


def _start_vector(n, x0):
    if x0 is None:
        return np.zeros(n, dtype=np.float64), True
    x = np.array(x0, dtype=np.float64)
    if x.shape != (n,):
        raise ValueError(f"x0 length {x.shape} does not match n={n}")
    return x, bool(np.all(x == 0.0))


def _cg_engine(apply_op, b, config, apply_precond=None, callback=None):
    """Conjugate gradient with optional multiplicative preconditioning.

    Returns (x, history, converged, iterations). History entries are true
    residual 1-norms at the configured cadence, recursive in between;
    the entry that triggers convergence is always a true residual.
    """
    x, at_zero = _start_vector(b.shape[0], config.x0)
    r = b.copy() if at_zero else b - apply_op(x)
    history = [_norm1(r)]
    if history[0] < config.tol:
        return x, history, True, 0

    if apply_precond is None:
        z = r
        rz = float(r @ r)
    else:
        z = apply_precond(r)
        rz = float(r @ z)
        if rz <= 0.0:
            raise SolverBreakdownError(
                f"loss of positive definiteness: <r, M r> = {rz:.3e} at iteration 0"
            )
    p = z.copy()
    converged = False
    k = 0
    every = config.recompute_every
    while k < config.max_iter:
        k += 1
        q = apply_op(p)
        pq = float(p @ q)
        if abs(pq) < _BREAKDOWN_EPS:
            raise SolverBreakdownError(
                f"step-length denominator <p, A p> = {pq:.3e} at iteration {k}"
            )
        step = rz / pq
        x += step * p
        r -= step * q
        if every and k % every == 0:
            res = _norm1(b - apply_op(x))
            is_true = True
        else:
            res = _norm1(r)
            is_true = False
        history.append(res)
        if callback is not None:
            callback(k, x)
        if res < config.tol:
            if not is_true:
                res = _norm1(b - apply_op(x))
                history[-1] = res
            if res < config.tol:
                converged = True
                break
        if apply_precond is None:
            rz_new = float(r @ r)
            z = r
        else:
            z = apply_precond(r)
            rz_new = float(r @ z)
            if rz_new <= 0.0:
                raise SolverBreakdownError(
                    f"loss of positive definiteness: <r, M r> = {rz_new:.3e} at iteration {k}"
                )
        beta = rz_new / rz
        p = z + beta * p
        rz = rz_new
    return x, history, converged, k


def _finish(problem, config, form, u, history, converged, iters, wall, setup):
    from generank import _backend

    solution = recover_solution(form, u, problem.d)
    spd_res = assemble_spd_rhs(problem) - apply_spd_system(problem, solution.xhat)
    return SolveReport(
        method=config.method,
        alpha=problem.alpha,
        n=problem.n,
        tol=config.tol,
        iterations=iters,
        converged=converged,
        residual_history=np.asarray(history, dtype=np.float64),
        wall_time=wall,
        setup_time=setup,
        solution=solution,
        final_residual_spd=_norm1(spd_res),
        backend=_backend.backend_name(),
    )


def solve_cg(problem, config, callback=None):
    """Plain conjugate gradient on the spd form."""
    t0 = time.perf_counter()
    b = assemble_spd_rhs(problem)
    apply_op = lambda v: apply_spd_system(problem, v)
    setup = time.perf_counter() - t0
    t1 = time.perf_counter()
    u, hist, conv, iters = _cg_engine(apply_op, b, config, callback=callback)
    wall = time.perf_counter() - t1
    return _finish(problem, config, "spd", u, hist, conv, iters, wall, setup)


def solve_pcg_jacobi(problem, config, callback=None):
    """Conjugate gradient on the Jacobi-scaled form."""
    t0 = time.perf_counter()
    b = assemble_scaled_rhs(problem)
    apply_op = lambda v: apply_scaled_system(problem, v)
    setup = time.perf_counter() - t0
    t1 = time.perf_counter()
    u, hist, conv, iters = _cg_engine(apply_op, b, config, callback=callback)
    wall = time.perf_counter() - t1
    return _finish(problem, config, "scaled", u, hist, conv, iters, wall, setup)


def solve_cg_malpha(problem, config, callback=None):
    """Preconditioned CG on the scaled form, preconditioning step z = (I+J) r.

    Equivalent to CG on the spd operator I - J^2; the preconditioner is
    applied by one extra SpMV per iteration and needs no setup.
    """
    t0 = time.perf_counter()
    b = assemble_scaled_rhs(problem)
    apply_op = lambda v: apply_scaled_system(problem, v)
    apply_m = lambda v: apply_preconditioner(problem, v)
    setup = time.perf_counter() - t0
    t1 = time.perf_counter()
    u, hist, conv, iters = _cg_engine(apply_op, b, config, apply_precond=apply_m, callback=callback)
    wall = time.perf_counter() - t1
    return _finish(problem, config, "scaled", u, hist, conv, iters, wall, setup)


def solve_chebyshev(problem, config, callback=None):
    """Chebyshev semi-iteration for the spd form with Jacobi splitting.

    The damped-adjacency iteration matrix has spectrum inside
    [-alpha, alpha]; the classical two-term parameter recurrence for that
    interval is used (first step is a plain Jacobi step). The residual
    of the spd form drives both the update and the stopping test, so
    every history entry is a true residual at no extra SpMV cost.
    """
    t0 = time.perf_counter()
    b = assemble_spd_rhs(problem)
    dinv = 1.0 / problem.d
    rho = problem.alpha
    setup = time.perf_counter() - t0

    t1 = time.perf_counter()
    x, at_zero = _start_vector(problem.n, config.x0)
    r = b.copy() if at_zero else b - apply_spd_system(problem, x)
    history = [_norm1(r)]
    converged = False
    k = 0
    if history[0] < config.tol:
        wall = time.perf_counter() - t1
        return _finish(problem, config, "spd", x, history, True, 0, wall, setup)

    y_prev = x
    y = x + dinv * r
    k = 1
    omega = 2.0 / (2.0 - rho * rho)
    while True:
        r = b - apply_spd_system(problem, y)
        history.append(_norm1(r))
        if callback is not None:
            callback(k, y)
        if history[-1] < config.tol:
            converged = True
            break
        if k == config.max_iter:
            break
        # y_next = omega*(G y + c - y_prev) + y_prev, with G y + c = y + Dinv r
        y_next = omega * (y + dinv * r - y_prev) + y_prev
        y_prev, y = y, y_next
        omega = 1.0 / (1.0 - 0.25 * rho * rho * omega)
        k += 1
    wall = time.perf_counter() - t1
    return _finish(problem, config, "spd", y, history, converged, k, wall, setup)


_SOLVERS = {
    "cg": solve_cg,
    "pcg_jacobi": solve_pcg_jacobi,
    "chebyshev": solve_chebyshev,
    "cg_malpha": solve_cg_malpha,
}


def solve(problem, config, callback=None):
    """Dispatch to the configured method."""
    return _SOLVERS[config.method](problem, config, callback=callback)
