"""Gene-ranking problem definition, operators, and solution transforms.

A problem instance couples a symmetric 0/1 gene network ``W`` with a
damping factor ``alpha`` in (0, 1) and a nonnegative expression-change
vector ``ex``. The ranking vector ``x`` solves the nonsymmetric system

    (I - alpha*W*Dinv) x = (1 - alpha) ex,

where ``D`` is the diagonal degree scaling (degree, or 1 for isolated
nodes). Two equivalent symmetric forms are solved in practice:

    spd form:     (D - alpha*W) xhat = (1 - alpha) ex,      x = D xhat
    scaled form:  (I - J) xbar = (1 - alpha) Dh ex,         x = D^{1/2} xbar

with ``Dh = D^{-1/2}`` and ``J = alpha * Dh W Dh`` (the damped
symmetrically normalized adjacency). The polynomial preconditioner is
``I + J``, applied by multiplication; the resulting preconditioned
operator is ``(I + J)(I - J) = I - J^2``, symmetric positive definite
with spectrum inside [1 - alpha^2, 1).

All operators are applied matrix-free (diagonal scalings around one CSR
SpMV each); dense assembly exists only for verification at small n.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from generank.sparse import SparseSymMatrix

DENSE_CAP_DEFAULT = 2000

SYSTEM_FORMS = ("nonsymmetric", "spd", "scaled")

OPERATOR_KINDS = (
    "damped_adjacency",       # J = alpha * Dh W Dh
    "scaled_system",          # I - J
    "preconditioner",         # I + J
    "preconditioned_system",  # (I + J)(I - J) = I - J^2
    "spd_system",             # D - alpha * W
)


def build_degree_scaling(W):
    """Diagonal of D: the row sum where positive, 1 for isolated nodes."""
    d = W.row_sums()
    d[d <= 0.0] = 1.0
    return d


@dataclass(frozen=True)
class GeneRankProblem:
    """One ranking instance: network, damping factor, expression vector.

    The degree scaling is always recomputed from ``W`` so it cannot drift
    out of sync. Instances are immutable and safe to share.
    """

    W: SparseSymMatrix
    alpha: float
    ex: np.ndarray
    d: np.ndarray = field(init=False)
    inv_sqrt_d: np.ndarray = field(init=False)

    def __post_init__(self):
        self.W.validate_adjacency()
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(
                f"alpha must lie in the open interval (0, 1), got {self.alpha}"
            )
        ex = np.ascontiguousarray(self.ex, dtype=np.float64)
        if ex is self.ex:
            ex = ex.copy()
        if ex.shape != (self.W.n,):
            raise ValueError(
                f"expression vector length {ex.shape} does not match n={self.W.n}"
            )
        if not np.all(np.isfinite(ex)):
            raise ValueError("expression vector has non-finite entries")
        if np.any(ex < 0.0):
            i = int(np.flatnonzero(ex < 0.0)[0])
            raise ValueError(f"expression vector must be nonnegative; ex[{i}] = {ex[i]}")
        ex.setflags(write=False)
        d = build_degree_scaling(self.W)
        inv_sqrt_d = 1.0 / np.sqrt(d)
        d.setflags(write=False)
        inv_sqrt_d.setflags(write=False)
        object.__setattr__(self, "ex", ex)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "inv_sqrt_d", inv_sqrt_d)

    @property
    def n(self):
        return self.W.n

    def _check_len(self, v):
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.n,):
            raise ValueError(f"vector length {v.shape} does not match n={self.n}")
        return v


# -- matrix-free operator applications ---------------------------------------


def apply_damped_adjacency(problem, v):
    """J v = alpha * Dh W Dh v (three scalings around one SpMV)."""
    v = problem._check_len(v)
    w = problem.W.spmv(problem.inv_sqrt_d * v)
    w *= problem.inv_sqrt_d
    w *= problem.alpha
    return w


def apply_scaled_system(problem, v):
    """(I - J) v, the Jacobi-scaled system operator."""
    return problem._check_len(v) - apply_damped_adjacency(problem, v)


def apply_preconditioner(problem, v):
    """(I + J) v, the multiplicative polynomial preconditioner."""
    return problem._check_len(v) + apply_damped_adjacency(problem, v)


def apply_preconditioned_system(problem, v):
    """(I - J^2) v via two nested J applications."""
    v = problem._check_len(v)
    return v - apply_damped_adjacency(problem, apply_damped_adjacency(problem, v))


def apply_spd_system(problem, v):
    """(D - alpha*W) v."""
    v = problem._check_len(v)
    w = problem.W.spmv(v)
    w *= -problem.alpha
    w += problem.d * v
    return w


_APPLY = {
    "damped_adjacency": apply_damped_adjacency,
    "scaled_system": apply_scaled_system,
    "preconditioner": apply_preconditioner,
    "preconditioned_system": apply_preconditioned_system,
    "spd_system": apply_spd_system,
}


@dataclass(frozen=True)
class OperatorHandle:
    """Matrix-free handle for one symmetric operator of a problem."""

    problem: GeneRankProblem
    kind: str

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}; expected one of {OPERATOR_KINDS}")

    @property
    def n(self):
        return self.problem.n

    def apply(self, v):
        return _APPLY[self.kind](self.problem, v)

    def to_dense(self, cap=DENSE_CAP_DEFAULT):
        """Dense assembly for verification; refuses n above `cap`."""
        p = self.problem
        if cap is not None and p.n > cap:
            raise ValueError(f"dense assembly refused for n={p.n} > cap={cap}")
        Wd = p.W.to_dense()
        s = p.inv_sqrt_d
        J = p.alpha * (s[:, None] * Wd * s[None, :])
        eye = np.eye(p.n)
        if self.kind == "damped_adjacency":
            return J
        if self.kind == "scaled_system":
            return eye - J
        if self.kind == "preconditioner":
            return eye + J
        if self.kind == "preconditioned_system":
            return eye - J @ J
        return np.diag(p.d) - p.alpha * Wd


# -- right-hand sides ---------------------------------------------------------


def assemble_spd_rhs(problem):
    """(1 - alpha) ex, the right-hand side of the spd form."""
    return (1.0 - problem.alpha) * problem.ex


def assemble_scaled_rhs(problem):
    """(1 - alpha) Dh ex, the right-hand side of the scaled form."""
    return (1.0 - problem.alpha) * (problem.inv_sqrt_d * problem.ex)


# -- solution recovery and ranking --------------------------------------------


@dataclass(frozen=True)
class Solution:
    """Ranking vector plus its spd-form and scaled-form representations.

    ``x = D xhat = D^{1/2} xbar`` entrywise.
    """

    x: np.ndarray
    xhat: np.ndarray
    xbar: np.ndarray
    source_form: str


def recover_solution(form, u, d):
    """Populate all three solution representations from one solved form."""
    if form not in SYSTEM_FORMS:
        raise ValueError(f"unknown system form {form!r}; expected one of {SYSTEM_FORMS}")
    u = np.asarray(u, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if u.shape != d.shape:
        raise ValueError("solution and scaling vectors must have equal length")
    if np.any(d <= 0.0):
        raise RuntimeError("internal error: degree scaling has nonpositive entries")
    sqrt_d = np.sqrt(d)
    if form == "spd":
        xhat = u
        x = d * u
        xbar = sqrt_d * u
    elif form == "scaled":
        xbar = u
        x = sqrt_d * u
        xhat = u / sqrt_d
    else:
        x = u
        xhat = u / d
        xbar = u / sqrt_d
    return Solution(x=x, xhat=xhat, xbar=xbar, source_form=form)


def rank_genes(x):
    """Indices sorted by descending score; ties break by ascending index.

    Returns a 0-based permutation array (stable for equal scores).
    """
    x = np.asarray(x, dtype=np.float64)
    return np.argsort(-x, kind="stable").astype(np.int64)


def write_solution_csv(path, x, gene_ids=None):
    """Export `gene_id,score,rank` rows ordered by rank.

    Without explicit gene ids, rows are labeled by 1-based index.
    """
    x = np.asarray(x, dtype=np.float64)
    order = rank_genes(x)
    if gene_ids is None:
        gene_ids = [str(i + 1) for i in range(x.shape[0])]
    elif len(gene_ids) != x.shape[0]:
        raise ValueError("gene_ids length does not match solution length")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("gene_id,score,rank\n")
        for rank, idx in enumerate(order, start=1):
            fh.write(f"{gene_ids[idx]},{x[idx]:.17g},{rank}\n")
