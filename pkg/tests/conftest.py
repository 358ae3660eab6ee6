"""Shared fixtures and independent dense oracles.

The oracles here never touch the package's sparse kernels or operator
plumbing: they build dense matrices entry by entry from edge lists and
use plain numpy factorizations, so they stay independent of the code
paths they check.
"""
import numpy as np
import pytest

from generank import GeneRankProblem, SparseSymMatrix


# -- dense oracles ------------------------------------------------------------


def dense_from_edges(n, edges):
    """Dense symmetric 0/1 matrix from an undirected edge list."""
    A = np.zeros((n, n))
    for i, j in edges:
        A[i, j] = 1.0
        A[j, i] = 1.0
    return A


def dense_degree_scaling(Wd):
    deg = Wd.sum(axis=1)
    return np.where(deg > 0.0, deg, 1.0)


def dense_operators(Wd, alpha):
    """All five operators assembled densely from first principles."""
    d = dense_degree_scaling(Wd)
    s = 1.0 / np.sqrt(d)
    J = alpha * (s[:, None] * Wd * s[None, :])
    eye = np.eye(Wd.shape[0])
    return {
        "J": J,
        "S": eye - J,
        "M": eye + J,
        "T": eye - J @ J,
        "A": np.diag(d) - alpha * Wd,
        "d": d,
    }


def dense_generank_solution(Wd, alpha, ex):
    """Direct dense solve of the spd form; returns (x, xhat)."""
    d = dense_degree_scaling(Wd)
    A = np.diag(d) - alpha * Wd
    xhat = np.linalg.solve(A, (1.0 - alpha) * np.asarray(ex, dtype=float))
    return d * xhat, xhat


def random_edge_list(rng, n, density):
    """Upper-triangle Bernoulli(density) edge list as (rows, cols)."""
    mask = rng.random((n, n)) < density
    iu = np.triu_indices(n, k=1)
    sel = mask[iu]
    return iu[0][sel].astype(np.int64), iu[1][sel].astype(np.int64)


def random_adjacency(seed, n, density=0.1):
    """Seeded random adjacency plus its dense oracle twin."""
    rng = np.random.default_rng(seed)
    rows, cols = random_edge_list(rng, n, density)
    W = SparseSymMatrix.from_edges(n, rows, cols)
    Wd = dense_from_edges(n, zip(rows.tolist(), cols.tolist()))
    return W, Wd


# -- fixtures ------------------------------------------------------------------

STAR_EDGES = [(0, 1), (0, 2)]


@pytest.fixture
def star_matrix():
    """3-node star: node 0 linked to nodes 1 and 2; degrees (2, 1, 1)."""
    return SparseSymMatrix.from_edges(3, [0, 0], [1, 2])


@pytest.fixture
def star_problem(star_matrix):
    """Star instance with alpha = 1/2 and unit expression changes."""
    return GeneRankProblem(star_matrix, 0.5, np.ones(3))


@pytest.fixture
def zero_matrix():
    return SparseSymMatrix.empty(4)
