"""Problem definition, operators, right-hand sides, and back-transforms."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generank import (
    GeneRankProblem,
    OperatorHandle,
    SparseSymMatrix,
    apply_damped_adjacency,
    apply_preconditioned_system,
    apply_preconditioner,
    apply_scaled_system,
    apply_spd_system,
    assemble_scaled_rhs,
    assemble_spd_rhs,
    build_degree_scaling,
    rank_genes,
    recover_solution,
    write_solution_csv,
)

from conftest import (
    dense_generank_solution,
    dense_operators,
    random_adjacency,
)


# -- degree scaling ------------------------------------------------------------


def test_degree_scaling_star(star_matrix):
    assert build_degree_scaling(star_matrix).tolist() == [2.0, 1.0, 1.0]


def test_degree_scaling_zero_matrix(zero_matrix):
    assert build_degree_scaling(zero_matrix).tolist() == [1.0, 1.0, 1.0, 1.0]


def test_degree_scaling_complete_graph():
    rows, cols = np.triu_indices(4, k=1)
    K4 = SparseSymMatrix.from_edges(4, rows, cols)
    assert build_degree_scaling(K4).tolist() == [3.0, 3.0, 3.0, 3.0]


# -- problem validation ----------------------------------------------------------


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
def test_alpha_endpoints_rejected(star_matrix, alpha):
    with pytest.raises(ValueError, match="open interval"):
        GeneRankProblem(star_matrix, alpha, np.ones(3))


def test_negative_expression_rejected(star_matrix):
    with pytest.raises(ValueError, match="nonnegative"):
        GeneRankProblem(star_matrix, 0.5, np.array([1.0, -0.1, 1.0]))


def test_expression_length_mismatch(star_matrix):
    with pytest.raises(ValueError, match="does not match"):
        GeneRankProblem(star_matrix, 0.5, np.ones(4))


def test_non_finite_expression_rejected(star_matrix):
    with pytest.raises(ValueError, match="finite"):
        GeneRankProblem(star_matrix, 0.5, np.array([1.0, np.nan, 1.0]))


def test_non_adjacency_matrix_rejected():
    weighted = SparseSymMatrix(2, [0, 1, 2], [1, 0], [0.5, 0.5])
    with pytest.raises(ValueError, match="equal 1"):
        GeneRankProblem(weighted, 0.5, np.ones(2))


def test_degree_scaling_consistent_with_matrix(star_problem):
    np.testing.assert_array_equal(star_problem.d, build_degree_scaling(star_problem.W))


# -- operator applications --------------------------------------------------------


def test_damped_adjacency_star_frozen_value(star_problem):
    v = np.array([math.sqrt(2.0), 1.0, 1.0])
    expect = np.array([1.0 / math.sqrt(2.0), 0.5, 0.5])
    np.testing.assert_allclose(apply_damped_adjacency(star_problem, v), expect, rtol=1e-15)


def test_operators_on_zero_matrix(zero_matrix):
    p = GeneRankProblem(zero_matrix, 0.7, np.ones(4))
    v = np.array([1.0, -2.0, 3.0, 0.5])
    assert apply_damped_adjacency(p, v).tolist() == [0.0] * 4
    np.testing.assert_array_equal(apply_scaled_system(p, v), v)
    np.testing.assert_array_equal(apply_preconditioner(p, v), v)
    np.testing.assert_array_equal(apply_preconditioned_system(p, v), v)


def test_damped_adjacency_linear_in_alpha(star_matrix):
    rng = np.random.default_rng(0)
    v = rng.standard_normal(3)
    lo = apply_damped_adjacency(GeneRankProblem(star_matrix, 0.4, np.ones(3)), v)
    hi = apply_damped_adjacency(GeneRankProblem(star_matrix, 0.8, np.ones(3)), v)
    np.testing.assert_allclose(hi, 2.0 * lo, rtol=1e-15)


@given(seed=st.integers(0, 2**32 - 1), alpha=st.sampled_from([0.5, 0.75, 0.8, 0.99]))
@settings(max_examples=20, deadline=None)
def test_operators_match_dense_oracle(seed, alpha):
    n = 40
    W, Wd = random_adjacency(seed, n, density=0.15)
    ops = dense_operators(Wd, alpha)
    p = GeneRankProblem(W, alpha, np.ones(n))
    rng = np.random.default_rng(seed + 1)
    v = rng.standard_normal(n)
    np.testing.assert_allclose(apply_damped_adjacency(p, v), ops["J"] @ v, atol=1e-12)
    np.testing.assert_allclose(apply_scaled_system(p, v), ops["S"] @ v, atol=1e-12)
    np.testing.assert_allclose(apply_preconditioner(p, v), ops["M"] @ v, atol=1e-12)
    np.testing.assert_allclose(apply_preconditioned_system(p, v), ops["T"] @ v, atol=1e-12)
    np.testing.assert_allclose(apply_spd_system(p, v), ops["A"] @ v, atol=1e-12)


def test_preconditioned_equals_composition():
    W, _ = random_adjacency(17, 200, density=0.05)
    p = GeneRankProblem(W, 0.8, np.ones(200))
    rng = np.random.default_rng(18)
    v = rng.standard_normal(200)
    lhs = apply_preconditioned_system(p, v)
    rhs = apply_preconditioner(p, apply_scaled_system(p, v))
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.abs(lhs).max())


@pytest.mark.parametrize("kind", ["scaled_system", "preconditioner", "preconditioned_system", "spd_system"])
def test_operator_symmetry_as_bilinear_form(kind):
    W, _ = random_adjacency(23, 150, density=0.08)
    p = GeneRankProblem(W, 0.75, np.ones(150))
    op = OperatorHandle(p, kind)
    rng = np.random.default_rng(24)
    v = rng.standard_normal(150)
    w = rng.standard_normal(150)
    left = op.apply(v) @ w
    right = v @ op.apply(w)
    assert abs(left - right) <= 1e-12 * max(abs(left), abs(right), 1.0)


def test_operator_handle_validation(star_problem):
    with pytest.raises(ValueError, match="unknown operator kind"):
        OperatorHandle(star_problem, "inverse")
    with pytest.raises(ValueError, match="refused"):
        OperatorHandle(star_problem, "spd_system").to_dense(cap=2)


def test_operator_dimension_mismatch(star_problem):
    with pytest.raises(ValueError, match="does not match"):
        apply_damped_adjacency(star_problem, np.ones(5))


# -- right-hand sides --------------------------------------------------------------


def test_rhs_star_frozen_values(star_problem):
    np.testing.assert_allclose(assemble_spd_rhs(star_problem), [0.5, 0.5, 0.5], rtol=1e-15)
    np.testing.assert_allclose(
        assemble_scaled_rhs(star_problem),
        [0.5 / math.sqrt(2.0), 0.5, 0.5],
        rtol=1e-15,
    )


def test_rhs_scales_with_one_minus_alpha(star_matrix):
    p = GeneRankProblem(star_matrix, 0.99, np.ones(3))
    np.testing.assert_allclose(assemble_spd_rhs(p), 0.01 * np.ones(3), rtol=1e-12)


def test_zero_expression_gives_zero_solution(star_matrix):
    from generank import SolverConfig, solve_cg

    p = GeneRankProblem(star_matrix, 0.5, np.zeros(3))
    report = solve_cg(p, SolverConfig(method="cg", tol=1e-12))
    assert report.converged
    assert report.iterations == 0
    assert report.solution.x.tolist() == [0.0, 0.0, 0.0]


# -- solution recovery ---------------------------------------------------------------


def test_recover_solution_star_oracle(star_matrix):
    # oracle first: dense direct solve of the spd form
    Wd = np.array([[0.0, 1, 1], [1, 0, 0], [1, 0, 0]])
    x_oracle, xhat_oracle = dense_generank_solution(Wd, 0.5, np.ones(3))
    np.testing.assert_allclose(xhat_oracle, [2.0 / 3.0, 5.0 / 6.0, 5.0 / 6.0], rtol=1e-14)
    np.testing.assert_allclose(x_oracle, [4.0 / 3.0, 5.0 / 6.0, 5.0 / 6.0], rtol=1e-14)

    sol = recover_solution("spd", xhat_oracle, np.array([2.0, 1.0, 1.0]))
    np.testing.assert_allclose(sol.x, x_oracle, rtol=1e-14)
    np.testing.assert_allclose(sol.xbar, np.sqrt([2.0, 1.0, 1.0]) * xhat_oracle, rtol=1e-14)
    assert sol.source_form == "spd"


def test_recover_solution_all_forms_consistent():
    rng = np.random.default_rng(3)
    d = rng.uniform(1.0, 9.0, size=20)
    x = rng.standard_normal(20)
    from_spd = recover_solution("spd", x / d, d)
    from_scaled = recover_solution("scaled", x / np.sqrt(d), d)
    from_plain = recover_solution("nonsymmetric", x, d)
    for sol in (from_spd, from_scaled, from_plain):
        np.testing.assert_allclose(sol.x, x, rtol=1e-10)
        np.testing.assert_allclose(sol.x, d * sol.xhat, rtol=1e-10)
        np.testing.assert_allclose(sol.x, np.sqrt(d) * sol.xbar, rtol=1e-10)


def test_recover_zero_matrix_all_forms_coincide(zero_matrix):
    alpha = 0.6
    ex = np.array([1.0, 2.0, 0.0, 4.0])
    expect = (1.0 - alpha) * ex
    sol = recover_solution("spd", expect, np.ones(4))
    np.testing.assert_allclose(sol.x, expect, rtol=1e-15)
    np.testing.assert_allclose(sol.xhat, expect, rtol=1e-15)
    np.testing.assert_allclose(sol.xbar, expect, rtol=1e-15)


def test_cross_form_agreement_dense_oracle():
    # both symmetric forms solved densely must recover the same x
    for seed in range(5):
        n = 60
        W, Wd = random_adjacency(seed, n, density=0.1)
        alpha = [0.5, 0.75, 0.8, 0.99][seed % 4]
        rng = np.random.default_rng(seed + 50)
        ex = rng.random(n)
        ops = dense_operators(Wd, alpha)
        d = ops["d"]
        xhat = np.linalg.solve(ops["A"], (1.0 - alpha) * ex)
        xbar = np.linalg.solve(ops["S"], (1.0 - alpha) * ex / np.sqrt(d))
        x_spd = recover_solution("spd", xhat, d).x
        x_scaled = recover_solution("scaled", xbar, d).x
        rel = np.abs(x_spd - x_scaled).max() / np.abs(x_spd).max()
        assert rel < 1e-8


def test_recover_rejects_bad_inputs():
    with pytest.raises(ValueError, match="unknown system form"):
        recover_solution("qr", np.ones(2), np.ones(2))
    with pytest.raises(RuntimeError, match="nonpositive"):
        recover_solution("spd", np.ones(2), np.array([1.0, 0.0]))


# -- ranking ---------------------------------------------------------------------------


def test_rank_genes_star_solution():
    x = np.array([4.0 / 3.0, 5.0 / 6.0, 5.0 / 6.0])
    assert rank_genes(x).tolist() == [0, 1, 2]  # tie between 1 and 2 by index


def test_rank_genes_constant_is_identity():
    assert rank_genes(np.ones(5)).tolist() == [0, 1, 2, 3, 4]


def test_rank_genes_increasing_is_reversed():
    assert rank_genes(np.arange(6.0)).tolist() == [5, 4, 3, 2, 1, 0]


def test_write_solution_csv(tmp_path):
    path = tmp_path / "ranking.csv"
    write_solution_csv(path, np.array([0.25, 1.5, 0.25]), gene_ids=["a", "b", "c"])
    lines = path.read_text().splitlines()
    assert lines[0] == "gene_id,score,rank"
    assert lines[1].startswith("b,1.5,1")
    assert lines[2].startswith("a,0.25,2")
    assert lines[3].startswith("c,0.25,3")
    with pytest.raises(ValueError, match="gene_ids length"):
        write_solution_csv(path, np.ones(3), gene_ids=["a"])


# -- M-matrix structure of the spd system ------------------------------------------------


@pytest.mark.parametrize("alpha", [0.5, 0.75, 0.8, 0.99])
def test_spd_system_has_nonnegative_inverse(alpha):
    for seed in range(6):
        n = 50
        _, Wd = random_adjacency(seed, n, density=0.1)
        d = np.where(Wd.sum(axis=1) > 0, Wd.sum(axis=1), 1.0)
        A = np.diag(d) - alpha * Wd
        inv = np.linalg.inv(A)
        assert inv.min() >= -1e-12
        witness = np.linalg.solve(A, np.ones(n))
        assert witness.min() > 0.0
