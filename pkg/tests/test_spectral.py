"""Spectral verification: spectra, Lanczos extremes, M-matrix checks, claims."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generank import (
    GeneRankProblem,
    OperatorHandle,
    SparseSymMatrix,
    check_spectral_claims,
    dense_spectrum,
    extreme_eigs_lanczos,
    spectral_report,
    verify_m_matrix,
)
from generank.spectral import connectivity_witness_residual

from conftest import dense_operators, random_adjacency


# -- dense spectra -------------------------------------------------------------


def test_star_scaled_spectrum(star_problem):
    eigs = dense_spectrum(OperatorHandle(star_problem, "scaled_system"))
    np.testing.assert_allclose(eigs, [0.5, 1.0, 1.5], atol=1e-12)


def test_star_preconditioned_spectrum(star_problem):
    # mapping 1-(1-s)^2 applied to {0.5, 1, 1.5} gives {0.75, 1, 0.75}
    eigs = dense_spectrum(OperatorHandle(star_problem, "preconditioned_system"))
    np.testing.assert_allclose(eigs, [0.75, 0.75, 1.0], atol=1e-12)


def test_zero_matrix_spectrum_is_all_ones(zero_matrix):
    p = GeneRankProblem(zero_matrix, 0.5, np.ones(4))
    eigs = dense_spectrum(OperatorHandle(p, "scaled_system"))
    np.testing.assert_allclose(eigs, np.ones(4), atol=1e-14)


def test_dense_spectrum_refuses_above_cap(star_problem):
    with pytest.raises(ValueError, match="refused"):
        dense_spectrum(OperatorHandle(star_problem, "scaled_system"), cap=2)


@given(seed=st.integers(0, 2**32 - 1), alpha=st.sampled_from([0.5, 0.75, 0.8, 0.99]))
@settings(max_examples=20, deadline=None)
def test_eigenvalue_mapping_multiset(seed, alpha):
    n = 40
    W, Wd = random_adjacency(seed, n, density=0.15)
    p = GeneRankProblem(W, alpha, np.ones(n))
    s_eigs = dense_spectrum(OperatorHandle(p, "scaled_system"))
    t_eigs = dense_spectrum(OperatorHandle(p, "preconditioned_system"))
    mapped = np.sort(1.0 - (1.0 - s_eigs) ** 2)
    assert np.abs(np.sort(t_eigs) - mapped).max() <= 1e-10
    # independent dense-oracle cross-check of both spectra
    ops = dense_operators(Wd, alpha)
    np.testing.assert_allclose(s_eigs, np.linalg.eigvalsh(ops["S"]), atol=1e-10)
    np.testing.assert_allclose(t_eigs, np.linalg.eigvalsh(ops["T"]), atol=1e-10)


def test_preconditioned_spectrum_strictly_below_one_unless_s_has_unit_eigenvalue():
    for seed in range(4):
        n = 50
        W, _ = random_adjacency(seed, n, density=0.1)
        p = GeneRankProblem(W, 0.8, np.ones(n))
        t_eigs = dense_spectrum(OperatorHandle(p, "preconditioned_system"))
        assert t_eigs[-1] <= 1.0 + 1e-12
        s_eigs = dense_spectrum(OperatorHandle(p, "scaled_system"))
        has_unit_s = np.any(np.abs(s_eigs - 1.0) <= 1e-10)
        attains_one = np.abs(t_eigs[-1] - 1.0) <= 1e-10
        assert attains_one == has_unit_s


# -- Lanczos -------------------------------------------------------------------


def test_lanczos_star_exact_at_full_dimension(star_problem):
    est = extreme_eigs_lanczos(OperatorHandle(star_problem, "scaled_system"), iters=3, seed=0)
    assert abs(est.lambda_min - 0.5) < 1e-10
    assert abs(est.lambda_max - 1.5) < 1e-10


def test_lanczos_matches_dense_at_full_iters():
    n = 100
    W, _ = random_adjacency(31, n, density=0.08)
    p = GeneRankProblem(W, 0.9, np.ones(n))
    op = OperatorHandle(p, "scaled_system")
    dense = dense_spectrum(op)
    est = extreme_eigs_lanczos(op, iters=n, seed=3)
    assert abs(est.lambda_min - dense[0]) < 1e-8
    assert abs(est.lambda_max - dense[-1]) < 1e-8


def test_lanczos_deterministic_per_seed(star_problem):
    W, _ = random_adjacency(12, 150, density=0.05)
    p = GeneRankProblem(W, 0.75, np.ones(150))
    op = OperatorHandle(p, "scaled_system")
    a = extreme_eigs_lanczos(op, iters=20, seed=42)
    b = extreme_eigs_lanczos(op, iters=20, seed=42)
    assert (a.lambda_min, a.lambda_max) == (b.lambda_min, b.lambda_max)


def test_lanczos_breakdown_on_identity(zero_matrix):
    # the scaled system of an empty network is the identity: the Krylov
    # space collapses after one step
    p = GeneRankProblem(zero_matrix, 0.5, np.ones(4))
    est = extreme_eigs_lanczos(OperatorHandle(p, "scaled_system"), iters=4, seed=0)
    assert est.breakdown
    assert abs(est.lambda_min - 1.0) < 1e-12
    assert abs(est.lambda_max - 1.0) < 1e-12


def test_lanczos_validates_iters(star_problem):
    with pytest.raises(ValueError, match="iters"):
        extreme_eigs_lanczos(OperatorHandle(star_problem, "scaled_system"), iters=1)


# -- M-matrix checks --------------------------------------------------------------


def test_identity_is_m_matrix():
    v = verify_m_matrix(np.eye(4))
    assert v.is_z_matrix and v.inverse_nonnegative and v.witness_positive
    assert v.is_m_matrix


def test_star_spd_system_is_m_matrix(star_problem):
    A = OperatorHandle(star_problem, "spd_system").to_dense()
    # independent dense inverse oracle
    inv = np.linalg.inv(np.array([[2.0, -0.5, -0.5], [-0.5, 1, 0], [-0.5, 0, 1]]))
    assert inv.min() >= -1e-14
    v = verify_m_matrix(A)
    assert v.is_m_matrix
    assert v.witness.min() > 0


def test_positive_offdiagonal_fails_z_check():
    v = verify_m_matrix(np.array([[1.0, 0.5], [0.5, 1.0]]))
    assert not v.is_z_matrix
    assert not v.is_m_matrix


def test_singular_matrix_raises():
    with pytest.raises(np.linalg.LinAlgError):
        verify_m_matrix(np.zeros((3, 3)))


# -- claim suite --------------------------------------------------------------------


def test_star_claims_all_pass_with_expected_conditioning(star_problem):
    verdicts = check_spectral_claims(star_problem)
    assert len(verdicts) == 7
    assert all(v.passed for v in verdicts)
    by_name = {v.name: v for v in verdicts}
    cond = by_name["condition_number_not_increased"].measured
    assert abs(cond["cond_scaled"] - 3.0) < 1e-10
    assert abs(cond["cond_preconditioned"] - 4.0 / 3.0) < 1e-10


def test_zero_matrix_routes_to_remark_path(zero_matrix):
    p = GeneRankProblem(zero_matrix, 0.5, np.ones(4))
    verdicts = check_spectral_claims(p)
    by_name = {v.name: v for v in verdicts}
    lemma = by_name["min_eigenvalue_equals_one_minus_alpha"]
    assert lemma.skipped
    assert "nothing to check" in lemma.detail
    rest = [v for v in verdicts if v.name != lemma.name]
    assert all(v.passed for v in rest)


@pytest.mark.parametrize("alpha", [0.5, 0.75, 0.8, 0.99])
def test_claims_pass_on_random_batch(alpha):
    for seed in range(8):
        W, _ = random_adjacency(seed + 1000, 50, density=0.1)
        p = GeneRankProblem(W, alpha, np.ones(50))
        verdicts = check_spectral_claims(p)
        failed = [v.name for v in verdicts if v.passed is False]
        assert not failed, (alpha, seed, failed)


def test_witness_eigenvector_with_isolated_nodes():
    # nodes 4..7 isolated: the indicator of connected nodes, scaled by
    # sqrt(d), must still be an exact extreme eigenvector
    W = SparseSymMatrix.from_edges(8, [0, 1, 2], [1, 2, 3])
    p = GeneRankProblem(W, 0.8, np.ones(8))
    assert connectivity_witness_residual(p) <= 1e-12
    verdicts = check_spectral_claims(p)
    assert all(v.passed for v in verdicts if not v.skipped)


def test_lanczos_path_above_dense_cap():
    W, _ = random_adjacency(77, 120, density=0.06)
    p = GeneRankProblem(W, 0.75, np.ones(120))
    verdicts = check_spectral_claims(p, dense_cap=50, lanczos_iters=120)
    by_name = {v.name: v for v in verdicts}
    assert by_name["min_eigenvalue_equals_one_minus_alpha"].passed
    assert by_name["scaled_spectrum_within_damping_bounds"].passed
    assert by_name["preconditioned_spectrum_within_bounds"].passed
    assert by_name["eigenvalue_mapping_multiset"].skipped
    assert by_name["preconditioned_is_spd_m_matrix"].skipped
    rep = spectral_report(p, dense_cap=50, lanczos_iters=120)
    assert rep.method == "lanczos"
    dense_rep = spectral_report(p)
    assert dense_rep.method == "dense"
    assert abs(rep.lambda_min_s - dense_rep.lambda_min_s) < 1e-6
    assert abs(rep.lambda_max_s - dense_rep.lambda_max_s) < 1e-4
