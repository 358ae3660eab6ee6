"""Spectral verification: eigenvalue bounds, condition numbers, M-matrix checks.

The scaled system I - J and the preconditioned system I - J^2 satisfy a
set of verifiable guarantees for every damping factor alpha in (0, 1):

- the spectrum of I - J lies in [1-alpha, 1+alpha], and when the network
  has at least one edge its smallest eigenvalue equals 1-alpha exactly
  (witness: the indicator of connected nodes, scaled by D^{1/2});
- eigenvalues map as t = 1 - (1 - s)^2 between the two operators, so the
  spectrum of I - J^2 lies in [1-alpha^2, 1);
- the condition number never increases under the preconditioning;
- D - alpha*W, I - J, and I - J^2 are all M-matrices (nonpositive
  off-diagonal entries and entrywise-nonnegative inverse). The shifted
  operator I + J has nonnegative off-diagonal entries, so it is the
  difference operator I - J that carries the Z-matrix structure.

Checks run dense (full eigensolve) up to a configurable cap, and through
seeded Lanczos extreme-eigenvalue estimation beyond it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from generank.model import DENSE_CAP_DEFAULT, OperatorHandle

LANCZOS_ITERS_DEFAULT = 100


# -- dense spectra ------------------------------------------------------------


def dense_spectrum(operator: OperatorHandle, cap=DENSE_CAP_DEFAULT):
    """All eigenvalues of the densely assembled operator, ascending."""
    A = operator.to_dense(cap=cap)
    return np.linalg.eigvalsh(A)


# -- Lanczos extreme eigenvalues ----------------------------------------------


@dataclass(frozen=True)
class LanczosEstimate:
    """Extreme Ritz values with residual-based backward-error bounds."""

    lambda_min: float
    lambda_max: float
    steps: int
    breakdown: bool
    residual_bounds: tuple[float, float]


def extreme_eigs_lanczos(operator, iters, seed=0):
    """Extreme eigenvalue estimates after `iters` Lanczos steps.

    Full reorthogonalization; deterministic for a fixed seed. On
    breakdown (invariant subspace found early) the estimates computed so
    far are returned with the breakdown flag set. ``operator`` is an
    OperatorHandle or any object with ``n`` and ``apply``.
    """
    n = operator.n
    if iters < 2:
        raise ValueError(f"iters must be >= 2, got {iters}")
    iters = min(iters, n)
    rng = np.random.default_rng(seed)
    Q = np.zeros((n, iters))
    alphas = np.zeros(iters)
    betas = np.zeros(max(iters - 1, 0))
    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    Q[:, 0] = q
    u = operator.apply(q)
    alphas[0] = q @ u
    r = u - alphas[0] * q
    breakdown = False
    steps = 1
    for i in range(1, iters):
        r -= Q[:, :i] @ (Q[:, :i].T @ r)
        beta = np.linalg.norm(r)
        if beta < n * 1e-14 * max(abs(alphas[:i]).max(), 1.0):
            breakdown = True
            break
        betas[i - 1] = beta
        q = r / beta
        Q[:, i] = q
        u = operator.apply(q)
        alphas[i] = q @ u
        r = u - alphas[i] * q - beta * Q[:, i - 1]
        steps = i + 1
    T = np.diag(alphas[:steps])
    if steps > 1:
        off = betas[: steps - 1]
        T += np.diag(off, 1) + np.diag(off, -1)
    vals, vecs = np.linalg.eigh(T)
    # |last beta| * |bottom component of the Ritz vector| bounds the
    # eigenvalue backward error for each Ritz pair
    tail = 0.0 if breakdown or steps == n else float(np.linalg.norm(r))
    res_min = abs(tail * vecs[-1, 0])
    res_max = abs(tail * vecs[-1, -1])
    return LanczosEstimate(
        lambda_min=float(vals[0]),
        lambda_max=float(vals[-1]),
        steps=steps,
        breakdown=breakdown,
        residual_bounds=(res_min, res_max),
    )


# -- M-matrix verification -----------------------------------------------------


@dataclass(frozen=True)
class MMatrixVerdict:
    """Three-part M-matrix check: Z-structure, inverse sign, positive witness."""

    is_z_matrix: bool
    inverse_nonnegative: bool
    witness_positive: bool
    witness: np.ndarray
    min_off_diagonal_excess: float
    min_inverse_entry: float

    @property
    def is_m_matrix(self):
        return self.is_z_matrix and self.inverse_nonnegative and self.witness_positive


def verify_m_matrix(A, z_tol=1e-14, inverse_tol=-1e-12):
    """Check the M-matrix property of a dense symmetric matrix.

    (a) off-diagonal entries <= z_tol, (b) dense inverse entrywise
    >= inverse_tol, (c) the witness v = A^{-1} e is strictly positive.
    Raises numpy.linalg.LinAlgError for singular input.
    """
    A = np.asarray(A, dtype=np.float64)
    n = A.shape[0]
    off = A - np.diag(np.diag(A))
    max_off = float(off.max()) if n > 1 else 0.0
    is_z = max_off <= z_tol
    try:
        inv = np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"matrix is singular; M-matrix check impossible: {exc}")
    min_inv = float(inv.min())
    inverse_ok = min_inv >= inverse_tol
    witness = inv @ np.ones(n)
    witness_ok = bool(np.all(witness > 0.0))
    return MMatrixVerdict(
        is_z_matrix=is_z,
        inverse_nonnegative=inverse_ok,
        witness_positive=witness_ok,
        witness=witness,
        min_off_diagonal_excess=max_off,
        min_inverse_entry=min_inv,
    )


# -- claim suite ---------------------------------------------------------------


@dataclass(frozen=True)
class ClaimVerdict:
    """One verified claim: pass/fail/skip plus the measured quantities."""

    name: str
    passed: bool | None  # None = skipped (not applicable)
    measured: dict
    detail: str = ""

    @property
    def skipped(self):
        return self.passed is None


@dataclass(frozen=True)
class SpectralReport:
    """Extreme eigenvalues and condition numbers of both system operators."""

    lambda_min_s: float
    lambda_max_s: float
    lambda_min_t: float
    lambda_max_t: float
    cond_s: float
    cond_t: float
    method: str  # dense | lanczos
    residual_bounds: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "lambda_min_scaled": self.lambda_min_s,
            "lambda_max_scaled": self.lambda_max_s,
            "lambda_min_preconditioned": self.lambda_min_t,
            "lambda_max_preconditioned": self.lambda_max_t,
            "cond_scaled": self.cond_s,
            "cond_preconditioned": self.cond_t,
            "method": self.method,
            "residual_bounds": self.residual_bounds,
        }


def spectral_report(problem, dense_cap=DENSE_CAP_DEFAULT, lanczos_iters=LANCZOS_ITERS_DEFAULT, seed=0):
    """Extreme eigenvalues and condition numbers of I - J and I - J^2."""
    s_op = OperatorHandle(problem, "scaled_system")
    t_op = OperatorHandle(problem, "preconditioned_system")
    if problem.n <= dense_cap:
        s_eigs = dense_spectrum(s_op, cap=dense_cap)
        t_eigs = dense_spectrum(t_op, cap=dense_cap)
        return SpectralReport(
            lambda_min_s=float(s_eigs[0]),
            lambda_max_s=float(s_eigs[-1]),
            lambda_min_t=float(t_eigs[0]),
            lambda_max_t=float(t_eigs[-1]),
            cond_s=float(s_eigs[-1] / s_eigs[0]),
            cond_t=float(t_eigs[-1] / t_eigs[0]),
            method="dense",
        )
    s_est = extreme_eigs_lanczos(s_op, lanczos_iters, seed=seed)
    t_est = extreme_eigs_lanczos(t_op, lanczos_iters, seed=seed)
    return SpectralReport(
        lambda_min_s=s_est.lambda_min,
        lambda_max_s=s_est.lambda_max,
        lambda_min_t=t_est.lambda_min,
        lambda_max_t=t_est.lambda_max,
        cond_s=s_est.lambda_max / s_est.lambda_min,
        cond_t=t_est.lambda_max / t_est.lambda_min,
        method="lanczos",
        residual_bounds={
            "scaled_system": s_est.residual_bounds,
            "preconditioned_system": t_est.residual_bounds,
        },
    )


def connectivity_witness_residual(problem):
    """Residual of the known extreme eigenpair of the scaled system.

    y = D^{1/2} * indicator(connected nodes) satisfies
    (I - J) y = (1 - alpha) y when the network has at least one edge;
    returns the infinity norm of the defect, scaled by ||y||_inf.
    """
    from generank.model import apply_scaled_system

    deg = problem.W.row_sums()
    x = (deg > 0.0).astype(np.float64)
    y = np.sqrt(problem.d) * x
    norm = float(np.abs(y).max())
    if norm == 0.0:
        return 0.0
    defect = apply_scaled_system(problem, y) - (1.0 - problem.alpha) * y
    return float(np.abs(defect).max() / norm)


def check_spectral_claims(
    problem,
    dense_cap=DENSE_CAP_DEFAULT,
    lanczos_iters=LANCZOS_ITERS_DEFAULT,
    seed=0,
    tol_eig_dense=1e-10,
    tol_eig_lanczos=1e-6,
):
    """Verify the seven documented spectral guarantees for one instance.

    Returns a list of ClaimVerdict. Failures are verdicts, not errors.
    For n above `dense_cap` only the extreme-eigenvalue claims run (via
    Lanczos); structural claims that need dense assembly are skipped
    with an explanatory detail.
    """
    alpha = problem.alpha
    w_zero = problem.W.nnz == 0
    dense = problem.n <= dense_cap
    verdicts = []

    if dense:
        s_eigs = dense_spectrum(OperatorHandle(problem, "scaled_system"), cap=dense_cap)
        t_eigs = dense_spectrum(OperatorHandle(problem, "preconditioned_system"), cap=dense_cap)
        lam_min_s, lam_max_s = float(s_eigs[0]), float(s_eigs[-1])
        lam_min_t, lam_max_t = float(t_eigs[0]), float(t_eigs[-1])
        eig_tol = tol_eig_dense
        method = "dense"
    else:
        s_est = extreme_eigs_lanczos(OperatorHandle(problem, "scaled_system"), lanczos_iters, seed=seed)
        t_est = extreme_eigs_lanczos(OperatorHandle(problem, "preconditioned_system"), lanczos_iters, seed=seed)
        lam_min_s, lam_max_s = s_est.lambda_min, s_est.lambda_max
        lam_min_t, lam_max_t = t_est.lambda_min, t_est.lambda_max
        s_eigs = t_eigs = None
        eig_tol = tol_eig_lanczos
        method = "lanczos"

    # 1. smallest scaled-system eigenvalue equals 1 - alpha (needs an edge)
    if w_zero:
        verdicts.append(
            ClaimVerdict(
                name="min_eigenvalue_equals_one_minus_alpha",
                passed=None,
                measured={},
                detail="empty network: the scaled system is the identity, nothing to check",
            )
        )
    else:
        witness_res = connectivity_witness_residual(problem)
        measured = {
            "lambda_min_scaled": lam_min_s,
            "expected": 1.0 - alpha,
            "witness_residual_inf": witness_res,
            "method": method,
        }
        passed = abs(lam_min_s - (1.0 - alpha)) <= eig_tol and witness_res <= 1e-12
        verdicts.append(
            ClaimVerdict("min_eigenvalue_equals_one_minus_alpha", passed, measured)
        )

    # 2. scaled-system spectrum within [1-alpha, 1+alpha]
    slack = 1e-12
    measured = {
        "lambda_min_scaled": lam_min_s,
        "lambda_max_scaled": lam_max_s,
        "upper_bound_attained": bool(abs(lam_max_s - (1.0 + alpha)) <= 1e-12),
        "method": method,
    }
    passed = lam_min_s >= (1.0 - alpha) - slack and lam_max_s <= (1.0 + alpha) + slack
    verdicts.append(ClaimVerdict("scaled_spectrum_within_damping_bounds", passed, measured))

    # 3. preconditioned spectrum within [1-alpha^2, 1)
    measured = {
        "lambda_min_preconditioned": lam_min_t,
        "lambda_max_preconditioned": lam_max_t,
        "method": method,
    }
    passed = lam_min_t >= (1.0 - alpha * alpha) - 1e-10 and lam_max_t <= 1.0 + 1e-12
    verdicts.append(ClaimVerdict("preconditioned_spectrum_within_bounds", passed, measured))

    # 4. eigenvalue mapping t = 1 - (1 - s)^2 as multisets
    if dense:
        mapped = np.sort(1.0 - (1.0 - s_eigs) ** 2)
        max_dev = float(np.abs(np.sort(t_eigs) - mapped).max())
        verdicts.append(
            ClaimVerdict(
                "eigenvalue_mapping_multiset",
                max_dev <= 1e-10,
                {"max_elementwise_deviation": max_dev},
            )
        )
    else:
        verdicts.append(
            ClaimVerdict(
                "eigenvalue_mapping_multiset",
                None,
                {},
                detail=f"requires the full dense spectrum (n={problem.n} > cap={dense_cap})",
            )
        )

    # 5. conditioning never degrades under the preconditioner
    cond_s = lam_max_s / lam_min_s
    cond_t = lam_max_t / lam_min_t
    measured = {"cond_scaled": cond_s, "cond_preconditioned": cond_t, "method": method}
    if dense:
        passed = cond_t <= cond_s + 1e-8
    else:
        # Lanczos extremes are inner estimates; allow their tolerance
        passed = cond_t <= cond_s * (1.0 + 1e-4) + 1e-8
    verdicts.append(ClaimVerdict("condition_number_not_increased", passed, measured))

    # 6. preconditioned system is an spd M-matrix
    if dense:
        v_t = verify_m_matrix(OperatorHandle(problem, "preconditioned_system").to_dense(cap=dense_cap))
        measured = {
            "is_z_matrix": v_t.is_z_matrix,
            "inverse_nonnegative": v_t.inverse_nonnegative,
            "witness_positive": v_t.witness_positive,
            "lambda_min_preconditioned": lam_min_t,
        }
        verdicts.append(
            ClaimVerdict(
                "preconditioned_is_spd_m_matrix",
                v_t.is_m_matrix and lam_min_t > 0.0,
                measured,
            )
        )
    else:
        verdicts.append(
            ClaimVerdict(
                "preconditioned_is_spd_m_matrix",
                None,
                {},
                detail=f"requires dense assembly (n={problem.n} > cap={dense_cap})",
            )
        )

    # 7. the unscaled and scaled systems are M-matrices
    if dense:
        v_a = verify_m_matrix(OperatorHandle(problem, "spd_system").to_dense(cap=dense_cap))
        v_s = verify_m_matrix(OperatorHandle(problem, "scaled_system").to_dense(cap=dense_cap))
        measured = {
            "spd_system_is_m_matrix": v_a.is_m_matrix,
            "scaled_system_is_m_matrix": v_s.is_m_matrix,
            "spd_min_inverse_entry": v_a.min_inverse_entry,
            "scaled_min_inverse_entry": v_s.min_inverse_entry,
        }
        verdicts.append(
            ClaimVerdict(
                "unscaled_and_scaled_systems_are_m_matrices",
                v_a.is_m_matrix and v_s.is_m_matrix,
                measured,
            )
        )
    else:
        verdicts.append(
            ClaimVerdict(
                "unscaled_and_scaled_systems_are_m_matrices",
                None,
                {},
                detail=f"requires dense assembly (n={problem.n} > cap={dense_cap})",
            )
        )

    return verdicts
