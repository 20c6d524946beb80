"""Dense linear-algebra kernels used by every other module.

Spectral radius and stability, determinant sign with overflow-safe pivot
tracking, discrete Lyapunov solves, and a guarded fixed-point solver for the
discrete algebraic Riccati equation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, cho_factor, cho_solve, lu_factor

from . import kernels
from .errors import InvalidInputError, NumericalError

# Direct Kronecker-vectorized Lyapunov solve up to this dimension (n^6 cost);
# the squaring iteration takes over above it.
KRON_MAX_DIM = 12

# |pivot| below this times the max row norm counts as a rank deficiency.
PIVOT_RTOL = 1e-12

_SYMMETRY_RTOL = 1e-10

DARE_TOL = 1e-12
DARE_MAX_ITER = 100_000


def as_square(M, name="matrix"):
    """Coerce to a contiguous float64 n x n array, validating finiteness."""
    out = np.asarray(M, dtype=np.float64)
    if out.ndim == 0:
        out = out.reshape(1, 1)
    out = np.ascontiguousarray(out)
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {out.shape}")
    if out.shape[0] < 1:
        raise InvalidInputError(f"{name} must be at least 1x1")
    if not np.isfinite(out).all():
        raise InvalidInputError(f"{name} contains non-finite entries")
    return out


def require_symmetric(M, name="matrix", rtol=_SYMMETRY_RTOL):
    """Validate symmetry within tolerance and return the symmetrized copy."""
    M = as_square(M, name)
    scale = np.abs(M).max()
    if np.abs(M - M.T).max() > rtol * max(1.0, scale):
        raise InvalidInputError(f"{name} must be symmetric")
    return 0.5 * (M + M.T)


def spectral_radius(M):
    """Largest eigenvalue modulus of a square matrix."""
    M = as_square(M)
    try:
        eigs = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    return float(np.abs(eigs).max())


def is_stable(M):
    """True iff the spectral radius is strictly below one."""
    return spectral_radius(M) < 1.0


def det_sign(M):
    """Sign of det(M) in {+1, -1, 0} without forming the determinant.

    Works off an LU factorization, multiplying pivot signs only, so the
    value cannot overflow. A pivot whose magnitude falls below
    ``PIVOT_RTOL`` times the largest row norm makes the matrix singular to
    working precision and the result 0.
    """
    M = as_square(M)
    scale = float(np.linalg.norm(M, axis=1).max())
    if scale == 0.0:
        return 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(M, check_finite=False)
    diag = np.diag(lu)
    if np.abs(diag).min() <= PIVOT_RTOL * scale:
        return 0
    swaps = int(np.sum(piv != np.arange(M.shape[0])))
    negatives = int(np.sum(diag < 0.0))
    return -1 if (swaps + negatives) % 2 else 1


def solve_discrete_lyapunov(A, Q, method="auto"):
    """Solve S = A S A^T + Q for stable A and symmetric Q.

    Parameters
    ----------
    A : array_like
        Square matrix with spectral radius < 1.
    Q : array_like
        Symmetric right-hand side; positive semi-definite in all intended
        uses, which makes S positive definite whenever Q is.
    method : {'auto', 'kron', 'doubling'}
        'kron' solves the vectorized linear system (I - A (x) A) vec(S) =
        vec(Q) directly; 'doubling' squares A repeatedly, summing the
        geometric series. 'auto' picks 'kron' up to dimension
        ``KRON_MAX_DIM`` and 'doubling' above it.

    Returns
    -------
    numpy.ndarray
        The unique symmetric solution.
    """
    A = as_square(A, "A")
    Q = require_symmetric(Q, "Q")
    if A.shape != Q.shape:
        raise InvalidInputError(
            f"A and Q must share shape, got {A.shape} vs {Q.shape}"
        )
    rho = spectral_radius(A)
    if rho >= 1.0:
        raise InvalidInputError(
            f"Lyapunov requires stable matrix, got spectral radius {rho:.6g}"
        )
    if method == "auto":
        method = "kron" if A.shape[0] <= KRON_MAX_DIM else "doubling"
    if method == "kron":
        n = A.shape[0]
        lhs = np.eye(n * n) - np.kron(A, A)
        try:
            vec = np.linalg.solve(lhs, Q.ravel())
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"Lyapunov Kronecker system is singular: {exc}"
            ) from exc
        S = vec.reshape(n, n)
    elif method == "doubling":
        S = Q.copy()
        Ak = A.copy()
        for _ in range(64):
            update = Ak @ S @ Ak.T
            S = S + update
            if np.linalg.norm(update) <= 1e-14 * np.linalg.norm(S):
                break
            Ak = Ak @ Ak
        else:
            raise NumericalError(
                "Lyapunov squaring iteration failed to converge"
            )
    else:
        raise InvalidInputError(
            f"method must be 'auto', 'kron' or 'doubling', got {method!r}"
        )
    return 0.5 * (S + S.T)


@dataclass(frozen=True)
class DareSolution:
    """Converged Riccati solution.

    ``cost_matrix`` is the symmetric fixed point P, ``gain`` the feedback
    K = (R + B^T P B)^{-1} B^T P A, ``iterations`` the sweep count, and
    ``residual`` the Frobenius norm of the fixed-point defect at P.
    """

    cost_matrix: np.ndarray
    gain: np.ndarray
    iterations: int
    residual: float


def solve_dare(A, B, Q, R, tol=DARE_TOL, max_iter=DARE_MAX_ITER):
    """Solve P = A^T P A - A^T P B (R + B^T P B)^{-1} B^T P A + Q.

    Fixed-point iteration from P = Q, symmetrized each sweep, with the
    inner solve done by Cholesky factorization so extreme R scalings stay
    well-behaved. Convergence is declared when the step size drops below
    ``tol`` relative to max(1, ||P||_F).

    Returns a ``DareSolution``; the closed loop A - B K is checked to be
    stable before returning.
    """
    A = as_square(A, "A")
    n = A.shape[0]
    B = np.ascontiguousarray(B, dtype=np.float64)
    if B.ndim == 0:
        B = B.reshape(1, 1)
    elif B.ndim == 1:
        B = B.reshape(-1, 1)
    if B.ndim != 2 or B.shape[0] != n:
        raise InvalidInputError(f"B must have {n} rows, got shape {B.shape}")
    if not np.isfinite(B).all():
        raise InvalidInputError("B contains non-finite entries")
    Q = require_symmetric(Q, "Q")
    if Q.shape != (n, n):
        raise InvalidInputError(f"Q must have shape ({n}, {n}), got {Q.shape}")
    R = require_symmetric(R, "R")
    if R.shape[0] != B.shape[1]:
        raise InvalidInputError(
            f"R must be {B.shape[1]}x{B.shape[1]}, got {R.shape}"
        )
    try:
        np.linalg.cholesky(R)
    except np.linalg.LinAlgError as exc:
        raise InvalidInputError("R must be positive definite") from exc

    P, iterations, status, last_step = kernels.dare_fixed_point(
        A, B, Q, R, tol, max_iter
    )
    if status == 1:
        raise NumericalError(
            f"Riccati recursion did not converge in {max_iter} iterations "
            f"(last step {last_step:.3e})"
        )
    if status == 2:
        raise NumericalError(
            f"Riccati inner matrix R + B'PB lost positive definiteness at "
            f"iteration {iterations}"
        )
    if status == 3:
        raise NumericalError(
            f"Riccati iterates became non-finite at iteration {iterations}"
        )

    G = R + B.T @ P @ B
    G = 0.5 * (G + G.T)
    try:
        factor = cho_factor(G, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            "Riccati gain system is not positive definite"
        ) from exc
    K = cho_solve(factor, B.T @ P @ A, check_finite=False)
    residual = float(
        np.linalg.norm(A.T @ P @ A - (A.T @ P @ B) @ K + Q - P)
    )
    closed_rho = spectral_radius(A - B @ K)
    if closed_rho >= 1.0:
        raise NumericalError(
            f"Riccati closed loop is unstable (spectral radius {closed_rho:.6g})"
        )
    return DareSolution(
        cost_matrix=P, gain=K, iterations=int(iterations), residual=residual
    )
