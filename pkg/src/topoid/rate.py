"""Exponential decay rates for misclassifying a stable linear system.

The central quantities: a discrepancy functional between system matrices
(two algebraically independent implementations), the whitening change of
coordinates that normalizes the noise, the misclassification decay rate,
and quantitative controllability/stability certificates that sandwich it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matops
from .errors import InvalidInputError

# Relative eigenvalue floor for symmetric square roots; anything at or
# below it means the input violated its positive-definiteness contract.
SQRT_EIG_FLOOR = 1e-14


def _check_stable(theta, name="theta"):
    rho = matops.spectral_radius(theta)
    if rho >= 1.0:
        raise InvalidInputError(
            f"{name} must be stable, got spectral radius {rho:.6g}"
        )
    return theta


def _spd_from(M, name):
    M = matops.require_symmetric(M, name)
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise InvalidInputError(f"{name} must be positive definite") from exc
    return M


def _symmetric_roots(M, name):
    """Return (M^{1/2}, M^{-1/2}) via eigendecomposition, flooring loudly."""
    M = matops.require_symmetric(M, name)
    eigvals, eigvecs = np.linalg.eigh(M)
    if eigvals[-1] <= 0.0 or eigvals[0] <= SQRT_EIG_FLOOR * eigvals[-1]:
        raise InvalidInputError(
            f"{name} is not positive definite (eigenvalue range "
            f"[{eigvals[0]:.3e}, {eigvals[-1]:.3e}])"
        )
    root = (eigvecs * np.sqrt(eigvals)) @ eigvecs.T
    inv_root = (eigvecs / np.sqrt(eigvals)) @ eigvecs.T
    return 0.5 * (root + root.T), 0.5 * (inv_root + inv_root.T)


def rate_function(theta_prime, theta, S_w):
    """Discrepancy of ``theta_prime`` from stable ``theta`` under noise S_w.

    Computed as (1/2) tr(S_w^{-1} D S D^T) where D is the difference and S
    the invariant covariance of (theta, S_w). Nonnegative; zero exactly at
    ``theta_prime == theta``. Invariant under rescaling of S_w.
    """
    theta_prime = matops.as_square(theta_prime, "theta_prime")
    theta = matops.as_square(theta, "theta")
    if theta_prime.shape != theta.shape:
        raise InvalidInputError(
            f"shape mismatch: {theta_prime.shape} vs {theta.shape}"
        )
    _check_stable(theta)
    S_w = _spd_from(S_w, "S_w")
    if S_w.shape != theta.shape:
        raise InvalidInputError("S_w shape does not match theta")
    S = matops.solve_discrete_lyapunov(theta, S_w)
    D = theta_prime - theta
    inner = D @ S @ D.T
    value = 0.5 * float(np.trace(np.linalg.solve(S_w, inner)))
    return max(value, 0.0)


def rate_function_kronecker(theta_prime, theta, S_w):
    """Same discrepancy via the vectorized Kronecker form.

    Evaluates (1/2) vec(S_w^{-1})^T (D (x) D)(I - theta (x) theta)^{-1}
    vec(S_w) with row-major vec. Algebraically identical to
    ``rate_function``; numerically independent, so the two serve as
    cross-checks.
    """
    theta_prime = matops.as_square(theta_prime, "theta_prime")
    theta = matops.as_square(theta, "theta")
    if theta_prime.shape != theta.shape:
        raise InvalidInputError(
            f"shape mismatch: {theta_prime.shape} vs {theta.shape}"
        )
    _check_stable(theta)
    S_w = _spd_from(S_w, "S_w")
    if S_w.shape != theta.shape:
        raise InvalidInputError("S_w shape does not match theta")
    n = theta.shape[0]
    D = theta_prime - theta
    resolvent = np.linalg.inv(np.eye(n * n) - np.kron(theta, theta))
    middle = np.kron(D, D) @ resolvent
    left = np.linalg.inv(S_w).ravel()
    value = 0.5 * float(left @ middle @ S_w.ravel())
    return max(value, 0.0)


def whitened_system(theta, S_w):
    """Change coordinates so the noise covariance becomes the identity.

    Returns (theta_w, cov_w): theta_w = S_w^{-1/2} theta S_w^{1/2} and
    cov_w = S_w^{-1/2} S S_w^{-1/2} with S the invariant covariance.
    theta_w is similar to theta, so the spectrum is unchanged.
    """
    theta = matops.as_square(theta, "theta")
    _check_stable(theta)
    S_w = matops.require_symmetric(S_w, "S_w")
    if S_w.shape != theta.shape:
        raise InvalidInputError("S_w shape does not match theta")
    root, inv_root = _symmetric_roots(S_w, "S_w")
    S = matops.solve_discrete_lyapunov(theta, S_w)
    theta_w = inv_root @ theta @ root
    cov_w = inv_root @ S @ inv_root
    return theta_w, 0.5 * (cov_w + cov_w.T)


def misclassification_rate(theta, S_w):
    """Decay rate of the probability of misclassifying ``theta``.

    Equals half the smallest eigenvalue of (whitened invariant covariance
    minus the identity); strictly positive for stable invertible theta and
    invariant under rescaling of S_w.
    """
    theta = matops.as_square(theta, "theta")
    if matops.det_sign(theta) == 0:
        raise InvalidInputError(
            "misclassification rate requires an invertible theta"
        )
    _, cov_w = whitened_system(theta, S_w)
    lam_min = float(np.linalg.eigvalsh(cov_w)[0])
    return 0.5 * (lam_min - 1.0)


def theoretical_bound(r, a_T):
    """Probability-scale bound exp(-r * a_T)."""
    r = float(r)
    a_T = float(a_T)
    if r < 0.0:
        raise InvalidInputError(f"rate must be nonnegative, got {r}")
    if not a_T > 0.0:
        raise InvalidInputError(f"a_T must be positive, got {a_T}")
    return float(np.exp(-r * a_T))


def strong_controllability_index(A, ell):
    """Smallest singular value of the block row (I, A, ..., A^{ell-1})."""
    A = matops.as_square(A, "A")
    if not isinstance(ell, (int, np.integer)) or ell < 1:
        raise InvalidInputError(f"ell must be a positive integer, got {ell!r}")
    n = A.shape[0]
    blocks = [np.eye(n)]
    for _ in range(int(ell) - 1):
        blocks.append(A @ blocks[-1])
    C = np.hstack(blocks)
    return float(np.linalg.svd(C, compute_uv=False)[-1])


@dataclass(frozen=True)
class StrongStabilityParams:
    """Quantitative stability certificate (kappa, gamma).

    Realized by a similarity A = H L H^{-1} with ||L||_2 <= 1 - gamma and
    cond(H) <= kappa; kappa >= 1 and 0 < gamma <= 1 for any stable A.
    """

    kappa: float
    gamma: float


def strong_stability_params(A):
    """Canonical (kappa, gamma) certificate for a stable matrix.

    Solves A^T P A - P = -I, takes L = P^{1/2} A P^{-1/2}, and returns
    gamma = 1 - ||L||_2 and kappa = cond_2(P^{1/2}). The construction
    guarantees ||L||_2 < 1 whenever A is stable.
    """
    A = matops.as_square(A, "A")
    _check_stable(A, "A")
    P = matops.solve_discrete_lyapunov(A.T, np.eye(A.shape[0]))
    root, inv_root = _symmetric_roots(P, "stability certificate")
    L = root @ A @ inv_root
    norm_L = float(np.linalg.svd(L, compute_uv=False)[0])
    gamma = 1.0 - norm_L
    eigvals = np.linalg.eigvalsh(P)
    kappa = float(np.sqrt(eigvals[-1] / eigvals[0]))
    return StrongStabilityParams(kappa=max(kappa, 1.0), gamma=gamma)


@dataclass(frozen=True)
class RateReport:
    """Misclassification rate with its certificate sandwich.

    ``lower_bound`` (squared controllability index) and ``upper_bound``
    (kappa^2 / (2 gamma - gamma^2)) bracket ``lambda_min_whitened``;
    ``sigma_min_bound`` = half the squared smallest singular value of the
    whitened matrix never exceeds ``rate``.
    """

    rate: float
    lambda_min_whitened: float
    lower_bound: float
    upper_bound: float
    sigma_min_bound: float
    controllability: float
    stability: StrongStabilityParams
    ell: int


def sigma_min_rate_lower_bound(theta, S_w):
    """Half the squared smallest singular value of the whitened matrix.

    A computable floor under the misclassification rate: larger smallest
    singular value means a faster provable decay.
    """
    theta_w, _ = whitened_system(theta, S_w)
    sigma_min = float(np.linalg.svd(theta_w, compute_uv=False)[-1])
    return 0.5 * sigma_min * sigma_min


def rate_bounds(theta, S_w, ell=None):
    """Full rate report: rate, certificates, and the sandwich bounds.

    ``ell`` is the controllability horizon; it defaults to the state
    dimension. Requires stable, invertible ``theta``.
    """
    theta = matops.as_square(theta, "theta")
    n = theta.shape[0]
    if ell is None:
        ell = n
    if not isinstance(ell, (int, np.integer)) or ell < 1:
        raise InvalidInputError(f"ell must be a positive integer, got {ell!r}")
    if matops.det_sign(theta) == 0:
        raise InvalidInputError("rate bounds require an invertible theta")
    theta_w, cov_w = whitened_system(theta, S_w)
    lam_min = float(np.linalg.eigvalsh(cov_w)[0])
    rate = 0.5 * (lam_min - 1.0)
    nu = strong_controllability_index(theta_w, ell)
    stability = strong_stability_params(theta_w)
    kappa, gamma = stability.kappa, stability.gamma
    upper = kappa * kappa / (2.0 * gamma - gamma * gamma)
    sigma_min = float(np.linalg.svd(theta_w, compute_uv=False)[-1])
    return RateReport(
        rate=rate,
        lambda_min_whitened=lam_min,
        lower_bound=nu * nu,
        upper_bound=upper,
        sigma_min_bound=0.5 * sigma_min * sigma_min,
        controllability=nu,
        stability=stability,
        ell=int(ell),
    )
